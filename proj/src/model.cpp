#include "qualsim/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace qualsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view text, int& out) {
  text = trim(text);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Coefficient Coefficient::parse(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  auto fail = [&]() -> Coefficient {
    throw DataError("invalid coefficient '" + std::string(original) + "'");
  };
  if (text.empty()) return fail();
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty()) || frac.size() > 6) return fail();
  std::int64_t units = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return fail();
    units = units * 10 + (c - '0');
    if (units > 1'000'000'000) return fail();
  }
  std::int64_t micros = 0;
  std::size_t digits = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return fail();
    micros = micros * 10 + (c - '0');
    ++digits;
  }
  for (; digits < 6; ++digits) micros *= 10;
  return from_micros(units * 1'000'000 + micros);
}

std::string Coefficient::to_string() const {
  std::string out = std::to_string(micros_ / 1'000'000);
  std::int64_t frac = micros_ % 1'000'000;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, 6 - digits.size(), '0');
  while (digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

std::optional<SeasonId> SeasonId::parse(std::string_view label) {
  label = trim(label);
  for (int i = 0; i < kSeasonCount; ++i) {
    if (kSeasonLabels[i] == label) return SeasonId{i};
  }
  return std::nullopt;
}

int Dataset::index_of(std::string_view name) const {
  const auto it = std::find(associations.begin(), associations.end(), name);
  return it == associations.end() ? -1 : static_cast<int>(it - associations.begin());
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::season_count: return "season count";
    case ViolationKind::association_count: return "association count";
    case ViolationKind::duplicate_association: return "duplicate association";
    case ViolationKind::missing_association: return "missing association";
    case ViolationKind::duplicate_rank: return "duplicate rank";
    case ViolationKind::rank_out_of_range: return "rank out of range";
    case ViolationKind::missing_profile: return "missing profile";
    case ViolationKind::invalid_profile: return "invalid profile";
    case ViolationKind::late_entrant_presence: return "Kosovo presence";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (const auto& v : violations) out << to_string(v.kind) << ": " << v.message << '\n';
  return out.str();
}

ValidationReport validate_dataset(const Dataset& dataset) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string message) {
    report.violations.push_back({kind, std::move(message)});
  };

  if (dataset.season_count() != kSeasonCount) {
    add(ViolationKind::season_count, "expected 5 seasons, found " + std::to_string(dataset.season_count()));
  }
  if (dataset.association_count() != kAssociationCount) {
    add(ViolationKind::association_count,
        "expected 45 associations, found " + std::to_string(dataset.association_count()));
  }
  std::set<std::string> names;
  for (const auto& name : dataset.associations) {
    if (!names.insert(name).second) add(ViolationKind::duplicate_association, name);
  }

  const int late = dataset.index_of(kLateEntrant);
  for (const auto& table : dataset.seasons) {
    const std::string season(table.season.label());
    if (std::ssize(table.ranks) != dataset.association_count() ||
        std::ssize(table.profiles) != dataset.association_count()) {
      add(ViolationKind::missing_association, season + ": table width does not match association list");
      continue;
    }
    std::set<int> seen;
    auto check_rank = [&](const std::string& who, int rank) {
      if (rank < 1 || rank > 55) add(ViolationKind::rank_out_of_range, season + " " + who);
      if (!seen.insert(rank).second) {
        add(ViolationKind::duplicate_rank, season + " rank " + std::to_string(rank) + " (" + who + ")");
      }
    };
    for (const auto& np : table.non_participants) check_rank(np.name, np.rank);

    for (int a = 0; a < dataset.association_count(); ++a) {
      const auto& name = dataset.associations[a];
      if (!table.ranks[a]) {
        add(ViolationKind::missing_association, season + " " + name);
        continue;
      }
      check_rank(name, *table.ranks[a]);
      const bool expect_present = a != late || table.season.index >= kLateEntrantFirstSeason;
      const auto& profile = table.profiles[a];
      if (a == late) {
        if (profile.has_value() != expect_present) {
          add(ViolationKind::late_entrant_presence,
              season + ": Kosovo " + (expect_present ? "absent" : "present"));
        }
        if (!expect_present && *table.ranks[a] != kLateEntrantSyntheticRank) {
          add(ViolationKind::late_entrant_presence, season + ": synthetic Kosovo row must be ranked 55");
        }
      } else if (!profile) {
        add(ViolationKind::missing_profile, season + " " + name);
      }
      if (profile && (profile->elo <= 0.0 || profile->coefficient.micros() < 0)) {
        add(ViolationKind::invalid_profile, season + " " + name + ": non-positive Elo or negative coefficient");
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string_view to_string(TieKind kind) {
  return kind == TieKind::one_leg ? "one-leg" : "two-leg";
}

std::string_view to_string(RoundStructure structure) {
  return structure == RoundStructure::pairwise ? "pairwise" : "mini-knockout";
}

std::vector<int> FormatSpec::round_sizes(int vacancies) const {
  std::vector<int> sizes;
  int winners = 0;
  for (const auto& round : rounds) {
    int entrants = round.entry ? round.entry->size() : 0;
    if (round.label == vacancy_round) entrants -= vacancies;
    const int teams = entrants + winners;
    sizes.push_back(teams);
    winners = round.structure == RoundStructure::mini_knockout ? 1 : teams / 2;
  }
  return sizes;
}

int FormatSpec::qualifiers_from_rounds(int vacancies) const {
  const auto sizes = round_sizes(vacancies);
  if (sizes.empty()) return 0;
  return rounds.back().structure == RoundStructure::mini_knockout ? 1 : sizes.back() / 2;
}

int FormatSpec::group_stage_teams(int vacancies) const {
  return direct.size() + qualifiers_from_rounds(vacancies);
}

int FormatSpec::clash_count(int vacancies) const {
  const auto sizes = round_sizes(vacancies);
  int clashes = 0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    clashes += rounds[i].structure == RoundStructure::mini_knockout ? 3 : sizes[i] / 2;
  }
  return clashes;
}

void FormatSpec::validate(int vacancies) const {
  auto fail = [&](const std::string& what) { throw FormatError("format '" + name + "': " + what); };
  if (rounds.empty()) fail("no rounds");
  if (direct.size() < 0) fail("invalid direct range");

  std::set<std::string> labels;
  std::vector<RankRange> blocks;
  if (direct.size() > 0) blocks.push_back(direct);
  bool vacancy_found = false;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto& round = rounds[i];
    if (!labels.insert(round.label).second) fail("duplicate round " + round.label);
    if (round.entry) {
      if (round.entry->size() <= 0) fail("empty entry range in " + round.label);
      blocks.push_back(*round.entry);
    }
    if (round.label == vacancy_round) {
      if (!round.entry || round.entry->size() <= vacancies) fail("vacancy round has too few entry ranks");
      vacancy_found = true;
    }
    const bool mini = round.structure == RoundStructure::mini_knockout;
    if (mini && i != 0) fail("mini-knockout must be the first round");
    if (mini != (round.tie == TieKind::one_leg)) fail("only a mini-knockout round is one-leg (" + round.label + ")");
  }
  if (!vacancy_round.empty() && !vacancy_found) fail("unknown vacancy round " + vacancy_round);
  if (vacancy_round.empty() && vacancies != 0) fail("no vacancy round declared");

  std::sort(blocks.begin(), blocks.end(), [](const RankRange& a, const RankRange& b) { return a.first < b.first; });
  if (blocks.empty() || blocks.front().first != 1) fail("ranks must start at 1");
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].first != blocks[i - 1].last + 1) fail("entry ranks overlap or leave a gap");
  }

  const auto sizes = round_sizes(vacancies);
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    if (rounds[i].structure == RoundStructure::mini_knockout) {
      if (sizes[i] != 4) fail("mini-knockout needs exactly 4 teams");
    } else if (sizes[i] <= 0 || sizes[i] % 2 != 0) {
      fail("round " + rounds[i].label + " has " + std::to_string(sizes[i]) + " teams");
    }
  }
}

namespace {

RankRange parse_range(std::string_view text, int line) {
  text = trim(text);
  RankRange range;
  const auto dash = text.find('-');
  bool ok = dash == std::string_view::npos
                ? parse_int(text, range.first) && parse_int(text, range.last)
                : parse_int(text.substr(0, dash), range.first) && parse_int(text.substr(dash + 1), range.last);
  if (!ok || range.first < 1 || range.last < range.first) {
    throw FormatError("line " + std::to_string(line) + ": bad rank range '" + std::string(text) + "'");
  }
  return range;
}

}  // namespace

FormatSpec parse_format(std::string_view text) {
  FormatSpec format;
  bool have_direct = false;
  RoundSpec* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw FormatError("line " + std::to_string(line_no) + ": " + what);
    };

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section");
      auto inner = trim(line.substr(1, line.size() - 2));
      if (!inner.starts_with("round ")) fail("expected [round LABEL]");
      current = &format.rounds.emplace_back();
      current->label = trim(inner.substr(6));
      if (current->label.empty()) fail("round without label");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (!current) {
      if (key == "name") {
        format.name = value;
      } else if (key == "direct") {
        format.direct = value == "none" ? RankRange{1, 0} : parse_range(value, line_no);
        have_direct = true;
      } else if (key == "vacancy") {
        format.vacancy_round = value == "none" ? "" : std::string(value);
      } else {
        fail("unknown key '" + std::string(key) + "'");
      }
    } else if (key == "entry") {
      current->entry = value == "none" ? std::nullopt : std::optional(parse_range(value, line_no));
    } else if (key == "tie") {
      if (value == "one-leg") current->tie = TieKind::one_leg;
      else if (value == "two-leg") current->tie = TieKind::two_leg;
      else fail("tie must be one-leg or two-leg");
    } else if (key == "structure") {
      if (value == "pairwise") current->structure = RoundStructure::pairwise;
      else if (value == "mini-knockout") current->structure = RoundStructure::mini_knockout;
      else fail("structure must be pairwise or mini-knockout");
    } else if (key == "coefficients") {
      if (value == "carried") current->actual_coefficients = false;
      else if (value == "actual") current->actual_coefficients = true;
      else fail("coefficients must be carried or actual");
    } else {
      fail("unknown round key '" + std::string(key) + "'");
    }
  }
  if (format.name.empty()) throw FormatError("format has no name");
  if (!have_direct) throw FormatError("format '" + format.name + "' has no direct range");
  return format;
}

FormatSpec load_format(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open format file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_format(buffer.str());
}

std::string format_to_text(const FormatSpec& format) {
  auto range = [](const std::optional<RankRange>& r) {
    if (!r || r->size() <= 0) return std::string("none");
    return std::to_string(r->first) + "-" + std::to_string(r->last);
  };
  std::ostringstream out;
  out << "name = " << format.name << '\n'
      << "direct = " << range(format.direct) << '\n'
      << "vacancy = " << (format.vacancy_round.empty() ? "none" : format.vacancy_round) << '\n';
  for (const auto& round : format.rounds) {
    out << "\n[round " << round.label << "]\n"
        << "entry = " << range(round.entry) << '\n'
        << "tie = " << to_string(round.tie) << '\n'
        << "structure = " << to_string(round.structure) << '\n'
        << "coefficients = " << (round.actual_coefficients ? "actual" : "carried") << '\n';
  }
  return out.str();
}

}  // namespace qualsim
