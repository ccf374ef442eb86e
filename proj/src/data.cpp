#include "qualsim/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"

namespace qualsim::data {

namespace fs = std::filesystem;

ParseError::ParseError(const std::string& file, std::size_t row, std::size_t column, const std::string& what)
    : DataError(file + (row ? ":" + std::to_string(row) : "") + (column ? ":" + std::to_string(column) : "") +
                ": " + what),
      row_(row),
      column_(column) {}

ValidationError::ValidationError(ValidationReport report)
    : DataError("dataset validation failed:\n" + report.summary()), report_(std::move(report)) {}

std::size_t CsvTable::column(std::string_view name, const std::string& file) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError(file, 1, 0, "missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text, const std::string& file) {
  CsvTable table;
  std::size_t row_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
    }
    if (quoted) throw ParseError(file, row_no, fields.size() + 1, "unterminated quoted field");
    fields.push_back(std::move(field));

    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(file, row_no, std::min(fields.size(), table.header.size()) + 1,
                       "expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw ParseError(file, 0, 0, "empty file");
  return table;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.filename().string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct LocatedTable {
  std::string file;
  CsvTable csv;
};

LocatedTable read_table(const fs::path& directory, const std::string& name) {
  return {name, parse_csv(read_file(directory / name), name)};
}

// Data rows start on line 2.
std::size_t line_of(std::size_t row_index) { return row_index + 2; }

int parse_integer(const std::string& text, const std::string& file, std::size_t row, std::size_t column) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ParseError(file, row, column, "not an integer: '" + text + "'");
  return value;
}

double parse_real(const std::string& text, const std::string& file, std::size_t row, std::size_t column) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError(file, row, column, "not a number: '" + text + "'");
  }
  return value;
}

SeasonId parse_season(const std::string& text, const std::string& file, std::size_t row, std::size_t column) {
  const auto season = SeasonId::parse(text);
  if (!season) throw ParseError(file, row, column, "unknown season '" + text + "'");
  return *season;
}

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

DatasetBundle load_fixtures(const fs::path& directory, bool validate) {
  const auto ranks = read_table(directory, "ranks.csv");
  const auto coefficients = read_table(directory, "coefficients.csv");
  const auto elos = read_table(directory, "elo.csv");

  Dataset dataset;
  dataset.seasons.resize(kSeasonCount);
  for (int s = 0; s < kSeasonCount; ++s) dataset.seasons[s].season = SeasonId{s};

  const auto c_assoc = ranks.csv.column("association", ranks.file);
  const auto c_season = ranks.csv.column("season", ranks.file);
  const auto c_rank = ranks.csv.column("rank", ranks.file);
  const auto c_part = ranks.csv.column("participates", ranks.file);

  // First pass fixes the association order.
  for (std::size_t i = 0; i < ranks.csv.rows.size(); ++i) {
    const auto& row = ranks.csv.rows[i];
    const auto& part = row[c_part];
    if (part != "0" && part != "1") throw ParseError(ranks.file, line_of(i), c_part + 1, "participates must be 0 or 1");
    if (part == "1" && dataset.index_of(row[c_assoc]) < 0) dataset.associations.push_back(row[c_assoc]);
  }
  for (auto& table : dataset.seasons) {
    table.ranks.assign(dataset.associations.size(), std::nullopt);
    table.profiles.assign(dataset.associations.size(), std::nullopt);
  }
  for (std::size_t i = 0; i < ranks.csv.rows.size(); ++i) {
    const auto& row = ranks.csv.rows[i];
    const auto season = parse_season(row[c_season], ranks.file, line_of(i), c_season + 1);
    const int rank = parse_integer(row[c_rank], ranks.file, line_of(i), c_rank + 1);
    auto& table = dataset.seasons[season.index];
    if (row[c_part] == "0") {
      table.non_participants.push_back({row[c_assoc], rank});
      continue;
    }
    auto& slot = table.ranks[dataset.index_of(row[c_assoc])];
    if (slot) throw ParseError(ranks.file, line_of(i), 0, "duplicate row for " + row[c_assoc] + " " + row[c_season]);
    slot = rank;
  }

  // (association, season) -> value, per file.
  auto read_values = [&](const LocatedTable& t, auto parse) {
    using Value = decltype(parse(std::string{}, std::size_t{}, std::size_t{}));
    std::map<std::pair<int, int>, Value> values;
    const auto a_col = t.csv.column("association", t.file);
    const auto s_col = t.csv.column("season", t.file);
    const auto v_col = t.csv.column("value", t.file);
    for (std::size_t i = 0; i < t.csv.rows.size(); ++i) {
      const auto& row = t.csv.rows[i];
      const int a = dataset.index_of(row[a_col]);
      if (a < 0) throw ParseError(t.file, line_of(i), a_col + 1, "unknown association '" + row[a_col] + "'");
      const auto season = parse_season(row[s_col], t.file, line_of(i), s_col + 1);
      if (!values.emplace(std::pair{a, season.index}, parse(row[v_col], line_of(i), v_col + 1)).second) {
        throw ParseError(t.file, line_of(i), 0, "duplicate row for " + row[a_col] + " " + row[s_col]);
      }
    }
    return values;
  };
  const auto coefficient_values = read_values(coefficients, [&](const std::string& text, std::size_t r, std::size_t c) {
    try {
      return Coefficient::parse(text);
    } catch (const DataError& e) {
      throw ParseError(coefficients.file, r, c, e.what());
    }
  });
  const auto elo_values = read_values(elos, [&](const std::string& text, std::size_t r, std::size_t c) {
    return parse_real(text, elos.file, r, c);
  });

  for (const auto& [key, coefficient] : coefficient_values) {
    const auto elo = elo_values.find(key);
    if (elo == elo_values.end()) {
      throw ParseError(elos.file, 0, 0,
                       "no Elo for " + dataset.associations[key.first] + " " +
                           std::string(kSeasonLabels[key.second]));
    }
    dataset.seasons[key.second].profiles[key.first] = ChampionProfile{coefficient, elo->second};
  }
  for (const auto& [key, elo] : elo_values) {
    if (!coefficient_values.contains(key)) {
      throw ParseError(coefficients.file, 0, 0,
                       "no coefficient for " + dataset.associations[key.first] + " " +
                           std::string(kSeasonLabels[key.second]));
    }
  }

  if (validate) {
    auto report = validate_dataset(dataset);
    if (!report.ok()) throw ValidationError(std::move(report));
  }
  return {std::move(dataset), "fixtures:" + directory.string()};
}

void write_fixtures(const Dataset& dataset, const fs::path& directory) {
  fs::create_directories(directory);
  std::ofstream ranks(directory / "ranks.csv");
  std::ofstream coefficients(directory / "coefficients.csv");
  std::ofstream elos(directory / "elo.csv");
  if (!ranks || !coefficients || !elos) throw DataError("cannot write fixtures to " + directory.string());
  ranks << "association,season,rank,participates\n";
  coefficients << "association,season,value\n";
  elos << "association,season,value\n";
  for (int a = 0; a < dataset.association_count(); ++a) {
    for (const auto& table : dataset.seasons) {
      const auto& name = dataset.associations[a];
      const auto season = table.season.label();
      if (table.ranks[a]) ranks << name << ',' << season << ',' << *table.ranks[a] << ",1\n";
      if (const auto& p = table.profiles[a]) {
        coefficients << name << ',' << season << ',' << p->coefficient.to_string() << '\n';
        elos << name << ',' << season << ',' << format_real(p->elo) << '\n';
      }
    }
  }
  for (const auto& table : dataset.seasons) {
    for (const auto& np : table.non_participants) {
      ranks << np.name << ',' << table.season.label() << ',' << np.rank << ",0\n";
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<ClubMapping> load_club_mapping(const fs::path& path) {
  const std::string file = path.filename().string();
  const auto csv = parse_csv(read_file(path), file);
  const auto a_col = csv.column("association", file);
  const auto s_col = csv.column("season", file);
  const auto c_col = csv.column("club", file);
  std::vector<ClubMapping> mappings;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    parse_season(row[s_col], file, line_of(i), s_col + 1);
    auto it = std::find_if(mappings.begin(), mappings.end(), [&](const ClubMapping& m) { return m.season == row[s_col]; });
    if (it == mappings.end()) {
      mappings.push_back({row[s_col], {}});
      it = std::prev(mappings.end());
    }
    it->club_of[row[a_col]] = row[c_col];
  }
  return mappings;
}

std::string EloSnapshot::to_csv() const {
  std::string out = "association,season,value\n";
  for (const auto& row : rows) out += row[0] + ',' + row[1] + ',' + row[2] + '\n';
  return out;
}

EloSnapshot parse_clubelo_snapshot(std::string_view body, const ClubMapping& mapping) {
  const std::string file = "clubelo response";
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) throw FetchError("no rows", false);
  const auto csv = parse_csv(body, file);
  if (csv.rows.empty()) throw FetchError("no rows", false);
  const auto club_col = csv.column("Club", file);
  const auto elo_col = csv.column("Elo", file);

  std::map<std::string, std::string> elo_of_club;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    parse_real(row[elo_col], file, line_of(i), elo_col + 1);
    elo_of_club.emplace(row[club_col], row[elo_col]);
  }

  EloSnapshot snapshot;
  for (const auto& [association, club] : mapping.club_of) {
    const auto it = elo_of_club.find(club);
    if (it == elo_of_club.end()) {
      snapshot.missing.push_back(association);
    } else {
      snapshot.rows.push_back({association, mapping.season, it->second});
    }
  }
  return snapshot;
}

std::string fetch_clubelo_body(const std::string& date, const std::string& host) {
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  const auto response = client.Get("/" + date);
  if (!response) throw FetchError("request to " + host + " failed: " + httplib::to_string(response.error()), true);
  if (response->status >= 500) throw FetchError("HTTP " + std::to_string(response->status), true);
  if (response->status != 200) throw FetchError("HTTP " + std::to_string(response->status), false);
  return response->body;
}

EloSnapshot fetch_clubelo_snapshot(const std::string& date, const ClubMapping& mapping) {
  return parse_clubelo_snapshot(fetch_clubelo_body(date), mapping);
}

}  // namespace qualsim::data
