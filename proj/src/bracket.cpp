#include "qualsim/bracket.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace qualsim::bracket {

namespace {

bool seeded_before(const Slot& a, const Slot& b) {
  if (a.draw_coefficient != b.draw_coefficient) return a.draw_coefficient > b.draw_coefficient;
  if (a.elo != b.elo) return a.elo > b.elo;
  return a.association < b.association;
}

struct Block {
  RankRange ranks;
  int round = -1;  // -1 for direct qualification
  int first_position = 0;
  int positions = 0;
};

// Orders `slots` so the first half is the seeded pot.
void pot_in_place(std::span<Slot> slots, SeedingMode mode, Rng& rng) {
  if (slots.size() % 2 != 0) throw StructuralError("odd number of slots in a draw");
  if (mode == SeedingMode::seeded) {
    std::sort(slots.begin(), slots.end(), seeded_before);
  } else {
    shuffle(slots.begin(), slots.end(), rng);
  }
}

// Pairs slot i of the first half with slot i of the shuffled second half.
void draw_in_place(std::span<Slot> slots, Rng& rng) {
  const auto half = static_cast<std::ptrdiff_t>(slots.size() / 2);
  shuffle(slots.begin() + half, slots.end(), rng);
}

}  // namespace

OutcomeMatrices CounterOutcomes::materialize() const {
  OutcomeMatrices m(n_);
  for (const auto kind : {TieKind::two_leg, TieKind::one_leg}) {
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) m.set(kind, i, j, advances(kind, i, j));
    }
  }
  return m;
}

EntryLists build_entry_lists(const FormatSpec& format, const SeasonTable& season) {
  const int vacancies = static_cast<int>(season.non_participants.size());

  std::vector<Block> blocks;
  if (format.direct.size() > 0) blocks.push_back({format.direct, -1});
  for (std::size_t r = 0; r < format.rounds.size(); ++r) {
    if (format.rounds[r].entry) blocks.push_back({*format.rounds[r].entry, static_cast<int>(r)});
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.ranks.first < b.ranks.first; });
  int next = 1;
  for (auto& block : blocks) {
    const bool vacancy = block.round >= 0 && format.rounds[block.round].label == format.vacancy_round;
    block.first_position = next;
    block.positions = block.ranks.size() - (vacancy ? vacancies : 0);
    next += block.positions;
  }

  std::vector<std::pair<int, int>> by_position;  // (position, association)
  for (std::size_t a = 0; a < season.ranks.size(); ++a) {
    if (!season.ranks[a]) continue;
    const int rank = *season.ranks[a];
    int position = rank;
    for (const auto& np : season.non_participants) {
      if (np.rank < rank) --position;
    }
    by_position.emplace_back(position, static_cast<int>(a));
  }
  std::sort(by_position.begin(), by_position.end());

  EntryLists lists;
  lists.rounds.resize(format.rounds.size());
  for (const auto& [position, association] : by_position) {
    const auto it = std::find_if(blocks.begin(), blocks.end(), [position](const Block& b) {
      return position >= b.first_position && position < b.first_position + b.positions;
    });
    if (it == blocks.end()) {
      throw StructuralError("season " + std::string(season.season.label()) + ": association " +
                            std::to_string(association) + " at position " + std::to_string(position) +
                            " is not covered by format " + format.name);
    }
    (it->round < 0 ? lists.direct : lists.rounds[it->round]).push_back(association);
  }
  for (const auto& block : blocks) {
    if (block.round < 0) continue;
    const auto have = lists.rounds[block.round].size();
    if (static_cast<int>(have) != block.positions) {
      throw StructuralError("season " + std::string(season.season.label()) + ": round " +
                            format.rounds[block.round].label + " of " + format.name + " expects " +
                            std::to_string(block.positions) + " entrants, found " + std::to_string(have));
    }
  }
  return lists;
}

Pots assign_pots(std::vector<Slot> slots, SeedingMode mode, Rng& rng) {
  pot_in_place(slots, mode, rng);
  const auto half = static_cast<std::ptrdiff_t>(slots.size() / 2);
  Pots pots;
  pots.seeded.assign(slots.begin(), slots.begin() + half);
  pots.unseeded.assign(slots.begin() + half, slots.end());
  return pots;
}

std::vector<Tie> draw_round(const std::vector<Slot>& seeded, std::vector<Slot> unseeded, Rng& rng) {
  if (seeded.size() != unseeded.size()) throw StructuralError("pots differ in size");
  shuffle(unseeded.begin(), unseeded.end(), rng);
  std::vector<Tie> ties;
  ties.reserve(seeded.size());
  for (std::size_t i = 0; i < seeded.size(); ++i) ties.push_back({seeded[i], unseeded[i]});
  return ties;
}

template <OutcomeSource M>
Slot play_preliminary(std::span<const Slot> entrants, const M& matrices, Rng& rng, SeedingMode mode) {
  if (entrants.size() != 4) throw StructuralError("preliminary round needs exactly 4 entrants");
  std::array<Slot, 4> slots;
  std::copy(entrants.begin(), entrants.end(), slots.begin());
  pot_in_place(slots, mode, rng);
  draw_in_place(slots, rng);

  std::array<Slot, 2> finalists;
  std::array<Coefficient, 2> beaten;
  for (std::size_t k = 0; k < 2; ++k) {
    const Tie semi{slots[k], slots[k + 2]};
    finalists[k] = resolve_tie(semi, TieKind::one_leg, matrices);
    const bool seeded_won = finalists[k].association == semi.seeded.association;
    beaten[k] = (seeded_won ? semi.unseeded : semi.seeded).real_coefficient;
  }
  const std::size_t host = uniform_index(rng, 2);
  Slot winner = resolve_tie({finalists[host], finalists[1 - host]}, TieKind::one_leg, matrices);
  const std::size_t w = winner.association == finalists[0].association ? 0 : 1;
  winner.draw_coefficient = std::max({winner.real_coefficient, beaten[w], finalists[1 - w].real_coefficient});
  return winner;
}

std::vector<int> FormatOutcome::qualified() const {
  std::vector<int> all = direct;
  all.insert(all.end(), winners.begin(), winners.end());
  return all;
}

template <OutcomeSource M>
void run_format(const FormatSpec& format, const EntryLists& entries, std::span<const Contestant> contestants,
                const M& matrices, SeedingMode mode, Rng& rng, FormatOutcome& outcome) {
  if (entries.rounds.size() != format.rounds.size()) throw StructuralError("entry lists do not match format");
  outcome.direct = entries.direct;
  outcome.winners.clear();
  outcome.eliminated.clear();
  outcome.clashes = 0;

  thread_local std::vector<Slot> advancing;
  thread_local std::vector<Slot> playing;
  advancing.clear();
  for (std::size_t r = 0; r < format.rounds.size(); ++r) {
    const auto& round = format.rounds[r];
    playing.swap(advancing);
    advancing.clear();
    if (round.actual_coefficients) {
      for (auto& s : playing) s.draw_coefficient = s.real_coefficient;
    }
    for (int a : entries.rounds[r]) {
      const auto& c = contestants[a];
      if (c.competitor < 0) throw StructuralError("association " + std::to_string(a) + " plays without a matrix row");
      playing.push_back(Slot::entering(c));
    }

    if (round.structure == RoundStructure::mini_knockout) {
      const Slot winner = play_preliminary(std::span<const Slot>(playing), matrices, rng, mode);
      for (const auto& s : playing) {
        if (s.association != winner.association) outcome.eliminated.emplace_back(s.association, static_cast<int>(r));
      }
      advancing.push_back(winner);
      outcome.clashes += 3;
      continue;
    }

    pot_in_place(playing, mode, rng);
    draw_in_place(playing, rng);
    const std::size_t half = playing.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const Tie tie{playing[i], playing[half + i]};
      const Slot winner = resolve_tie(tie, round.tie, matrices);
      const Slot& loser = winner.association == tie.seeded.association ? tie.unseeded : tie.seeded;
      outcome.eliminated.emplace_back(loser.association, static_cast<int>(r));
      advancing.push_back(winner);
      ++outcome.clashes;
    }
  }
  for (const auto& s : advancing) outcome.winners.push_back(s.association);
}

template Slot play_preliminary(std::span<const Slot>, const OutcomeMatrices&, Rng&, SeedingMode);
template Slot play_preliminary(std::span<const Slot>, const CounterOutcomes&, Rng&, SeedingMode);
template void run_format(const FormatSpec&, const EntryLists&, std::span<const Contestant>, const OutcomeMatrices&,
                         SeedingMode, Rng&, FormatOutcome&);
template void run_format(const FormatSpec&, const EntryLists&, std::span<const Contestant>, const CounterOutcomes&,
                         SeedingMode, Rng&, FormatOutcome&);

}  // namespace qualsim::bracket
