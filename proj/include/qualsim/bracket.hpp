#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qualsim/model.hpp"
#include "qualsim/rng.hpp"

namespace qualsim::bracket {

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SeedingMode { seeded, unseeded_random };

// Per-iteration attributes of one association's champion. `competitor` is the
// row in the outcome matrices, or -1 for a team that never plays.
struct Contestant {
  int association = -1;
  int competitor = -1;
  Coefficient coefficient;
  double elo = 0.0;
};

struct Slot {
  int association = -1;
  int competitor = -1;
  Coefficient real_coefficient;
  // Coefficient used for pot assignment in the round about to be drawn.
  Coefficient draw_coefficient;
  double elo = 0.0;

  static Slot entering(const Contestant& c) {
    return {c.association, c.competitor, c.coefficient, c.coefficient, c.elo};
  }
};

struct Tie {
  Slot seeded;
  Slot unseeded;
};

struct Pots {
  std::vector<Slot> seeded;
  std::vector<Slot> unseeded;
};

// One realisation of every pairwise clash. Anti-symmetric by construction:
// setting (i, j) also sets (j, i) to the complement.
class OutcomeMatrices {
 public:
  OutcomeMatrices() = default;
  explicit OutcomeMatrices(int competitors)
      : n_(competitors),
        two_leg_(static_cast<std::size_t>(competitors) * competitors, 0),
        one_leg_(static_cast<std::size_t>(competitors) * competitors, 0) {}

  int size() const { return n_; }

  // True when competitor i advances against competitor j.
  bool advances(TieKind kind, int i, int j) const {
    return cells(kind)[static_cast<std::size_t>(i) * n_ + j] != 0;
  }

  void set(TieKind kind, int i, int j, bool i_advances) {
    auto& m = kind == TieKind::two_leg ? two_leg_ : one_leg_;
    m[static_cast<std::size_t>(i) * n_ + j] = i_advances ? 1 : 0;
    m[static_cast<std::size_t>(j) * n_ + i] = i_advances ? 0 : 1;
  }

 private:
  const std::vector<std::uint8_t>& cells(TieKind kind) const {
    return kind == TieKind::two_leg ? two_leg_ : one_leg_;
  }

  int n_ = 0;
  std::vector<std::uint8_t> two_leg_;
  std::vector<std::uint8_t> one_leg_;
};

// The same clash realisation evaluated on demand. An entry is a pure function
// of (key, kind, unordered pair): the lower-indexed competitor of the pair
// advances when the counter-based uniform for that pair falls below its
// advance probability. Probabilities are looked up through per-competitor
// rating keys into a square table with `stride` columns.
class CounterOutcomes {
 public:
  struct Table {
    std::span<const double> two_leg;
    std::span<const double> one_leg;
    int stride = 0;
  };

  CounterOutcomes(std::uint64_t key, Table table, std::span<const int> rating_keys)
      : key_(key), table_(table), rating_keys_(rating_keys), n_(static_cast<int>(rating_keys.size())) {}

  int size() const { return n_; }

  bool advances(TieKind kind, int i, int j) const {
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    const auto k = static_cast<std::uint64_t>(kind == TieKind::two_leg ? 0 : 1);
    const std::uint64_t counter = (k * n_ + lo) * n_ + hi;
    const auto& probs = kind == TieKind::two_leg ? table_.two_leg : table_.one_leg;
    const double p = probs[static_cast<std::size_t>(rating_keys_[lo]) * table_.stride + rating_keys_[hi]];
    const bool lo_advances = counter_uniform01(key_, counter) < p;
    return (i == lo) == lo_advances;
  }

  OutcomeMatrices materialize() const;

 private:
  std::uint64_t key_;
  Table table_;
  std::span<const int> rating_keys_;
  int n_;
};

template <typename M>
concept OutcomeSource = requires(const M& m, TieKind kind, int i, int j) {
  { m.advances(kind, i, j) } -> std::convertible_to<bool>;
};

// Association indices per entry point, each list in access-list order.
struct EntryLists {
  std::vector<int> direct;
  std::vector<std::vector<int>> rounds;
};

// Assigns every ranked association of `season` to the direct block or to the
// round it enters. Non-participating associations shift everyone below them
// up by one position, and the format's vacancy round gives up that slot.
EntryLists build_entry_lists(const FormatSpec& format, const SeasonTable& season);

// Seeded: top half by draw coefficient, ties broken by higher Elo and then by
// lower association index. Unseeded-random: a uniform random bipartition.
Pots assign_pots(std::vector<Slot> slots, SeedingMode mode, Rng& rng);

// Uniform random perfect matching between the pots.
std::vector<Tie> draw_round(const std::vector<Slot>& seeded, std::vector<Slot> unseeded, Rng& rng);

// The winner carries max(real coefficient of both sides) into the next draw.
template <OutcomeSource M>
Slot resolve_tie(const Tie& tie, TieKind kind, const M& matrices) {
  Slot winner = matrices.advances(kind, tie.seeded.competitor, tie.unseeded.competitor) ? tie.seeded : tie.unseeded;
  winner.draw_coefficient = std::max(tie.seeded.real_coefficient, tie.unseeded.real_coefficient);
  return winner;
}

// Two one-leg semi-finals and a one-leg final at a randomly drawn host. The
// winner enters the next round with the highest real coefficient among
// itself and the two teams it eliminated.
template <OutcomeSource M>
Slot play_preliminary(std::span<const Slot> entrants, const M& matrices, Rng& rng,
                      SeedingMode mode = SeedingMode::seeded);

struct FormatOutcome {
  std::vector<int> direct;
  // Winners of the final round.
  std::vector<int> winners;
  // (association, index of the round it lost in)
  std::vector<std::pair<int, int>> eliminated;
  int clashes = 0;

  std::vector<int> qualified() const;
};

// `contestants` is indexed by association. `outcome` is cleared and refilled
// so callers can reuse its storage across iterations.
template <OutcomeSource M>
void run_format(const FormatSpec& format, const EntryLists& entries, std::span<const Contestant> contestants,
                const M& matrices, SeedingMode mode, Rng& rng, FormatOutcome& outcome);

template <OutcomeSource M>
FormatOutcome run_format(const FormatSpec& format, const EntryLists& entries,
                         std::span<const Contestant> contestants, const M& matrices, SeedingMode mode, Rng& rng) {
  FormatOutcome outcome;
  run_format(format, entries, contestants, matrices, mode, rng, outcome);
  return outcome;
}

}  // namespace qualsim::bracket
