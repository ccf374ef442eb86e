#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qualsim/bracket.hpp"
#include "qualsim/elo.hpp"
#include "qualsim/model.hpp"
#include "qualsim/rng.hpp"

namespace qualsim::mc {

struct SamplingPolicy {
  // Probability of each season's access list being drawn. Champion attributes
  // are always drawn uniformly over the seasons an association has data for.
  std::array<double, kSeasonCount> season_weights{0.2, 0.2, 0.2, 0.2, 0.2};

  static SamplingPolicy uniform() { return {}; }
  static SamplingPolicy recency_weighted() { return {{0.10, 0.15, 0.20, 0.25, 0.30}}; }
  // Throws std::invalid_argument unless the weights are a probability vector.
  void validate() const;
  bool operator==(const SamplingPolicy&) const = default;
};

struct RunConfig {
  std::uint64_t iterations = 1'000'000;
  std::uint64_t master_seed = 42;
  unsigned partitions = 1;
  elo::ScalingParam scaling;
  bracket::SeedingMode seeding = bracket::SeedingMode::seeded;
  SamplingPolicy policy;
  std::vector<FormatSpec> formats;
  // Elo averages cover qualified associations ranked at least this low in the
  // drawn season's access list.
  int average_elo_min_rank = 11;
  // Iteration counts at which running averages are recorded; ascending.
  std::vector<std::uint64_t> checkpoints;
};

inline const std::vector<std::uint64_t> kDefaultCheckpoints = {5'000,   10'000,  20'000,  50'000,
                                                               100'000, 200'000, 500'000, 1'000'000};

struct ConvergencePoint {
  std::uint64_t iterations = 0;
  double elo_sum = 0.0;
  std::uint64_t qualified = 0;

  double average_elo() const { return qualified == 0 ? 0.0 : elo_sum / static_cast<double>(qualified); }
  bool operator==(const ConvergencePoint&) const = default;
};

struct FormatTally {
  std::string format;
  std::vector<std::string> round_labels;
  std::vector<std::uint64_t> counts;
  // exits[association][round]: times eliminated in that round.
  std::vector<std::vector<std::uint64_t>> exits;
  // Elo of qualified associations within the averaging population, summed
  // over all iterations.
  double elo_sum = 0.0;
  std::uint64_t qualified = 0;
  std::vector<ConvergencePoint> convergence;

  double average_elo() const { return qualified == 0 ? 0.0 : elo_sum / static_cast<double>(qualified); }
  bool operator==(const FormatTally&) const = default;
};

// Per-association statistics of d = I(second format) - I(first format),
// collected on the shared randomness of each iteration.
struct PairedTally {
  std::vector<std::int64_t> net;
  std::vector<std::uint64_t> discordant;  // iterations with d != 0, i.e. sum of d^2

  bool operator==(const PairedTally&) const = default;
};

struct QualificationTally {
  std::uint64_t runs = 0;
  std::vector<FormatTally> formats;
  PairedTally paired;

  // Throws std::invalid_argument when the tallies have different shapes.
  void merge(const QualificationTally& other);
  bool operator==(const QualificationTally&) const = default;
};

SeasonId sample_season(Rng& rng, const SamplingPolicy& policy);

// Season index of the cell each association's champion is drawn from.
std::vector<int> sample_profile_cells(Rng& rng, const Dataset& dataset);
std::vector<ChampionProfile> sample_profiles(Rng& rng, const Dataset& dataset);

// One realisation per iteration: a 64-bit key is drawn from `rng` and every
// entry is the counter-based outcome for that key (see CounterOutcomes).
bracket::OutcomeMatrices generate_matrices(Rng& rng, std::span<const double> competitor_elos,
                                           elo::ScalingParam scaling);

QualificationTally run(const RunConfig& config, const Dataset& dataset);

struct ConvergenceSeries {
  std::string format;
  std::vector<ConvergencePoint> points;
};

std::vector<ConvergenceSeries> convergence_series(RunConfig config, const Dataset& dataset,
                                                  std::vector<std::uint64_t> checkpoints);

}  // namespace qualsim::mc
