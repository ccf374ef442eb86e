#include "qualsim/mc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace qualsim::mc {

void SamplingPolicy::validate() const {
  double total = 0.0;
  for (double w : season_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("season weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("season weights must sum to 1");
}

void QualificationTally::merge(const QualificationTally& other) {
  if (formats.size() != other.formats.size()) throw std::invalid_argument("tallies cover different formats");
  for (std::size_t f = 0; f < formats.size(); ++f) {
    auto& mine = formats[f];
    const auto& theirs = other.formats[f];
    if (mine.format != theirs.format || mine.counts.size() != theirs.counts.size() ||
        mine.convergence.size() != theirs.convergence.size() || mine.exits.size() != theirs.exits.size()) {
      throw std::invalid_argument("tallies have different shapes");
    }
    for (std::size_t a = 0; a < mine.counts.size(); ++a) {
      mine.counts[a] += theirs.counts[a];
      for (std::size_t r = 0; r < mine.exits[a].size(); ++r) mine.exits[a][r] += theirs.exits[a][r];
    }
    mine.elo_sum += theirs.elo_sum;
    mine.qualified += theirs.qualified;
    for (std::size_t c = 0; c < mine.convergence.size(); ++c) {
      if (mine.convergence[c].iterations != theirs.convergence[c].iterations) {
        throw std::invalid_argument("tallies use different checkpoints");
      }
      mine.convergence[c].elo_sum += theirs.convergence[c].elo_sum;
      mine.convergence[c].qualified += theirs.convergence[c].qualified;
    }
  }
  if (paired.net.size() != other.paired.net.size()) throw std::invalid_argument("paired tallies differ in size");
  for (std::size_t a = 0; a < paired.net.size(); ++a) {
    paired.net[a] += other.paired.net[a];
    paired.discordant[a] += other.paired.discordant[a];
  }
  runs += other.runs;
}

SeasonId sample_season(Rng& rng, const SamplingPolicy& policy) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (int s = 0; s < kSeasonCount; ++s) {
    if (policy.season_weights[s] <= 0.0) continue;
    last_positive = s;
    cumulative += policy.season_weights[s];
    if (u < cumulative) return SeasonId{s};
  }
  return SeasonId{last_positive};
}

namespace {

std::vector<std::vector<int>> available_cells(const Dataset& dataset) {
  std::vector<std::vector<int>> cells(dataset.association_count());
  for (int a = 0; a < dataset.association_count(); ++a) {
    for (int s = 0; s < dataset.season_count(); ++s) {
      if (dataset.seasons[s].present(a)) cells[a].push_back(s);
    }
    if (cells[a].empty()) throw std::invalid_argument("association " + dataset.associations[a] + " has no profile");
  }
  return cells;
}

void draw_cells(Rng& rng, const std::vector<std::vector<int>>& available, std::vector<int>& out) {
  out.resize(available.size());
  for (std::size_t a = 0; a < available.size(); ++a) {
    const auto& options = available[a];
    out[a] = options.size() == 1 ? options.front() : options[uniform_index(rng, options.size())];
  }
}

}  // namespace

std::vector<int> sample_profile_cells(Rng& rng, const Dataset& dataset) {
  std::vector<int> cells;
  draw_cells(rng, available_cells(dataset), cells);
  return cells;
}

std::vector<ChampionProfile> sample_profiles(Rng& rng, const Dataset& dataset) {
  const auto cells = sample_profile_cells(rng, dataset);
  std::vector<ChampionProfile> profiles;
  profiles.reserve(cells.size());
  for (std::size_t a = 0; a < cells.size(); ++a) profiles.push_back(*dataset.seasons[cells[a]].profiles[a]);
  return profiles;
}

bracket::OutcomeMatrices generate_matrices(Rng& rng, std::span<const double> competitor_elos,
                                           elo::ScalingParam scaling) {
  const int n = static_cast<int>(competitor_elos.size());
  std::vector<double> two_leg(static_cast<std::size_t>(n) * n, 0.5);
  std::vector<double> one_leg(two_leg.size(), 0.5);
  std::vector<int> identity(n);
  for (int i = 0; i < n; ++i) {
    identity[i] = i;
    for (int j = 0; j < n; ++j) {
      two_leg[static_cast<std::size_t>(i) * n + j] = elo::win_prob_two_leg(competitor_elos[i], competitor_elos[j], scaling);
      one_leg[static_cast<std::size_t>(i) * n + j] = elo::win_prob_one_leg(competitor_elos[i], competitor_elos[j], scaling);
    }
  }
  const bracket::CounterOutcomes lazy(rng(), {two_leg, one_leg, n}, identity);
  return lazy.materialize();
}

namespace {

// Everything that depends only on (season, format) or on the dataset, built
// once per run and shared read-only by all partitions.
struct Plan {
  int associations = 0;
  int seasons = 0;
  std::vector<std::vector<int>> cells;                          // per association
  std::vector<std::vector<bracket::EntryLists>> entries;        // [season][format]
  std::vector<std::vector<int>> competitor_of;                  // [season][association]
  std::vector<int> competitor_count;                            // [season]
  std::vector<std::vector<int>> competitor_association;         // [season][competitor]
  // Advance probabilities between (association, cell) keys.
  std::vector<double> two_leg;
  std::vector<double> one_leg;

  int key(int association, int cell) const { return association * seasons + cell; }
  std::size_t pair(int ka, int kb) const { return static_cast<std::size_t>(ka) * associations * seasons + kb; }
};

Plan make_plan(const RunConfig& config, const Dataset& dataset) {
  Plan plan;
  plan.associations = dataset.association_count();
  plan.seasons = dataset.season_count();
  plan.cells = available_cells(dataset);

  for (const auto& table : dataset.seasons) {
    std::vector<bracket::EntryLists> per_format;
    std::vector<int> position_of(plan.associations, -1);
    std::vector<char> plays(plan.associations, 0);
    for (const auto& format : config.formats) {
      format.validate(static_cast<int>(table.non_participants.size()));
      per_format.push_back(bracket::build_entry_lists(format, table));
      for (const auto& round : per_format.back().rounds) {
        for (int a : round) plays[a] = 1;
      }
    }
    // Competitors are numbered in access-list order so that matrix rows are
    // stable across formats.
    std::vector<std::pair<int, int>> order;
    for (int a = 0; a < plan.associations; ++a) {
      if (plays[a]) order.emplace_back(*table.ranks[a], a);
    }
    std::sort(order.begin(), order.end());
    std::vector<int> competitor_of(plan.associations, -1);
    std::vector<int> competitor_association;
    for (const auto& [rank, a] : order) {
      competitor_of[a] = static_cast<int>(competitor_association.size());
      competitor_association.push_back(a);
    }
    plan.entries.push_back(std::move(per_format));
    plan.competitor_of.push_back(std::move(competitor_of));
    plan.competitor_count.push_back(static_cast<int>(competitor_association.size()));
    plan.competitor_association.push_back(std::move(competitor_association));
  }

  const int keys = plan.associations * plan.seasons;
  plan.two_leg.assign(static_cast<std::size_t>(keys) * keys, 0.5);
  plan.one_leg.assign(static_cast<std::size_t>(keys) * keys, 0.5);
  for (int a = 0; a < plan.associations; ++a) {
    for (int ca : plan.cells[a]) {
      const double ea = dataset.seasons[ca].profiles[a]->elo;
      for (int b = 0; b < plan.associations; ++b) {
        for (int cb : plan.cells[b]) {
          const double eb = dataset.seasons[cb].profiles[b]->elo;
          const auto idx = plan.pair(plan.key(a, ca), plan.key(b, cb));
          plan.two_leg[idx] = elo::win_prob_two_leg(ea, eb, config.scaling);
          plan.one_leg[idx] = elo::win_prob_one_leg(ea, eb, config.scaling);
        }
      }
    }
  }
  return plan;
}

QualificationTally empty_tally(const RunConfig& config, const Plan& plan, std::uint64_t runs_hint = 0) {
  QualificationTally tally;
  tally.runs = runs_hint;
  for (const auto& format : config.formats) {
    FormatTally ft;
    ft.format = format.name;
    for (const auto& round : format.rounds) ft.round_labels.push_back(round.label);
    ft.counts.assign(plan.associations, 0);
    ft.exits.assign(plan.associations, std::vector<std::uint64_t>(format.rounds.size(), 0));
    for (auto c : config.checkpoints) ft.convergence.push_back({c, 0.0, 0});
    tally.formats.push_back(std::move(ft));
  }
  if (config.formats.size() == 2) {
    tally.paired.net.assign(plan.associations, 0);
    tally.paired.discordant.assign(plan.associations, 0);
  }
  return tally;
}

QualificationTally run_partition(const RunConfig& config, const Dataset& dataset, const Plan& plan,
                                 unsigned partition, std::uint64_t first, std::uint64_t last) {
  Rng rng = make_stream(config.master_seed, partition);
  QualificationTally tally = empty_tally(config, plan);
  const std::size_t n_formats = config.formats.size();

  std::vector<int> cells;
  std::vector<bracket::Contestant> contestants(plan.associations);
  std::vector<int> keys(plan.associations);
  std::vector<int> rating_keys;
  std::vector<std::vector<char>> qualified(n_formats, std::vector<char>(plan.associations, 0));
  bracket::FormatOutcome outcome;
  const int stride = plan.associations * plan.seasons;

  // Checkpoints inside (first, last] are recorded as they pass; later ones
  // receive the partition's full sums afterwards.
  std::size_t next_checkpoint = 0;
  while (next_checkpoint < config.checkpoints.size() && config.checkpoints[next_checkpoint] <= first) {
    ++next_checkpoint;
  }

  for (std::uint64_t g = first; g < last; ++g) {
    const SeasonId season = sample_season(rng, config.policy);
    draw_cells(rng, plan.cells, cells);
    const auto& competitor_of = plan.competitor_of[season.index];
    for (int a = 0; a < plan.associations; ++a) {
      const auto& profile = *dataset.seasons[cells[a]].profiles[a];
      contestants[a] = {a, competitor_of[a], profile.coefficient, profile.elo};
      keys[a] = plan.key(a, cells[a]);
    }

    rating_keys.clear();
    for (int a : plan.competitor_association[season.index]) rating_keys.push_back(keys[a]);
    const bracket::CounterOutcomes matrices(rng(), {plan.two_leg, plan.one_leg, stride}, rating_keys);
    const auto& ranks = dataset.seasons[season.index].ranks;

    for (std::size_t f = 0; f < n_formats; ++f) {
      bracket::run_format(config.formats[f], plan.entries[season.index][f], contestants, matrices, config.seeding,
                          rng, outcome);
      auto& ft = tally.formats[f];
      auto& mark = qualified[f];
      std::fill(mark.begin(), mark.end(), 0);
      for (int a : outcome.direct) mark[a] = 1;
      for (int a : outcome.winners) mark[a] = 1;
      for (int a = 0; a < plan.associations; ++a) {
        if (!mark[a]) continue;
        ++ft.counts[a];
        if (ranks[a] && *ranks[a] >= config.average_elo_min_rank) {
          ft.elo_sum += contestants[a].elo;
          ++ft.qualified;
        }
      }
      for (const auto& [a, round] : outcome.eliminated) ++ft.exits[a][round];
    }
    if (n_formats == 2) {
      for (int a = 0; a < plan.associations; ++a) {
        const int d = qualified[1][a] - qualified[0][a];
        tally.paired.net[a] += d;
        tally.paired.discordant[a] += d != 0;
      }
    }
    ++tally.runs;

    while (next_checkpoint < config.checkpoints.size() && config.checkpoints[next_checkpoint] == g + 1) {
      for (auto& ft : tally.formats) ft.convergence[next_checkpoint] = {g + 1, ft.elo_sum, ft.qualified};
      ++next_checkpoint;
    }
  }
  for (; next_checkpoint < config.checkpoints.size(); ++next_checkpoint) {
    for (auto& ft : tally.formats) {
      ft.convergence[next_checkpoint] = {config.checkpoints[next_checkpoint], ft.elo_sum, ft.qualified};
    }
  }
  return tally;
}

}  // namespace

QualificationTally run(const RunConfig& config, const Dataset& dataset) {
  if (config.iterations == 0) throw std::invalid_argument("iterations must be at least 1");
  if (config.partitions == 0) throw std::invalid_argument("partitions must be at least 1");
  if (config.formats.empty()) throw std::invalid_argument("no formats to simulate");
  if (dataset.season_count() != kSeasonCount) throw std::invalid_argument("dataset must cover five seasons");
  config.policy.validate();
  if (!std::is_sorted(config.checkpoints.begin(), config.checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be ascending");
  }

  const Plan plan = make_plan(config, dataset);
  const std::uint64_t partitions = std::min<std::uint64_t>(config.partitions, config.iterations);

  std::vector<std::future<QualificationTally>> jobs;
  for (std::uint64_t p = 0; p < partitions; ++p) {
    const std::uint64_t first = config.iterations * p / partitions;
    const std::uint64_t last = config.iterations * (p + 1) / partitions;
    jobs.push_back(std::async(std::launch::async, [&, p, first, last] {
      return run_partition(config, dataset, plan, static_cast<unsigned>(p), first, last);
    }));
  }
  QualificationTally total = empty_tally(config, plan);
  for (auto& job : jobs) total.merge(job.get());
  return total;
}

std::vector<ConvergenceSeries> convergence_series(RunConfig config, const Dataset& dataset,
                                                  std::vector<std::uint64_t> checkpoints) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be ascending");
  }
  config.checkpoints = std::move(checkpoints);
  if (!config.checkpoints.empty()) config.iterations = std::max(config.iterations, config.checkpoints.back());
  const auto tally = run(config, dataset);
  std::vector<ConvergenceSeries> series;
  for (const auto& ft : tally.formats) series.push_back({ft.format, ft.convergence});
  return series;
}

}  // namespace qualsim::mc
