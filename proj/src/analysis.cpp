#include "qualsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace qualsim::analysis {

void PrizeSchedule::validate() const {
  for (const auto& [round, fee] : round_fees) {
    if (!(fee >= 0.0)) throw std::invalid_argument("negative fee for " + round);
  }
  if (!(group_stage_fee >= 0.0) || !(gs_premium >= 0.0)) throw std::invalid_argument("fees must be non-negative");
}

double PrizeSchedule::fee_for(std::string_view round) const {
  for (const auto& [label, fee] : round_fees) {
    if (label == round) return fee;
  }
  return 0.0;
}

const AssociationRow& ProbabilityReport::row(std::string_view association) const {
  for (const auto& r : rows) {
    if (r.association == association) return r;
  }
  throw std::out_of_range("no report row for " + std::string(association));
}

namespace {

double binomial_se(double p, std::uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

double expected_fees(const mc::FormatTally& ft, int a, std::uint64_t runs, const PrizeSchedule& schedule) {
  double total = static_cast<double>(ft.counts[a]) * schedule.group_stage_fee;
  for (std::size_t r = 0; r < ft.round_labels.size(); ++r) {
    total += static_cast<double>(ft.exits[a][r]) * schedule.fee_for(ft.round_labels[r]);
  }
  return total / static_cast<double>(runs);
}

std::string num(double value, int precision = 8) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", precision, value);
  return buffer;
}

}  // namespace

ProbabilityReport probabilities(const mc::QualificationTally& tally, const Dataset& dataset,
                                const PrizeSchedule& schedule, std::size_t old_index, std::size_t new_index) {
  if (tally.runs == 0) throw std::invalid_argument("tally has no runs");
  if (old_index >= tally.formats.size() || new_index >= tally.formats.size()) {
    throw std::invalid_argument("tally does not contain both formats");
  }
  schedule.validate();
  const auto& old_f = tally.formats[old_index];
  const auto& new_f = tally.formats[new_index];
  const bool paired = old_index == 0 && new_index == 1 && !tally.paired.net.empty();
  const auto n = static_cast<double>(tally.runs);

  ProbabilityReport report{old_f.format, new_f.format, tally.runs, {}};
  for (int a = 0; a < dataset.association_count(); ++a) {
    AssociationRow row;
    row.index = a;
    row.association = dataset.associations[a];
    const auto& latest = dataset.seasons.back().ranks[a];
    row.latest_rank = latest ? *latest : 0;
    row.count_old = old_f.counts[a];
    row.count_new = new_f.counts[a];
    row.p_old = static_cast<double>(row.count_old) / n;
    row.p_new = static_cast<double>(row.count_new) / n;
    row.se_old = binomial_se(row.p_old, tally.runs);
    row.se_new = binomial_se(row.p_new, tally.runs);
    row.delta = row.p_new - row.p_old;
    if (paired) {
      const double mean = static_cast<double>(tally.paired.net[a]) / n;
      const double second = static_cast<double>(tally.paired.discordant[a]) / n;
      row.se_delta = std::sqrt(std::max(0.0, second - mean * mean) / n);
    } else {
      row.se_delta = std::hypot(row.se_old, row.se_new);
    }
    if (row.p_old >= kRelativeLossFloor) row.relative_loss = row.delta / row.p_old;
    row.expected_money_delta = row.delta * schedule.gs_premium;
    row.round_fees_old = expected_fees(old_f, a, tally.runs, schedule);
    row.round_fees_new = expected_fees(new_f, a, tally.runs, schedule);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<SeedingEffect> seeding_contribution(const mc::QualificationTally& seeded,
                                                const mc::QualificationTally& unseeded, const Dataset& dataset,
                                                std::string_view format) {
  if (seeded.runs == 0 || seeded.runs != unseeded.runs) throw std::invalid_argument("tallies differ in run count");
  auto find = [&](const mc::QualificationTally& t) -> const mc::FormatTally& {
    for (const auto& ft : t.formats) {
      if (ft.format == format) return ft;
    }
    throw std::invalid_argument("tally lacks format " + std::string(format));
  };
  const auto& s = find(seeded);
  const auto& u = find(unseeded);
  if (s.counts.size() != u.counts.size()) throw std::invalid_argument("tallies differ in association count");

  std::vector<SeedingEffect> effects;
  for (int a = 0; a < dataset.association_count(); ++a) {
    SeedingEffect e;
    e.association = dataset.associations[a];
    e.p_seeded = static_cast<double>(s.counts[a]) / static_cast<double>(seeded.runs);
    e.p_unseeded = static_cast<double>(u.counts[a]) / static_cast<double>(unseeded.runs);
    e.contribution = 100.0 * (e.p_seeded - e.p_unseeded);
    e.se = 100.0 * std::hypot(binomial_se(e.p_seeded, seeded.runs), binomial_se(e.p_unseeded, unseeded.runs));
    effects.push_back(std::move(e));
  }
  return effects;
}

std::vector<SensitivityRow> sensitivity_sweep(const mc::RunConfig& config, const Dataset& dataset,
                                              std::span<const double> s_values, const PrizeSchedule& schedule) {
  std::vector<SensitivityRow> rows;
  for (double s : s_values) {
    mc::RunConfig run_config = config;
    run_config.scaling = elo::ScalingParam(s);
    rows.push_back({s, probabilities(mc::run(run_config, dataset), dataset, schedule)});
  }
  return rows;
}

std::vector<MoneyImpact> money_impact(const ProbabilityReport& report, const PrizeSchedule& schedule) {
  schedule.validate();
  std::vector<MoneyImpact> impacts;
  for (const auto& row : report.rows) {
    const double euros = row.delta * schedule.gs_premium;
    impacts.push_back({row.association, row.delta, euros, euros < kMoneyFlagThreshold});
  }
  return impacts;
}

std::vector<double> mean_elo(const Dataset& dataset) {
  std::vector<double> means;
  for (int a = 0; a < dataset.association_count(); ++a) {
    double total = 0.0;
    int cells = 0;
    for (const auto& table : dataset.seasons) {
      if (const auto& p = table.profiles[a]) {
        total += p->elo;
        ++cells;
      }
    }
    means.push_back(cells ? total / cells : 0.0);
  }
  return means;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal-length samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::string report_to_csv(const ProbabilityReport& report) {
  std::string out =
      "association,latest_rank,count_old,count_new,p_old,p_new,se_old,se_new,delta,se_delta,relative_loss,"
      "money_delta_eur,round_fees_old_eur,round_fees_new_eur\n";
  for (const auto& r : report.rows) {
    out += r.association + ',' + std::to_string(r.latest_rank) + ',' + std::to_string(r.count_old) + ',' +
           std::to_string(r.count_new) + ',' + num(r.p_old) + ',' + num(r.p_new) + ',' + num(r.se_old) + ',' +
           num(r.se_new) + ',' + num(r.delta) + ',' + num(r.se_delta) + ',' +
           (r.relative_loss ? num(*r.relative_loss) : std::string("NA")) + ',' + num(r.expected_money_delta, 2) +
           ',' + num(r.round_fees_old, 2) + ',' + num(r.round_fees_new, 2) + '\n';
  }
  return out;
}

nlohmann::json report_to_json(const ProbabilityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"association", r.association},
                    {"latest_rank", r.latest_rank},
                    {"count_old", r.count_old},
                    {"count_new", r.count_new},
                    {"p_old", r.p_old},
                    {"p_new", r.p_new},
                    {"se_old", r.se_old},
                    {"se_new", r.se_new},
                    {"delta", r.delta},
                    {"se_delta", r.se_delta},
                    {"relative_loss", r.relative_loss ? nlohmann::json(*r.relative_loss) : nlohmann::json(nullptr)},
                    {"money_delta_eur", r.expected_money_delta},
                    {"round_fees_old_eur", r.round_fees_old},
                    {"round_fees_new_eur", r.round_fees_new}});
  }
  return {{"old_format", report.old_format}, {"new_format", report.new_format}, {"runs", report.runs},
          {"associations", rows}};
}

std::string seeding_to_csv(std::span<const SeedingEffect> effects) {
  std::string out = "association,p_seeded,p_unseeded,contribution_pp,se_pp\n";
  for (const auto& e : effects) {
    out += e.association + ',' + num(e.p_seeded) + ',' + num(e.p_unseeded) + ',' + num(e.contribution, 6) + ',' +
           num(e.se, 6) + '\n';
  }
  return out;
}

nlohmann::json seeding_to_json(std::span<const SeedingEffect> effects) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : effects) {
    rows.push_back({{"association", e.association},
                    {"p_seeded", e.p_seeded},
                    {"p_unseeded", e.p_unseeded},
                    {"contribution_pp", e.contribution},
                    {"se_pp", e.se}});
  }
  return rows;
}

std::string convergence_to_csv(std::span<const mc::ConvergenceSeries> series) {
  std::string out = "format,iterations,average_elo\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) out += s.format + ',' + std::to_string(p.iterations) + ',' + num(p.average_elo(), 6) + '\n';
  }
  return out;
}

nlohmann::json convergence_to_json(std::span<const mc::ConvergenceSeries> series) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : series) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : s.points) points.push_back({{"iterations", p.iterations}, {"average_elo", p.average_elo()}});
    out.push_back({{"format", s.format}, {"points", points}});
  }
  return out;
}

}  // namespace qualsim::analysis
