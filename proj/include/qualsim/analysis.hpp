#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qualsim/mc.hpp"
#include "qualsim/model.hpp"

namespace qualsim::analysis {

// Amounts in Euros.
struct PrizeSchedule {
  std::vector<std::pair<std::string, double>> round_fees = {
      {"PR", 0.23e6}, {"Q1", 0.28e6}, {"Q2", 0.38e6}, {"Q3", 0.48e6}, {"PO", 5.0e6}};
  double group_stage_fee = 15.25e6;
  // Extra revenue of reaching the group stage over dropping out in the play-off.
  double gs_premium = 10.0e6;

  void validate() const;
  double fee_for(std::string_view round) const;
};

// Below this old-format probability a relative loss is too noisy to report.
inline constexpr double kRelativeLossFloor = 1e-4;
inline constexpr double kMoneyFlagThreshold = -1.0e6;

struct AssociationRow {
  int index = 0;
  std::string association;
  int latest_rank = 0;
  std::uint64_t count_old = 0;
  std::uint64_t count_new = 0;
  double p_old = 0.0;
  double p_new = 0.0;
  double se_old = 0.0;
  double se_new = 0.0;
  double delta = 0.0;
  double se_delta = 0.0;
  std::optional<double> relative_loss;
  double expected_money_delta = 0.0;
  // Expected fee income (elimination-round fee or group-stage fee).
  double round_fees_old = 0.0;
  double round_fees_new = 0.0;
};

struct ProbabilityReport {
  std::string old_format;
  std::string new_format;
  std::uint64_t runs = 0;
  std::vector<AssociationRow> rows;

  const AssociationRow& row(std::string_view association) const;
};

// Compares formats[old_index] (baseline) with formats[new_index].
ProbabilityReport probabilities(const mc::QualificationTally& tally, const Dataset& dataset,
                                const PrizeSchedule& schedule = {}, std::size_t old_index = 0,
                                std::size_t new_index = 1);

struct SeedingEffect {
  std::string association;
  double p_seeded = 0.0;
  double p_unseeded = 0.0;
  // Percentage points.
  double contribution = 0.0;
  double se = 0.0;
};

// Both tallies must come from runs that differ only in the seeding mode.
std::vector<SeedingEffect> seeding_contribution(const mc::QualificationTally& seeded,
                                                const mc::QualificationTally& unseeded, const Dataset& dataset,
                                                std::string_view format);

struct SensitivityRow {
  double scaling = 0.0;
  ProbabilityReport report;
};

std::vector<SensitivityRow> sensitivity_sweep(const mc::RunConfig& config, const Dataset& dataset,
                                              std::span<const double> s_values, const PrizeSchedule& schedule = {});

struct MoneyImpact {
  std::string association;
  double delta = 0.0;
  double euros = 0.0;
  bool flagged = false;
};

std::vector<MoneyImpact> money_impact(const ProbabilityReport& report, const PrizeSchedule& schedule);

// Mean Elo of each association over the seasons it has a profile for.
std::vector<double> mean_elo(const Dataset& dataset);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Serialisation. Column and key names are stable.
std::string report_to_csv(const ProbabilityReport& report);
nlohmann::json report_to_json(const ProbabilityReport& report);
std::string seeding_to_csv(std::span<const SeedingEffect> effects);
nlohmann::json seeding_to_json(std::span<const SeedingEffect> effects);
std::string convergence_to_csv(std::span<const mc::ConvergenceSeries> series);
nlohmann::json convergence_to_json(std::span<const mc::ConvergenceSeries> series);

}  // namespace qualsim::analysis
