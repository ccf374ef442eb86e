#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualsim/bracket.hpp"
#include "qualsim/mc.hpp"

namespace qualsim {

enum class ExperimentKind { baseline, weighted, sensitivity, seeding, convergence };

std::string_view to_string(ExperimentKind kind);

class ManifestError : public std::runtime_error {
 public:
  ManifestError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// One experiment. Keys absent from the file take the defaults below; the
// season weights default to the recency-weighted vector for `weighted` and to
// uniform otherwise.
struct ExperimentManifest {
  ExperimentKind kind = ExperimentKind::baseline;
  std::uint64_t iterations = 1'000'000;
  std::uint64_t seed = 42;
  unsigned partitions = 1;
  double scaling = 400.0;
  bracket::SeedingMode seeding = bracket::SeedingMode::seeded;
  std::array<double, kSeasonCount> weights = mc::SamplingPolicy::uniform().season_weights;
  // Format names resolve to <data>/formats/<name>.fmt; entries containing a
  // '/' are paths relative to the manifest's directory.
  std::vector<std::string> formats = {"pre2018", "post2018"};
  std::vector<double> s_values = {400.0, 600.0, 800.0};
  std::vector<std::uint64_t> checkpoints = mc::kDefaultCheckpoints;
  double gs_premium = 10.0e6;
  std::string output = "out";

  bool operator==(const ExperimentManifest&) const = default;
};

ExperimentManifest parse_manifest(std::string_view text);
ExperimentManifest load_manifest(const std::filesystem::path& path);

// Canonical form: every key, fixed order, shortest round-trip numbers.
std::string to_text(const ExperimentManifest& manifest);

// `base` is the directory relative format paths are resolved against.
mc::RunConfig make_run_config(const ExperimentManifest& manifest, const std::filesystem::path& data_root,
                              const std::filesystem::path& base = ".");

}  // namespace qualsim
