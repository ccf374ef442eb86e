#include "qualsim/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qualsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = s.find(',');
    items.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return items;
}

template <typename T>
T parse_number(std::string_view s, int line, std::string_view key) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw ManifestError(line, "invalid value '" + std::string(s) + "' for " + std::string(key));
  }
  return value;
}

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::baseline: return "baseline";
    case ExperimentKind::weighted: return "weighted";
    case ExperimentKind::sensitivity: return "sensitivity";
    case ExperimentKind::seeding: return "seeding";
    case ExperimentKind::convergence: return "convergence";
  }
  return "baseline";
}

ExperimentManifest parse_manifest(std::string_view text) {
  ExperimentManifest m;
  bool have_kind = false;
  bool have_weights = false;
  std::vector<std::string> seen;

  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ManifestError(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    for (const auto& k : seen) {
      if (k == key) throw ManifestError(line_no, "duplicate key " + key);
    }
    seen.push_back(key);

    if (key == "kind") {
      bool found = false;
      for (auto k : {ExperimentKind::baseline, ExperimentKind::weighted, ExperimentKind::sensitivity,
                     ExperimentKind::seeding, ExperimentKind::convergence}) {
        if (value == to_string(k)) {
          m.kind = k;
          found = true;
        }
      }
      if (!found) throw ManifestError(line_no, "unknown experiment kind '" + std::string(value) + "'");
      have_kind = true;
    } else if (key == "iterations") {
      m.iterations = parse_number<std::uint64_t>(value, line_no, key);
      if (m.iterations == 0) throw ManifestError(line_no, "iterations must be positive");
    } else if (key == "seed") {
      m.seed = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "partitions") {
      m.partitions = parse_number<unsigned>(value, line_no, key);
      if (m.partitions == 0) throw ManifestError(line_no, "partitions must be positive");
    } else if (key == "scaling") {
      m.scaling = parse_number<double>(value, line_no, key);
      if (!(m.scaling > 0.0)) throw ManifestError(line_no, "scaling must be positive");
    } else if (key == "seeding") {
      if (value == "seeded") m.seeding = bracket::SeedingMode::seeded;
      else if (value == "unseeded-random") m.seeding = bracket::SeedingMode::unseeded_random;
      else throw ManifestError(line_no, "seeding must be seeded or unseeded-random");
    } else if (key == "weights") {
      const auto items = split_list(value);
      if (items.size() != kSeasonCount) throw ManifestError(line_no, "weights needs five values");
      for (std::size_t i = 0; i < items.size(); ++i) m.weights[i] = parse_number<double>(items[i], line_no, key);
      try {
        mc::SamplingPolicy{m.weights}.validate();
      } catch (const std::invalid_argument& e) {
        throw ManifestError(line_no, e.what());
      }
      have_weights = true;
    } else if (key == "formats") {
      m.formats.clear();
      for (auto item : split_list(value)) {
        if (item.empty()) throw ManifestError(line_no, "empty format name");
        m.formats.emplace_back(item);
      }
    } else if (key == "s_values") {
      m.s_values.clear();
      for (auto item : split_list(value)) {
        const double s = parse_number<double>(item, line_no, key);
        if (!(s > 0.0)) throw ManifestError(line_no, "s_values must be positive");
        m.s_values.push_back(s);
      }
    } else if (key == "checkpoints") {
      m.checkpoints.clear();
      for (auto item : split_list(value)) m.checkpoints.push_back(parse_number<std::uint64_t>(item, line_no, key));
      for (std::size_t i = 1; i < m.checkpoints.size(); ++i) {
        if (m.checkpoints[i] <= m.checkpoints[i - 1]) throw ManifestError(line_no, "checkpoints must be ascending");
      }
    } else if (key == "gs_premium") {
      m.gs_premium = parse_number<double>(value, line_no, key);
      if (!(m.gs_premium >= 0.0)) throw ManifestError(line_no, "gs_premium must be non-negative");
    } else if (key == "output") {
      if (value.empty()) throw ManifestError(line_no, "empty output directory");
      m.output = value;
    } else {
      throw ManifestError(line_no, "unknown key " + key);
    }
  }
  if (!have_kind) throw ManifestError(0, "missing key kind");
  if (!have_weights && m.kind == ExperimentKind::weighted) m.weights = mc::SamplingPolicy::recency_weighted().season_weights;
  if (m.kind != ExperimentKind::convergence && m.formats.size() != 2) {
    throw ManifestError(0, "comparisons need exactly two formats");
  }
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError(0, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string to_text(const ExperimentManifest& m) {
  std::string out;
  out += "kind = " + std::string(to_string(m.kind)) + '\n';
  out += "iterations = " + std::to_string(m.iterations) + '\n';
  out += "seed = " + std::to_string(m.seed) + '\n';
  out += "partitions = " + std::to_string(m.partitions) + '\n';
  out += "scaling = " + shortest(m.scaling) + '\n';
  out += std::string("seeding = ") + (m.seeding == bracket::SeedingMode::seeded ? "seeded" : "unseeded-random") + '\n';
  out += "weights = " + join(std::vector<double>(m.weights.begin(), m.weights.end()), shortest) + '\n';
  out += "formats = " + join(m.formats, [](const std::string& s) { return s; }) + '\n';
  out += "s_values = " + join(m.s_values, shortest) + '\n';
  out += "checkpoints = " + join(m.checkpoints, [](std::uint64_t c) { return std::to_string(c); }) + '\n';
  out += "gs_premium = " + shortest(m.gs_premium) + '\n';
  out += "output = " + m.output + '\n';
  return out;
}

mc::RunConfig make_run_config(const ExperimentManifest& m, const std::filesystem::path& data_root,
                              const std::filesystem::path& base) {
  mc::RunConfig config;
  config.iterations = m.iterations;
  config.master_seed = m.seed;
  config.partitions = m.partitions;
  config.scaling = elo::ScalingParam(m.scaling);
  config.seeding = m.seeding;
  config.policy = {m.weights};
  config.checkpoints = m.kind == ExperimentKind::convergence ? m.checkpoints : std::vector<std::uint64_t>{};
  for (const auto& name : m.formats) {
    const auto path = name.find('/') == std::string::npos ? data_root / "formats" / (name + ".fmt") : base / name;
    config.formats.push_back(load_format(path.string()));
  }
  return config;
}

}  // namespace qualsim
