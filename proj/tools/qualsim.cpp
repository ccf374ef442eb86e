#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qualsim/analysis.hpp"
#include "qualsim/data.hpp"
#include "qualsim/manifest.hpp"
#include "qualsim/svg_chart.hpp"

#ifndef QUALSIM_VERSION
#define QUALSIM_VERSION "unknown"
#endif
#ifndef QUALSIM_DATA_DIR
#define QUALSIM_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace qualsim;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kBadManifest = 2;
constexpr int kDataFailure = 3;

// Exit codes travel as exceptions so nested helpers can bail out.
struct Exit {
  int code;
};

[[noreturn]] void fail(int code, const std::string& what) {
  std::cerr << "qualsim: " << what << '\n';
  throw Exit{code};
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kDataFailure, "cannot write " + path.string());
  out << body;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kDataFailure, "missing report " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

data::DatasetBundle load_data(const fs::path& root) {
  try {
    return data::load_fixtures(root / "fixtures");
  } catch (const std::exception& e) {
    fail(kDataFailure, e.what());
  }
}

struct SimulateOptions {
  std::string manifest;
  std::string data = QUALSIM_DATA_DIR;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> partitions;
  std::optional<std::uint64_t> iterations;
};

// The output directory is left out so a report body depends only on what was simulated.
json report_body(const ExperimentManifest& m, json results) {
  std::string manifest = to_text(m);
  manifest.erase(manifest.rfind("output = "));
  return {{"kind", std::string(to_string(m.kind))}, {"manifest", manifest}, {"results", std::move(results)}};
}

int simulate(const SimulateOptions& opt) {
  ExperimentManifest m;
  try {
    m = load_manifest(opt.manifest);
  } catch (const ManifestError& e) {
    fail(kBadManifest, opt.manifest + ": " + e.what());
  }
  if (opt.seed) m.seed = *opt.seed;
  if (opt.partitions) {
    if (*opt.partitions == 0) fail(kBadManifest, "--partitions must be positive");
    m.partitions = *opt.partitions;
  }
  if (opt.iterations) {
    if (*opt.iterations == 0) fail(kBadManifest, "--iterations must be positive");
    m.iterations = *opt.iterations;
  }
  if (!opt.out.empty()) m.output = opt.out;

  const fs::path data_root = opt.data;
  const auto bundle = load_data(data_root);
  const auto& dataset = bundle.dataset;
  mc::RunConfig config;
  try {
    config = make_run_config(m, data_root, fs::path(opt.manifest).parent_path());
  } catch (const std::exception& e) {
    fail(kBadManifest, e.what());
  }
  analysis::PrizeSchedule schedule;
  schedule.gs_premium = m.gs_premium;

  const auto started = std::chrono::steady_clock::now();
  std::string csv;
  json results;
  switch (m.kind) {
    case ExperimentKind::baseline:
    case ExperimentKind::weighted: {
      const auto tally = mc::run(config, dataset);
      const auto report = analysis::probabilities(tally, dataset, schedule);
      csv = analysis::report_to_csv(report);
      results = analysis::report_to_json(report);
      json averages = json::object();
      for (const auto& ft : tally.formats) averages[ft.format] = ft.average_elo();
      results["average_elo"] = averages;
      json flagged = json::array();
      for (const auto& impact : analysis::money_impact(report, schedule)) {
        if (impact.flagged) flagged.push_back({{"association", impact.association}, {"euros", impact.euros}});
      }
      results["money_flagged"] = flagged;
      break;
    }
    case ExperimentKind::sensitivity: {
      const auto sweep = analysis::sensitivity_sweep(config, dataset, m.s_values, schedule);
      results = json::array();
      for (const auto& row : sweep) {
        const auto body = analysis::report_to_csv(row.report);
        std::istringstream lines(body);
        std::string line;
        std::getline(lines, line);
        if (csv.empty()) csv = "scaling," + line + '\n';
        char s[32];
        std::snprintf(s, sizeof s, "%g", row.scaling);
        while (std::getline(lines, line)) csv += std::string(s) + ',' + line + '\n';
        results.push_back({{"scaling", row.scaling}, {"report", analysis::report_to_json(row.report)}});
      }
      break;
    }
    case ExperimentKind::seeding: {
      auto seeded_config = config;
      seeded_config.seeding = bracket::SeedingMode::seeded;
      auto unseeded_config = config;
      unseeded_config.seeding = bracket::SeedingMode::unseeded_random;
      const auto seeded = mc::run(seeded_config, dataset);
      const auto unseeded = mc::run(unseeded_config, dataset);
      const auto effects = analysis::seeding_contribution(seeded, unseeded, dataset, config.formats.back().name);
      csv = analysis::seeding_to_csv(effects);
      results = {{"format", config.formats.back().name}, {"effects", analysis::seeding_to_json(effects)}};
      break;
    }
    case ExperimentKind::convergence: {
      std::vector<std::uint64_t> checkpoints;
      for (auto c : m.checkpoints) {
        if (c <= m.iterations) checkpoints.push_back(c);
      }
      if (checkpoints.empty() || checkpoints.back() != m.iterations) checkpoints.push_back(m.iterations);
      const auto series = mc::convergence_series(config, dataset, checkpoints);
      csv = analysis::convergence_to_csv(series);
      results = analysis::convergence_to_json(series);
      break;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const fs::path out_dir = m.output;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const std::string stem(to_string(m.kind));
  write_file(out_dir / (stem + ".csv"), csv);
  write_file(out_dir / (stem + ".json"), report_body(m, std::move(results)).dump(2) + '\n');
  const json meta = {{"kind", stem},
                     {"seed", m.seed},
                     {"iterations", m.iterations},
                     {"partitions", m.partitions},
                     {"version", QUALSIM_VERSION},
                     {"wall_time_s", wall},
                     {"data", bundle.provenance}};
  write_file(out_dir / (stem + ".meta.json"), meta.dump(2) + '\n');
  std::cout << "wrote " << (out_dir / (stem + ".csv")).string() << " and " << (out_dir / (stem + ".json")).string()
            << " (" << wall << " s)\n";
  return kOk;
}

std::vector<chart::Bar> delta_bars(const json& report) {
  std::vector<std::pair<int, chart::Bar>> ranked;
  for (const auto& row : report.at("associations")) {
    ranked.push_back({row.at("latest_rank").get<int>(),
                      {row.at("association").get<std::string>(), 100.0 * row.at("delta").get<double>()}});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<chart::Bar> bars;
  for (auto& [rank, bar] : ranked) bars.push_back(std::move(bar));
  return bars;
}

std::vector<chart::Point> delta_points(const json& report) {
  std::vector<chart::Point> points;
  for (const auto& row : report.at("associations")) {
    points.push_back({100.0 * row.at("p_old").get<double>(), 100.0 * row.at("delta").get<double>(),
                      row.at("association").get<std::string>()});
  }
  return points;
}

int render_charts(const std::string& report_path, const std::string& out) {
  json doc;
  try {
    doc = json::parse(read_file(report_path));
  } catch (const json::exception& e) {
    fail(kDataFailure, report_path + ": " + e.what());
  }
  const fs::path out_dir = out.empty() ? fs::path(report_path).parent_path() : fs::path(out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  try {
    const std::string kind = doc.at("kind").get<std::string>();
    const json& results = doc.at("results");
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& svg) {
      write_file(out_dir / name, svg);
      written.push_back((out_dir / name).string());
    };
    if (kind == "baseline" || kind == "weighted") {
      const auto bars = delta_bars(results);
      emit(kind + "_delta.svg", chart::bar_chart(bars, {"Change in qualification probability (" + kind + ")",
                                                        "association, by access-list rank", "percentage points"}));
      const auto points = delta_points(results);
      emit(kind + "_scatter.svg",
           chart::scatter_chart(points, {"Change against old-format probability", "old-format probability (%)",
                                         "change (percentage points)"}));
    } else if (kind == "sensitivity") {
      for (const auto& run : results) {
        char s[32];
        std::snprintf(s, sizeof s, "%g", run.at("scaling").get<double>());
        emit(std::string("sensitivity_s") + s + "_delta.svg",
             chart::bar_chart(delta_bars(run.at("report")), {std::string("Change in qualification probability, s = ") + s,
                                                             "association, by access-list rank", "percentage points"}));
      }
      if (results.empty()) throw std::invalid_argument("empty report");
    } else if (kind == "seeding") {
      std::vector<chart::Bar> bars;
      for (const auto& e : results.at("effects")) {
        bars.push_back({e.at("association").get<std::string>(), e.at("contribution_pp").get<double>()});
      }
      emit("seeding.svg", chart::bar_chart(bars, {"Effect of seeding (" + results.at("format").get<std::string>() + ")",
                                                  "association", "percentage points"}));
    } else if (kind == "convergence") {
      std::vector<chart::Series> series;
      for (const auto& s : results) {
        chart::Series line{s.at("format").get<std::string>(), {}};
        for (const auto& p : s.at("points")) {
          line.points.emplace_back(p.at("iterations").get<double>(), p.at("average_elo").get<double>());
        }
        series.push_back(std::move(line));
      }
      emit("convergence.svg", chart::line_chart(series, {"Average Elo of qualified teams", "iterations", "Elo"}));
    } else {
      fail(kDataFailure, "unknown report kind " + kind);
    }
    for (const auto& w : written) std::cout << "wrote " << w << '\n';
  } catch (const Exit&) {
    throw;
  } catch (const std::exception& e) {
    fail(kDataFailure, report_path + ": " + e.what());
  }
  return kOk;
}

int validate(const std::string& data_root) {
  const auto bundle = load_data(data_root);
  std::cout << validate_dataset(bundle.dataset).summary() << '\n';
  return kOk;
}

struct FetchOptions {
  std::string date;
  std::string season;
  std::string mapping;
  std::string out;
  std::string host = "api.clubelo.com";
  std::string recorded;
};

int fetch_elo(const FetchOptions& opt) {
  try {
    const auto mappings = data::load_club_mapping(opt.mapping);
    const auto it = std::find_if(mappings.begin(), mappings.end(),
                                 [&](const data::ClubMapping& m) { return m.season == opt.season; });
    if (it == mappings.end()) fail(kDataFailure, "no club mapping for season " + opt.season);
    const std::string body =
        opt.recorded.empty() ? data::fetch_clubelo_body(opt.date, opt.host) : read_file(opt.recorded);
    const auto snapshot = data::parse_clubelo_snapshot(body, *it);
    write_file(opt.out, snapshot.to_csv());
    for (const auto& a : snapshot.missing) std::cout << "unmapped: " << a << '\n';
    std::cout << "wrote " << snapshot.rows.size() << " rows to " << opt.out << '\n';
  } catch (const Exit&) {
    throw;
  } catch (const data::FetchError& e) {
    fail(kDataFailure, std::string(e.what()) + (e.retryable() ? " (retryable)" : ""));
  } catch (const std::exception& e) {
    fail(kDataFailure, e.what());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Champions Path qualification simulator"};
  app.set_version_flag("--version", std::string(QUALSIM_VERSION));
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "run the experiment described by a manifest");
  simulate_cmd->add_option("--manifest", sim.manifest, "experiment manifest")->required();
  simulate_cmd->add_option("--data", sim.data, "data directory holding fixtures/ and formats/");
  simulate_cmd->add_option("--out", sim.out, "output directory (overrides the manifest)");
  simulate_cmd->add_option("--seed", sim.seed, "master seed (overrides the manifest)");
  simulate_cmd->add_option("--partitions", sim.partitions, "parallel partitions (overrides the manifest)");
  simulate_cmd->add_option("--iterations", sim.iterations, "iterations (overrides the manifest)");

  std::string report, chart_out;
  auto* chart_cmd = app.add_subcommand("chart", "render SVG charts from a report JSON");
  chart_cmd->add_option("--report", report, "report written by simulate")->required();
  chart_cmd->add_option("--out", chart_out, "output directory (default: next to the report)");

  std::string data_root = QUALSIM_DATA_DIR;
  auto* validate_cmd = app.add_subcommand("validate", "load and validate the fixtures");
  validate_cmd->add_option("--data", data_root, "data directory holding fixtures/");

  FetchOptions fetch;
  auto* fetch_cmd = app.add_subcommand("fetch-elo", "write a candidate elo.csv column from Club Elo");
  fetch_cmd->add_option("--date", fetch.date, "snapshot date, YYYY-MM-DD")->required();
  fetch_cmd->add_option("--season", fetch.season, "season label, e.g. 2019/20")->required();
  fetch_cmd->add_option("--mapping", fetch.mapping, "CSV association,season,club")->required();
  fetch_cmd->add_option("--out", fetch.out, "candidate CSV to write")->required();
  fetch_cmd->add_option("--host", fetch.host, "API host");
  fetch_cmd->add_option("--recorded", fetch.recorded, "use a recorded response body instead of the network");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadManifest;
  }

  try {
    if (*simulate_cmd) return simulate(sim);
    if (*chart_cmd) return render_charts(report, chart_out);
    if (*validate_cmd) return validate(data_root);
    if (*fetch_cmd) return fetch_elo(fetch);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "qualsim: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
