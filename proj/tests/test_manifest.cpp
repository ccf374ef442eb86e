#include "doctest.h"
#include "qualsim/manifest.hpp"
#include "support.hpp"

using namespace qualsim;

TEST_SUITE("manifest") {

TEST_CASE("defaults and canonical round-trip") {
  const auto m = parse_manifest("kind = baseline\n");
  CHECK(m.iterations == 1'000'000);
  CHECK(m.seed == 42);
  CHECK(m.weights == mc::SamplingPolicy::uniform().season_weights);
  CHECK(parse_manifest(to_text(m)) == m);
  CHECK(to_text(parse_manifest(to_text(m))) == to_text(m));

  const auto w = parse_manifest("# recency\nkind = weighted\niterations = 500  # trailing comment\n");
  CHECK(w.weights == mc::SamplingPolicy::recency_weighted().season_weights);
  CHECK(w.iterations == 500);
  CHECK(parse_manifest(to_text(w)) == w);
}

TEST_CASE("every field survives a round-trip") {
  ExperimentManifest m;
  m.kind = ExperimentKind::convergence;
  m.iterations = 123;
  m.seed = 18446744073709551615ULL;
  m.partitions = 8;
  m.scaling = 612.5;
  m.seeding = bracket::SeedingMode::unseeded_random;
  m.weights = {0.1, 0.15, 0.2, 0.25, 0.3};
  m.formats = {"post2018"};
  m.s_values = {400, 1000.25};
  m.checkpoints = {10, 100};
  m.gs_premium = 12.5e6;
  m.output = "results/x";
  CHECK(parse_manifest(to_text(m)) == m);
}

TEST_CASE("invalid manifests") {
  for (const char* bad : {"", "iterations = 5\n", "kind = tournament\n", "kind = baseline\niterations = -5\n",
                          "kind = baseline\niterations = 0\n", "kind = baseline\niterations = many\n",
                          "kind = baseline\nweights = 0.5,0.5\n", "kind = baseline\nweights = 0.5,0.5,0.5,0,0\n",
                          "kind = baseline\nscaling = 0\n", "kind = baseline\nseeding = maybe\n",
                          "kind = baseline\ncolour = red\n", "kind = baseline\nkind = seeding\n",
                          "kind = baseline\nformats = pre2018\n", "kind = baseline\ncheckpoints = 10,5\n",
                          "kind = baseline\njust words\n", "kind = sensitivity\ns_values = 400,-1\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_manifest(bad), ManifestError);
  }
  try {
    parse_manifest("kind = baseline\n\niterations = -5\n");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("run config from a manifest") {
  const auto m = parse_manifest("kind = sensitivity\nscaling = 600\npartitions = 2\nseeding = unseeded-random\n");
  const auto c = make_run_config(m, test::data_dir());
  CHECK(c.scaling.value() == 600);
  CHECK(c.partitions == 2);
  CHECK(c.seeding == bracket::SeedingMode::unseeded_random);
  REQUIRE(c.formats.size() == 2);
  CHECK(c.formats[0] == test::old_format());
  CHECK(c.checkpoints.empty());
  CHECK_THROWS_AS(make_run_config(parse_manifest("kind = baseline\nformats = nope,post2018\n"), test::data_dir()),
                  FormatError);
}

TEST_CASE("shipped manifests parse") {
  for (const char* kind : {"baseline", "weighted", "sensitivity", "seeding", "convergence"}) {
    const auto m = load_manifest(std::filesystem::path(QUALSIM_TEST_DIR) / ".." / "manifests" / (std::string(kind) + ".manifest"));
    CHECK(to_string(m.kind) == kind);
    CHECK(m.iterations == 1'000'000);
  }
}

}
