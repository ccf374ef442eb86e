#include <array>
#include <cmath>

#include "doctest.h"
#include "qualsim/elo.hpp"
#include "qualsim/mc.hpp"
#include "support.hpp"

using namespace qualsim;
using namespace qualsim::mc;

namespace {

RunConfig paired_config(std::uint64_t iterations, std::uint64_t seed = 42, unsigned partitions = 1) {
  RunConfig c;
  c.iterations = iterations;
  c.master_seed = seed;
  c.partitions = partitions;
  c.formats = {test::old_format(), test::new_format()};
  return c;
}

double p(const FormatTally& t, std::uint64_t runs, const std::string& name) {
  return t.counts[test::assoc(name)] / static_cast<double>(runs);
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("season sampling frequencies") {
  Rng rng = make_stream(1, 0);
  const int n = 1'000'000;
  std::array<int, kSeasonCount> uniform{}, weighted{};
  const auto w = SamplingPolicy::recency_weighted();
  for (int k = 0; k < n; ++k) {
    ++uniform[sample_season(rng, SamplingPolicy::uniform()).index];
    ++weighted[sample_season(rng, w).index];
  }
  for (int c : uniform) CHECK(std::abs(c / double(n) - 0.2) <= 0.002);
  CHECK(std::abs(weighted[4] / double(n) - 0.30) <= 0.002);
  CHECK(std::abs(weighted[0] / double(n) - 0.10) <= 0.002);

  const SamplingPolicy point{{1, 0, 0, 0, 0}};
  for (int k = 0; k < 1000; ++k) CHECK(sample_season(rng, point).index == 0);
}

TEST_CASE("policies must be probability vectors") {
  CHECK_NOTHROW(SamplingPolicy::uniform().validate());
  CHECK_NOTHROW(SamplingPolicy::recency_weighted().validate());
  CHECK_THROWS_AS((SamplingPolicy{{0.5, 0.5, 0.5, -0.5, 0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SamplingPolicy{{0.2, 0.2, 0.2, 0.2, 0.1}}.validate()), std::invalid_argument);
}

TEST_CASE("profiles are coherent cells, Kosovo restricted to its seasons") {
  const auto& d = test::shipped();
  Rng rng = make_stream(5, 0);
  const int austria = d.index_of("Austria"), poland = d.index_of("Poland"), kosovo = d.index_of("Kosovo");
  const int n = 1'000'000;
  int both_first = 0;
  std::array<int, kSeasonCount> kosovo_cells{};
  for (int k = 0; k < n; ++k) {
    const auto cells = sample_profile_cells(rng, d);
    both_first += cells[austria] == 0 && cells[poland] == 0;
    ++kosovo_cells[cells[kosovo]];
  }
  CHECK(std::abs(both_first / double(n) - 1.0 / 25) <= 3 * std::sqrt(0.04 * 0.96 / n));
  CHECK(kosovo_cells[0] == 0);
  CHECK(kosovo_cells[1] == 0);
  for (int s = 2; s < 5; ++s) CHECK(std::abs(kosovo_cells[s] / double(n) - 1.0 / 3) <= 0.002);

  for (int k = 0; k < 2000; ++k) {
    const auto profiles = sample_profiles(rng, d);
    REQUIRE(profiles.size() == 45u);
    const auto& a = profiles[austria];
    bool matches_a_cell = false;
    for (const auto& t : d.seasons) {
      const auto& cell = t.profiles[austria];
      matches_a_cell |= cell && cell->coefficient == a.coefficient && cell->elo == a.elo;
    }
    CHECK(matches_a_cell);
    if (a.coefficient == Coefficient::parse("43.135")) CHECK(a.elo == d.seasons[0].profiles[austria]->elo);
  }
}

TEST_CASE("a single-season dataset gives deterministic profiles") {
  Dataset d = test::shipped();
  for (int s = 0; s < 4; ++s) {
    for (auto& p : d.seasons[s].profiles) p.reset();
  }
  Rng rng = make_stream(8, 0);
  const auto first = sample_profiles(rng, d);
  const auto second = sample_profiles(rng, d);
  for (std::size_t a = 0; a < first.size(); ++a) {
    CHECK(first[a].coefficient == second[a].coefficient);
    CHECK(first[a].elo == d.seasons[4].profiles[a]->elo);
  }
}

TEST_CASE("generated matrices") {
  Rng rng = make_stream(13, 0);
  const std::vector<double> equal(6, 1500.0);
  long ones = 0, cells = 0;
  for (int k = 0; k < 100'000; ++k) {
    const auto m = generate_matrices(rng, equal, {});
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i == j) continue;
        for (auto kind : {TieKind::one_leg, TieKind::two_leg}) {
          REQUIRE(m.advances(kind, i, j) != m.advances(kind, j, i));
          ones += m.advances(kind, i, j);
          ++cells;
        }
      }
    }
  }
  CHECK(std::abs(ones / double(cells) - 0.5) <= 0.005);

  const std::vector<double> hungary_croatia{1468.0, 1682.0};
  const int n = 1'000'000;
  int hungary = 0;
  for (int k = 0; k < n; ++k) hungary += generate_matrices(rng, hungary_croatia, {}).advances(TieKind::two_leg, 0, 1);
  CHECK(std::abs(hungary / double(n) - elo::win_prob_two_leg(1468.0, 1682.0)) <= 0.001);
  CHECK(std::abs(hungary / double(n) - 0.149) <= 0.002);
}

TEST_CASE("run rejects bad configs") {
  const auto& d = test::shipped();
  auto c = paired_config(0);
  CHECK_THROWS_AS(run(c, d), std::invalid_argument);
  c = paired_config(10);
  c.partitions = 0;
  CHECK_THROWS_AS(run(c, d), std::invalid_argument);
  c = paired_config(10);
  c.formats.clear();
  CHECK_THROWS_AS(run(c, d), std::invalid_argument);
  c = paired_config(10);
  c.checkpoints = {5, 3};
  CHECK_THROWS_AS(run(c, d), std::invalid_argument);
}

TEST_CASE("fixed seed and partitions reproduce the tally bit for bit") {
  const auto& d = test::shipped();
  for (unsigned parts : {1u, 3u}) {
    auto c = paired_config(20'000, 7, parts);
    c.checkpoints = {1'000, 10'000, 20'000};
    const auto a = run(c, d);
    const auto b = run(c, d);
    CHECK(a == b);
    CHECK(a.runs == 20'000);
    for (const auto& ft : a.formats) {
      for (auto count : ft.counts) CHECK(count <= a.runs);
      CHECK(ft.convergence.back().elo_sum == ft.elo_sum);
      CHECK(ft.convergence.back().qualified == ft.qualified);
    }
  }
}

TEST_CASE("Turkey always qualifies under the old format") {
  const auto t = run(paired_config(20'000), test::shipped());
  CHECK(t.formats[0].counts[test::assoc("Turkey")] == t.runs);
  CHECK(p(t.formats[0], t.runs, "Turkey") == 1.0);
}

TEST_CASE("partition count leaves frequencies unchanged") {
  const auto& d = test::shipped();
  const std::uint64_t n = 100'000;
  const auto one = run(paired_config(n, 42, 1), d);
  const auto four = run(paired_config(n, 42, 4), d);
  CHECK_FALSE(one == four);
  for (std::size_t f = 0; f < 2; ++f) {
    for (int a = 0; a < d.association_count(); ++a) {
      const double p1 = one.formats[f].counts[a] / double(n);
      const double p4 = four.formats[f].counts[a] / double(n);
      const double se = std::sqrt((p1 * (1 - p1) + p4 * (1 - p4)) / n);
      CAPTURE(d.associations[a]);
      CHECK(std::abs(p1 - p4) <= std::max(3 * se, 1e-12));
    }
  }
}

TEST_CASE("tally merge is associative and commutative") {
  const auto& d = test::shipped();
  auto c = paired_config(3'000);
  c.checkpoints = {1'000, 3'000};
  c.master_seed = 1;
  const auto a = run(c, d);
  c.master_seed = 2;
  const auto b = run(c, d);
  c.master_seed = 3;
  const auto e = run(c, d);

  auto ab = a;
  ab.merge(b);
  auto ba = b;
  ba.merge(a);
  CHECK(ab == ba);
  auto ab_e = ab;
  ab_e.merge(e);
  auto be = b;
  be.merge(e);
  auto a_be = a;
  a_be.merge(be);
  CHECK(ab_e == a_be);
  CHECK(ab_e.runs == 9'000);
  for (int x = 0; x < d.association_count(); ++x) {
    CHECK(ab_e.formats[1].counts[x] == a.formats[1].counts[x] + b.formats[1].counts[x] + e.formats[1].counts[x]);
  }

  auto single = c;
  single.formats = {test::new_format()};
  auto other = run(single, d);
  CHECK_THROWS_AS(other.merge(a), std::invalid_argument);
}

TEST_CASE("common random numbers shrink the variance of the paired difference") {
  const auto& d = test::shipped();
  const std::uint64_t n = 100'000;
  const auto paired = run(paired_config(n, 42), d);
  auto old_only = paired_config(n, 1001);
  old_only.formats = {test::old_format()};
  auto new_only = paired_config(n, 2002);
  new_only.formats = {test::new_format()};
  const auto t_old = run(old_only, d);
  const auto t_new = run(new_only, d);

  int compared = 0;
  for (int a = 0; a < d.association_count(); ++a) {
    const double po = t_old.formats[0].counts[a] / double(n);
    const double pn = t_new.formats[0].counts[a] / double(n);
    const double po_p = paired.formats[0].counts[a] / double(n);
    const double pn_p = paired.formats[1].counts[a] / double(n);
    // CRN cannot help where one indicator is (nearly) constant.
    if (std::min({po, pn, 1 - po, 1 - pn, po_p, pn_p, 1 - po_p}) < 0.01) continue;
    const double mean = paired.paired.net[a] / double(n);
    const double var_paired = paired.paired.discordant[a] / double(n) - mean * mean;
    const double var_independent = po * (1 - po) + pn * (1 - pn);
    CAPTURE(d.associations[a]);
    CHECK(var_paired < var_independent);
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("average Elo population is configurable") {
  const auto& d = test::shipped();
  auto c = paired_config(5'000);
  const auto sample_band = run(c, d);
  c.average_elo_min_rank = 1;
  const auto everyone = run(c, d);
  for (std::size_t f = 0; f < 2; ++f) {
    CHECK(everyone.formats[f].counts == sample_band.formats[f].counts);
    CHECK(everyone.formats[f].qualified > sample_band.formats[f].qualified);
  }
  c.average_elo_min_rank = 56;
  const auto nobody = run(c, d);
  CHECK(nobody.formats[0].qualified == 0);
  CHECK(nobody.formats[0].average_elo() == 0.0);
}

TEST_CASE("convergence series") {
  const auto& d = test::shipped();
  auto c = paired_config(1);
  const auto series = convergence_series(c, d, {1'000, 2'000, 4'000});
  REQUIRE(series.size() == 2);
  CHECK(series[0].format == "pre-2018");
  CHECK(series[0].points.size() == 3);
  CHECK(series[0].points.back().iterations == 4'000);
  CHECK(series[1].points.back().average_elo() > series[1].points.front().average_elo() - 50);
  CHECK(convergence_series(c, d, {1'000, 2'000, 4'000})[1].points.back().elo_sum == series[1].points.back().elo_sum);
  CHECK_THROWS_AS(convergence_series(c, d, {2'000, 1'000}), std::invalid_argument);
}

}
