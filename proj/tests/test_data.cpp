#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "support.hpp"

using namespace qualsim;
using qualsim::test::ScratchDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::filesystem::path& p, const std::string& body) { std::ofstream(p, std::ios::binary) << body; }

void copy_fixtures(const std::filesystem::path& to) {
  for (const char* f : {"ranks.csv", "coefficients.csv", "elo.csv"}) {
    std::filesystem::copy_file(test::data_dir() / "fixtures" / f, to / f);
  }
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("shipped fixture values") {
  const auto bundle = data::load_fixtures(test::data_dir() / "fixtures");
  const auto& d = bundle.dataset;
  const auto hungary = *d.seasons[4].profiles[d.index_of("Hungary")];
  CHECK(hungary.coefficient == Coefficient::parse("3.5"));
  CHECK(hungary.elo == 1468.0);
  const auto kosovo = *d.seasons[2].profiles[d.index_of("Kosovo")];
  CHECK(kosovo.coefficient == Coefficient::parse("0"));
  CHECK(kosovo.elo == 1041.0);
  CHECK(d.seasons[0].profiles[d.index_of("Austria")]->coefficient.to_string() == "43.135");
  CHECK(d.seasons[0].profiles[d.index_of("Poland")]->coefficient.to_string() == "17.3");
  CHECK(d.associations.front() == "Turkey");
  CHECK(d.associations.back() == "Kosovo");
  CHECK(bundle.provenance.find("fixtures") != std::string::npos);
}

TEST_CASE("empty directory") {
  ScratchDir dir("empty");
  try {
    data::load_fixtures(dir.path);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "missing file ranks.csv");
  }
}

TEST_CASE("malformed cell reports row and column") {
  ScratchDir dir("malformed");
  copy_fixtures(dir.path);
  auto elo = slurp(dir.path / "elo.csv");
  const auto pos = elo.find("Hungary,2019/20,1468");
  REQUIRE(pos != std::string::npos);
  elo.replace(pos, 20, "Hungary,2019/20,abc");
  spit(dir.path / "elo.csv", elo);
  const auto row = static_cast<std::size_t>(std::count(elo.begin(), elo.begin() + pos, '\n') + 1);
  try {
    data::load_fixtures(dir.path);
    FAIL("expected a parse error");
  } catch (const data::ParseError& e) {
    CHECK(e.row() == row);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("elo.csv") != std::string::npos);
  }
}

TEST_CASE("validation failure is structured") {
  ScratchDir dir("invalid");
  copy_fixtures(dir.path);
  auto ranks = slurp(dir.path / "ranks.csv");
  std::string filtered;
  std::istringstream in(ranks);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("Hungary,2017/18", 0) != 0) filtered += line + '\n';
  }
  spit(dir.path / "ranks.csv", filtered);
  try {
    data::load_fixtures(dir.path);
    FAIL("expected a validation error");
  } catch (const data::ValidationError& e) {
    CHECK(e.report().has(ViolationKind::missing_association));
  }
  CHECK_NOTHROW(data::load_fixtures(dir.path, false));
}

TEST_CASE("write then load round-trips") {
  ScratchDir dir("roundtrip");
  const auto& original = test::shipped();
  data::write_fixtures(original, dir.path);
  const auto again = data::load_fixtures(dir.path).dataset;
  REQUIRE(again.associations == original.associations);
  for (int s = 0; s < kSeasonCount; ++s) {
    CHECK(again.seasons[s].ranks == original.seasons[s].ranks);
    for (int a = 0; a < original.association_count(); ++a) {
      const auto& x = original.seasons[s].profiles[a];
      const auto& y = again.seasons[s].profiles[a];
      REQUIRE(x.has_value() == y.has_value());
      if (x) {
        CHECK(x->coefficient == y->coefficient);
        CHECK(x->elo == y->elo);
      }
    }
  }
  for (const char* f : {"ranks.csv", "coefficients.csv", "elo.csv"}) {
    data::write_fixtures(again, dir.path / "second");
    CHECK(slurp(dir.path / f) == slurp(dir.path / "second" / f));
  }
  CHECK(slurp(dir.path / "coefficients.csv").find("87.755") != std::string::npos);
}

TEST_CASE("csv quoting") {
  const auto t = data::parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n", "t.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "x, y");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK_THROWS_AS(data::parse_csv("a,b\n1\n", "t.csv"), data::ParseError);
}

TEST_CASE("recorded Club Elo snapshot") {
  const auto mappings = data::load_club_mapping(test::fixture_dir() / "clubelo_mapping.csv");
  REQUIRE(mappings.size() == 2);
  const auto& m = mappings.front();
  CHECK(m.season == "2019/20");
  const auto snapshot = data::parse_clubelo_snapshot(slurp(test::fixture_dir() / "clubelo_2019-09-01.csv"), m);
  const auto csv = snapshot.to_csv();
  CHECK(csv.rfind("association,season,value\n", 0) == 0);
  CHECK(csv.find("Hungary,2019/20,1468\n") != std::string::npos);
  CHECK(csv.find("Croatia,2019/20,1682\n") != std::string::npos);
  CHECK(snapshot.rows.size() == 4);
  CHECK(snapshot.missing == std::vector<std::string>{"Wales"});
  CHECK(csv.find("Wales") == std::string::npos);
}

TEST_CASE("degenerate Club Elo responses") {
  data::ClubMapping m{"2019/20", {{"Hungary", "Ferencvaros"}}};
  try {
    data::parse_clubelo_snapshot("", m);
    FAIL("expected no rows");
  } catch (const data::FetchError& e) {
    CHECK(std::string(e.what()) == "no rows");
    CHECK_FALSE(e.retryable());
  }
  CHECK_THROWS_AS(data::parse_clubelo_snapshot("Rank,Club,Country,Level,Elo,From,To\n", m), data::FetchError);
  CHECK_THROWS_AS(data::parse_clubelo_snapshot("Rank,Team\n1,Ferencvaros\n", m), DataError);
}

TEST_CASE("fetch over a local recorded server") {
  httplib::Server server;
  const std::string body = slurp(test::fixture_dir() / "clubelo_2019-09-01.csv");
  server.Get("/2019-09-01", [&](const httplib::Request&, httplib::Response& res) { res.set_content(body, "text/csv"); });
  server.Get("/2019-09-02", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  server.Get("/2019-09-03", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string host = "127.0.0.1:" + std::to_string(port);

  CHECK(data::fetch_clubelo_body("2019-09-01", host) == body);
  try {
    data::fetch_clubelo_body("2019-09-02", host);
    FAIL("expected a retryable error");
  } catch (const data::FetchError& e) {
    CHECK(e.retryable());
  }
  try {
    data::fetch_clubelo_body("2019-09-03", host);
    FAIL("expected a permanent error");
  } catch (const data::FetchError& e) {
    CHECK_FALSE(e.retryable());
  }
  server.stop();
  worker.join();
  CHECK_THROWS_AS(data::fetch_clubelo_body("2019-09-01", host), data::FetchError);
}

}
