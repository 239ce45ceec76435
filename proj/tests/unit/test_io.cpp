#include "doctest.h"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "oracle/bessel_series.hpp"
#include "tmpdir.hpp"
#include "tumorbif/errors.hpp"
#include "tumorbif/io.hpp"

using namespace tumorbif;
using io::Json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

Branch sample_branch() {
  Branch b;
  b.l = 2;
  b.k = 1;
  b.G_kl = 174.8;
  b.points.push_back({0.0, 174.8, ShapeCoeffs::zero(2, 3), 1e-13, 0});
  ShapeCoeffs rho = ShapeCoeffs::mode(2, 1, 0.01, 3);
  rho.a[2] = 1.0 / 3.0 * 1e-4;
  b.points.push_back({0.01, 174.2, rho, 2e-10, 3});
  b.warnings.push_back("note");
  return b;
}

}  // namespace

TEST_CASE("unit radius A") {
  CHECK(io::unit_radius_A() == doctest::Approx(oracle::A_for_radius(1.0)).epsilon(1e-14));
  CHECK(io::unit_radius_A() == doctest::Approx(0.892779931793069).epsilon(1e-14));
}

TEST_CASE("config defaults and validation") {
  io::RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.model.resolved_A() == io::unit_radius_A());
  CHECK(c.field_options().grid.n_theta == 128);
  CHECK(c.continuation_options().tol == 1e-8);

  c.numerics.n_theta = 127;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.model.A = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.model.f_kind = "logistic";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.out_dir.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.model.f_kind = "michaelis_menten";
  c.model.sigma = 3.0;
  CHECK(c.model.nutrient().kind() == NutrientFn::Kind::MichaelisMenten);
}

TEST_CASE("config JSON") {
  io::RunConfig c;
  c.model.A = 0.4;
  c.model.G = 12.5;
  c.numerics.n_r = 40;
  c.task.branch_files = {"a.json", "b.json"};
  c.task.seed = 77;
  const io::RunConfig back = io::config_from_json(io::to_json(c));
  CHECK(io::to_json(back) == io::to_json(c));

  const io::RunConfig partial = io::config_from_json(Json::parse(R"({"numerics": {"n_theta": 96}})"));
  CHECK(partial.numerics.n_theta == 96);
  CHECK(partial.numerics.n_r == 48);
  CHECK_FALSE(partial.model.G.has_value());

  CHECK_THROWS_AS(io::config_from_json(Json::parse(R"({"numerics": {"n_thet": 96}})")), ConfigError);
  CHECK_THROWS_AS(io::config_from_json(Json::parse(R"({"extra": 1})")), ConfigError);
  CHECK_THROWS_AS(io::config_from_json(Json::parse(R"({"model": {"A": "half"}})")), ConfigError);
  CHECK_THROWS_AS(io::config_from_json(Json::parse(R"({"model": {"G": [1]}})")), ConfigError);
  CHECK_THROWS_AS(io::config_from_json(Json::parse(R"({"task": 3})")), ConfigError);

  TempDir dir;
  CHECK_THROWS_AS(io::load_config(dir / "missing.json"), ConfigError);
  io::write_text(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(io::load_config(dir / "bad.json"), ConfigError);
  io::write_text(dir / "ok.json", R"({"model": {"A": 0.3}, "out_dir": "elsewhere"})");
  const io::RunConfig loaded = io::load_config(dir / "ok.json");
  CHECK(loaded.model.A == 0.3);
  CHECK(loaded.out_dir == "elsewhere");
}

TEST_CASE("result file round trip") {
  io::ResultFile r;
  r.command = "radial";
  r.config = io::to_json(io::RunConfig{});
  r.payload = {{"R_A", 1.0000000000000002}, {"list", {1, 2, 3}}, {"tiny", 1e-300}};
  r.provenance.n_r = 48;
  r.provenance.n_theta = 128;
  r.provenance.radial_grid = 256;
  r.provenance.tolerances = {{"ode_tol", 1e-14}};
  r.provenance.wall_time_s = 0.125;
  r.provenance.library_version = "0.1.0";

  TempDir dir;
  io::write_result(r, dir / "r.json");
  const io::ResultFile back = io::read_result(dir / "r.json");
  CHECK(back == r);
  CHECK(io::to_json(back)["schema_version"] == io::kSchemaVersion);

  Json j = io::to_json(r);
  j["schema_version"] = 99;
  CHECK_THROWS_AS(io::result_from_json(j), ConfigError);
  CHECK_THROWS_AS(io::result_from_json(Json::parse(R"({"schema_version": 1})")), ConfigError);
  CHECK_THROWS_AS(io::read_result(dir / "absent.json"), ConfigError);
  io::write_text(dir / "plain", "x");
  CHECK_THROWS_AS(io::write_result(r, dir / "plain" / "r.json"), Error);
}

TEST_CASE("branch record round trip") {
  const Branch b = sample_branch();
  const Branch back = io::branch_from_json(io::to_json(b));
  CHECK(back.l == b.l);
  CHECK(back.k == b.k);
  CHECK(back.G_kl == b.G_kl);
  CHECK(back.warnings == b.warnings);
  REQUIRE(back.points.size() == b.points.size());
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    CHECK(back.points[i].eps == b.points[i].eps);
    CHECK(back.points[i].G == b.points[i].G);
    CHECK(back.points[i].rho.a == b.points[i].rho.a);
    CHECK(back.points[i].iterations == b.points[i].iterations);
  }
  CHECK_THROWS_AS(io::branch_from_json(Json::parse(R"({"l": 2})")), ConfigError);
}

TEST_CASE("CSV output") {
  TempDir dir;
  io::write_csv(dir / "t.csv", {"a", "b"}, {{1.0, 1.0 / 3.0}, {-2.5, 1e-20}});
  std::ifstream in(dir / "t.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  CHECK(std::stod(line.substr(line.find(',') + 1)) == 1.0 / 3.0);
  CHECK_THROWS_AS(io::write_csv(dir / "u.csv", {"a", "b"}, {{1.0}}), Error);
}

TEST_CASE("bifurcation diagram") {
  TempDir dir;
  const std::vector<BifurcationPoint> pts{{4, 2, 2, 953.17, true}, {6, 2, 3, 2782.33, true}, {8, 2, 4, 6109.89, true}};
  io::emit_diagram(pts, {}, dir / "d.svg");
  const std::string svg = slurp(dir / "d.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count_of(svg, "class=\"bifurcation-point\"") == 3);
  CHECK(svg.find("</svg>") != std::string::npos);

  io::emit_diagram({}, {{sample_branch(), "mode 2"}}, dir / "e.svg");
  CHECK(count_of(slurp(dir / "e.svg"), "class=\"branch\"") == 1);
  CHECK_THROWS_AS(io::emit_diagram({}, {}, dir / "f.svg"), DomainError);
}

TEST_CASE("outline of the trivial point is a circle") {
  TempDir dir;
  Branch b;
  b.l = 2;
  b.k = 1;
  b.points.push_back({0.0, 10.0, ShapeCoeffs::zero(2, 2), 0.0, 0});
  const double R = 1.7;
  io::emit_outlines(b, R, dir / "o.svg");
  const std::string svg = slurp(dir / "o.svg");
  CHECK(count_of(svg, "class=\"outline\"") == 1);
  for (const auto& q : outline(b.points[0].rho, R, 90)) CHECK(std::hypot(q[0], q[1]) == doctest::Approx(R));
  CHECK_THROWS_AS(io::emit_outlines(Branch{}, R, dir / "p.svg"), DomainError);
  CHECK_THROWS_AS(io::emit_outlines(b, R, dir / "p.svg", 0), DomainError);
}

TEST_CASE("write_text creates parents and reports unwritable paths") {
  TempDir dir;
  io::write_text(dir / "missing" / "deeper" / "x.txt", "x");
  CHECK(slurp(dir / "missing" / "deeper" / "x.txt") == "x");
  CHECK_THROWS_AS(io::write_text(dir / "missing" / "deeper" / "x.txt" / "y.txt", "y"), Error);
}
