#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmpdir.hpp"
#include "tumorbif/cli.hpp"
#include "tumorbif/io.hpp"

using namespace tumorbif;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

// Sets an environment variable for the lifetime of the guard.
struct EnvGuard {
  explicit EnvGuard(const char* value) { ::setenv(io::kResultDirEnv, value, 1); }
  ~EnvGuard() { ::unsetenv(io::kResultDirEnv); }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"radial", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"--A", "abc", "radial"}).code == cli::kExitUsage);
  CHECK(run({"verify-multiplier", "--k", "2"}).code == cli::kExitUsage);
  CHECK(run({"trace", "--l", "2", "--k", "1"}).code == cli::kExitUsage);
  TempDir dir;
  const Run bad_A = run({"--out", dir.path().string(), "--A", "2", "radial"});
  CHECK(bad_A.code == cli::kExitUsage);
  CHECK(bad_A.err.find("A") != std::string::npos);
  CHECK(run({"--out", dir.path().string(), "--config", (dir / "none.json").string(), "radial"}).code ==
        cli::kExitUsage);
  CHECK(run({"--out", dir.path().string(), "--n-theta", "65", "radial"}).code == cli::kExitUsage);
}

TEST_CASE("help exits with 0") {
  const Run r = run({"--help"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("bifpoints") != std::string::npos);
}

TEST_CASE("radial writes its table and result file") {
  TempDir dir;
  const Run r = run({"--out", dir.path().string(), "--A", "0.5", "radial"});
  REQUIRE(r.code == cli::kExitOk);
  const io::ResultFile res = io::read_result(dir / "radial.json");
  CHECK(res.command == "radial");
  CHECK(res.schema_version == io::kSchemaVersion);
  CHECK(res.config["model"]["A"] == 0.5);
  CHECK(res.payload["R_A"].get<double>() == doctest::Approx(3.32584809902).epsilon(1e-10));
  CHECK(res.provenance.n_theta == 128);
  CHECK(res.provenance.library_version.size() > 0);
  CHECK(line_count(dir / "radial_profile.csv") > 10);
}

TEST_CASE("config file, environment and flag precedence") {
  TempDir dir;
  const auto cfg_dir = dir / "from_config";
  const auto env_dir = dir / "from_env";
  const auto flag_dir = dir / "from_flag";
  io::write_text(dir / "c.json", R"({"model": {"A": 0.4}, "out_dir": ")" + cfg_dir.string() + R"("})");

  REQUIRE(run({"--config", (dir / "c.json").string(), "radial"}).code == cli::kExitOk);
  CHECK(io::read_result(cfg_dir / "radial.json").config["model"]["A"] == 0.4);

  REQUIRE(run({"--config", (dir / "c.json").string(), "--A", "0.6", "radial"}).code == cli::kExitOk);
  CHECK(io::read_result(cfg_dir / "radial.json").config["model"]["A"] == 0.6);

  {
    EnvGuard env(env_dir.string().c_str());
    REQUIRE(run({"--config", (dir / "c.json").string(), "radial"}).code == cli::kExitOk);
    CHECK(std::filesystem::exists(env_dir / "radial.json"));
    REQUIRE(run({"--config", (dir / "c.json").string(), "--out", flag_dir.string(), "radial"}).code ==
            cli::kExitOk);
    CHECK(std::filesystem::exists(flag_dir / "radial.json"));
  }

  io::write_text(dir / "bad.json", R"({"model": {"B": 1}})");
  CHECK(run({"--config", (dir / "bad.json").string(), "radial"}).code == cli::kExitUsage);
}

TEST_CASE("spectrum, bifpoints and diagram") {
  TempDir dir;
  const std::string out = dir.path().string();
  REQUIRE(run({"--out", out, "spectrum"}).code == cli::kExitOk);
  CHECK(io::read_result(dir / "spectrum.json").payload["k1"] == 2);

  REQUIRE(run({"--out", out, "bifpoints", "--l", "2", "--count", "3"}).code == cli::kExitOk);
  const auto pts = io::read_result(dir / "bifpoints.json").payload["points"];
  REQUIRE(pts.size() == 3);
  CHECK(pts[0]["mode"] == 4);
  CHECK(line_count(dir / "bifpoints.csv") == 4);
  CHECK(run({"--out", out, "bifpoints", "--l", "1"}).code == cli::kExitUsage);
  CHECK(run({"--out", out, "bifpoints", "--count", "500"}).code == cli::kExitUsage);

  REQUIRE(run({"--out", out, "diagram", "--count", "3"}).code == cli::kExitOk);
  CHECK(std::filesystem::exists(dir / "diagram.svg"));
}

TEST_CASE("modes reports the estimates without failing") {
  TempDir dir;
  REQUIRE(run({"--out", dir.path().string(), "--k-max", "16", "modes"}).code == cli::kExitOk);
  CHECK(line_count(dir / "modes.csv") == 18);
}

TEST_CASE("verify-multiplier exit codes") {
  TempDir dir;
  const std::string out = dir.path().string();
  CHECK(run({"--out", out, "verify-multiplier", "--k", "2", "--G", "50"}).code == cli::kExitOk);
  CHECK(io::read_result(dir / "multiplier.json").payload["k"] == 2);
  CHECK(run({"--out", out, "verify-multiplier", "--k", "2", "--G", "50", "--bound", "1e-12"}).code ==
        cli::kExitCheckFailed);
  CHECK(run({"--out", out, "verify-multiplier", "--k", "2", "--G", "50", "--eps", "0.5"}).code ==
        cli::kExitUsage);
}

TEST_CASE("trace then diagram with the branch") {
  TempDir dir;
  const std::string out = dir.path().string();
  const Run t = run({"--out", out, "trace", "--l", "2", "--k", "1", "--eps-max", "0.01", "--steps", "2"});
  REQUIRE(t.code == cli::kExitOk);
  const auto branch_file = dir / "branch_l2_k1.json";
  REQUIRE(std::filesystem::exists(branch_file));
  CHECK(line_count(dir / "branch_l2_k1.csv") == 4);
  CHECK(std::filesystem::exists(dir / "branch_l2_k1_outlines.svg"));

  REQUIRE(run({"--out", out, "diagram", "--branch", branch_file.string()}).code == cli::kExitOk);
  CHECK(run({"--out", out, "diagram", "--branch", (dir / "radial.json").string()}).code == cli::kExitUsage);
  CHECK(run({"--out", out, "trace", "--l", "2", "--k", "1", "--eps-max", "0.5", "--steps", "2"}).code ==
        cli::kExitUsage);
}
