#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dimsim/io.hpp"

namespace fs = std::filesystem;
using dimsim::cli::run;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("unknown methods and bad arguments are operational errors") {
  std::ostringstream out, err;
  CHECK(run({"verify", "BOGUS"}, out, err) == 1);
  CHECK(err.str().find("BOGUS") != std::string::npos);
  CHECK(run({"region", "--method", "DIMSIM2A", "--kind", "Salpha", "--alpha", "0"}, out, err) == 1);
  CHECK(run({"frobnicate"}, out, err) == 1);
  CHECK(run({"solve", "--method", "DIMSIM2A", "--problem", "test", "--h", "0.3"}, out, err) == 1);
}

TEST_CASE("solve writes trajectory, metadata and manifest; replay is byte-identical") {
  TempDir dir("dimsim_cli_solve");
  std::ostringstream out, err;
  const std::vector<std::string> args{"solve", "--method", "DIMSIM1L", "--problem", "test", "--lambda0", "0",
                                      "--lambda1", "-1", "--h", "0.125", "--start", "exact-stages",
                                      "--out", (dir.path / "a").string()};
  REQUIRE(run(args, out, err) == 0);
  const fs::path a = dir.path / "a";
  const std::string stem = "solve_DIMSIM1L_test";
  CHECK(fs::exists(a / (stem + ".csv")));
  CHECK(fs::exists(a / (stem + ".json")));
  const auto manifest = dimsim::read_json(a / (stem + ".manifest.json")).get<dimsim::RunManifest>();
  CHECK(manifest.command == "solve");
  CHECK(std::find(manifest.args.begin(), manifest.args.end(), "--out") == manifest.args.end());

  REQUIRE(run({"replay", (a / (stem + ".manifest.json")).string(), "--out", (dir.path / "b").string()}, out, err) == 0);
  for (const auto& name : manifest.outputs) {
    if (std::find(manifest.nondeterministic_outputs.begin(), manifest.nondeterministic_outputs.end(), name) !=
        manifest.nondeterministic_outputs.end())
      continue;
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(dir.path / "b" / name));
  }
  CHECK(slurp(a / (stem + ".manifest.json")) == slurp(dir.path / "b" / (stem + ".manifest.json")));
}

TEST_CASE("expectation mismatches exit with code 2") {
  TempDir dir("dimsim_cli_expect");
  std::ostringstream out, err;
  dimsim::write_json(dir.path / "good.json", {{"DIMSIM2L", {{"C", 1.17}, {"C_eff", 0.585}}}});
  dimsim::write_json(dir.path / "bad.json", {{"DIMSIM2L", {{"C", 1.5}}}});
  CHECK(run({"verify", "--ssp", "DIMSIM2L", "--out", dir.path.string(), "--expect", (dir.path / "good.json").string()},
            out, err) == 0);
  CHECK(run({"verify", "--ssp", "DIMSIM2L", "--out", dir.path.string(), "--expect", (dir.path / "bad.json").string()},
            out, err) == 2);
  CHECK(fs::exists(dir.path / "DIMSIM2L.json"));
  CHECK(fs::exists(dir.path / "table.json"));
}

TEST_CASE("region writes the boundary CSV and sidecar") {
  TempDir dir("dimsim_cli_region");
  std::ostringstream out, err;
  REQUIRE(run({"region", "--method", "DIMSIM1L", "--kind", "SE", "--n-angles", "90", "--out", dir.path.string()}, out,
              err) == 0);
  const std::string csv = slurp(dir.path / "region_DIMSIM1L_SE.csv");
  CHECK(csv.rfind("theta,boundary_re,boundary_im\n", 0) == 0);
  const auto side = dimsim::read_json(dir.path / "region_DIMSIM1L_SE.json");
  CHECK(side.contains("area"));
  CHECK(side.contains("interval"));
  CHECK(side.contains("flags"));
}

TEST_CASE("converge on the constant problem reports zero error") {
  TempDir dir("dimsim_cli_converge");
  std::ostringstream out, err;
  REQUIRE(run({"converge", "--method", "DIMSIM2A,DIMSIM3L", "--problem", "constant", "--h", "0.25", "--levels", "3",
               "--out", dir.path.string()},
              out, err) == 0);
  const auto j = dimsim::read_json(dir.path / "converge_constant.json");
  for (const auto& r : j["results"])
    for (const auto& row : r["rows"]) CHECK(row["error"].get<double>() == 0.0);
}
