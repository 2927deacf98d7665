#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "support.hpp"
#include "terracut/error.hpp"

namespace {

int run(const std::string& args, const support::TempDir& dir) {
  const std::string command = std::string(TERRACUT_CLI) + " " + args + " > " + (dir / "stdout.txt").string() +
                              " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("exit status mapping") {
  using terracut::ErrorCode;
  CHECK(terracut::exit_status(ErrorCode::NonConvergence) == 3);
  CHECK(terracut::exit_status(ErrorCode::IoFailure) == 4);
  CHECK(terracut::exit_status(ErrorCode::ParseError) == 2);
  CHECK(terracut::exit_status(ErrorCode::IdMismatch) == 2);
  CHECK(terracut::exit_status(ErrorCode::DisconnectedGraph) == 2);
}

TEST_CASE("command line") {
  support::TempDir dir;
  const std::string data = (dir / "data").string();
  REQUIRE(run("synth --n 30 --p 3 --clusters 3 --seed 4 --out " + data, dir) == 0);
  const std::string inputs = " --attributes " + data + "/dataset.csv --geometry " + data + "/dataset.geojson";
  CHECK(std::filesystem::exists(dir / "data" / "truth.csv"));

  SUBCASE("ingest echoes the dataset") {
    CHECK(run("ingest" + inputs + " --out " + (dir / "ing").string(), dir) == 0);
    CHECK(support::read_file(dir / "ing" / "dataset.csv") == support::read_file(dir / "data" / "dataset.csv"));
    CHECK(support::read_file(dir / "stdout.txt").find("\"n\": 30") != std::string::npos);
  }
  SUBCASE("graph writes edge list and dense matrix") {
    CHECK(run("graph" + inputs + " --out " + (dir / "e.csv").string() + " --dense " + (dir / "d.csv").string(), dir) ==
          0);
    CHECK(support::read_file(dir / "e.csv").rfind("i,j\n", 0) == 0);
    const std::string dense = support::read_file(dir / "d.csv");
    CHECK(std::count(dense.begin(), dense.end(), '\n') == 30);
    CHECK(support::read_file(dir / "stdout.txt").find("\"connected\": true") != std::string::npos);
  }
  SUBCASE("cluster, fit and report chain through the partition file") {
    const std::string out = (dir / "c").string();
    REQUIRE(run("cluster" + inputs + " --k 3 --out " + out, dir) == 0);
    CHECK(std::filesystem::exists(dir / "c" / "cluster_map.svg"));
    CHECK(run("fit" + inputs + " --partition " + out + "/partition.csv --lambda 0.01 --out " + out, dir) == 0);
    CHECK(support::read_file(dir / "c" / "coefficients.csv").rfind("term,cluster_1,cluster_2,cluster_3\n", 0) == 0);
    CHECK(run("report" + inputs + " --partition " + out + "/partition.csv --out " + out, dir) == 0);
    CHECK(std::filesystem::exists(dir / "c" / "profiles.json"));
  }
  SUBCASE("sweep") {
    CHECK(run("sweep" + inputs + " --k-grid 2:4 --r-grid min,1e9 --out " + (dir / "s").string(), dir) == 0);
    const std::string csv = support::read_file(dir / "s" / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }
  SUBCASE("pipeline: flags override the config file") {
    support::write_file(dir / "run.toml", "[input]\nattributes = \"data/dataset.csv\"\ngeometry = "
                                          "\"data/dataset.geojson\"\n[cluster]\nk = 5\n[sweep]\nk_grid = 2:3\n"
                                          "[fit]\nlambda = 0.02\n");
    CHECK(run("pipeline --config " + (dir / "run.toml").string() + " --k 3 --out " + (dir / "p").string(), dir) == 0);
    CHECK(support::read_file(dir / "stdout.txt").find("\"k\": 3") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "p" / "manifest.json"));
  }
  SUBCASE("failures map to exit codes") {
    CHECK(run("cluster" + inputs + " --k 0 --out " + (dir / "x").string(), dir) == 2);
    CHECK(support::read_file(dir / "stderr.txt").find("KOutOfRange") != std::string::npos);
    CHECK(run("ingest --attributes " + (dir / "missing.csv").string() + " --geometry " + data +
                  "/dataset.geojson --out " + (dir / "x").string(),
              dir) == 4);
    CHECK(run("cluster" + inputs + " --bogus", dir) == 2);
    CHECK(run("", dir) == 2);
    CHECK(run("graph" + inputs + " --adjacency distance --radius 1 --out " + (dir / "g.csv").string(), dir) == 0);
    CHECK(run("cluster" + inputs + " --radius 1 --out " + (dir / "x").string(), dir) == 2);
    CHECK(support::read_file(dir / "stderr.txt").find("DisconnectedGraph") != std::string::npos);
  }
}
