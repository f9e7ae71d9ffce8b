#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "parasim/reportkit.hpp"
#include "parasim/scenarios.hpp"
#include "parasim/snapshot.hpp"

using namespace parasim;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "parasim_cli_test";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string("'") + PARASIM_BIN + "' " + args + " > '" + stdout_file + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// A baseline snapshot small enough to attack in well under a second.
fs::path small_baseline() {
  const fs::path dir = kRoot / "baseline";
  if (fs::exists(dir / "population.json")) return dir;
  write_text(kRoot / "small.cfg", R"([scenario]
kind = baseline
agents = 8
states = 4
host_symbols = 4
parasite_symbols = 8
seed = 2

[ga]
population_size = 10
max_generations = 10
stall_generations = 5
init_link_probability = 0.3
)");
  REQUIRE(run("evolve --config " + q(kRoot / "small.cfg") + " --out " + q(dir)) == 0);
  return dir;
}

struct Fresh {
  Fresh() { fs::remove_all(kRoot); }
};
const Fresh fresh;

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("measure --no-such-flag") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("measure --snapshot " + q(kRoot / "missing.json")) == 2);
}

TEST_CASE("measure prints a json report") {
  const fs::path base = small_baseline();
  const fs::path out = kRoot / "measure.json";
  REQUIRE(run("measure --snapshot " + q(base / "population.json"), out.string()) == 0);
  const auto doc = read_json(out);
  CHECK(doc.contains("mutual_understanding"));
  CHECK(doc["per_agent_env_info"].size() == 8);

  CHECK(run("mds --snapshot " + q(base / "population.json"), (kRoot / "mds.json").string()) == 0);
  CHECK(read_json(kRoot / "mds.json").contains("points"));
  CHECK(run("probe-shift --snapshot " + q(base / "population.json")) == 0);
  CHECK(run("validate --snapshot " + q(base / "population.json")) == 0);
}

TEST_CASE("validate reports a broken snapshot") {
  const fs::path base = small_baseline();
  auto doc = read_json(base / "population.json");
  // Drop every link: all agents become isolated.
  doc["edges"] = nlohmann::json::array();
  write_json(kRoot / "broken.json", doc);
  CHECK(run("validate --snapshot " + q(kRoot / "broken.json")) == 1);

  write_text(kRoot / "garbage.json", "{not json");
  CHECK(run("validate --snapshot " + q(kRoot / "garbage.json")) == 1);
}

TEST_CASE("attack with a fixed seed is reproducible and leaves its input alone") {
  const fs::path base = small_baseline();
  const std::string before = read_text(base / "population.json");
  const std::string cfg = q(fs::path(PARASIM_SOURCE_DIR) / "configs" / "attack.cfg");
  const std::string snap = " --snapshot " + q(base / "population.json");
  REQUIRE(run("attack --config " + cfg + snap + " --seed 7 --out " + q(kRoot / "a1")) == 0);
  REQUIRE(run("attack --config " + cfg + snap + " --seed 7 --jobs 2 --out " + q(kRoot / "a2")) == 0);

  for (const char* f : {"population.json", "history.csv", "measures.json", "manifest.json"}) {
    CAPTURE(f);
    CHECK(read_text(kRoot / "a1" / f) == read_text(kRoot / "a2" / f));
  }
  const auto manifest = read_json(kRoot / "a1" / "manifest.json");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["inputs"].size() == 1);
  CHECK(read_text(base / "population.json") == before);
}

TEST_CASE("output directory falls back to the environment") {
  const fs::path dir = kRoot / "from_env";
  const std::string cfg = q(fs::path(PARASIM_SOURCE_DIR) / "configs" / "toy.cfg");
  const std::string cmd = "PARASIM_OUT_DIR=" + q(dir) + " '" + PARASIM_BIN + "' evolve --config " + cfg + " >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "toy.json"));
}
