#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SPECTRAL_FORGE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("spectral_forge_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string out() const { return "--out-dir " + dir.string(); }
};

}  // namespace

TEST_CASE("construct, verify and stamp metadata") {
  Scratch s("construct");
  REQUIRE(run(s.out() + " construct --kind harmonic --n 5 --method both --x-max 8 --dx 0.01") == 0);
  for (const char* f : {"potential_marchenko.csv", "potential_dressing.csv", "difference.csv", "construct.config"}) {
    CHECK(fs::exists(s.dir / f));
  }
  const auto csv = slurp(s.dir / "potential_dressing.csv");
  CHECK(csv.find("# command=construct") != std::string::npos);
  CHECK(csv.find("# config_hash=") != std::string::npos);

  REQUIRE(run(s.out() + " verify --potential " + (s.dir / "potential_marchenko.csv").string()) == 0);
  CHECK(slurp(s.dir / "eigen_summary.json").find("\"config_hash\"") != std::string::npos);
}

TEST_CASE("saved config reproduces the run") {
  Scratch s("config");
  REQUIRE(run(s.out() + " wkb --kind zeta --v-max 200 --table-size 100") == 0);
  const auto first = slurp(s.dir / "wkb_profile.csv");
  const auto config = s.dir / "wkb.config";
  fs::rename(config, s.dir / "saved.config");
  fs::remove(s.dir / "wkb_profile.csv");
  REQUIRE(run("--config " + (s.dir / "saved.config").string() + " " + s.out() + " wkb") == 0);
  CHECK(slurp(s.dir / "wkb_profile.csv") == first);
  // Flags override the file.
  REQUIRE(run("--config " + (s.dir / "saved.config").string() + " " + s.out() + " wkb --table-size 120") == 0);
  CHECK(slurp(s.dir / "wkb_profile.csv") != first);
}

TEST_CASE("exit codes") {
  Scratch s("exit");
  CHECK(run("--help") == 0);
  CHECK(run(s.out() + " construct --kind nonsense --n 3") == 2);
  CHECK(run(s.out() + " construct --kind harmonic --n 3 --no-such-flag") == 2);
  CHECK(run(s.out() + " verify --potential " + (s.dir / "missing.csv").string()) == 2);
  CHECK(run(s.out() + " construct --kind harmonic --n 3 --vinf 4") == 2);
  // A dressing step that cannot be resolved on the grid is a numerical failure.
  CHECK(run(s.out() + " construct --kind primes --n 30 --method dressing --x-max 6 --dx 0.2 --refine 1") == 3);
}

TEST_CASE("spectrum export") {
  Scratch s("spectrum");
  REQUIRE(run(s.out() + " spectrum --kind primes --n 5") == 0);
  const auto text = slurp(s.dir / "spectrum.csv");
  CHECK(text.find("index,eigenvalue") != std::string::npos);
  CHECK(text.find("5,11") != std::string::npos);
}
