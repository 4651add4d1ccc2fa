#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = VERDOORN_CLI_PATH;
const std::string kDataDir = VERDOORN_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("verdoorn_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string demo_flags() {
  return "-i " + kDataDir + "/demo_panel.csv --entity-col entity --period-col year";
}

}  // namespace

TEST_CASE("fit subcommand produces the three mirror files") {
  const auto out = fresh_dir("fit");
  CHECK(run("fit " + demo_flags() + " -o " + out.string()) == 0);
  CHECK(fs::exists(out / "fit_1986-1999.txt"));
  CHECK(fs::exists(out / "fit_1986-1999.csv"));
  CHECK(fs::exists(out / "fit_1986-1999.jsonl"));
}

TEST_CASE("every subcommand is byte-deterministic across two runs") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  const std::string window = " --from 1986 --to 1994";
  for (const auto& dir : {a, b}) {
    CHECK(run("fit " + demo_flags() + window + " -o " + dir.string()) == 0);
    CHECK(run("unitroot " + demo_flags() + window + " -o " + dir.string()) == 0);
    CHECK(run("scatter " + demo_flags() + window + " -o " + dir.string()) == 0);
    CHECK(run("simulate -s " + kDataDir + "/demo_study.cfg -o " + dir.string()) == 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    CHECK(slurp(a / name) == slurp(b / name));
    ++compared;
  }
  CHECK(compared >= 8);
}

TEST_CASE("usage errors exit with code 2") {
  const auto out = fresh_dir("usage");
  CHECK(run("fit " + demo_flags() + " -o " + out.string() + " --estimators WLS") == 2);
  CHECK(run("fit " + demo_flags() + " -o " + out.string() + " --growth cubic") == 2);
  CHECK(run("nosuchcommand") == 2);
  CHECK(run("fit") == 2);  // missing required --input
}

TEST_CASE("data errors exit with code 3") {
  const auto out = fresh_dir("data");
  CHECK(run("fit -i /nonexistent.csv -o " + out.string()) == 3);
}

TEST_CASE("industry filters that miss exit with code 4") {
  const auto out = fresh_dir("skip");
  CHECK(run("fit " + demo_flags() + " -o " + out.string() +
            " --industries \"Ghost industry\"") == 4);
}

TEST_CASE("config file overrides command-line flags") {
  const auto out = fresh_dir("cfg");
  const auto cfg = out / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "to = 1994\n";
  }
  CHECK(run("fit " + demo_flags() + " --to 1999 --config " + cfg.string() + " -o " +
            out.string()) == 0);
  CHECK(fs::exists(out / "fit_1986-1994.txt"));
  CHECK_FALSE(fs::exists(out / "fit_1986-1999.txt"));
}

TEST_CASE("a five-year window yields the short-panel instrument count") {
  // 1995-1999 means 4 growth transitions per entity; with untruncated lags
  // the GMM row carries exactly 5 instruments on a balanced panel.
  const auto out = fresh_dir("t5");
  CHECK(run("fit " + demo_flags() + " --from 1995 --to 1999 --estimators DPD -o " +
            out.string()) == 0);
  std::istringstream jsonl(slurp(out / "fit_1995-1999.jsonl"));
  std::string line;
  int seen = 0, balanced = 0;
  while (std::getline(jsonl, line)) {
    if (line.empty()) continue;
    ++seen;
    CHECK(line.find("\"n_instruments\":5") != std::string::npos);
    // The bundled panel has a hole in one textile series; the other two
    // industries are balanced at 7 entities x 2 equations.
    if (line.find("\"n_obs\":14") != std::string::npos) ++balanced;
  }
  CHECK(seen == 3);
  CHECK(balanced == 2);
}

TEST_CASE("pct growth is available as a sensitivity knob") {
  const auto out = fresh_dir("pct");
  CHECK(run("fit " + demo_flags() + " --growth pct -o " + out.string()) == 0);
  const auto log_out = fresh_dir("log");
  CHECK(run("fit " + demo_flags() + " --growth log -o " + log_out.string()) == 0);
  CHECK(slurp(out / "fit_1986-1999.txt") != slurp(log_out / "fit_1986-1999.txt"));
}

TEST_CASE("help and no-argument invocations behave") {
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
}
