#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "medgate/sweep.hpp"

using namespace medgate;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("medgate-test-" + name);
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(SIMULATE_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_dynamic_map(const fs::path& out) {
  RunConfig c;
  c.mode = RunMode::dynamic_map;
  c.j1 = {0.0, 1.0, 3};
  c.j2 = {0.0, 1.0, 3};
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment line\n"
      "e_q = 0.11   # trailing comment\n"
      "\n"
      "j1_min=0.5\n"
      "r_list = 1.0, 1.2\n"
      "gamma0_list = 0,0.5,1\n"
      "seed = 42\n"
      "grid_units = absolute\n");
  CHECK(c.params.e_q == 0.11);
  CHECK(c.j1.min == 0.5);
  CHECK(c.r_list == std::vector<double>{1.0, 1.2});
  CHECK(c.gamma0_list.size() == 3);
  CHECK(c.seed == 42u);
  CHECK(c.grid_units == "absolute");

  SUBCASE("errors carry the line number") {
    try {
      (void)parse_config("e_q = 0.1\n\nbogus_key = 3\n");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
    try {
      (void)parse_config("tau = fast\n");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid_units = furlongs\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 1.5\n"), ConfigError);
  }
  SUBCASE("overrides, environment and precedence") {
    RunConfig d = parse_config("tau = 300\nomega0 = 0.2\n");
    ::setenv("MEDGATE_TAU", "400", 1);
    ::setenv("MEDGATE_OMEGA0", "0.25", 1);
    apply_environment(d);
    ::unsetenv("MEDGATE_TAU");
    ::unsetenv("MEDGATE_OMEGA0");
    CHECK(d.tau == 400.0);
    apply_override(d, "tau", "450");
    CHECK(d.tau == 450.0);
    CHECK(d.omega0 == 0.25);
    CHECK_THROWS_AS(apply_override(d, "nope", "1"), ConfigError);
  }
  SUBCASE("formatted config parses back to the same entries") {
    RunConfig d = c;
    d.params.j1 = 0.1 / 3.0;
    d.knob = {0.16, 0.6, 9};
    const RunConfig back = parse_config(format_config(d));
    CHECK(config_entries(back) == config_entries(d));
    CHECK(known_keys().size() == config_entries(d).size());
  }
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  auto broken = [&](auto edit) {
    RunConfig d = c;
    edit(d);
    return d;
  };
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.j1.count = 0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.n = 0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.tol = 0.0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.mc_samples = 100; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.mode = RunMode::decoherence; d.gamma0_list = {-1.0}; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& d) { d.params.e_c = 0.0; })), ConfigError);
  CHECK_THROWS_AS(parse_mode("warp"), std::invalid_argument);
  CHECK(mode_name(parse_mode("cphase-scan")) == "cphase-scan");
}

TEST_CASE("dynamic map runs") {
  SUBCASE("seeded runs are byte-identical regardless of threads") {
    RunConfig a = small_dynamic_map(scratch("det-a"));
    a.mc_samples = 2000;
    a.seed = 11;
    RunConfig b = a;
    b.out = scratch("det-b");
    b.threads = 3;
    run(a);
    run(b);
    const std::string text = slurp(a.out / "dynamic-map.csv");
    CHECK(!text.empty());
    CHECK(text == slurp(b.out / "dynamic-map.csv"));
  }
  SUBCASE("a failing grid point is isolated") {
    const RunConfig c = small_dynamic_map(scratch("isolate"));
    const RunSummary s = run(c);
    CHECK(s.points == 9);
    CHECK(s.failed_points == 1);
    std::istringstream rows(slurp(c.out / "dynamic-map.csv"));
    std::string line;
    std::getline(rows, line);
    std::getline(rows, line);
    CHECK(line.substr(line.rfind(',') + 1) == "false");
    int valid = 0;
    while (std::getline(rows, line)) valid += line.ends_with("true") ? 1 : 0;
    CHECK(valid == 8);
    CHECK(fs::exists(c.out / "dynamic-map.meta.json"));
  }
}

TEST_CASE("command line") {
  const fs::path out = scratch("cli");
  fs::create_directories(out);
  const fs::path config = out / "run.cfg";
  std::ofstream(config) << "j1_count = 3\nj2_count = 3\nj1_min = 0.5\nj2_min = 0.5\n";

  CHECK(run_cli("dynamic-map --config " + config.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "dynamic-map.csv"));
  CHECK(run_cli("dynamic-map --set tau=abc --out " + out.string()) == 1);
  CHECK(run_cli("warp --out " + out.string()) == 1);
  CHECK(run_cli("dynamic-map --set mc_samples=10 --out " + out.string()) == 1);
  CHECK(run_cli("dynamic-map --set j1_count=1 --set j2_count=1 --set j1_max=0 --set j2_max=0 --out " +
                out.string()) == 2);
  CHECK(run_cli("--list-keys") == 0);
}
