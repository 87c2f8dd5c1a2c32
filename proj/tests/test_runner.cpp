#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "uavsim/runner.hpp"
#include "uavsim/simulation.hpp"
#include "uavsim/units.hpp"

using namespace uavsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("uavsim_runner_" + name);
  fs::remove_all(d);
  return d;
}

const char* kOutputs[] = {"rate_cdf.csv", "sinr_height.csv", "coupling_height.csv", "association.csv",
                          "summary.json"};

void check_same_outputs(const fs::path& a, const fs::path& b) {
  for (const char* f : kOutputs) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    REQUIRE(fs::exists(b / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.deployment.tiers = 1;
  cfg.drops = 4;
  cfg.seed = 99;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UAVSIM_CLI) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("zero drops give an empty report with the config echo") {
    ScenarioConfig cfg = small_config();
    cfg.drops = 0;
    const MetricsReport r = run_scenario(cfg);
    CHECK(r.drops == 0);
    CHECK(r.series.count("rate_bps") == 0);
    const fs::path dir = scratch("zero");
    run_to_directory(cfg, dir.string());
    const nlohmann::json s = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(s["drops"] == 0);
    CHECK(s["config"] == cfg.to_json());
    fs::remove_all(dir);
  }

  TEST_CASE("same seed gives identical outputs") {
    const ScenarioConfig cfg = small_config();
    const fs::path a = scratch("seed_a"), b = scratch("seed_b");
    run_to_directory(cfg, a.string());
    run_to_directory(cfg, b.string());
    check_same_outputs(a, b);

    ScenarioConfig other = cfg;
    other.seed = 100;
    const fs::path c = scratch("seed_c");
    run_to_directory(other, c.string());
    CHECK(slurp(a / "rate_cdf.csv") != slurp(c / "rate_cdf.csv"));
    for (const fs::path& d : {a, b, c}) fs::remove_all(d);
  }

  TEST_CASE("thread count does not change the result") {
    for (Mode mode : {Mode::kSu, Mode::kMu}) {
      ScenarioConfig cfg = small_config();
      cfg.mode = mode;
      cfg.drops = mode == Mode::kSu ? 6 : 2;
      cfg.deployment.tiers = mode == Mode::kSu ? 1 : 0;
      cfg.threads = 1;
      const fs::path a = scratch("serial"), b = scratch("parallel");
      run_to_directory(cfg, a.string());
      cfg.threads = 4;
      run_to_directory(cfg, b.string());
      check_same_outputs(a, b);
      fs::remove_all(a);
      fs::remove_all(b);
    }
  }

  TEST_CASE("config JSON round trip and validation") {
    ScenarioConfig cfg = small_config();
    cfg.mode = Mode::kMu;
    cfg.deployment.scenario_case = ScenarioCase::kCase5;
    cfg.deployment.uav_fixed_height_m = 75.0;
    cfg.mu.csi_mode = CsiMode::kR3Ep;
    cfg.metrics.evaluate = {UserGroup::kUav};
    const nlohmann::json j = cfg.to_json();
    CHECK_FALSE(j.contains("threads"));
    CHECK(ScenarioConfig::from_json(j).to_json() == j);

    nlohmann::json bad = j;
    bad["deployment"]["tirs"] = 2;
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);
    bad = j;
    bad["colour"] = "red";
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);
    bad = j;
    bad["mode"] = "mimo";
    CHECK_THROWS_AS(ScenarioConfig::from_json(bad), std::invalid_argument);

    ScenarioConfig v = small_config();
    v.drops = -1;
    CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    v = small_config();
    v.mu.k_max = 0;
    CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    v = small_config();
    v.deployment.indoor_fraction = 1.2;
    CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    v = small_config();
    v.channel.prb_group = 0;
    CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    CHECK_NOTHROW(small_config().validate());

    const ScenarioConfig rel =
        ScenarioConfig::from_json({{"mcs", {{"table_file", "mcs_table.csv"}}}}, UAVSIM_CONFIG_DIR);
    CHECK(fs::path(rel.mcs.table_file).is_absolute());
    CHECK(fs::exists(rel.mcs.table_file));
  }

  TEST_CASE("shipped configs load") {
    for (const char* name : {"desk.json", "full.json"}) {
      CAPTURE(name);
      const ScenarioConfig cfg = ScenarioConfig::load(std::string(UAVSIM_CONFIG_DIR) + "/" + name);
      CHECK_NOTHROW(cfg.validate());
      CHECK(fs::exists(cfg.channel.profile_file));
      CHECK(fs::exists(cfg.mcs.table_file));
    }
    CHECK_THROWS_AS(ScenarioConfig::load("no/such/config.json"), std::invalid_argument);
  }

  TEST_CASE("single-user drop matches a hand computation") {
    ScenarioConfig cfg;
    cfg.deployment.tiers = 0;
    cfg.deployment.users_per_sector = 1;
    cfg.channel.shadow_enabled = false;
    cfg.seed = 3;
    const RunContext ctx = RunContext::make(cfg);
    REQUIRE(ctx.layout.num_cells() == 3);
    const DropState st = prepare_drop(cfg, ctx, 0);
    const MetricsReport r = run_su_drop(cfg, ctx, st);
    const Series& sinr = r.series.at("sinr_db");

    SuSchedule sched(3, cfg.power.n_prb);
    for (int c = 0; c < 3; ++c) sched.add(schedule_su(c, st.served[c], cfg.power.n_prb, st.drop));
    const Eigen::VectorXcd w = su_combiner(ctx.geometry.n_antennas());
    std::size_t k = 0;
    for (std::size_t u = 0; u < st.users.size(); ++u) {
      if (!st.evaluated[u]) continue;
      const int b = st.users[u].serving_cell;
      for (int p = 0; p < cfg.power.n_prb; ++p) {
        if (sched.user_at(b, p) != int(u)) continue;
        double signal = 0.0, interference = 0.0;
        for (int c = 0; c < 3; ++c) {
          Eigen::VectorXcd h(ctx.geometry.n_antennas());
          link_channel_into(st.links, ctx.geometry, cfg.seed, 0, c, int(u), p / cfg.channel.prb_group, h);
          const double rx = ctx.p_b_mw * std::norm(w.dot(h));
          if (c == b) signal = rx;
          else if (sched.active(c, p)) interference += rx;
        }
        REQUIRE(k < sinr.size());
        CHECK(sinr.values[k] == doctest::Approx(10.0 * std::log10(signal / (interference + ctx.ue_noise_mw)))
                                    .epsilon(1e-9));
        ++k;
      }
    }
    CHECK(k == sinr.size());
  }

  TEST_CASE("command line front end") {
    const std::string desk = std::string(UAVSIM_CONFIG_DIR) + "/desk.json";
    CHECK(run_cli("validate --config " + desk) == 0);
    CHECK(run_cli("validate --config /no/such/file.json") != 0);
    CHECK(run_cli("") != 0);

    const fs::path a = scratch("cli_a"), b = scratch("cli_b");
    const std::string common = "run --config " + desk + " --drops 2 --seed 7 --quiet --out ";
    REQUIRE(run_cli(common + a.string()) == 0);
    REQUIRE(run_cli(common + b.string()) == 0);
    check_same_outputs(a, b);

    // The echoed configuration reproduces the run.
    const nlohmann::json s = nlohmann::json::parse(slurp(a / "summary.json"));
    const fs::path echo = fs::temp_directory_path() / "uavsim_runner_echo.json";
    {
      std::ofstream out(echo);
      out << s["config"].dump(2);
    }
    const fs::path c = scratch("cli_c");
    REQUIRE(run_cli("run --config " + echo.string() + " --quiet --out " + c.string()) == 0);
    check_same_outputs(a, c);

    const fs::path m = scratch("cli_mu");
    REQUIRE(run_cli("run --config " + desk + " --mode mu --case 3 --drops 1 --quiet --out " + m.string()) == 0);
    for (const char* f : kOutputs) CHECK(fs::exists(m / f));
    CHECK(nlohmann::json::parse(slurp(m / "summary.json"))["config"]["mode"] == "mu");

    const fs::path pat = fs::temp_directory_path() / "uavsim_runner_pattern.csv";
    CHECK(run_cli("pattern --out " + pat.string()) == 0);
    CHECK(fs::exists(pat));
    for (const fs::path& d : {a, b, c, m}) fs::remove_all(d);
    fs::remove(echo);
    fs::remove(pat);
  }
}
