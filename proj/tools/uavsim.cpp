// Command-line front end: run scenarios, dump the antenna pattern, validate
// configs and spot-check the analytic SINR against the symbol-level oracle.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "uavsim/antenna.hpp"
#include "uavsim/config.hpp"
#include "uavsim/oracle.hpp"
#include "uavsim/phy_mu.hpp"
#include "uavsim/runner.hpp"

namespace {

using namespace uavsim;

int cmd_run(const std::string& config_path, std::string out_dir,
            const std::optional<std::uint64_t>& seed, const std::optional<int>& drops,
            const std::optional<std::string>& mode, const std::optional<int>& scenario_case,
            const std::optional<int>& threads, bool quiet) {
  ScenarioConfig cfg = ScenarioConfig::load(config_path);
  if (seed) cfg.seed = *seed;
  if (drops) cfg.drops = *drops;
  if (mode) cfg.mode = parse_mode(*mode);
  if (scenario_case) cfg.deployment.scenario_case = parse_case(std::to_string(*scenario_case));
  if (threads) cfg.threads = *threads;
  cfg.validate();
  if (out_dir.empty()) {
    const char* env = std::getenv("UAVSIM_OUT_DIR");
    if (!env || !*env) throw std::invalid_argument("no output directory (--out or UAVSIM_OUT_DIR)");
    out_dir = env;
  }
  ProgressFn progress;
  if (!quiet) {
    progress = [](int done, int total) {
      if (done == total || done % 10 == 0) std::cerr << "\rdrop " << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const MetricsReport r = run_to_directory(cfg, out_dir, progress);
  if (!r.events.empty()) {
    std::cerr << r.events.size() << " numerical events recorded in summary.json\n";
  }
  return 0;
}

// Two-cell toy: random channels, ZF precoders from perfect CSI, one target.
int cmd_oracle(std::uint64_t seed, int symbols) {
  CounterRng rng = CounterRng::stream(seed, Stream::kTest, {0});
  auto random_matrix = [&](int rows, int cols, double scale) {
    Eigen::MatrixXcd m(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.complex_normal();
    }
    return m;
  };
  constexpr int kAnt = 16, kUsers = 4;
  const double p_b = 0.8, noise = 1e-3;
  const Eigen::MatrixXcd h_own = random_matrix(kAnt, kUsers, 1.0);
  const Eigen::MatrixXcd h_other_cell = random_matrix(kAnt, kUsers, 1.0);
  const ZfResult w0 = zf_precoder(h_own, p_b);
  const ZfResult w1 = zf_precoder(h_other_cell, p_b);
  const Eigen::VectorXcd h_cross = random_matrix(kAnt, 1, 0.3).col(0);
  std::cout << "user,analytic_sinr,oracle_sinr,oracle_std_error,rel_diff\n";
  for (int k = 0; k < kUsers; ++k) {
    const MuSinrTerms t = sinr_mu(h_own.col(k), w0.w, k, {{h_cross, w1.w}}, noise);
    const SymbolSinrEstimate e =
        symbol_level_sinr({h_own.col(k), w0.w}, k, {{h_cross, w1.w}}, noise, symbols, rng);
    std::cout << k << ',' << t.sinr() << ',' << e.sinr << ',' << e.std_error << ','
              << std::abs(e.sinr - t.sinr()) / t.sinr() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drop-based downlink simulator for UAV command-and-control links"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops, scenario_case, threads;
  std::optional<std::string> mode;
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write metric files");
  run->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (default: $UAVSIM_OUT_DIR)");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--drops", drops, "number of drops")->check(CLI::NonNegativeNumber);
  run->add_option("--mode", mode, "su or mu")->check(CLI::IsMember({"su", "mu"}));
  run->add_option("--case", scenario_case, "UAV density case")->check(CLI::IsMember({3, 4, 5}));
  run->add_option("--threads", threads, "worker threads (0: all cores)");
  run->add_flag("--quiet", quiet, "no progress output");

  std::string pattern_out;
  double step = 0.1;
  CLI::App* pattern = app.add_subcommand("pattern", "write the single-user vertical pattern");
  pattern->add_option("--out", pattern_out, "CSV file")->required();
  pattern->add_option("--step", step, "elevation step in degrees")->check(CLI::PositiveNumber);
  pattern->add_option("--config", config, "scenario JSON for antenna parameters")
      ->check(CLI::ExistingFile);

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "parse and check a scenario config");
  validate->add_option("--config", validate_config, "scenario JSON")->required();

  std::uint64_t oracle_seed = 1;
  int symbols = 100000;
  CLI::App* oracle = app.add_subcommand("oracle", "compare analytic and symbol-level SINR");
  oracle->add_option("--seed", oracle_seed, "seed");
  oracle->add_option("--symbols", symbols, "symbols per estimate")->check(CLI::Range(10000, 100000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, seed, drops, mode, scenario_case, threads, quiet);
    if (*pattern) {
      ScenarioConfig cfg;
      if (!config.empty()) cfg = ScenarioConfig::load(config);
      write_pattern_csv(pattern_out, cfg.antenna.su(), cfg.antenna.element, step);
      return 0;
    }
    if (*validate) {
      const ScenarioConfig cfg = ScenarioConfig::load(validate_config);
      std::cout << "ok: mode " << to_string(cfg.mode) << ", " << cfg.drops << " drops, "
                << to_string(cfg.deployment.scenario_case) << '\n';
      return 0;
    }
    if (*oracle) return cmd_oracle(oracle_seed, symbols);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
