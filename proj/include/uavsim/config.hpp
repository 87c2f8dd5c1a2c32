/**
 * @file config.hpp
 * @brief Scenario configuration tree, JSON parsing with strict key checks.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavsim/antenna.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/deployment.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/phy_mu.hpp"

namespace uavsim {

enum class Mode { kSu, kMu };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct PowerConfig {
  double bs_total_dbm = 46.0;
  int n_prb = 50;
  double bandwidth_mhz = 10.0;
  double carrier_ghz = 2.0;
  double noise_psd_dbm_hz = -174.0;
  double ue_noise_figure_db = 9.0;
  double bs_noise_figure_db = 7.0;

  double per_prb_dbm() const;  ///< P_B / F
  double ue_noise_dbm() const;
  double bs_noise_dbm() const;
};

struct AntennaConfig {
  ElementPattern element;
  double spacing_wl = 0.5;
  double downtilt_deg = 12.0;
  int ports_per_element = 2;
  int su_rows = 8, su_cols = 1;
  int mu_rows = 8, mu_cols = 8;

  ArrayGeometry su() const { return {su_rows, su_cols, ports_per_element, spacing_wl, downtilt_deg}; }
  ArrayGeometry mu() const { return {mu_rows, mu_cols, ports_per_element, spacing_wl, downtilt_deg}; }
};

struct MuConfig {
  int m_p = 24;
  int k_max = 8;
  CsiMode csi_mode = CsiMode::kR3Pc;
  UplinkPowerParams pc;
};

struct McsConfig {
  std::string table_file;  ///< empty: built-in ladder
  double overhead = 11.0 / 14.0;
};

struct MetricsConfig {
  std::vector<double> height_grid_m{1.5, 15, 25, 50, 75, 100, 150, 200, 300};
  double target_rate_bps = 1e5;
  int min_bin_samples = 100;
  std::vector<UserGroup> evaluate{UserGroup::kUav, UserGroup::kGue};
  bool record_association = true;

  bool evaluates(UserGroup g) const;
  OutputOptions output_options() const;
};

struct ScenarioConfig {
  Mode mode = Mode::kSu;
  int drops = 200;
  std::uint64_t seed = 1;
  int threads = 1;  ///< 0: one per hardware thread
  PowerConfig power;
  DeploymentConfig deployment;
  AntennaConfig antenna;
  ChannelConfig channel;
  MuConfig mu;
  McsConfig mcs;
  MetricsConfig metrics;

  /// Unknown keys and out-of-range values throw std::invalid_argument.
  /// Relative file paths are resolved against base_dir.
  static ScenarioConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  static ScenarioConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace uavsim
