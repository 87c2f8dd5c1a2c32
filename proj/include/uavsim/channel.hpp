/**
 * @file channel.hpp
 * @brief Coefficient-driven large-scale model, correlated shadowing and the
 * directional Rician small-scale proxy.
 *
 * Path loss per height class and LoS state:
 *   PL = (a0 + a_log_h*log10(h)) * log10(d3) + b0 + b_h*h + c*log10(f_GHz)
 * with NLoS clamped from below by the LoS value. A LoS class may carry a
 * two-slope breakpoint: beyond d_BP = 4 (h_bs - h_e)(h_ut - h_e) f / c the
 * LoS loss becomes
 *   far_b0 + far_a*log10(d3) + far_c*log10(f_GHz) + far_offset*log10(d_BP^2 + (h_bs - h_ut)^2).
 * LoS probability:
 *   P = d1/d2 + exp(-d2/p1) * (1 - d1/d2)   for d2 > d1, else 1
 *   d1 = max(d1_log_slope*log10(h) + d1_intercept, d1_min)
 *   p1 = p1_log_slope*log10(h) + p1_intercept
 * optionally multiplied by the ground-height correction
 *   1 + C(h) * 5/4 * (d2/100)^3 * exp(-d2/150),  C(h) = ((h-13)/10)^1.5 for h>13.
 */
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavsim/antenna.hpp"
#include "uavsim/deployment.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

struct LosProbabilityCoeffs {
  double d1_log_slope = 0.0;
  double d1_intercept = 18.0;
  double d1_min = 18.0;
  double p1_log_slope = 0.0;
  double p1_intercept = 63.0;
  bool ground_height_correction = false;
};

struct Breakpoint {
  double env_height_m = 1.0;
  double far_a = 40.0;
  double far_b0 = 28.0;
  double far_c = 20.0;
  double far_offset = -9.0;
};

struct PathLossCoeffs {
  double a0 = 20.0;
  double a_log_h = 0.0;
  double b0 = 32.45;
  double b_h = 0.0;
  double c = 20.0;
  std::optional<Breakpoint> breakpoint;
};

/// Breakpoint distance in meters (2D).
double breakpoint_distance_m(const Breakpoint& bp, double h_bs, double h_user, double carrier_ghz);

/// sigma = s0 * exp(-decay_per_m * h)
struct ShadowSigma {
  double s0 = 4.0;
  double decay_per_m = 0.0;
};

struct HeightClass {
  double max_height_m = 22.5;
  LosProbabilityCoeffs los_probability;
  PathLossCoeffs los;
  PathLossCoeffs nlos;
  ShadowSigma sigma_los;
  ShadowSigma sigma_nlos;
  double rician_k_db = 9.0;
};

struct ChannelProfile {
  std::vector<HeightClass> classes;  ///< ascending max_height_m
  double full_los_height_m = 100.0;

  /// Urban-macro profile with a separate aerial class above 22.5 m.
  static ChannelProfile uma_av();
  static ChannelProfile from_json(const nlohmann::json& j);
  static ChannelProfile load(const std::string& path);
  nlohmann::json to_json() const;

  const HeightClass& height_class(double h_user) const;
};

struct O2iParams {
  double mean_db = 20.0;
  double per_m_db = 0.5;
  double max_indoor_m = 25.0;
};

struct ChannelConfig {
  std::string profile_file;               ///< empty: built-in profile
  double shadow_corr_m = 50.0;
  bool shadow_enabled = true;
  int shadow_sinusoids = 64;
  O2iParams o2i;
  std::optional<double> rician_k_db = 15.0;  ///< overrides K of the aerial classes
  int prb_group = 5;  ///< PRBs sharing one small-scale draw
};

/// Profile selected by a channel config, with the K override applied.
ChannelProfile resolve_profile(const ChannelConfig& cfg);

double los_probability(const ChannelProfile& profile, double d2, double h_user);
double path_loss_db(const ChannelProfile& profile, double d3, double h_user, bool los,
                    double carrier_ghz, double h_bs = 25.0);
double shadow_sigma_db(const ChannelProfile& profile, double h_user, bool los);
double sample_o2i_loss_db(const O2iParams& params, CounterRng& rng);

/// Unit-variance Gaussian fields, one per site, with autocorrelation
/// exp(-distance / corr_m). Realized as a sum of random sinusoids whose
/// wave numbers follow the exponential covariance's 2D spectrum.
class ShadowField {
 public:
  ShadowField() = default;
  ShadowField(int n_sites, double corr_m, int n_terms, CounterRng& rng);

  double value(int site, double x, double y) const;
  int num_sites() const { return n_sites_; }

 private:
  int n_sites_ = 0;
  int n_terms_ = 0;
  std::vector<double> kx_, ky_, phase_;  // [site * n_terms + m]
};

/// Shadowing in dB for every (site, user) pair: sigma_db times a unit field.
Eigen::MatrixXd sample_shadow_field(int n_sites, const std::vector<Vec3>& user_positions,
                                    double corr_m, double sigma_db, int n_terms,
                                    CounterRng& rng);

struct LargeScaleState {
  bool los = false;
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
  double o2i_db = 0.0;
  double azimuth_deg = 0.0;    ///< at the BS, relative to sector bearing
  double elevation_deg = 0.0;  ///< at the BS, relative to horizon
  double element_gain_dbi = 0.0;
  std::optional<double> su_gain_dbi;  ///< only for single-column arrays

  double attenuation_db() const { return path_loss_db + shadow_db + o2i_db; }
};

/// Fills angles and antenna gains for a link from its BS-to-user displacement.
LargeScaleState make_large_scale(const Vec3& bs_to_user, double bearing_deg,
                                 const ArrayGeometry& geometry, const ElementPattern& pattern,
                                 bool los, double path_loss_db, double shadow_db,
                                 double o2i_db);

struct ChannelRealization {
  Eigen::VectorXcd h;
  LargeScaleState large_scale;
  double rician_k_db = 0.0;
};

/// h = g * ( sqrt(K/(K+1)) e^{j psi} a_pol + sqrt(1/(K+1)) z ).
/// a_pol is the steering vector with an extra random phase on the second
/// polarization port; K is forced to 0 for NLoS links.
ChannelRealization synth_channel(const ArrayGeometry& geometry,
                                 const LargeScaleState& large_scale, double rician_k_db,
                                 CounterRng& rng);

/// Allocation-free variant used by the simulator hot loop.
void synth_channel_into(const ArrayGeometry& geometry, const LargeScaleState& large_scale,
                        double rician_k_db, CounterRng& rng, Eigen::Ref<Eigen::VectorXcd> out);

enum class CouplingMode { kSuCombined, kFirstRfChain };

/// Antenna gain minus path loss, shadowing and penetration loss (dB; negative).
double coupling_loss_db(const LargeScaleState& link, CouplingMode mode);


/// Large-scale state of every (cell, user) link in one drop.
struct LinkTable {
  int n_cells = 0;
  int n_users = 0;
  std::vector<LargeScaleState> links;  ///< [cell * n_users + user]
  std::vector<double> rician_k_db;     ///< per user, from its height class

  const LargeScaleState& at(int cell, int user) const {
    return links[static_cast<std::size_t>(cell) * n_users + user];
  }
  LargeScaleState& at(int cell, int user) {
    return links[static_cast<std::size_t>(cell) * n_users + user];
  }
};

struct LinkTableInputs {
  const NetworkLayout* layout = nullptr;
  const ChannelProfile* profile = nullptr;
  const ChannelConfig* channel = nullptr;
  ArrayGeometry geometry;
  ElementPattern pattern;
  double carrier_ghz = 2.0;
  std::uint64_t seed = 0;
  std::uint64_t drop = 0;
};

/// Draws LoS states (one per site and user), shadowing and O2I losses and
/// fills the per-link large-scale table.
LinkTable build_link_table(const LinkTableInputs& in, const std::vector<UserDrop>& users);

/// Small-scale channel of one link on one PRB group; the same (seed, drop,
/// cell, user, group) always yields the same vector.
void link_channel_into(const LinkTable& table, const ArrayGeometry& geometry, std::uint64_t seed,
                       std::uint64_t drop, int cell, int user, int prb_group,
                       Eigen::Ref<Eigen::VectorXcd> out);

}  // namespace uavsim
