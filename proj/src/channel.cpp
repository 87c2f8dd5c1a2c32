/**
 * @file channel.cpp
 * @brief Large-scale attenuation, shadow fields and Rician channel vectors.
 */
#include "uavsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "uavsim/geometry.hpp"

namespace uavsim {

using nlohmann::json;

ChannelProfile ChannelProfile::uma_av() {
  ChannelProfile p;
  p.full_los_height_m = 100.0;

  HeightClass ground;
  ground.max_height_m = 22.5;
  ground.los_probability = {0.0, 18.0, 18.0, 0.0, 63.0, true};
  ground.los = {22.0, 0.0, 28.0, 0.0, 20.0, Breakpoint{}};
  ground.nlos = {39.08, 0.0, 14.44, -0.6, 20.0, std::nullopt};
  ground.sigma_los = {4.0, 0.0};
  ground.sigma_nlos = {6.0, 0.0};
  ground.rician_k_db = 9.0;

  HeightClass aerial;
  aerial.max_height_m = 300.0;
  aerial.los_probability = {460.0, -700.0, 18.0, 4300.0, -3800.0, false};
  aerial.los = {22.0, 0.0, 28.0, 0.0, 20.0, std::nullopt};
  // -17.5 + 20 log10(40 pi / 3)
  aerial.nlos = {46.0, -7.0, -17.5 + 20.0 * std::log10(40.0 * kPi / 3.0), 0.0, 20.0, std::nullopt};
  aerial.sigma_los = {4.64, 0.0066};
  aerial.sigma_nlos = {6.0, 0.0};
  aerial.rician_k_db = 15.0;

  p.classes = {ground, aerial};
  return p;
}

namespace {

template <typename T>
void read_strict(const json& j, const std::string& key, T& out, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + ": missing key '" + key + "'");
  out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; }) == known.end()) {
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
    }
  }
}

PathLossCoeffs pl_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"a0", "a_log_h", "b0", "b_h", "c", "breakpoint"}, where);
  PathLossCoeffs c;
  read_strict(j, "a0", c.a0, where);
  read_strict(j, "a_log_h", c.a_log_h, where);
  read_strict(j, "b0", c.b0, where);
  read_strict(j, "b_h", c.b_h, where);
  read_strict(j, "c", c.c, where);
  if (j.contains("breakpoint") && !j.at("breakpoint").is_null()) {
    const json& b = j.at("breakpoint");
    const std::string w = where + ".breakpoint";
    reject_unknown(b, {"env_height_m", "far_a", "far_b0", "far_c", "far_offset"}, w);
    Breakpoint bp;
    read_strict(b, "env_height_m", bp.env_height_m, w);
    read_strict(b, "far_a", bp.far_a, w);
    read_strict(b, "far_b0", bp.far_b0, w);
    read_strict(b, "far_c", bp.far_c, w);
    read_strict(b, "far_offset", bp.far_offset, w);
    c.breakpoint = bp;
  }
  return c;
}

json pl_to_json(const PathLossCoeffs& c) {
  json j = {{"a0", c.a0}, {"a_log_h", c.a_log_h}, {"b0", c.b0}, {"b_h", c.b_h}, {"c", c.c}};
  if (c.breakpoint) {
    const Breakpoint& b = *c.breakpoint;
    j["breakpoint"] = {{"env_height_m", b.env_height_m},
                       {"far_a", b.far_a},
                       {"far_b0", b.far_b0},
                       {"far_c", b.far_c},
                       {"far_offset", b.far_offset}};
  }
  return j;
}

ShadowSigma sigma_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"s0", "decay_per_m"}, where);
  ShadowSigma s;
  read_strict(j, "s0", s.s0, where);
  read_strict(j, "decay_per_m", s.decay_per_m, where);
  return s;
}

}  // namespace

ChannelProfile ChannelProfile::from_json(const json& j) {
  reject_unknown(j, {"full_los_height_m", "classes"}, "profile");
  ChannelProfile p;
  read_strict(j, "full_los_height_m", p.full_los_height_m, "profile");
  if (!j.contains("classes") || !j.at("classes").is_array() || j.at("classes").empty()) {
    throw std::invalid_argument("profile: 'classes' must be a non-empty array");
  }
  for (const json& c : j.at("classes")) {
    const std::string w = "profile.classes";
    reject_unknown(c, {"max_height_m", "los_probability", "path_loss", "shadow_sigma_db",
                       "rician_k_db"},
                   w);
    HeightClass hc;
    read_strict(c, "max_height_m", hc.max_height_m, w);
    read_strict(c, "rician_k_db", hc.rician_k_db, w);
    const json& lp = c.at("los_probability");
    reject_unknown(lp, {"d1_log_slope", "d1_intercept", "d1_min", "p1_log_slope",
                        "p1_intercept", "ground_height_correction"},
                   w + ".los_probability");
    read_strict(lp, "d1_log_slope", hc.los_probability.d1_log_slope, w);
    read_strict(lp, "d1_intercept", hc.los_probability.d1_intercept, w);
    read_strict(lp, "d1_min", hc.los_probability.d1_min, w);
    read_strict(lp, "p1_log_slope", hc.los_probability.p1_log_slope, w);
    read_strict(lp, "p1_intercept", hc.los_probability.p1_intercept, w);
    read_strict(lp, "ground_height_correction", hc.los_probability.ground_height_correction, w);
    const json& pl = c.at("path_loss");
    reject_unknown(pl, {"los", "nlos"}, w + ".path_loss");
    hc.los = pl_from_json(pl.at("los"), w + ".path_loss.los");
    hc.nlos = pl_from_json(pl.at("nlos"), w + ".path_loss.nlos");
    const json& sg = c.at("shadow_sigma_db");
    reject_unknown(sg, {"los", "nlos"}, w + ".shadow_sigma_db");
    hc.sigma_los = sigma_from_json(sg.at("los"), w + ".shadow_sigma_db.los");
    hc.sigma_nlos = sigma_from_json(sg.at("nlos"), w + ".shadow_sigma_db.nlos");
    if (!p.classes.empty() && hc.max_height_m <= p.classes.back().max_height_m) {
      throw std::invalid_argument("profile: classes must have ascending max_height_m");
    }
    p.classes.push_back(hc);
  }
  return p;
}

ChannelProfile ChannelProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read channel profile " + path);
  return from_json(json::parse(in));
}

json ChannelProfile::to_json() const {
  json classes = json::array();
  for (const HeightClass& c : this->classes) {
    const auto& lp = c.los_probability;
    classes.push_back(
        {{"max_height_m", c.max_height_m},
         {"los_probability",
          {{"d1_log_slope", lp.d1_log_slope},
           {"d1_intercept", lp.d1_intercept},
           {"d1_min", lp.d1_min},
           {"p1_log_slope", lp.p1_log_slope},
           {"p1_intercept", lp.p1_intercept},
           {"ground_height_correction", lp.ground_height_correction}}},
         {"path_loss", {{"los", pl_to_json(c.los)}, {"nlos", pl_to_json(c.nlos)}}},
         {"shadow_sigma_db",
          {{"los", {{"s0", c.sigma_los.s0}, {"decay_per_m", c.sigma_los.decay_per_m}}},
           {"nlos", {{"s0", c.sigma_nlos.s0}, {"decay_per_m", c.sigma_nlos.decay_per_m}}}}},
         {"rician_k_db", c.rician_k_db}});
  }
  return {{"full_los_height_m", full_los_height_m}, {"classes", classes}};
}

const HeightClass& ChannelProfile::height_class(double h_user) const {
  for (const HeightClass& c : classes) {
    if (h_user <= c.max_height_m) return c;
  }
  return classes.back();
}

ChannelProfile resolve_profile(const ChannelConfig& cfg) {
  ChannelProfile p =
      cfg.profile_file.empty() ? ChannelProfile::uma_av() : ChannelProfile::load(cfg.profile_file);
  if (cfg.rician_k_db) {
    for (std::size_t i = 1; i < p.classes.size(); ++i) p.classes[i].rician_k_db = *cfg.rician_k_db;
  }
  return p;
}

double los_probability(const ChannelProfile& profile, double d2, double h_user) {
  if (h_user > profile.full_los_height_m) return 1.0;
  const LosProbabilityCoeffs& c = profile.height_class(h_user).los_probability;
  const double lh = std::log10(h_user);
  const double d1 = std::max(c.d1_log_slope * lh + c.d1_intercept, c.d1_min);
  if (d2 <= d1) return 1.0;
  const double p1 = c.p1_log_slope * lh + c.p1_intercept;
  double p = d1 / d2 + std::exp(-d2 / p1) * (1.0 - d1 / d2);
  if (c.ground_height_correction) {
    const double ch = h_user <= 13.0 ? 0.0 : std::pow((h_user - 13.0) / 10.0, 1.5);
    p *= 1.0 + ch * 1.25 * std::pow(d2 / 100.0, 3) * std::exp(-d2 / 150.0);
  }
  return std::clamp(p, 0.0, 1.0);
}

namespace {

double eval_pl(const PathLossCoeffs& c, double d3, double h, double f_ghz, double h_bs) {
  const double slope = c.a0 + c.a_log_h * std::log10(h);
  const double near = slope * std::log10(d3) + c.b0 + c.b_h * h + c.c * std::log10(f_ghz);
  if (!c.breakpoint) return near;
  const Breakpoint& bp = *c.breakpoint;
  const double dh = h_bs - h;
  const double d2 = std::sqrt(std::max(d3 * d3 - dh * dh, 0.0));
  const double d_bp = breakpoint_distance_m(bp, h_bs, h, f_ghz);
  if (d2 <= d_bp) return near;
  return bp.far_b0 + bp.far_a * std::log10(d3) + bp.far_c * std::log10(f_ghz) +
         bp.far_offset * std::log10(d_bp * d_bp + dh * dh);
}

}  // namespace

double breakpoint_distance_m(const Breakpoint& bp, double h_bs, double h_user, double carrier_ghz) {
  constexpr double kLightSpeed = 299792458.0;
  return 4.0 * std::max(h_bs - bp.env_height_m, 0.0) * std::max(h_user - bp.env_height_m, 0.0) *
         carrier_ghz * 1e9 / kLightSpeed;
}

double path_loss_db(const ChannelProfile& profile, double d3, double h_user, bool los,
                    double carrier_ghz, double h_bs) {
  const HeightClass& hc = profile.height_class(h_user);
  const double d = std::max(d3, 1.0);
  const double pl_los = eval_pl(hc.los, d, h_user, carrier_ghz, h_bs);
  if (los) return pl_los;
  return std::max(pl_los, eval_pl(hc.nlos, d, h_user, carrier_ghz, h_bs));
}

double shadow_sigma_db(const ChannelProfile& profile, double h_user, bool los) {
  const HeightClass& hc = profile.height_class(h_user);
  const ShadowSigma& s = los ? hc.sigma_los : hc.sigma_nlos;
  return s.s0 * std::exp(-s.decay_per_m * h_user);
}

double sample_o2i_loss_db(const O2iParams& params, CounterRng& rng) {
  return params.mean_db + params.per_m_db * params.max_indoor_m * rng.uniform();
}

ShadowField::ShadowField(int n_sites, double corr_m, int n_terms, CounterRng& rng)
    : n_sites_(n_sites), n_terms_(n_terms) {
  if (!(corr_m > 0.0)) throw std::invalid_argument("shadow correlation distance must be positive");
  if (n_terms < 1) throw std::invalid_argument("shadow field needs at least one sinusoid");
  const std::size_t n = static_cast<std::size_t>(n_sites) * n_terms;
  kx_.resize(n);
  ky_.resize(n);
  phase_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Radial wave-number CDF of exp(-r/L) in 2D: 1 - (1 + L^2 k^2)^(-1/2).
    const double u = rng.uniform();
    const double k = std::sqrt(1.0 / ((1.0 - u) * (1.0 - u)) - 1.0) / corr_m;
    const double dir = 2.0 * kPi * rng.uniform();
    kx_[i] = k * std::cos(dir);
    ky_[i] = k * std::sin(dir);
    phase_[i] = 2.0 * kPi * rng.uniform();
  }
}

double ShadowField::value(int site, double x, double y) const {
  const std::size_t base = static_cast<std::size_t>(site) * n_terms_;
  double acc = 0.0;
  for (int m = 0; m < n_terms_; ++m) {
    acc += std::cos(kx_[base + m] * x + ky_[base + m] * y + phase_[base + m]);
  }
  return acc * std::sqrt(2.0 / n_terms_);
}

Eigen::MatrixXd sample_shadow_field(int n_sites, const std::vector<Vec3>& user_positions,
                                    double corr_m, double sigma_db, int n_terms,
                                    CounterRng& rng) {
  const ShadowField field(n_sites, corr_m, n_terms, rng);
  Eigen::MatrixXd out(n_sites, static_cast<Eigen::Index>(user_positions.size()));
  for (int s = 0; s < n_sites; ++s) {
    for (std::size_t u = 0; u < user_positions.size(); ++u) {
      out(s, static_cast<Eigen::Index>(u)) =
          sigma_db * field.value(s, user_positions[u].x, user_positions[u].y);
    }
  }
  return out;
}

LargeScaleState make_large_scale(const Vec3& bs_to_user, double bearing_deg,
                                 const ArrayGeometry& geometry, const ElementPattern& pattern,
                                 bool los, double path_loss_db, double shadow_db,
                                 double o2i_db) {
  LargeScaleState s;
  s.los = los;
  s.path_loss_db = path_loss_db;
  s.shadow_db = shadow_db;
  s.o2i_db = o2i_db;
  s.azimuth_deg = wrap_angle_deg(rad2deg(std::atan2(bs_to_user.y, bs_to_user.x)) - bearing_deg);
  s.elevation_deg = rad2deg(std::atan2(bs_to_user.z, bs_to_user.norm2d()));
  const LocalAngles local = to_array_frame(s.azimuth_deg, s.elevation_deg, geometry.downtilt_deg);
  s.element_gain_dbi = element_gain_dbi(pattern, local);
  if (geometry.single_column()) s.su_gain_dbi = su_combining_gain_dbi(geometry, pattern, local);
  return s;
}

void synth_channel_into(const ArrayGeometry& g, const LargeScaleState& ls, double rician_k_db,
                        CounterRng& rng, Eigen::Ref<Eigen::VectorXcd> out) {
  using cd = std::complex<double>;
  const double amp = std::pow(10.0, (ls.element_gain_dbi - ls.attenuation_db()) / 20.0);
  const double k = ls.los ? std::pow(10.0, rician_k_db / 10.0) : 0.0;
  const double a_los = amp * std::sqrt(k / (k + 1.0));
  const double a_nlos = amp * std::sqrt(1.0 / (k + 1.0));

  const double psi = 2.0 * kPi * rng.uniform();
  const double psi_pol = 2.0 * kPi * rng.uniform();

  const LocalAngles local = to_array_frame(ls.azimuth_deg, ls.elevation_deg, g.downtilt_deg);
  const double az = deg2rad(local.azimuth_deg);
  const double el = deg2rad(local.elevation_deg);
  const cd step_col = std::polar(1.0, 2.0 * kPi * g.spacing_wl * std::cos(el) * std::sin(az));
  const cd step_row = std::polar(1.0, 2.0 * kPi * g.spacing_wl * std::sin(el));
  const cd los0 = std::polar(a_los, psi);
  const cd pol = std::polar(1.0, psi_pol);

  const int ppe = g.ports_per_element;
  cd row_phase = los0;
  for (int r = 0; r < g.rows; ++r) {
    cd v = row_phase;
    for (int c = 0; c < g.cols; ++c) {
      const int e = r * g.cols + c;
      for (int p = 0; p < ppe; ++p) {
        out(e * ppe + p) = (p == 1 ? v * pol : v) + a_nlos * rng.complex_normal();
      }
      v *= step_col;
    }
    row_phase *= step_row;
  }
}

ChannelRealization synth_channel(const ArrayGeometry& geometry,
                                 const LargeScaleState& large_scale, double rician_k_db,
                                 CounterRng& rng) {
  ChannelRealization r;
  r.h.resize(geometry.n_antennas());
  r.large_scale = large_scale;
  r.rician_k_db = large_scale.los ? rician_k_db : -std::numeric_limits<double>::infinity();
  synth_channel_into(geometry, large_scale, rician_k_db, rng, r.h);
  return r;
}

double coupling_loss_db(const LargeScaleState& link, CouplingMode mode) {
  if (mode == CouplingMode::kSuCombined) {
    if (!link.su_gain_dbi) {
      throw std::invalid_argument("su_combined coupling requires a single-column array");
    }
    return *link.su_gain_dbi - link.attenuation_db();
  }
  return link.element_gain_dbi - link.attenuation_db();
}

LinkTable build_link_table(const LinkTableInputs& in, const std::vector<UserDrop>& users) {
  const NetworkLayout& layout = *in.layout;
  const ChannelProfile& profile = *in.profile;
  const ChannelConfig& ch = *in.channel;
  LinkTable t;
  t.n_cells = static_cast<int>(layout.num_cells());
  t.n_users = static_cast<int>(users.size());
  t.links.resize(static_cast<std::size_t>(t.n_cells) * t.n_users);
  t.rician_k_db.resize(users.size());

  const int n_sites = static_cast<int>(layout.num_sites());
  CounterRng shadow_rng = CounterRng::stream(in.seed, Stream::kShadow, {in.drop});
  ShadowField field;
  if (ch.shadow_enabled) field = ShadowField(n_sites, ch.shadow_corr_m, ch.shadow_sinusoids, shadow_rng);

  for (int u = 0; u < t.n_users; ++u) {
    const UserDrop& user = users[u];
    const double h = user.position.z;
    t.rician_k_db[u] = profile.height_class(h).rician_k_db;
    CounterRng los_rng = CounterRng::stream(in.seed, Stream::kLosState, {in.drop, std::uint64_t(u)});
    double o2i = 0.0;
    if (user.kind == UserKind::kGueIndoor) {
      CounterRng o2i_rng = CounterRng::stream(in.seed, Stream::kO2i, {in.drop, std::uint64_t(u)});
      o2i = sample_o2i_loss_db(ch.o2i, o2i_rng);
    }
    for (int s = 0; s < n_sites; ++s) {
      const Vec3 bs{layout.sites[s].x, layout.sites[s].y, layout.bs_height};
      const WrappedDisplacement d = wrap_displacement(layout, bs, user.position);
      const bool los = los_rng.uniform() < los_probability(profile, d.d2, h);
      const double pl = path_loss_db(profile, d.d3, h, los, in.carrier_ghz, layout.bs_height);
      const double sf = ch.shadow_enabled
                            ? shadow_sigma_db(profile, h, los) *
                                  field.value(s, user.position.x, user.position.y)
                            : 0.0;
      for (int sec = 0; sec < layout.sectors_per_site; ++sec) {
        const int c = s * layout.sectors_per_site + sec;
        t.at(c, u) = make_large_scale(d.vector, layout.cells[c].bearing_deg, in.geometry,
                                      in.pattern, los, pl, sf, o2i);
      }
    }
  }
  return t;
}

void link_channel_into(const LinkTable& table, const ArrayGeometry& geometry, std::uint64_t seed,
                       std::uint64_t drop, int cell, int user, int prb_group,
                       Eigen::Ref<Eigen::VectorXcd> out) {
  CounterRng rng = CounterRng::stream(
      seed, Stream::kSmallScale,
      {drop, std::uint64_t(cell), std::uint64_t(user), std::uint64_t(prb_group)});
  synth_channel_into(geometry, table.at(cell, user), table.rician_k_db[user], rng, out);
}

}  // namespace uavsim
