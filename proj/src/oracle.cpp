/**
 * @file oracle.cpp
 */
#include "uavsim/oracle.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "uavsim/geometry.hpp"

namespace uavsim {

SymbolSinrEstimate symbol_level_sinr(const OracleLink& serving, int column,
                                     const std::vector<OracleLink>& others, double noise_mw,
                                     int n_symbols, CounterRng& rng) {
  using cd = std::complex<double>;
  if (column < 0 || column >= serving.w.cols()) {
    throw std::invalid_argument("oracle target column out of range");
  }
  if (n_symbols < 2) throw std::invalid_argument("oracle needs at least two symbols");

  // Effective scalar gain of every (cell, stream) term toward the target.
  // Silent terms are skipped so they do not consume random symbols.
  const cd desired_gain = serving.h.dot(serving.w.col(column));
  std::vector<cd> other_gains;
  auto add = [&](const cd& g) {
    if (g != cd(0.0, 0.0)) other_gains.push_back(g);
  };
  for (Eigen::Index i = 0; i < serving.w.cols(); ++i) {
    if (i != column) add(serving.h.dot(serving.w.col(i)));
  }
  for (const OracleLink& l : others) {
    for (Eigen::Index i = 0; i < l.w.cols(); ++i) add(l.h.dot(l.w.col(i)));
  }

  const double noise_scale = std::sqrt(noise_mw);
  double s_sum = 0.0, s_sq = 0.0, i_sum = 0.0, i_sq = 0.0, si = 0.0;
  for (int n = 0; n < n_symbols; ++n) {
    const cd s_k = rng.complex_normal();
    const double sig = std::norm(desired_gain * s_k);
    cd rest(0.0, 0.0);
    for (const cd& g : other_gains) rest += g * rng.complex_normal();
    rest += noise_scale * rng.complex_normal();
    const double ipn = std::norm(rest);
    s_sum += sig;
    s_sq += sig * sig;
    i_sum += ipn;
    i_sq += ipn * ipn;
    si += sig * ipn;
  }
  const double n = n_symbols;
  const double ms = s_sum / n, mi = i_sum / n;
  const double vs = (s_sq / n - ms * ms) * n / (n - 1.0);
  const double vi = (i_sq / n - mi * mi) * n / (n - 1.0);
  const double cov = (si / n - ms * mi) * n / (n - 1.0);
  SymbolSinrEstimate e;
  e.signal_power = ms;
  e.interference_noise_power = mi;
  e.sinr = ms / mi;
  const double var = (vs / (mi * mi) + ms * ms * vi / std::pow(mi, 4) - 2.0 * ms * cov / std::pow(mi, 3)) / n;
  e.std_error = std::sqrt(std::max(var, 0.0));
  return e;
}

std::vector<int> exhaustive_association(const OracleAssociationInputs& in,
                                        const std::vector<UserDrop>& users) {
  const NetworkLayout& layout = *in.layout;
  std::vector<int> out(users.size(), -1);
  for (std::size_t u = 0; u < users.size(); ++u) {
    const Vec3& pos = users[u].position;
    double best = -std::numeric_limits<double>::infinity();
    for (const Cell& cell : layout.cells) {
      const bool los = in.los ? in.los(cell.site, static_cast<int>(u)) : false;
      const double extra = in.extra_loss_db ? in.extra_loss_db(cell.site, static_cast<int>(u)) : 0.0;
      // Each cell is seen through its image at the smallest 2D distance
      // (first image on ties).
      Vec3 v = pos - cell.position;
      double d2 = std::numeric_limits<double>::infinity();
      for (const Vec3& shift : layout.wrap_vectors) {
        const Vec3 cand = pos + shift - cell.position;
        const double cd2 = std::hypot(cand.x, cand.y);
        if (cd2 < d2) {
          d2 = cd2;
          v = cand;
        }
      }
      const double d3 = std::sqrt(d2 * d2 + v.z * v.z);
      const double az = wrap_angle_deg(rad2deg(std::atan2(v.y, v.x)) - cell.bearing_deg);
      const double el = rad2deg(std::atan2(v.z, d2));
      const double gain =
          in.mode == AssocMode::kSu
              ? su_combining_gain_dbi(in.geometry, in.pattern, az, el)
              : element_gain_dbi(in.pattern, in.geometry, az, el) +
                    10.0 * std::log10(static_cast<double>(in.geometry.n_antennas()));
      const double rsrp = in.p_total_dbm + gain -
                          path_loss_db(*in.profile, d3, pos.z, los, in.carrier_ghz, cell.position.z) - extra;
      if (rsrp > best) {
        best = rsrp;
        out[u] = cell.id;
      }
    }
  }
  return out;
}

}  // namespace uavsim
