/**
 * @file antenna.cpp
 * @brief Element pattern, tilted planar array response and the fixed
 * single-user combiner gain.
 */
#include "uavsim/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "uavsim/geometry.hpp"

namespace uavsim {

namespace {

struct LocalDir {
  double x, y, z;  // unit vector in the array frame, x = broadside
};

LocalDir local_unit(const LocalAngles& dir) {
  const double az = deg2rad(dir.azimuth_deg);
  const double el = deg2rad(dir.elevation_deg);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

// Normalized |sum_{n<N} exp(j n x)| / N.
double dirichlet(int n, double x) {
  const double s = std::sin(0.5 * x);
  if (std::abs(s) < 1e-12) return 1.0;
  return std::abs(std::sin(0.5 * n * x) / (n * s));
}

}  // namespace

LocalAngles to_array_frame(double azimuth_deg, double elevation_deg, double downtilt_deg) {
  const double az = deg2rad(azimuth_deg);
  const double el = deg2rad(elevation_deg);
  const double t = deg2rad(downtilt_deg);
  const double x = std::cos(el) * std::cos(az);
  const double y = std::cos(el) * std::sin(az);
  const double z = std::sin(el);
  const double xl = x * std::cos(t) - z * std::sin(t);
  const double zl = x * std::sin(t) + z * std::cos(t);
  return {rad2deg(std::atan2(y, xl)), rad2deg(std::asin(std::clamp(zl, -1.0, 1.0)))};
}

double element_gain_dbi(const ElementPattern& p, const LocalAngles& dir) {
  const double az = wrap_angle_deg(dir.azimuth_deg);
  const double a_h = -std::min(12.0 * std::pow(az / p.hpbw_h_deg, 2), p.side_floor_db);
  const double a_v =
      -std::min(12.0 * std::pow(dir.elevation_deg / p.hpbw_v_deg, 2), p.side_floor_db);
  return p.max_gain_dbi - std::min(-(a_h + a_v), p.back_floor_db);
}

double element_gain_dbi(const ElementPattern& pattern, const ArrayGeometry& geometry,
                        double azimuth_deg, double elevation_deg) {
  return element_gain_dbi(pattern,
                          to_array_frame(azimuth_deg, elevation_deg, geometry.downtilt_deg));
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& g, const LocalAngles& dir) {
  const LocalDir u = local_unit(dir);
  const double ky = 2.0 * kPi * g.spacing_wl * u.y;
  const double kz = 2.0 * kPi * g.spacing_wl * u.z;
  Eigen::VectorXcd a(g.n_antennas());
  for (int e = 0; e < g.n_elements(); ++e) {
    const int col = e % g.cols;
    const int row = e / g.cols;
    const std::complex<double> v = std::polar(1.0, col * ky + row * kz);
    for (int p = 0; p < g.ports_per_element; ++p) a(e * g.ports_per_element + p) = v;
  }
  return a;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, double azimuth_deg,
                                 double elevation_deg) {
  return steering_vector(geometry,
                         to_array_frame(azimuth_deg, elevation_deg, geometry.downtilt_deg));
}

double array_factor_db(const ArrayGeometry& g, const LocalAngles& dir) {
  const LocalDir u = local_unit(dir);
  const double af = dirichlet(g.cols, 2.0 * kPi * g.spacing_wl * u.y) *
                    dirichlet(g.rows, 2.0 * kPi * g.spacing_wl * u.z);
  return 20.0 * std::log10(std::max(af, 1e-15));
}

double su_combining_gain_dbi(const ArrayGeometry& geometry, const ElementPattern& pattern,
                             const LocalAngles& dir) {
  if (!geometry.single_column()) {
    throw std::invalid_argument("fixed combiner gain is defined for single-column arrays only");
  }
  return element_gain_dbi(pattern, dir) + array_factor_db(geometry, dir) +
         10.0 * std::log10(static_cast<double>(geometry.n_antennas()));
}

double su_combining_gain_dbi(const ArrayGeometry& geometry, const ElementPattern& pattern,
                             double azimuth_deg, double elevation_deg) {
  return su_combining_gain_dbi(
      geometry, pattern, to_array_frame(azimuth_deg, elevation_deg, geometry.downtilt_deg));
}

void write_pattern_csv(const std::string& path, const ArrayGeometry& geometry,
                       const ElementPattern& pattern, double step_deg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pattern file " + path);
  out << "elevation_deg,gain_dbi\n" << std::fixed;
  const int n = static_cast<int>(std::lround(180.0 / step_deg));
  for (int i = 0; i <= n; ++i) {
    const double el = -90.0 + i * step_deg;
    out << std::setprecision(2) << el << ',' << std::setprecision(4)
        << su_combining_gain_dbi(geometry, pattern, 0.0, el) << '\n';
  }
}

}  // namespace uavsim
