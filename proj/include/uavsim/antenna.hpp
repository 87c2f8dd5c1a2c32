/**
 * @file antenna.hpp
 * @brief BS element pattern, array geometry and steering vectors.
 *
 * Angles passed as "azimuth/elevation" are relative to the sector bearing and
 * the horizon. The array is mechanically downtilted, i.e. rigidly rotated, so
 * both the element boresight and the array broadside point `downtilt_deg`
 * below the horizon. Functions taking LocalAngles work in the rotated frame.
 */
#pragma once

#include <Eigen/Dense>
#include <string>

namespace uavsim {

struct ElementPattern {
  double hpbw_h_deg = 65.0;
  double hpbw_v_deg = 65.0;
  double max_gain_dbi = 8.0;
  double side_floor_db = 30.0;
  double back_floor_db = 30.0;
};

struct ArrayGeometry {
  int rows = 8;                ///< vertical elements
  int cols = 1;                ///< horizontal elements
  int ports_per_element = 2;   ///< +-45 deg cross-polarized pair
  double spacing_wl = 0.5;
  double downtilt_deg = 12.0;

  int n_elements() const { return rows * cols; }
  int n_antennas() const { return ports_per_element * rows * cols; }
  bool single_column() const { return cols == 1; }

  static ArrayGeometry single_user() { return {8, 1, 2, 0.5, 12.0}; }
  static ArrayGeometry multi_user() { return {8, 8, 2, 0.5, 12.0}; }
};

/// Direction expressed in the (tilted) array frame.
struct LocalAngles {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

/// Rotates a direction given relative to bearing/horizon into the array frame.
LocalAngles to_array_frame(double azimuth_deg, double elevation_deg, double downtilt_deg);

/// Element gain in dBi for a direction in the array frame.
double element_gain_dbi(const ElementPattern& pattern, const LocalAngles& dir);

/// Element gain toward a direction given relative to bearing/horizon.
double element_gain_dbi(const ElementPattern& pattern, const ArrayGeometry& geometry,
                        double azimuth_deg, double elevation_deg);

/// Unit-modulus array response, ports ordered element-major (2*e + port).
/// Element e sits at column e % cols, row e / cols.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, double azimuth_deg,
                                 double elevation_deg);
Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const LocalAngles& dir);

/// |sum of steering entries| / N in dB (0 dB at broadside).
double array_factor_db(const ArrayGeometry& geometry, const LocalAngles& dir);

/// Gain of the fixed equal-phase combiner of a single-column array:
/// element gain + normalized array factor + 10 log10(N).
/// Throws std::invalid_argument for arrays with more than one column.
double su_combining_gain_dbi(const ArrayGeometry& geometry, const ElementPattern& pattern,
                             double azimuth_deg, double elevation_deg);
double su_combining_gain_dbi(const ArrayGeometry& geometry, const ElementPattern& pattern,
                             const LocalAngles& dir);

/// Vertical cut of the combined single-user pattern (azimuth 0) written as
/// `elevation_deg,gain_dbi` rows from -90 to 90 degrees.
void write_pattern_csv(const std::string& path, const ArrayGeometry& geometry,
                       const ElementPattern& pattern, double step_deg = 0.1);

}  // namespace uavsim
