/**
 * @file units.hpp
 * @brief dB/linear conversions and the thermal-noise constant.
 */
#pragma once

#include <cmath>

namespace uavsim {

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm2mw(double dbm) { return db2lin(dbm); }
inline double mw2dbm(double mw) { return lin2db(mw); }

inline constexpr double kPrbBandwidthHz = 180e3;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

/// Noise power over one PRB for a receiver with the given noise figure.
inline double prb_noise_dbm(double noise_figure_db,
                            double psd_dbm_hz = kThermalNoiseDbmPerHz,
                            double bandwidth_hz = kPrbBandwidthHz) {
  return psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

}  // namespace uavsim
