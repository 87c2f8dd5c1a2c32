/**
 * @file link_adaptation.hpp
 * @brief SINR to spectral efficiency mapping and user rates.
 */
#pragma once

#include <string>
#include <vector>

namespace uavsim {

struct McsRow {
  double threshold_db = 0.0;
  double efficiency = 0.0;  ///< b/s/Hz
};

class McsTable {
 public:
  /// Rows must have strictly increasing thresholds and efficiencies.
  explicit McsTable(std::vector<McsRow> rows);

  /// 15-entry ladder from (-5.02 dB, 0.22) to (25.87 dB, 7.44). Interior
  /// efficiencies follow the Shannon curve rescaled onto the two endpoints.
  static McsTable default_table();
  /// CSV with header "threshold_db,efficiency".
  static McsTable load_csv(const std::string& path);

  /// Efficiency of the highest row with threshold <= sinr_db, 0 below the table.
  double select(double sinr_db) const;
  const std::vector<McsRow>& rows() const { return rows_; }

 private:
  std::vector<McsRow> rows_;
};

inline double select_mcs(const McsTable& table, double sinr_db) { return table.select(sinr_db); }

inline constexpr double kDefaultControlOverhead = 11.0 / 14.0;

/// efficiency * 180 kHz * prbs * overhead.
double user_rate_bps(double efficiency, int prbs_held, double overhead_factor);

}  // namespace uavsim
