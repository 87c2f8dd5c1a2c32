/**
 * @file metrics.hpp
 * @brief Sample series, empirical CDFs, height profiles and report files.
 *
 * The empirical CDF uses the midpoint convention: the i-th smallest of n
 * samples (1-based) sits at probability (i - 0.5) / n, and percentiles are
 * linear interpolations between those points, clamped to the extremes.
 */
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uavsim/association.hpp"
#include "uavsim/deployment.hpp"

namespace uavsim {

enum class UserGroup { kUav, kGue };
std::string to_string(UserGroup g);
UserGroup parse_group(const std::string& s);
inline UserGroup group_of(UserKind k) { return is_gue(k) ? UserGroup::kGue : UserGroup::kUav; }

/// Values tagged with the user kind and height they were measured at.
struct Series {
  std::vector<double> values;
  std::vector<double> heights;
  std::vector<UserKind> kinds;

  void add(UserKind kind, double height_m, double value) {
    kinds.push_back(kind);
    heights.push_back(height_m);
    values.push_back(value);
  }
  std::size_t size() const { return values.size(); }
  void append(const Series& other);
  /// Subset belonging to one user group.
  Series filter(UserGroup g) const;
};

struct AssociationRow {
  int drop = 0;
  AssociationRecord record;
};

struct NumericalEvent {
  int drop = 0;
  int cell = 0;
  int prb = 0;
  int user = 0;
  std::string what;
};

/// Worst-case zero-forcing residuals seen over a run.
struct ZfStats {
  std::int64_t precoders = 0;
  double max_offdiag_ratio = 0.0;  ///< max_{i!=k} |(H^H W)_ik| / |(H^H W)_ii|
  double max_power_error = 0.0;    ///< max_k | |w_k|^2 - P_b/K | / (P_b/K)
  double max_total_power_error = 0.0;

  void merge(const ZfStats& o);
};

struct MetricsReport {
  std::map<std::string, Series> series;
  std::vector<AssociationRow> association;
  std::vector<NumericalEvent> events;
  std::vector<std::string> warnings;
  ZfStats zf;
  int drops = 0;

  Series& operator[](const std::string& name) { return series[name]; }
  /// Appends another report; merging in drop order keeps output deterministic.
  void merge(const MetricsReport& other);
};

class Cdf {
 public:
  /// Throws std::invalid_argument on an empty series.
  explicit Cdf(std::vector<double> values);

  /// (value, cumulative probability) pairs, ascending.
  std::vector<std::pair<double, double>> points() const;
  double percentile(double p) const;
  std::size_t size() const { return sorted_.size(); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

inline double percentile(std::vector<double> values, double p) {
  return Cdf(std::move(values)).percentile(p);
}
double mean(const std::vector<double>& values);

/// Fraction of samples >= target; throws on an empty series.
double reliability(const std::vector<double>& values, double target);

struct HeightRow {
  double height_m = 0.0;
  std::size_t n = 0;
  double p05 = 0.0;
  double mean = 0.0;
  double p95 = 0.0;
};

struct HeightProfile {
  std::vector<HeightRow> rows;
  std::vector<std::string> warnings;
};

/// Index of the grid point nearest to h (lower index on ties).
int nearest_bin(const std::vector<double>& grid, double h);

/// Per-bin 5th percentile, mean and 95th percentile. Samples go to the
/// nearest grid height; bins with fewer than min_samples are omitted with a
/// warning.
HeightProfile height_profile(const std::vector<double>& heights,
                             const std::vector<double>& values,
                             const std::vector<double>& grid, std::size_t min_samples);

struct OutputOptions {
  std::vector<double> height_grid{1.5, 15, 25, 50, 75, 100, 150, 200, 300};
  double target_rate_bps = 1e5;
  std::size_t min_bin_samples = 100;
};

/// Reliability numbers, medians and diagnostics as a JSON object.
nlohmann::json summarize(const MetricsReport& report, const OutputOptions& opt);

/// Writes rate_cdf.csv, sinr_height.csv, coupling_height.csv,
/// association.csv and summary.json into dir (created if missing).
void write_outputs(const std::string& dir, const MetricsReport& report, const OutputOptions& opt,
                   const nlohmann::json& config_echo);

}  // namespace uavsim
