/**
 * @file metrics.cpp
 */
#include "uavsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace uavsim {

using nlohmann::json;

std::string to_string(UserGroup g) { return g == UserGroup::kUav ? "uav" : "gue"; }

UserGroup parse_group(const std::string& s) {
  if (s == "uav") return UserGroup::kUav;
  if (s == "gue") return UserGroup::kGue;
  throw std::invalid_argument("unknown user group '" + s + "' (expected uav or gue)");
}

void Series::append(const Series& o) {
  values.insert(values.end(), o.values.begin(), o.values.end());
  heights.insert(heights.end(), o.heights.begin(), o.heights.end());
  kinds.insert(kinds.end(), o.kinds.begin(), o.kinds.end());
}

Series Series::filter(UserGroup g) const {
  Series out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (group_of(kinds[i]) == g) out.add(kinds[i], heights[i], values[i]);
  }
  return out;
}

void ZfStats::merge(const ZfStats& o) {
  precoders += o.precoders;
  max_offdiag_ratio = std::max(max_offdiag_ratio, o.max_offdiag_ratio);
  max_power_error = std::max(max_power_error, o.max_power_error);
  max_total_power_error = std::max(max_total_power_error, o.max_total_power_error);
}

void MetricsReport::merge(const MetricsReport& o) {
  for (const auto& [name, s] : o.series) series[name].append(s);
  association.insert(association.end(), o.association.begin(), o.association.end());
  events.insert(events.end(), o.events.begin(), o.events.end());
  warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  zf.merge(o.zf);
  drops += o.drops;
}

Cdf::Cdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("CDF of an empty series");
  std::sort(sorted_.begin(), sorted_.end());
}

std::vector<std::pair<double, double>> Cdf::points() const {
  const double n = static_cast<double>(sorted_.size());
  std::vector<std::pair<double, double>> out(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    out[i] = {sorted_[i], (static_cast<double>(i) + 0.5) / n};
  }
  return out;
}

double Cdf::percentile(double p) const {
  const double n = static_cast<double>(sorted_.size());
  const double x = std::clamp(p * n - 0.5, 0.0, n - 1.0);
  const auto i = static_cast<std::size_t>(std::floor(x));
  if (i + 1 >= sorted_.size()) return sorted_.back();
  const double f = x - static_cast<double>(i);
  return sorted_[i] + f * (sorted_[i + 1] - sorted_[i]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty series");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double reliability(const std::vector<double>& values, double target) {
  if (values.empty()) throw std::invalid_argument("reliability of an empty series");
  const auto hits = std::count_if(values.begin(), values.end(),
                                  [target](double v) { return v >= target; });
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

int nearest_bin(const std::vector<double>& grid, double h) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    if (best < 0 || std::abs(grid[i] - h) < std::abs(grid[best] - h)) best = i;
  }
  return best;
}

HeightProfile height_profile(const std::vector<double>& heights,
                             const std::vector<double>& values,
                             const std::vector<double>& grid, std::size_t min_samples) {
  if (heights.size() != values.size()) throw std::invalid_argument("height/value size mismatch");
  std::vector<std::vector<double>> bins(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int b = nearest_bin(grid, heights[i]);
    if (b >= 0) bins[b].push_back(values[i]);
  }
  HeightProfile out;
  for (std::size_t b = 0; b < grid.size(); ++b) {
    if (bins[b].empty()) continue;
    if (bins[b].size() < min_samples) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "height bin %.1f m has %zu samples (< %zu), omitted",
                    grid[b], bins[b].size(), min_samples);
      out.warnings.emplace_back(buf);
      continue;
    }
    const Cdf cdf(bins[b]);
    out.rows.push_back({grid[b], bins[b].size(), cdf.percentile(0.05), mean(bins[b]),
                        cdf.percentile(0.95)});
  }
  return out;
}

namespace {

std::string fmt(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Rounded through a fixed-precision string so summary numbers are stable.
double rounded(double v, int prec = 9) { return std::stod(fmt(v, prec)); }

const Series* find_series(const MetricsReport& r, const std::string& name) {
  auto it = r.series.find(name);
  return it == r.series.end() ? nullptr : &it->second;
}

json group_summary(const MetricsReport& r, UserGroup g, const OutputOptions& opt) {
  json out = json::object();
  if (const Series* rate = find_series(r, "rate_bps")) {
    const Series s = rate->filter(g);
    out["users"] = s.size();
    if (s.size() > 0) {
      const Cdf cdf(s.values);
      out["reliability"] = rounded(reliability(s.values, opt.target_rate_bps));
      out["rate_p05_bps"] = rounded(cdf.percentile(0.05), 3);
      out["rate_median_bps"] = rounded(cdf.percentile(0.5), 3);
      out["rate_mean_bps"] = rounded(mean(s.values), 3);
      json by_h = json::array();
      std::vector<std::vector<double>> bins(opt.height_grid.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        bins[nearest_bin(opt.height_grid, s.heights[i])].push_back(s.values[i]);
      }
      for (std::size_t b = 0; b < bins.size(); ++b) {
        if (bins[b].empty()) continue;
        by_h.push_back({{"height_m", opt.height_grid[b]},
                        {"users", bins[b].size()},
                        {"reliability", rounded(reliability(bins[b], opt.target_rate_bps))},
                        {"rate_median_bps", rounded(percentile(bins[b], 0.5), 3)}});
      }
      out["by_height"] = by_h;
    }
  }
  if (const Series* sinr = find_series(r, "sinr_db")) {
    const Series s = sinr->filter(g);
    if (s.size() > 0) {
      const Cdf cdf(s.values);
      out["sinr_p05_db"] = rounded(cdf.percentile(0.05), 6);
      out["sinr_median_db"] = rounded(cdf.percentile(0.5), 6);
      out["sinr_p95_db"] = rounded(cdf.percentile(0.95), 6);
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_height_csv(const std::filesystem::path& path, const Series* s,
                      const OutputOptions& opt, std::vector<std::string>& warnings) {
  std::ofstream out = open_out(path);
  out << "group,height_m,samples,p05,mean,p95\n";
  if (!s) return;
  for (UserGroup g : {UserGroup::kUav, UserGroup::kGue}) {
    const Series sub = s->filter(g);
    if (sub.size() == 0) continue;
    const HeightProfile hp = height_profile(sub.heights, sub.values, opt.height_grid,
                                            opt.min_bin_samples);
    for (const std::string& w : hp.warnings) {
      warnings.push_back(path.filename().string() + " " + to_string(g) + ": " + w);
    }
    for (const HeightRow& row : hp.rows) {
      out << to_string(g) << ',' << fmt(row.height_m, 1) << ',' << row.n << ','
          << fmt(row.p05, 4) << ',' << fmt(row.mean, 4) << ',' << fmt(row.p95, 4) << '\n';
    }
  }
}

}  // namespace

json summarize(const MetricsReport& report, const OutputOptions& opt) {
  json s;
  s["drops"] = report.drops;
  s["target_rate_bps"] = opt.target_rate_bps;
  s["groups"] = {{"uav", group_summary(report, UserGroup::kUav, opt)},
                 {"gue", group_summary(report, UserGroup::kGue, opt)}};
  s["zero_forcing"] = {{"precoders", report.zf.precoders},
                       {"max_offdiag_ratio", report.zf.max_offdiag_ratio},
                       {"max_column_power_error", report.zf.max_power_error},
                       {"max_total_power_error", report.zf.max_total_power_error}};
  json events = json::array();
  constexpr std::size_t kMaxListed = 100;
  for (std::size_t i = 0; i < report.events.size() && i < kMaxListed; ++i) {
    const NumericalEvent& e = report.events[i];
    events.push_back(
        {{"drop", e.drop}, {"cell", e.cell}, {"prb", e.prb}, {"user", e.user}, {"what", e.what}});
  }
  s["numerical_events"] = {{"count", report.events.size()}, {"listed", events}};
  s["warnings"] = report.warnings;
  return s;
}

void write_outputs(const std::string& dir, const MetricsReport& report, const OutputOptions& opt,
                   const json& config_echo) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (!fs::is_directory(root)) throw std::runtime_error("cannot create output directory " + dir);

  std::vector<std::string> warnings;
  {
    std::ofstream out = open_out(root / "rate_cdf.csv");
    out << "group,probability,rate_bps\n";
    if (const Series* rate = find_series(report, "rate_bps")) {
      for (UserGroup g : {UserGroup::kUav, UserGroup::kGue}) {
        const Series sub = rate->filter(g);
        if (sub.size() == 0) continue;
        const Cdf cdf(sub.values);
        for (int i = 0; i <= 200; ++i) {
          const double p = i / 200.0;
          out << to_string(g) << ',' << fmt(p, 3) << ',' << fmt(cdf.percentile(p), 1) << '\n';
        }
      }
    }
  }
  write_height_csv(root / "sinr_height.csv", find_series(report, "sinr_db"), opt, warnings);
  write_height_csv(root / "coupling_height.csv", find_series(report, "coupling_db"), opt,
                   warnings);
  {
    std::ofstream out = open_out(root / "association.csv");
    out << "drop,user_id,kind,height_m,serving_cell,d2_m,d3_m,gain_dbi\n";
    for (const AssociationRow& row : report.association) {
      const AssociationRecord& r = row.record;
      out << row.drop << ',' << r.user_id << ',' << to_string(r.kind) << ','
          << fmt(r.height_m, 3) << ',' << r.serving_cell << ',' << fmt(r.d2, 3) << ','
          << fmt(r.d3, 3) << ',' << fmt(r.gain_dbi, 4) << '\n';
    }
  }
  json summary = summarize(report, opt);
  for (const std::string& w : warnings) summary["warnings"].push_back(w);
  summary["config"] = config_echo;
  std::ofstream out = open_out(root / "summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace uavsim
