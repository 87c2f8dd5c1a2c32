/**
 * @file link_adaptation.cpp
 */
#include "uavsim/link_adaptation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uavsim/units.hpp"

namespace uavsim {

McsTable::McsTable(std::vector<McsRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("MCS table is empty");
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (!(rows_[i].threshold_db > rows_[i - 1].threshold_db) ||
        !(rows_[i].efficiency > rows_[i - 1].efficiency)) {
      throw std::invalid_argument("MCS table rows must be strictly increasing");
    }
  }
}

McsTable McsTable::default_table() {
  constexpr double kLowDb = -5.02;
  constexpr double kSecondDb = -4.12;
  constexpr double kHighDb = 25.87;
  constexpr double kLowEff = 0.22;
  constexpr double kHighEff = 7.44;
  constexpr int kRows = 15;
  auto shannon = [](double db) { return std::log2(1.0 + db2lin(db)); };
  const double s_low = shannon(kLowDb);
  const double s_span = shannon(kHighDb) - s_low;

  std::vector<McsRow> rows;
  rows.push_back({kLowDb, kLowEff});
  const double step = (kHighDb - kSecondDb) / (kRows - 2);
  for (int i = 0; i < kRows - 2; ++i) {
    const double t = kSecondDb + i * step;
    rows.push_back({t, kLowEff + (kHighEff - kLowEff) * (shannon(t) - s_low) / s_span});
  }
  rows.push_back({kHighDb, kHighEff});
  return McsTable(std::move(rows));
}

McsTable McsTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read MCS table " + path);
  std::string line;
  std::vector<McsRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("threshold_db", 0) == 0) continue;
    }
    std::istringstream ss(line);
    McsRow r;
    char comma = 0;
    if (!(ss >> r.threshold_db >> comma >> r.efficiency) || comma != ',') {
      throw std::invalid_argument("malformed MCS row in " + path + ": " + line);
    }
    rows.push_back(r);
  }
  return McsTable(std::move(rows));
}

double McsTable::select(double sinr_db) const {
  double eff = 0.0;
  for (const McsRow& r : rows_) {
    if (r.threshold_db <= sinr_db) {
      eff = r.efficiency;
    } else {
      break;
    }
  }
  return eff;
}

double user_rate_bps(double efficiency, int prbs_held, double overhead_factor) {
  if (!(overhead_factor > 0.0 && overhead_factor <= 1.0)) {
    throw std::invalid_argument("overhead factor must lie in (0, 1]");
  }
  return efficiency * kPrbBandwidthHz * prbs_held * overhead_factor;
}

}  // namespace uavsim
