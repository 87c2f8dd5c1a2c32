/**
 * @file association.cpp
 */
#include "uavsim/association.hpp"

#include <cmath>
#include <stdexcept>

namespace uavsim {

double association_gain_dbi(const LargeScaleState& link, AssocMode mode, int n_antennas) {
  if (mode == AssocMode::kSu) {
    if (!link.su_gain_dbi) throw std::invalid_argument("su association needs a single-column array");
    return *link.su_gain_dbi;
  }
  return link.element_gain_dbi + 10.0 * std::log10(static_cast<double>(n_antennas));
}

double rsrp_dbm(const LargeScaleState& link, AssocMode mode, double p_total_dbm,
                int n_antennas) {
  return p_total_dbm + association_gain_dbi(link, mode, n_antennas) - link.attenuation_db();
}

int argmax_lowest(const std::vector<double>& values) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (best < 0 || values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<int> associate(std::vector<UserDrop>& users, const LinkTable& links, AssocMode mode,
                           double p_total_dbm, int n_antennas) {
  std::vector<int> serving(users.size(), -1);
  std::vector<double> rsrp(links.n_cells);
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (int c = 0; c < links.n_cells; ++c) {
      rsrp[c] = rsrp_dbm(links.at(c, static_cast<int>(u)), mode, p_total_dbm, n_antennas);
    }
    serving[u] = argmax_lowest(rsrp);
    users[u].serving_cell = serving[u];
  }
  return serving;
}

std::vector<AssociationRecord> association_stats(const NetworkLayout& layout,
                                                 const std::vector<UserDrop>& users,
                                                 const LinkTable& links, AssocMode mode,
                                                 int n_antennas) {
  std::vector<AssociationRecord> out;
  out.reserve(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    const UserDrop& user = users[u];
    if (user.serving_cell < 0) throw std::logic_error("association_stats before associate");
    const Cell& cell = layout.cells[user.serving_cell];
    const WrappedDisplacement d = wrap_displacement(layout, cell.position, user.position);
    AssociationRecord r;
    r.user_id = user.user_id;
    r.kind = user.kind;
    r.height_m = user.position.z;
    r.serving_cell = user.serving_cell;
    r.d2 = d.d2;
    r.d3 = d.d3;
    r.gain_dbi =
        association_gain_dbi(links.at(user.serving_cell, static_cast<int>(u)), mode, n_antennas);
    out.push_back(r);
  }
  return out;
}

}  // namespace uavsim
