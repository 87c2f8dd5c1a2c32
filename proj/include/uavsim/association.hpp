/**
 * @file association.hpp
 * @brief RSRP-based serving-cell selection.
 */
#pragma once

#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/deployment.hpp"

namespace uavsim {

/// su: fixed combiner gain toward the user. mu: element gain plus the full
/// coherent array gain of a beamformed reference signal.
enum class AssocMode { kSu, kMu };

/// Wideband RSRP in dBm from the link's large-scale state (no fast fading).
double rsrp_dbm(const LargeScaleState& link, AssocMode mode, double p_total_dbm,
                int n_antennas);

/// Antenna gain entering the RSRP of a link (dBi).
double association_gain_dbi(const LargeScaleState& link, AssocMode mode, int n_antennas);

/// Index of the largest value; ties go to the lowest index. -1 if empty.
int argmax_lowest(const std::vector<double>& values);

/// Sets serving_cell on every user and returns the assignment.
std::vector<int> associate(std::vector<UserDrop>& users, const LinkTable& links, AssocMode mode,
                           double p_total_dbm, int n_antennas);

struct AssociationRecord {
  int user_id = 0;
  UserKind kind = UserKind::kUav;
  double height_m = 0.0;
  int serving_cell = -1;
  double d2 = 0.0;
  double d3 = 0.0;
  double gain_dbi = 0.0;
};

std::vector<AssociationRecord> association_stats(const NetworkLayout& layout,
                                                 const std::vector<UserDrop>& users,
                                                 const LinkTable& links, AssocMode mode,
                                                 int n_antennas);

}  // namespace uavsim
