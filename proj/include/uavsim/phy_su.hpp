/**
 * @file phy_su.hpp
 * @brief Single-user sectorized mode: round-robin PRB allocation and the
 * fixed identical-scalars combiner.
 */
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace uavsim {

struct SuScheduleSlot {
  int cell = 0;
  int prb = 0;
  int user = 0;
};

/// PRB p goes to users[(p + offset) mod K]; no slots for an empty cell.
std::vector<SuScheduleSlot> schedule_su(int cell, const std::vector<int>& users, int n_prb,
                                        int rotation_offset);

/// Network-wide schedule: user holding (cell, prb), or -1.
class SuSchedule {
 public:
  SuSchedule(int n_cells, int n_prb);
  void add(const std::vector<SuScheduleSlot>& slots);
  int user_at(int cell, int prb) const { return owner_[cell * n_prb_ + prb]; }
  bool active(int cell, int prb) const { return user_at(cell, prb) >= 0; }
  int n_cells() const { return n_cells_; }
  int n_prb() const { return n_prb_; }

 private:
  int n_cells_;
  int n_prb_;
  std::vector<int> owner_;
};

/// Unit-norm vector of identical entries.
Eigen::VectorXcd su_combiner(int n_antennas);

/// P_b |h^H w|^2 / (sum over other active cells of P_b |h_j^H w|^2 + noise).
/// channels.col(c) is the channel from cell c to the target on this PRB.
/// Throws std::invalid_argument if the target does not hold the PRB in its
/// serving cell.
double sinr_su(const SuSchedule& schedule, int target_user, int serving_cell, int prb,
               const Eigen::MatrixXcd& channels, double p_b_mw, double noise_mw);

/// Per-cell received power P_b |h_c^H w|^2 for every column.
Eigen::VectorXd su_received_power(const Eigen::MatrixXcd& channels, double p_b_mw);

}  // namespace uavsim
