/**
 * @file phy_su.cpp
 */
#include "uavsim/phy_su.hpp"

#include <cmath>
#include <stdexcept>

namespace uavsim {

std::vector<SuScheduleSlot> schedule_su(int cell, const std::vector<int>& users, int n_prb,
                                        int rotation_offset) {
  std::vector<SuScheduleSlot> slots;
  const int k = static_cast<int>(users.size());
  if (k == 0) return slots;
  const int off = ((rotation_offset % k) + k) % k;
  slots.reserve(n_prb);
  for (int p = 0; p < n_prb; ++p) slots.push_back({cell, p, users[(p + off) % k]});
  return slots;
}

SuSchedule::SuSchedule(int n_cells, int n_prb)
    : n_cells_(n_cells), n_prb_(n_prb), owner_(static_cast<std::size_t>(n_cells) * n_prb, -1) {}

void SuSchedule::add(const std::vector<SuScheduleSlot>& slots) {
  for (const SuScheduleSlot& s : slots) {
    int& o = owner_[s.cell * n_prb_ + s.prb];
    if (o >= 0) throw std::logic_error("two users scheduled on one PRB of a cell");
    o = s.user;
  }
}

Eigen::VectorXcd su_combiner(int n_antennas) {
  return Eigen::VectorXcd::Constant(n_antennas, 1.0 / std::sqrt(static_cast<double>(n_antennas)));
}

Eigen::VectorXd su_received_power(const Eigen::MatrixXcd& channels, double p_b_mw) {
  const Eigen::VectorXcd w = su_combiner(static_cast<int>(channels.rows()));
  return p_b_mw * (channels.adjoint() * w).cwiseAbs2();
}

double sinr_su(const SuSchedule& schedule, int target_user, int serving_cell, int prb,
               const Eigen::MatrixXcd& channels, double p_b_mw, double noise_mw) {
  if (schedule.user_at(serving_cell, prb) != target_user) {
    throw std::invalid_argument("target user is not scheduled on this PRB");
  }
  const Eigen::VectorXd rx = su_received_power(channels, p_b_mw);
  double interference = 0.0;
  for (int c = 0; c < schedule.n_cells(); ++c) {
    if (c != serving_cell && schedule.active(c, prb)) interference += rx(c);
  }
  return rx(serving_cell) / (interference + noise_mw);
}

}  // namespace uavsim
