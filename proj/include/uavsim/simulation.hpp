/**
 * @file simulation.hpp
 * @brief One Monte-Carlo drop: users, large-scale links, association and the
 * single-user or multi-user PHY evaluation.
 *
 * Every random quantity is drawn from a counter stream keyed by the master
 * seed, the drop index and the ids of the objects involved, so a drop gives
 * the same numbers regardless of thread placement or of which links a given
 * evaluation happens to materialize.
 */
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavsim/association.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/config.hpp"
#include "uavsim/link_adaptation.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/phy_mu.hpp"
#include "uavsim/phy_su.hpp"

namespace uavsim {

/// Run-wide derived quantities shared by all drops (read-only).
struct RunContext {
  NetworkLayout layout;
  ChannelProfile profile;
  McsTable mcs = McsTable::default_table();
  PilotPlan pilots;
  ArrayGeometry geometry;
  double p_total_dbm = 46.0;
  double p_b_mw = 0.0;
  double ue_noise_mw = 0.0;
  double bs_noise_mw = 0.0;

  static RunContext make(const ScenarioConfig& cfg);
};

struct DropState {
  int drop = 0;
  std::vector<UserDrop> users;
  LinkTable links;
  std::vector<std::vector<int>> served;  ///< users per cell, ascending id
  std::vector<char> evaluated;           ///< per user: produces samples
};

DropState prepare_drop(const ScenarioConfig& cfg, const RunContext& ctx, int drop);

/// Single-user mode samples for one drop.
MetricsReport run_su_drop(const ScenarioConfig& cfg, const RunContext& ctx, const DropState& st);

/// Multi-user evaluation of one drop. The accessors recompute individual
/// quantities from the same random streams the evaluation uses.
class MuDrop {
 public:
  MuDrop(const ScenarioConfig& cfg, const RunContext& ctx, DropState state);

  const DropState& state() const { return st_; }
  const std::vector<int>& group(int cell, int prb) const { return groups_[cell][prb]; }
  /// Pilot index of each group member (empty with perfect CSI).
  const std::vector<int>& pilots(int cell, int prb) const { return pilot_idx_[cell][prb]; }
  double ul_power_mw(int user) const { return ul_power_mw_[user]; }
  int prb_group(int prb) const { return prb / cfg_.channel.prb_group; }

  Eigen::VectorXcd channel(int cell, int user, int prb) const;
  /// Columns follow group(cell, prb).
  Eigen::MatrixXcd estimates(int cell, int prb) const;
  ZfResult precoder(int cell, int prb) const;

  struct Slot {
    int user = 0;
    int prb = 0;
    bool served = false;  ///< false when removed by the rank check
    MuSinrTerms terms;
  };

  /// Runs the full evaluation; slots() then holds every evaluated
  /// (user, PRB) pair in PRB-major order.
  MetricsReport evaluate();
  const std::vector<Slot>& slots() const { return slots_; }

 private:
  template <typename ColumnFn>
  Eigen::VectorXcd estimate_column(int cell, int prb, int pos, ColumnFn&& column) const;

  const ScenarioConfig& cfg_;
  const RunContext& ctx_;
  DropState st_;
  std::vector<std::vector<std::vector<int>>> groups_;     // [cell][prb]
  std::vector<std::vector<std::vector<int>>> pilot_idx_;  // [cell][prb]
  // [prb][pilot] -> (cell, user) pairs transmitting that pilot
  std::vector<std::vector<std::vector<std::pair<int, int>>>> pilot_users_;
  std::vector<double> ul_power_mw_;
  std::vector<Slot> slots_;
};

MetricsReport run_mu_drop(const ScenarioConfig& cfg, const RunContext& ctx, DropState st);

/// Complete drop (prepare + mode-specific evaluation).
MetricsReport simulate_drop(const ScenarioConfig& cfg, const RunContext& ctx, int drop);

}  // namespace uavsim
