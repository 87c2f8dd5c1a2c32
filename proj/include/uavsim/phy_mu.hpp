/**
 * @file phy_mu.hpp
 * @brief Massive MIMO building blocks: Reuse-3 pilot plan, fractional UL
 * power control, contaminated LS estimation, zero-forcing and MU SINR.
 */
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "uavsim/rng.hpp"

namespace uavsim {

enum class CsiMode { kPerfect, kR3Pc, kR3Ep };
std::string to_string(CsiMode m);
CsiMode parse_csi_mode(const std::string& s);

struct PilotPlan {
  int m_p = 24;
  int pool_size = 8;
  Eigen::MatrixXcd codebook;                 ///< column i is pilot sequence i (unit norm)
  std::array<std::vector<int>, 3> sector_pool;  ///< disjoint pilot indices per sector

  const std::vector<int>& pool(int sector) const { return sector_pool[sector % 3]; }
};

/// Normalized DFT codebook of size m_p (orthonormal columns).
Eigen::MatrixXcd pilot_codebook(int m_p);

/// Codebook plus the three sector pools [8s, 8s + pool_size). Throws if
/// m_p < 3 * pool_size.
PilotPlan build_pilot_plan(int m_p, int pool_size);

/// Distinct pilots for n users drawn uniformly without replacement from the
/// sector's pool.
std::vector<int> assign_pilots(const PilotPlan& plan, int sector, int n_users, CounterRng& rng);

struct UplinkPowerParams {
  double p0_dbm = -58.0;
  double alpha = 0.5;
  double pmax_dbm = 23.0;
};

/// min(pmax, p0 + alpha * PL) with PL = -path_gain_db; pmax when equal_power.
double ul_tx_power_dbm(const UplinkPowerParams& params, double path_gain_db,
                       bool equal_power = false);

/// h + sum_j sqrt(P_j / P_k) h_j + n / sqrt(P_k), n ~ CN(0, noise_mw I).
/// copilot_channels holds the co-pilot users' channels to this BS as columns.
Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& h_own, double p_own_mw,
                             const Eigen::MatrixXcd& copilot_channels,
                             const Eigen::VectorXd& copilot_power_mw, double noise_mw,
                             CounterRng& rng);

struct ZfResult {
  Eigen::MatrixXcd w;        ///< one column per kept user, |w_k|^2 = P_b / kept
  std::vector<int> kept;     ///< input column indices, ascending
  std::vector<int> dropped;  ///< removed for rank deficiency
  double condition = 1.0;    ///< Gram condition number of the kept, normalized columns
};

inline constexpr double kZfMaxCondition = 1e12;

/// W = H (H^H H)^{-1} D^{-1/2} with per-column power P_b / K. Columns are
/// removed weakest-first while the normalized Gram condition exceeds 1e12.
ZfResult zf_precoder(const Eigen::MatrixXcd& h_hat, double p_b_mw);

/// max_{i != k} |(H^H W)_ik| / |(H^H W)_ii|.
double zf_offdiag_ratio(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& w);

struct MuSinrTerms {
  double signal = 0.0;
  double intra = 0.0;
  double inter = 0.0;
  double noise = 0.0;

  double sinr() const { return signal / (intra + inter + noise); }
};

struct InterferingCell {
  Eigen::VectorXcd h;  ///< channel from that cell to the target
  Eigen::MatrixXcd w;  ///< that cell's precoder on the PRB
};

/// |h^H w_k|^2 over intra-cell residual, inter-cell power and noise.
/// Precoders carry the transmit power.
MuSinrTerms sinr_mu(const Eigen::VectorXcd& h_serving, const Eigen::MatrixXcd& w_serving,
                    int column, const std::vector<InterferingCell>& others, double noise_mw);

/// Users on each PRB: a random order, then PRB p takes the k_max users
/// order[(p * k_max + i) mod K]. All users on all PRBs when K <= k_max.
std::vector<std::vector<int>> schedule_mu(const std::vector<int>& users, int k_max, int n_prb,
                                          CounterRng& rng);

}  // namespace uavsim
