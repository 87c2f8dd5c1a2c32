/**
 * @file phy_mu.cpp
 */
#include "uavsim/phy_mu.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "uavsim/geometry.hpp"
#include "uavsim/units.hpp"

namespace uavsim {

std::string to_string(CsiMode m) {
  switch (m) {
    case CsiMode::kPerfect: return "perfect";
    case CsiMode::kR3Pc: return "r3_pc";
    case CsiMode::kR3Ep: return "r3_ep";
  }
  return "?";
}

CsiMode parse_csi_mode(const std::string& s) {
  if (s == "perfect") return CsiMode::kPerfect;
  if (s == "r3_pc") return CsiMode::kR3Pc;
  if (s == "r3_ep") return CsiMode::kR3Ep;
  throw std::invalid_argument("unknown csi_mode '" + s + "' (perfect, r3_pc, r3_ep)");
}

namespace {

template <typename T>
void fisher_yates(std::vector<T>& v, CounterRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(i)), i - 1);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Eigen::MatrixXcd pilot_codebook(int m_p) {
  if (m_p < 1) throw std::invalid_argument("pilot length must be positive");
  Eigen::MatrixXcd v(m_p, m_p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_p));
  for (int t = 0; t < m_p; ++t) {
    for (int i = 0; i < m_p; ++i) {
      v(t, i) = std::polar(scale, -2.0 * kPi * static_cast<double>((t * i) % m_p) / m_p);
    }
  }
  return v;
}

PilotPlan build_pilot_plan(int m_p, int pool_size) {
  if (pool_size < 1) throw std::invalid_argument("pilot pool size must be positive");
  if (m_p < 3 * pool_size) {
    throw std::invalid_argument("pilot length " + std::to_string(m_p) +
                                " too short for three pools of " + std::to_string(pool_size));
  }
  PilotPlan plan;
  plan.m_p = m_p;
  plan.pool_size = pool_size;
  plan.codebook = pilot_codebook(m_p);
  for (int s = 0; s < 3; ++s) {
    plan.sector_pool[s].resize(pool_size);
    std::iota(plan.sector_pool[s].begin(), plan.sector_pool[s].end(), s * pool_size);
  }
  return plan;
}

std::vector<int> assign_pilots(const PilotPlan& plan, int sector, int n_users, CounterRng& rng) {
  std::vector<int> pool = plan.pool(sector);
  if (n_users > static_cast<int>(pool.size())) {
    throw std::invalid_argument("more users on a PRB than pilots in the sector pool");
  }
  fisher_yates(pool, rng);
  pool.resize(n_users);
  return pool;
}

double ul_tx_power_dbm(const UplinkPowerParams& params, double path_gain_db, bool equal_power) {
  if (equal_power) return params.pmax_dbm;
  return std::min(params.pmax_dbm, params.p0_dbm + params.alpha * (-path_gain_db));
}

Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& h_own, double p_own_mw,
                             const Eigen::MatrixXcd& copilot_channels,
                             const Eigen::VectorXd& copilot_power_mw, double noise_mw,
                             CounterRng& rng) {
  if (copilot_channels.cols() != copilot_power_mw.size()) {
    throw std::invalid_argument("co-pilot channels and powers differ in count");
  }
  Eigen::VectorXcd est = h_own;
  for (Eigen::Index j = 0; j < copilot_channels.cols(); ++j) {
    est += std::sqrt(copilot_power_mw(j) / p_own_mw) * copilot_channels.col(j);
  }
  if (noise_mw > 0.0) {
    const double sigma = std::sqrt(noise_mw / p_own_mw);
    for (Eigen::Index i = 0; i < est.size(); ++i) est(i) += sigma * rng.complex_normal();
  }
  return est;
}

namespace {

double gram_condition(const Eigen::MatrixXcd& hn) {
  const Eigen::MatrixXcd g = hn.adjoint() * hn;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

ZfResult zf_precoder(const Eigen::MatrixXcd& h_hat, double p_b_mw) {
  ZfResult r;
  const int k_all = static_cast<int>(h_hat.cols());
  const Eigen::VectorXd norms = h_hat.colwise().norm().transpose();
  for (int k = 0; k < k_all; ++k) {
    if (norms(k) > 0.0 && std::isfinite(norms(k))) {
      r.kept.push_back(k);
    } else {
      r.dropped.push_back(k);
    }
  }
  Eigen::MatrixXcd hn;
  while (!r.kept.empty()) {
    hn.resize(h_hat.rows(), static_cast<Eigen::Index>(r.kept.size()));
    for (std::size_t i = 0; i < r.kept.size(); ++i) {
      hn.col(i) = h_hat.col(r.kept[i]) / norms(r.kept[i]);
    }
    r.condition = gram_condition(hn);
    if (r.condition <= kZfMaxCondition) break;
    auto weakest = std::min_element(r.kept.begin(), r.kept.end(),
                                    [&](int a, int b) { return norms(a) < norms(b); });
    r.dropped.push_back(*weakest);
    r.kept.erase(weakest);
  }
  std::sort(r.dropped.begin(), r.dropped.end());
  const auto k = static_cast<Eigen::Index>(r.kept.size());
  if (k == 0) {
    r.w.resize(h_hat.rows(), 0);
    return r;
  }
  // Hn = QR  =>  Hn (Hn^H Hn)^{-1} = Q R^{-H}.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(hn);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(hn.rows(), k);
  const Eigen::MatrixXcd rmat = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  r.w = q * rmat.adjoint()
                .triangularView<Eigen::Lower>()
                .solve(Eigen::MatrixXcd::Identity(k, k));
  const double col_power = p_b_mw / static_cast<double>(k);
  for (Eigen::Index i = 0; i < k; ++i) r.w.col(i) *= std::sqrt(col_power) / r.w.col(i).norm();
  return r;
}

double zf_offdiag_ratio(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& w) {
  const Eigen::MatrixXcd m = h_hat.adjoint() * w;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = std::abs(m(i, i));
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k != i) worst = std::max(worst, std::abs(m(i, k)) / d);
    }
  }
  return worst;
}

MuSinrTerms sinr_mu(const Eigen::VectorXcd& h_serving, const Eigen::MatrixXcd& w_serving,
                    int column, const std::vector<InterferingCell>& others, double noise_mw) {
  if (column < 0 || column >= w_serving.cols()) {
    throw std::invalid_argument("target is not scheduled in its serving cell");
  }
  MuSinrTerms t;
  const Eigen::VectorXd own = (w_serving.adjoint() * h_serving).cwiseAbs2();
  t.signal = own(column);
  for (Eigen::Index i = 0; i < own.size(); ++i) {
    if (i != column) t.intra += own(i);
  }
  for (const InterferingCell& c : others) {
    t.inter += (c.w.adjoint() * c.h).cwiseAbs2().sum();
  }
  t.noise = noise_mw;
  return t;
}

std::vector<std::vector<int>> schedule_mu(const std::vector<int>& users, int k_max, int n_prb,
                                          CounterRng& rng) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  std::vector<int> order = users;
  fisher_yates(order, rng);
  const int k = static_cast<int>(order.size());
  std::vector<std::vector<int>> groups(n_prb);
  for (int p = 0; p < n_prb; ++p) {
    if (k <= k_max) {
      groups[p] = order;
      continue;
    }
    groups[p].resize(k_max);
    for (int i = 0; i < k_max; ++i) {
      groups[p][i] = order[(static_cast<long long>(p) * k_max + i) % k];
    }
  }
  return groups;
}

}  // namespace uavsim
