/**
 * @file oracle.hpp
 * @brief Brute-force reference computations used to cross-check the fast paths.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "uavsim/antenna.hpp"
#include "uavsim/association.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/deployment.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

/// Channel from one cell to the target user and that cell's precoder
/// (one column per stream, transmit power included).
struct OracleLink {
  Eigen::VectorXcd h;
  Eigen::MatrixXcd w;
};

struct SymbolSinrEstimate {
  double sinr = 0.0;
  double std_error = 0.0;
  double signal_power = 0.0;
  double interference_noise_power = 0.0;
};

/// Monte-Carlo SINR from the received-symbol model
///   y = h_b^H w_bk s_bk + sum_{i!=k} h_b^H w_bi s_bi + sum_{j!=b} sum_i h_j^H w_ji s_ji + e
/// with i.i.d. unit-variance complex Gaussian symbols and CN(0, noise_mw)
/// noise. Returns the ratio of the empirical desired power to the empirical
/// power of everything else, with a delta-method standard error.
SymbolSinrEstimate symbol_level_sinr(const OracleLink& serving, int column,
                                     const std::vector<OracleLink>& others, double noise_mw,
                                     int n_symbols, CounterRng& rng);

struct OracleAssociationInputs {
  const NetworkLayout* layout = nullptr;
  const ChannelProfile* profile = nullptr;
  ElementPattern pattern;
  ArrayGeometry geometry;
  AssocMode mode = AssocMode::kSu;
  double p_total_dbm = 46.0;
  double carrier_ghz = 2.0;
  /// LoS state of (site, user); all NLoS when empty.
  std::function<bool(int, int)> los;
  /// Extra loss of (site, user) in dB (shadowing, penetration); 0 when empty.
  std::function<double(int, int)> extra_loss_db;
};

/// Serving cell of every user by enumerating all cells and, for each, all
/// seven wrap images to find the nearest one, recomputing geometry, gains
/// and path loss from scratch.
std::vector<int> exhaustive_association(const OracleAssociationInputs& in,
                                        const std::vector<UserDrop>& users);

}  // namespace uavsim
