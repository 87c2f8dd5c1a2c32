/**
 * @file simulation.cpp
 */
#include "uavsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "uavsim/units.hpp"

namespace uavsim {

namespace {

double sinr_to_db(double sinr) { return lin2db(std::max(sinr, 1e-30)); }

void record_association(MetricsReport& r, const RunContext& ctx, const DropState& st,
                        AssocMode mode) {
  const std::vector<AssociationRecord> recs =
      association_stats(ctx.layout, st.users, st.links, mode, ctx.geometry.n_antennas());
  for (std::size_t u = 0; u < recs.size(); ++u) {
    if (st.evaluated[u]) r.association.push_back({st.drop, recs[u]});
  }
}

}  // namespace

RunContext RunContext::make(const ScenarioConfig& cfg) {
  RunContext ctx;
  ctx.layout = build_layout(cfg.deployment);
  ctx.profile = resolve_profile(cfg.channel);
  if (!cfg.mcs.table_file.empty()) ctx.mcs = McsTable::load_csv(cfg.mcs.table_file);
  ctx.pilots = build_pilot_plan(cfg.mu.m_p, cfg.mu.k_max);
  ctx.geometry = cfg.mode == Mode::kSu ? cfg.antenna.su() : cfg.antenna.mu();
  ctx.p_total_dbm = cfg.power.bs_total_dbm;
  ctx.p_b_mw = dbm2mw(cfg.power.per_prb_dbm());
  ctx.ue_noise_mw = dbm2mw(cfg.power.ue_noise_dbm());
  ctx.bs_noise_mw = dbm2mw(cfg.power.bs_noise_dbm());
  return ctx;
}

DropState prepare_drop(const ScenarioConfig& cfg, const RunContext& ctx, int drop) {
  DropState st;
  st.drop = drop;
  CounterRng user_rng = CounterRng::stream(cfg.seed, Stream::kUsers, {std::uint64_t(drop)});
  st.users = drop_users(ctx.layout, cfg.deployment, user_rng);

  LinkTableInputs in;
  in.layout = &ctx.layout;
  in.profile = &ctx.profile;
  in.channel = &cfg.channel;
  in.geometry = ctx.geometry;
  in.pattern = cfg.antenna.element;
  in.carrier_ghz = cfg.power.carrier_ghz;
  in.seed = cfg.seed;
  in.drop = static_cast<std::uint64_t>(drop);
  st.links = build_link_table(in, st.users);

  const AssocMode am = cfg.mode == Mode::kSu ? AssocMode::kSu : AssocMode::kMu;
  associate(st.users, st.links, am, ctx.p_total_dbm, ctx.geometry.n_antennas());

  st.served.assign(ctx.layout.num_cells(), {});
  st.evaluated.assign(st.users.size(), 0);
  for (std::size_t u = 0; u < st.users.size(); ++u) {
    st.served[st.users[u].serving_cell].push_back(static_cast<int>(u));
    st.evaluated[u] = cfg.metrics.evaluates(group_of(st.users[u].kind)) ? 1 : 0;
  }
  return st;
}

MetricsReport run_su_drop(const ScenarioConfig& cfg, const RunContext& ctx, const DropState& st) {
  MetricsReport r;
  r.drops = 1;
  const int n_cells = static_cast<int>(ctx.layout.num_cells());
  const int n_prb = cfg.power.n_prb;
  const int group = cfg.channel.prb_group;
  SuSchedule sched(n_cells, n_prb);
  for (int c = 0; c < n_cells; ++c) sched.add(schedule_su(c, st.served[c], n_prb, st.drop));

  Series& sinr_s = r["sinr_db"];
  Series& rate_s = r["rate_bps"];
  Series& coupling_s = r["coupling_db"];
  Eigen::MatrixXcd channels(ctx.geometry.n_antennas(), n_cells);
  for (std::size_t ui = 0; ui < st.users.size(); ++ui) {
    if (!st.evaluated[ui]) continue;
    const int u = static_cast<int>(ui);
    const UserDrop& user = st.users[ui];
    const int b = user.serving_cell;
    double eff_sum = 0.0;
    int last_group = -1;
    Eigen::VectorXd rx;
    for (int p = 0; p < n_prb; ++p) {
      if (sched.user_at(b, p) != u) continue;
      if (p / group != last_group) {
        last_group = p / group;
        for (int c = 0; c < n_cells; ++c) {
          link_channel_into(st.links, ctx.geometry, cfg.seed, st.drop, c, u, last_group,
                            channels.col(c));
        }
        rx = su_received_power(channels, ctx.p_b_mw);
      }
      double interference = 0.0;
      for (int c = 0; c < n_cells; ++c) {
        if (c != b && sched.active(c, p)) interference += rx(c);
      }
      const double sinr_db = sinr_to_db(rx(b) / (interference + ctx.ue_noise_mw));
      sinr_s.add(user.kind, user.position.z, sinr_db);
      eff_sum += ctx.mcs.select(sinr_db);
    }
    rate_s.add(user.kind, user.position.z, user_rate_bps(eff_sum, 1, cfg.mcs.overhead));
    coupling_s.add(user.kind, user.position.z,
                   coupling_loss_db(st.links.at(b, u), CouplingMode::kSuCombined));
  }
  if (cfg.metrics.record_association) record_association(r, ctx, st, AssocMode::kSu);
  return r;
}

MuDrop::MuDrop(const ScenarioConfig& cfg, const RunContext& ctx, DropState state)
    : cfg_(cfg), ctx_(ctx), st_(std::move(state)) {
  const int n_cells = static_cast<int>(ctx_.layout.num_cells());
  const int n_prb = cfg_.power.n_prb;
  const bool perfect = cfg_.mu.csi_mode == CsiMode::kPerfect;
  groups_.resize(n_cells);
  pilot_idx_.assign(n_cells, std::vector<std::vector<int>>(n_prb));
  pilot_users_.assign(n_prb, std::vector<std::vector<std::pair<int, int>>>(ctx_.pilots.m_p));
  for (int c = 0; c < n_cells; ++c) {
    CounterRng rng = CounterRng::stream(cfg_.seed, Stream::kSchedule,
                                        {std::uint64_t(st_.drop), std::uint64_t(c)});
    groups_[c] = schedule_mu(st_.served[c], cfg_.mu.k_max, n_prb, rng);
    if (perfect) continue;
    const int sector = ctx_.layout.cells[c].sector;
    for (int p = 0; p < n_prb; ++p) {
      CounterRng prng = CounterRng::stream(
          cfg_.seed, Stream::kPilots, {std::uint64_t(st_.drop), std::uint64_t(c), std::uint64_t(p)});
      const std::vector<int>& g = groups_[c][p];
      pilot_idx_[c][p] = assign_pilots(ctx_.pilots, sector, static_cast<int>(g.size()), prng);
      for (std::size_t i = 0; i < g.size(); ++i) {
        pilot_users_[p][pilot_idx_[c][p][i]].emplace_back(c, g[i]);
      }
    }
  }
  ul_power_mw_.resize(st_.users.size());
  const bool equal_power = cfg_.mu.csi_mode == CsiMode::kR3Ep;
  for (std::size_t u = 0; u < st_.users.size(); ++u) {
    const double gain_db = coupling_loss_db(st_.links.at(st_.users[u].serving_cell, int(u)),
                                            CouplingMode::kFirstRfChain);
    ul_power_mw_[u] = dbm2mw(ul_tx_power_dbm(cfg_.mu.pc, gain_db, equal_power));
  }
}

Eigen::VectorXcd MuDrop::channel(int cell, int user, int prb) const {
  Eigen::VectorXcd h(ctx_.geometry.n_antennas());
  link_channel_into(st_.links, ctx_.geometry, cfg_.seed, st_.drop, cell, user, prb_group(prb), h);
  return h;
}

template <typename ColumnFn>
Eigen::VectorXcd MuDrop::estimate_column(int cell, int prb, int pos, ColumnFn&& column) const {
  const int k = groups_[cell][prb][pos];
  if (cfg_.mu.csi_mode == CsiMode::kPerfect) return column(k);
  const int pilot = pilot_idx_[cell][prb][pos];
  const auto& sharers = pilot_users_[prb][pilot];
  int n_co = 0;
  for (const auto& [c, u] : sharers) n_co += (c != cell);
  Eigen::MatrixXcd co(ctx_.geometry.n_antennas(), n_co);
  Eigen::VectorXd co_power(n_co);
  int i = 0;
  for (const auto& [c, u] : sharers) {
    if (c == cell) continue;
    co.col(i) = column(u);
    co_power(i) = ul_power_mw_[u];
    ++i;
  }
  CounterRng rng = CounterRng::stream(cfg_.seed, Stream::kPilotNoise,
                                      {std::uint64_t(st_.drop), std::uint64_t(cell),
                                       std::uint64_t(prb), std::uint64_t(k)});
  return ls_estimate(column(k), ul_power_mw_[k], co, co_power, ctx_.bs_noise_mw, rng);
}

Eigen::MatrixXcd MuDrop::estimates(int cell, int prb) const {
  const std::vector<int>& g = groups_[cell][prb];
  Eigen::MatrixXcd h_hat(ctx_.geometry.n_antennas(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    h_hat.col(i) = estimate_column(cell, prb, static_cast<int>(i),
                                   [&](int u) { return channel(cell, u, prb); });
  }
  return h_hat;
}

ZfResult MuDrop::precoder(int cell, int prb) const {
  return zf_precoder(estimates(cell, prb), ctx_.p_b_mw);
}

MetricsReport MuDrop::evaluate() {
  MetricsReport r;
  r.drops = 1;
  const int n_cells = static_cast<int>(ctx_.layout.num_cells());
  const int n_users = static_cast<int>(st_.users.size());
  const int n_prb = cfg_.power.n_prb;
  const int n_ant = ctx_.geometry.n_antennas();
  const int grp_size = cfg_.channel.prb_group;
  const bool perfect = cfg_.mu.csi_mode == CsiMode::kPerfect;

  // Evaluated (user, PRB) slots, PRB-major.
  std::vector<std::vector<int>> targets(n_prb);
  std::vector<std::size_t> base(n_prb + 1, 0);
  std::vector<char> is_target(n_users, 0);
  for (int p = 0; p < n_prb; ++p) {
    for (int c = 0; c < n_cells; ++c) {
      for (int u : groups_[c][p]) {
        if (st_.evaluated[u]) {
          targets[p].push_back(u);
          is_target[u] = 1;
        }
      }
    }
    base[p + 1] = base[p] + targets[p].size();
  }
  slots_.assign(base[n_prb], Slot{});
  for (int p = 0; p < n_prb; ++p) {
    for (std::size_t i = 0; i < targets[p].size(); ++i) {
      slots_[base[p] + i].user = targets[p][i];
      slots_[base[p] + i].prb = p;
    }
  }

  std::vector<int> col_of(n_users, -1);
  std::vector<int> needed;
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd h_hat;
  Eigen::MatrixXcd h_tgt;
  for (int j = 0; j < n_cells; ++j) {
    if (st_.served[j].empty()) continue;  // silent cell
    for (int u : needed) col_of[u] = -1;
    needed.clear();
    auto need = [&](int u) {
      if (col_of[u] < 0) {
        col_of[u] = static_cast<int>(needed.size());
        needed.push_back(u);
      }
    };
    for (int u : st_.served[j]) need(u);
    for (int u = 0; u < n_users; ++u) {
      if (is_target[u]) need(u);
    }
    if (!perfect) {
      for (int m = j % 3; m < n_cells; m += 3) {
        if (m == j) continue;
        for (int u : st_.served[m]) need(u);
      }
    }
    h.resize(n_ant, static_cast<Eigen::Index>(needed.size()));

    for (int g0 = 0; g0 < n_prb; g0 += grp_size) {
      const int g = g0 / grp_size;
      for (std::size_t i = 0; i < needed.size(); ++i) {
        link_channel_into(st_.links, ctx_.geometry, cfg_.seed, st_.drop, j, needed[i], g,
                          h.col(static_cast<Eigen::Index>(i)));
      }
      std::map<std::vector<int>, ZfResult> cache;
      auto column = [&](int u) { return h.col(col_of[u]); };

      for (int p = g0; p < std::min(n_prb, g0 + grp_size); ++p) {
        const std::vector<int>& grp = groups_[j][p];
        if (grp.empty()) continue;
        h_hat.resize(n_ant, static_cast<Eigen::Index>(grp.size()));
        for (std::size_t i = 0; i < grp.size(); ++i) {
          h_hat.col(i) = estimate_column(j, p, static_cast<int>(i), column);
        }
        const ZfResult* zr = nullptr;
        ZfResult fresh;
        if (perfect) {
          auto it = cache.find(grp);
          if (it == cache.end()) it = cache.emplace(grp, zf_precoder(h_hat, ctx_.p_b_mw)).first;
          zr = &it->second;
        } else {
          fresh = zf_precoder(h_hat, ctx_.p_b_mw);
          zr = &fresh;
        }
        const Eigen::MatrixXcd& w = zr->w;
        for (int d : zr->dropped) {
          r.events.push_back({st_.drop, j, p, grp[d],
                              "rank-deficient channel estimate; user not served on this PRB"});
        }
        if (w.cols() == 0) continue;

        // Zero-forcing residuals on the kept columns.
        Eigen::MatrixXcd h_kept(n_ant, w.cols());
        for (Eigen::Index i = 0; i < w.cols(); ++i) h_kept.col(i) = h_hat.col(zr->kept[i]);
        const double col_target = ctx_.p_b_mw / static_cast<double>(w.cols());
        double total = 0.0;
        for (Eigen::Index i = 0; i < w.cols(); ++i) {
          const double pw = w.col(i).squaredNorm();
          total += pw;
          r.zf.max_power_error =
              std::max(r.zf.max_power_error, std::abs(pw - col_target) / col_target);
        }
        r.zf.max_total_power_error =
            std::max(r.zf.max_total_power_error, std::abs(total - ctx_.p_b_mw) / ctx_.p_b_mw);
        r.zf.max_offdiag_ratio = std::max(r.zf.max_offdiag_ratio, zf_offdiag_ratio(h_kept, w));
        ++r.zf.precoders;

        const std::vector<int>& tp = targets[p];
        if (tp.empty()) continue;
        h_tgt.resize(n_ant, static_cast<Eigen::Index>(tp.size()));
        for (std::size_t i = 0; i < tp.size(); ++i) h_tgt.col(i) = h.col(col_of[tp[i]]);
        const Eigen::MatrixXd a = (h_tgt.adjoint() * w).cwiseAbs2();
        for (std::size_t i = 0; i < tp.size(); ++i) {
          Slot& s = slots_[base[p] + i];
          const auto row = a.row(static_cast<Eigen::Index>(i));
          if (st_.users[tp[i]].serving_cell != j) {
            s.terms.inter += row.sum();
            continue;
          }
          int col = -1;
          for (std::size_t c = 0; c < zr->kept.size(); ++c) {
            if (grp[zr->kept[c]] == tp[i]) col = static_cast<int>(c);
          }
          if (col < 0) continue;
          s.served = true;
          s.terms.signal = row(col);
          for (Eigen::Index c = 0; c < row.size(); ++c) {
            if (c != col) s.terms.intra += row(c);
          }
        }
      }
    }
  }

  Series& sinr_s = r["sinr_db"];
  Series& rate_s = r["rate_bps"];
  Series& coupling_s = r["coupling_db"];
  std::vector<double> eff_sum(n_users, 0.0);
  for (Slot& s : slots_) {
    s.terms.noise = ctx_.ue_noise_mw;
    if (!s.served) continue;
    const UserDrop& user = st_.users[s.user];
    const double sinr_db = sinr_to_db(s.terms.sinr());
    sinr_s.add(user.kind, user.position.z, sinr_db);
    eff_sum[s.user] += ctx_.mcs.select(sinr_db);
  }
  for (int u = 0; u < n_users; ++u) {
    if (!st_.evaluated[u]) continue;
    const UserDrop& user = st_.users[u];
    rate_s.add(user.kind, user.position.z, user_rate_bps(eff_sum[u], 1, cfg_.mcs.overhead));
    coupling_s.add(user.kind, user.position.z,
                   coupling_loss_db(st_.links.at(user.serving_cell, u), CouplingMode::kFirstRfChain));
  }
  if (cfg_.metrics.record_association) record_association(r, ctx_, st_, AssocMode::kMu);
  return r;
}

MetricsReport run_mu_drop(const ScenarioConfig& cfg, const RunContext& ctx, DropState st) {
  MuDrop mu(cfg, ctx, std::move(st));
  return mu.evaluate();
}

MetricsReport simulate_drop(const ScenarioConfig& cfg, const RunContext& ctx, int drop) {
  DropState st = prepare_drop(cfg, ctx, drop);
  if (cfg.mode == Mode::kSu) return run_su_drop(cfg, ctx, st);
  return run_mu_drop(cfg, ctx, std::move(st));
}

}  // namespace uavsim
