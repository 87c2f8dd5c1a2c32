/**
 * @file deployment.cpp
 * @brief Hexagonal layout with 7-image wrap-around and user dropping.
 */
#include "uavsim/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace uavsim {

std::string to_string(UserKind kind) {
  switch (kind) {
    case UserKind::kGueOutdoor: return "gue_outdoor";
    case UserKind::kGueIndoor: return "gue_indoor";
    case UserKind::kUav: return "uav";
  }
  return "unknown";
}

std::string to_string(ScenarioCase c) {
  switch (c) {
    case ScenarioCase::kCase3: return "case3";
    case ScenarioCase::kCase4: return "case4";
    case ScenarioCase::kCase5: return "case5";
  }
  return "unknown";
}

ScenarioCase parse_case(const std::string& tag) {
  if (tag == "case3" || tag == "3") return ScenarioCase::kCase3;
  if (tag == "case4" || tag == "4") return ScenarioCase::kCase4;
  if (tag == "case5" || tag == "5") return ScenarioCase::kCase5;
  throw std::invalid_argument("unknown scenario case '" + tag + "'");
}

int uavs_per_sector(ScenarioCase c) {
  switch (c) {
    case ScenarioCase::kCase3: return 1;
    case ScenarioCase::kCase4: return 3;
    case ScenarioCase::kCase5: return 5;
  }
  throw std::invalid_argument("unknown scenario case");
}

namespace {

// Lattice basis: nearest neighbours sit at 30 + 60k degrees, so the site
// hexagon has vertices at multiples of 60 degrees and every sector bearing
// (0/120/240) points at a hexagon corner.
struct Basis {
  Vec3 a1;
  Vec3 a2;
};

Basis lattice_basis(double isd) {
  return {{isd * std::cos(deg2rad(30.0)), isd * std::sin(deg2rad(30.0)), 0.0},
          {0.0, isd, 0.0}};
}

int hex_ring(int i, int j) { return (std::abs(i) + std::abs(j) + std::abs(i + j)) / 2; }

Vec3 rotate_z(const Vec3& v, double deg) {
  const double c = std::cos(deg2rad(deg));
  const double s = std::sin(deg2rad(deg));
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace

NetworkLayout build_layout(const DeploymentConfig& cfg) {
  if (!(cfg.isd_m > 0.0)) throw std::invalid_argument("inter-site distance must be positive");
  if (!(cfg.bs_height_m > 0.0)) throw std::invalid_argument("BS height must be positive");
  if (cfg.tiers < 0 || cfg.tiers > cfg.max_tiers) {
    throw std::invalid_argument("tier count " + std::to_string(cfg.tiers) +
                                " outside [0, " + std::to_string(cfg.max_tiers) + "]");
  }

  NetworkLayout layout;
  layout.inter_site_distance = cfg.isd_m;
  layout.bs_height = cfg.bs_height_m;
  const Basis b = lattice_basis(cfg.isd_m);
  const int t = cfg.tiers;

  struct Candidate {
    int ring;
    double angle;
    Vec3 pos;
  };
  std::vector<Candidate> cands;
  for (int i = -t; i <= t; ++i) {
    for (int j = -t; j <= t; ++j) {
      const int ring = hex_ring(i, j);
      if (ring > t) continue;
      const Vec3 p = b.a1 * i + b.a2 * j;
      double ang = ring == 0 ? 0.0 : std::atan2(p.y, p.x);
      if (ang < -1e-12) ang += 2.0 * kPi;
      cands.push_back({ring, ang, p});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
    if (l.ring != r.ring) return l.ring < r.ring;
    return l.angle < r.angle;
  });

  for (std::size_t s = 0; s < cands.size(); ++s) {
    layout.sites.push_back({static_cast<int>(s), cands[s].pos.x, cands[s].pos.y});
    for (int q = 0; q < layout.sectors_per_site; ++q) {
      Cell c;
      c.id = static_cast<int>(s) * layout.sectors_per_site + q;
      c.site = static_cast<int>(s);
      c.sector = q;
      c.bearing_deg = layout.sector_bearings[q];
      c.position = {cands[s].pos.x, cands[s].pos.y, cfg.bs_height_m};
      layout.cells.push_back(c);
    }
  }

  // Cluster translation for a hexagonal cluster of radius t.
  const Vec3 shift = b.a1 * (t + 1) + b.a2 * t;
  layout.wrap_vectors[0] = {};
  for (int m = 0; m < 6; ++m) layout.wrap_vectors[m + 1] = rotate_z(shift, 60.0 * m);
  return layout;
}

WrappedDisplacement wrap_displacement(const NetworkLayout& layout, const Vec3& a,
                                      const Vec3& b) {
  WrappedDisplacement best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 7; ++m) {
    const Vec3 v = b + layout.wrap_vectors[m] - a;
    const double d2 = v.norm2d();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.vector = v;
      best.image = m;
    }
  }
  best.d2 = best_d2;
  best.d3 = best.vector.norm();
  return best;
}

namespace {

std::pair<int, int> nearest_site_image(const NetworkLayout& layout, const Vec3& p) {
  int best_site = 0;
  int best_img = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 7; ++m) {
    const Vec3 q = p + layout.wrap_vectors[m];
    for (const Site& s : layout.sites) {
      const double d = std::hypot(q.x - s.x, q.y - s.y);
      if (d < best - 1e-9) {
        best = d;
        best_site = s.id;
        best_img = m;
      }
    }
  }
  return {best_site, best_img};
}

}  // namespace

Vec3 wrap_position(const NetworkLayout& layout, const Vec3& p) {
  return p + layout.wrap_vectors[nearest_site_image(layout, p).second];
}

int containing_site(const NetworkLayout& layout, const Vec3& p) {
  return nearest_site_image(layout, p).first;
}

std::vector<UserDrop> drop_users(const NetworkLayout& layout, const DeploymentConfig& cfg,
                                 CounterRng& rng) {
  const int n_uav = uavs_per_sector(cfg.scenario_case);
  if (cfg.users_per_sector < n_uav) {
    throw std::invalid_argument("users_per_sector smaller than the case's UAV count");
  }
  const double r_hex = layout.inter_site_distance / std::sqrt(3.0);
  if (cfg.min_distance_m >= r_hex) {
    throw std::invalid_argument("min_distance_m leaves no area to drop users in");
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uav_h(cfg.uav_min_height_m, cfg.uav_max_height_m);
  std::uniform_int_distribution<int> floors(cfg.building_floors_min, cfg.building_floors_max);
  std::bernoulli_distribution indoor(cfg.indoor_fraction);

  std::vector<UserDrop> users;
  users.reserve(layout.num_cells() * static_cast<std::size_t>(cfg.users_per_sector));
  int next_id = 0;
  for (const Cell& cell : layout.cells) {
    const double beta = cell.bearing_deg;
    const Vec3 e1{r_hex * std::cos(deg2rad(beta - 60.0)), r_hex * std::sin(deg2rad(beta - 60.0)), 0.0};
    const Vec3 e2{r_hex * std::cos(deg2rad(beta + 60.0)), r_hex * std::sin(deg2rad(beta + 60.0)), 0.0};
    const Vec3 origin{cell.position.x, cell.position.y, 0.0};

    auto draw_xy = [&]() {
      for (;;) {
        const Vec3 off = e1 * unit(rng) + e2 * unit(rng);
        if (off.norm2d() >= cfg.min_distance_m) return origin + off;
      }
    };

    for (int u = 0; u < cfg.users_per_sector; ++u) {
      UserDrop d;
      d.user_id = next_id++;
      d.home_cell = cell.id;
      d.position = draw_xy();
      if (u < n_uav) {
        d.kind = UserKind::kUav;
        d.position.z = cfg.uav_fixed_height_m ? *cfg.uav_fixed_height_m : uav_h(rng);
      } else if (indoor(rng)) {
        d.kind = UserKind::kGueIndoor;
        const int n_floors = floors(rng);
        d.floor = std::uniform_int_distribution<int>(1, n_floors)(rng);
        d.position.z = 3.0 * (d.floor - 1) + 1.5;
      } else {
        d.kind = UserKind::kGueOutdoor;
        d.position.z = 1.5;
      }
      users.push_back(d);
    }
  }
  return users;
}

}  // namespace uavsim
