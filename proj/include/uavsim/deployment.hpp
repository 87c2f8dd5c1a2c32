/**
 * @file deployment.hpp
 * @brief Wrapped-around hexagonal site layout and per-case user drops.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

enum class UserKind { kGueOutdoor, kGueIndoor, kUav };

/// UAV density scenarios: 1, 3 or 5 UAVs out of every 15 users per sector.
enum class ScenarioCase { kCase3, kCase4, kCase5 };

std::string to_string(UserKind kind);
std::string to_string(ScenarioCase c);
ScenarioCase parse_case(const std::string& tag);
int uavs_per_sector(ScenarioCase c);
inline bool is_gue(UserKind k) { return k != UserKind::kUav; }

struct DeploymentConfig {
  int tiers = 3;
  double isd_m = 500.0;
  double bs_height_m = 25.0;
  int users_per_sector = 15;
  ScenarioCase scenario_case = ScenarioCase::kCase3;
  std::optional<double> uav_fixed_height_m;
  double uav_min_height_m = 1.5;
  double uav_max_height_m = 300.0;
  double min_distance_m = 35.0;
  double indoor_fraction = 0.8;
  int building_floors_min = 4;
  int building_floors_max = 8;
  int max_tiers = 6;
};

struct Site {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Cell {
  int id = 0;      ///< 3 * site + sector
  int site = 0;
  int sector = 0;
  double bearing_deg = 0.0;
  Vec3 position;   ///< BS position, shared by the three sectors of a site
};

struct NetworkLayout {
  std::vector<Site> sites;
  std::vector<Cell> cells;
  int sectors_per_site = 3;
  double inter_site_distance = 500.0;
  double bs_height = 25.0;
  std::array<double, 3> sector_bearings{0.0, 120.0, 240.0};
  /// Index 0 is the zero vector; 1..6 translate to the neighbouring clusters.
  std::array<Vec3, 7> wrap_vectors{};

  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_sites() const { return sites.size(); }
};

/// Builds the layout; throws std::invalid_argument on bad distances or tiers.
NetworkLayout build_layout(const DeploymentConfig& cfg);

struct WrappedDisplacement {
  Vec3 vector;   ///< b' - a for the closest image b' of b
  double d3 = 0.0;
  double d2 = 0.0;
  int image = 0;
};

/// Shortest displacement from a to the 7 wrap images of b (2D metric).
WrappedDisplacement wrap_displacement(const NetworkLayout& layout, const Vec3& a,
                                      const Vec3& b);

/// Maps a horizontal position onto its representative inside the wrapped region.
Vec3 wrap_position(const NetworkLayout& layout, const Vec3& p);

/// Index of the site whose hexagon contains p (nearest site over all images).
int containing_site(const NetworkLayout& layout, const Vec3& p);

struct UserDrop {
  int user_id = 0;
  UserKind kind = UserKind::kGueOutdoor;
  Vec3 position;
  int floor = 0;          ///< 1-based floor for indoor users, 0 otherwise
  int home_cell = -1;     ///< sector the user was dropped in
  int serving_cell = -1;  ///< set by association
};

/// Fixed per-sector population for the configured case, positions uniform in
/// each sector's rhombus with the configured minimum BS distance.
std::vector<UserDrop> drop_users(const NetworkLayout& layout, const DeploymentConfig& cfg,
                                 CounterRng& rng);

}  // namespace uavsim
