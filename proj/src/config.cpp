/**
 * @file config.cpp
 */
#include "uavsim/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "uavsim/units.hpp"

namespace uavsim {

using nlohmann::json;

std::string to_string(Mode m) { return m == Mode::kSu ? "su" : "mu"; }

Mode parse_mode(const std::string& s) {
  if (s == "su") return Mode::kSu;
  if (s == "mu") return Mode::kMu;
  throw std::invalid_argument("unknown mode '" + s + "' (expected su or mu)");
}

double PowerConfig::per_prb_dbm() const { return bs_total_dbm - lin2db(n_prb); }
double PowerConfig::ue_noise_dbm() const {
  return prb_noise_dbm(ue_noise_figure_db, noise_psd_dbm_hz, kPrbBandwidthHz);
}
double PowerConfig::bs_noise_dbm() const {
  return prb_noise_dbm(bs_noise_figure_db, noise_psd_dbm_hz, kPrbBandwidthHz);
}

bool MetricsConfig::evaluates(UserGroup g) const {
  for (UserGroup e : evaluate) {
    if (e == g) return true;
  }
  return false;
}

OutputOptions MetricsConfig::output_options() const {
  OutputOptions o;
  o.height_grid = height_grid_m;
  o.target_rate_bps = target_rate_bps;
  o.min_bin_samples = static_cast<std::size_t>(min_bin_samples);
  return o;
}

namespace {

// Reads optional keys from one JSON object and rejects anything unread.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(path_ + "." + key + ": " + e.what());
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    get(key, v);
    out = v;
  }

  Section sub(const char* key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : kEmpty, path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw std::invalid_argument(path_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid config: " + what);
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || base_dir.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return std::filesystem::absolute(std::filesystem::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

// "threads" is an execution setting and is left out of the echo so that
// serial and parallel runs write identical reports.
ScenarioConfig ScenarioConfig::from_json(const json& j, const std::string& base_dir) {
  ScenarioConfig c;
  Section root(j, "config");
  std::string mode = to_string(c.mode);
  root.get("mode", mode);
  c.mode = parse_mode(mode);
  root.get("drops", c.drops);
  root.get("seed", c.seed);
  root.get("threads", c.threads);

  {
    Section s = root.sub("power");
    s.get("bs_total_dbm", c.power.bs_total_dbm);
    s.get("n_prb", c.power.n_prb);
    s.get("bandwidth_mhz", c.power.bandwidth_mhz);
    s.get("carrier_ghz", c.power.carrier_ghz);
    s.get("noise_psd_dbm_hz", c.power.noise_psd_dbm_hz);
    s.get("ue_noise_figure_db", c.power.ue_noise_figure_db);
    s.get("bs_noise_figure_db", c.power.bs_noise_figure_db);
    s.finish();
  }
  {
    Section s = root.sub("deployment");
    DeploymentConfig& d = c.deployment;
    s.get("tiers", d.tiers);
    s.get("isd_m", d.isd_m);
    s.get("bs_height_m", d.bs_height_m);
    s.get("users_per_sector", d.users_per_sector);
    std::string cs = to_string(d.scenario_case);
    s.get("case", cs);
    d.scenario_case = parse_case(cs);
    s.get_optional("uav_fixed_height_m", d.uav_fixed_height_m);
    s.get("uav_min_height_m", d.uav_min_height_m);
    s.get("uav_max_height_m", d.uav_max_height_m);
    s.get("min_distance_m", d.min_distance_m);
    s.get("indoor_fraction", d.indoor_fraction);
    s.get("building_floors_min", d.building_floors_min);
    s.get("building_floors_max", d.building_floors_max);
    s.finish();
  }
  {
    Section s = root.sub("antenna");
    AntennaConfig& a = c.antenna;
    double hpbw = a.element.hpbw_h_deg;
    s.get("hpbw_deg", hpbw);
    a.element.hpbw_h_deg = a.element.hpbw_v_deg = hpbw;
    s.get("max_gain_dbi", a.element.max_gain_dbi);
    s.get("side_lobe_floor_db", a.element.side_floor_db);
    s.get("front_back_floor_db", a.element.back_floor_db);
    s.get("spacing_wl", a.spacing_wl);
    s.get("downtilt_deg", a.downtilt_deg);
    s.get("ports_per_element", a.ports_per_element);
    {
      Section su = s.sub("su");
      su.get("rows", a.su_rows);
      su.get("cols", a.su_cols);
      su.finish();
    }
    {
      Section mu = s.sub("mu");
      mu.get("rows", a.mu_rows);
      mu.get("cols", a.mu_cols);
      mu.finish();
    }
    s.finish();
  }
  {
    Section s = root.sub("channel");
    ChannelConfig& ch = c.channel;
    s.get("profile_file", ch.profile_file);
    ch.profile_file = resolve_path(ch.profile_file, base_dir);
    s.get("shadow_corr_m", ch.shadow_corr_m);
    s.get("shadow_enabled", ch.shadow_enabled);
    s.get("shadow_sinusoids", ch.shadow_sinusoids);
    {
      Section o = s.sub("o2i");
      o.get("mean_db", ch.o2i.mean_db);
      o.get("per_m_db", ch.o2i.per_m_db);
      o.get("max_indoor_m", ch.o2i.max_indoor_m);
      o.finish();
    }
    s.get_optional("rician_k_db", ch.rician_k_db);
    s.get("prb_group", ch.prb_group);
    s.finish();
  }
  {
    Section s = root.sub("mu");
    s.get("m_p", c.mu.m_p);
    s.get("k_max", c.mu.k_max);
    std::string csi = to_string(c.mu.csi_mode);
    s.get("csi_mode", csi);
    c.mu.csi_mode = parse_csi_mode(csi);
    Section pc = s.sub("pc");
    pc.get("p0_dbm", c.mu.pc.p0_dbm);
    pc.get("alpha", c.mu.pc.alpha);
    pc.get("pmax_dbm", c.mu.pc.pmax_dbm);
    pc.finish();
    s.finish();
  }
  {
    Section s = root.sub("mcs");
    s.get("table_file", c.mcs.table_file);
    c.mcs.table_file = resolve_path(c.mcs.table_file, base_dir);
    s.get("overhead", c.mcs.overhead);
    s.finish();
  }
  {
    Section s = root.sub("metrics");
    MetricsConfig& m = c.metrics;
    s.get("height_grid_m", m.height_grid_m);
    s.get("target_rate_bps", m.target_rate_bps);
    s.get("min_bin_samples", m.min_bin_samples);
    std::vector<std::string> eval;
    for (UserGroup g : m.evaluate) eval.push_back(to_string(g));
    s.get("evaluate", eval);
    m.evaluate.clear();
    for (const std::string& e : eval) {
      const UserGroup g = parse_group(e);
      if (!m.evaluates(g)) m.evaluate.push_back(g);
    }
    s.get("record_association", m.record_association);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

void ScenarioConfig::validate() const {
  require(drops >= 0, "drops must be >= 0");
  require(threads >= 0, "threads must be >= 0");
  require(power.n_prb >= 1, "power.n_prb must be >= 1");
  require(power.n_prb * kPrbBandwidthHz <= power.bandwidth_mhz * 1e6 + 1e-6,
          "power.n_prb PRBs do not fit in power.bandwidth_mhz");
  require(power.carrier_ghz > 0.0, "power.carrier_ghz must be positive");
  const DeploymentConfig& d = deployment;
  require(d.tiers >= 0 && d.tiers <= d.max_tiers, "deployment.tiers out of range");
  require(d.isd_m > 0.0, "deployment.isd_m must be positive");
  require(d.bs_height_m > 0.0, "deployment.bs_height_m must be positive");
  require(d.users_per_sector >= uavs_per_sector(d.scenario_case),
          "deployment.users_per_sector smaller than the case's UAV count");
  require(d.uav_min_height_m > 0.0 && d.uav_min_height_m <= d.uav_max_height_m,
          "deployment UAV height range invalid");
  require(!d.uav_fixed_height_m || (*d.uav_fixed_height_m > 0.0 && *d.uav_fixed_height_m <= 300.0),
          "deployment.uav_fixed_height_m must lie in (0, 300]");
  require(d.min_distance_m >= 0.0 && d.min_distance_m < d.isd_m / 2.0,
          "deployment.min_distance_m out of range");
  require(d.indoor_fraction >= 0.0 && d.indoor_fraction <= 1.0,
          "deployment.indoor_fraction must lie in [0, 1]");
  require(d.building_floors_min >= 1 && d.building_floors_min <= d.building_floors_max,
          "deployment building floor range invalid");
  const AntennaConfig& a = antenna;
  require(a.element.hpbw_h_deg > 0.0, "antenna.hpbw_deg must be positive");
  require(a.element.side_floor_db >= 0.0 && a.element.back_floor_db >= 0.0,
          "antenna floors must be >= 0");
  require(a.spacing_wl > 0.0, "antenna.spacing_wl must be positive");
  require(a.ports_per_element >= 1 && a.ports_per_element <= 2,
          "antenna.ports_per_element must be 1 or 2");
  require(a.su_rows >= 1 && a.su_cols == 1, "antenna.su must be a single column");
  require(a.mu_rows >= 1 && a.mu_cols >= 1, "antenna.mu dimensions must be >= 1");
  require(channel.shadow_corr_m > 0.0, "channel.shadow_corr_m must be positive");
  require(channel.shadow_sinusoids >= 1, "channel.shadow_sinusoids must be >= 1");
  require(channel.prb_group >= 1, "channel.prb_group must be >= 1");
  require(channel.o2i.max_indoor_m >= 0.0, "channel.o2i.max_indoor_m must be >= 0");
  require(mu.k_max >= 1, "mu.k_max must be >= 1");
  require(mu.m_p >= 3 * mu.k_max, "mu.m_p must be at least 3 * mu.k_max");
  require(mu.k_max <= a.mu_rows * a.mu_cols * a.ports_per_element,
          "mu.k_max exceeds the number of BS antennas");
  require(mu.pc.alpha >= 0.0 && mu.pc.alpha <= 1.0, "mu.pc.alpha must lie in [0, 1]");
  require(mcs.overhead > 0.0 && mcs.overhead <= 1.0, "mcs.overhead must lie in (0, 1]");
  require(!metrics.height_grid_m.empty(), "metrics.height_grid_m must not be empty");
  for (std::size_t i = 1; i < metrics.height_grid_m.size(); ++i) {
    require(metrics.height_grid_m[i] > metrics.height_grid_m[i - 1],
            "metrics.height_grid_m must be ascending");
  }
  require(metrics.target_rate_bps >= 0.0, "metrics.target_rate_bps must be >= 0");
  require(metrics.min_bin_samples >= 1, "metrics.min_bin_samples must be >= 1");
}

json ScenarioConfig::to_json() const {
  const DeploymentConfig& d = deployment;
  std::vector<std::string> eval;
  for (UserGroup g : metrics.evaluate) eval.push_back(to_string(g));
  json j;
  j["mode"] = to_string(mode);
  j["drops"] = drops;
  j["seed"] = seed;
  j["power"] = {{"bs_total_dbm", power.bs_total_dbm},
                {"n_prb", power.n_prb},
                {"bandwidth_mhz", power.bandwidth_mhz},
                {"carrier_ghz", power.carrier_ghz},
                {"noise_psd_dbm_hz", power.noise_psd_dbm_hz},
                {"ue_noise_figure_db", power.ue_noise_figure_db},
                {"bs_noise_figure_db", power.bs_noise_figure_db}};
  j["deployment"] = {{"tiers", d.tiers},
                     {"isd_m", d.isd_m},
                     {"bs_height_m", d.bs_height_m},
                     {"users_per_sector", d.users_per_sector},
                     {"case", to_string(d.scenario_case)},
                     {"uav_fixed_height_m",
                      d.uav_fixed_height_m ? json(*d.uav_fixed_height_m) : json(nullptr)},
                     {"uav_min_height_m", d.uav_min_height_m},
                     {"uav_max_height_m", d.uav_max_height_m},
                     {"min_distance_m", d.min_distance_m},
                     {"indoor_fraction", d.indoor_fraction},
                     {"building_floors_min", d.building_floors_min},
                     {"building_floors_max", d.building_floors_max}};
  j["antenna"] = {{"hpbw_deg", antenna.element.hpbw_h_deg},
                  {"max_gain_dbi", antenna.element.max_gain_dbi},
                  {"side_lobe_floor_db", antenna.element.side_floor_db},
                  {"front_back_floor_db", antenna.element.back_floor_db},
                  {"spacing_wl", antenna.spacing_wl},
                  {"downtilt_deg", antenna.downtilt_deg},
                  {"ports_per_element", antenna.ports_per_element},
                  {"su", {{"rows", antenna.su_rows}, {"cols", antenna.su_cols}}},
                  {"mu", {{"rows", antenna.mu_rows}, {"cols", antenna.mu_cols}}}};
  j["channel"] = {{"profile_file", channel.profile_file},
                  {"shadow_corr_m", channel.shadow_corr_m},
                  {"shadow_enabled", channel.shadow_enabled},
                  {"shadow_sinusoids", channel.shadow_sinusoids},
                  {"o2i",
                   {{"mean_db", channel.o2i.mean_db},
                    {"per_m_db", channel.o2i.per_m_db},
                    {"max_indoor_m", channel.o2i.max_indoor_m}}},
                  {"rician_k_db", channel.rician_k_db ? json(*channel.rician_k_db) : json(nullptr)},
                  {"prb_group", channel.prb_group}};
  j["mu"] = {{"m_p", mu.m_p},
             {"k_max", mu.k_max},
             {"csi_mode", to_string(mu.csi_mode)},
             {"pc",
              {{"p0_dbm", mu.pc.p0_dbm}, {"alpha", mu.pc.alpha}, {"pmax_dbm", mu.pc.pmax_dbm}}}};
  j["mcs"] = {{"table_file", mcs.table_file}, {"overhead", mcs.overhead}};
  j["metrics"] = {{"height_grid_m", metrics.height_grid_m},
                  {"target_rate_bps", metrics.target_rate_bps},
                  {"min_bin_samples", metrics.min_bin_samples},
                  {"evaluate", eval},
                  {"record_association", metrics.record_association}};
  return j;
}

}  // namespace uavsim
