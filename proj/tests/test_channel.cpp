#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "uavsim/channel.hpp"
#include "uavsim/units.hpp"

using namespace uavsim;

namespace {

ChannelProfile free_space_profile() {
  HeightClass hc;
  hc.max_height_m = 300.0;
  hc.los = {20.0, 0.0, 32.45, 0.0, 20.0, std::nullopt};
  hc.nlos = hc.los;
  ChannelProfile p;
  p.classes = {hc};
  return p;
}

LargeScaleState link(bool los, double pl, double az = 10.0, double el = -5.0) {
  LargeScaleState s;
  s.los = los;
  s.path_loss_db = pl;
  s.azimuth_deg = az;
  s.elevation_deg = el;
  s.element_gain_dbi = 8.0;
  return s;
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// |<x, y>| / (|x| |y|) over one polarization port.
double port_collinearity(const Eigen::VectorXcd& h, const Eigen::VectorXcd& a, int port) {
  std::complex<double> dot = 0.0;
  double nh = 0.0, na = 0.0;
  for (Eigen::Index i = port; i < h.size(); i += 2) {
    dot += std::conj(a(i)) * h(i);
    nh += std::norm(h(i));
    na += std::norm(a(i));
  }
  return std::abs(dot) / std::sqrt(nh * na);
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("free-space path loss") {
    const ChannelProfile fs = free_space_profile();
    CHECK(path_loss_db(fs, 1000.0, 1.5, true, 2.0) == doctest::Approx(98.47059991327963).epsilon(1e-12));
    CHECK(path_loss_db(fs, 2000.0, 1.5, true, 2.0) - path_loss_db(fs, 1000.0, 1.5, true, 2.0) ==
          doctest::Approx(20.0 * std::log10(2.0)));
  }

  TEST_CASE("default profile: NLoS clamp and free-space floor") {
    const ChannelProfile p = ChannelProfile::uma_av();
    for (double h : {1.5, 10.0, 22.5, 30.0, 75.0, 150.0, 300.0}) {
      for (double d2 = 10.0; d2 < 3000.0; d2 *= 1.37) {
        const double d3 = std::hypot(d2, 25.0 - h);
        const double los = path_loss_db(p, d3, h, true, 2.0);
        const double nlos = path_loss_db(p, d3, h, false, 2.0);
        CHECK(nlos >= los);
        const double fspl = 20.0 * std::log10(d3) + 32.45 + 20.0 * std::log10(2.0);
        // The UMa LoS fit sits up to about 2.4 dB under free space at short range.
        CHECK(los >= fspl - 2.5);
      }
    }
  }

  TEST_CASE("ground LoS breakpoint") {
    const ChannelProfile p = ChannelProfile::uma_av();
    const Breakpoint& bp = *p.classes[0].los.breakpoint;
    const double d_bp = breakpoint_distance_m(bp, 25.0, 1.5, 2.0);
    CHECK(d_bp == doctest::Approx(4.0 * 24.0 * 0.5 * 2e9 / 299792458.0));
    const double below = path_loss_db(p, std::hypot(d_bp - 1e-6, 23.5), 1.5, true, 2.0);
    const double above = path_loss_db(p, std::hypot(d_bp + 1e-6, 23.5), 1.5, true, 2.0);
    CHECK(std::abs(above - below) < 0.5);
    // Beyond the breakpoint the slope is 40 dB/decade.
    const double far1 = path_loss_db(p, 1000.0, 1.5, true, 2.0);
    const double far2 = path_loss_db(p, 2000.0, 1.5, true, 2.0);
    CHECK(far2 - far1 == doctest::Approx(40.0 * std::log10(2.0)));
    // The aerial class keeps a single slope.
    CHECK_FALSE(p.classes[1].los.breakpoint.has_value());
  }

  TEST_CASE("LoS probability") {
    const ChannelProfile p = ChannelProfile::uma_av();
    CHECK(los_probability(p, 0.0, 1.5) == 1.0);
    CHECK(los_probability(p, 0.0, 50.0) == 1.0);
    for (double d2 : {10.0, 300.0, 2000.0}) CHECK(los_probability(p, d2, 150.0) == 1.0);
    // 18/500 + exp(-500/63) (1 - 18/500), evaluated independently.
    CHECK(los_probability(p, 500.0, 1.5) == doctest::Approx(0.036344584256616304).epsilon(1e-12));
    for (double d2 = 5.0; d2 < 5000.0; d2 *= 1.5) {
      double prev = 0.0;
      for (double h = 1.5; h <= 300.0; h += 0.5) {
        const double v = los_probability(p, d2, h);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("shadow field statistics") {
    // Co-located users see identical values.
    CounterRng r0 = CounterRng::stream(1, Stream::kTest);
    const Eigen::MatrixXd same =
        sample_shadow_field(2, {{10.0, 20.0, 1.5}, {10.0, 20.0, 1.5}}, 50.0, 8.0, 64, r0);
    CHECK(same(0, 0) == same(0, 1));
    CHECK(same(1, 0) == same(1, 1));

    std::vector<double> a, near, far;
    for (int i = 0; i < 10000; ++i) {
      CounterRng rng = CounterRng::stream(2, Stream::kTest, {std::uint64_t(i)});
      const ShadowField f(1, 50.0, 64, rng);
      a.push_back(f.value(0, 0.0, 0.0));
      near.push_back(f.value(0, 50.0, 0.0));
      far.push_back(f.value(0, 0.0, 2000.0));
    }
    double var = 0.0;
    for (double v : a) var += v * v;
    CHECK(var / a.size() == doctest::Approx(1.0).epsilon(0.05));
    CHECK(corr(a, near) == doctest::Approx(std::exp(-1.0)).epsilon(0.08));
    CHECK(std::abs(corr(a, far)) < 0.1);
  }

  TEST_CASE("penetration loss range") {
    const O2iParams o2i;
    CounterRng rng = CounterRng::stream(3, Stream::kTest);
    for (int i = 0; i < 1000; ++i) {
      const double v = sample_o2i_loss_db(o2i, rng);
      CHECK(v >= 20.0);
      CHECK(v <= 32.5);
    }
  }

  TEST_CASE("Rician limit is collinear with the steering vector") {
    const ArrayGeometry g = ArrayGeometry::multi_user();
    const LargeScaleState s = link(true, 90.0, 17.0, 4.0);
    const Eigen::VectorXcd a = steering_vector(g, s.azimuth_deg, s.elevation_deg);
    CounterRng rng = CounterRng::stream(4, Stream::kTest);
    for (int i = 0; i < 20; ++i) {
      const ChannelRealization r = synth_channel(g, s, 60.0, rng);
      CHECK(port_collinearity(r.h, a, 0) > 0.9999);
      CHECK(port_collinearity(r.h, a, 1) > 0.9999);
      const ChannelRealization r20 = synth_channel(g, s, 20.0, rng);
      CHECK(port_collinearity(r20.h, a, 0) >= 0.97);
      CHECK(port_collinearity(r20.h, a, 1) >= 0.97);
    }
  }

  TEST_CASE("Rayleigh moments and energy accounting") {
    const ArrayGeometry g = ArrayGeometry::multi_user();
    for (bool los : {false, true}) {
      const LargeScaleState s = link(los, 100.0);
      const double expected = db2lin(s.element_gain_dbi - s.attenuation_db());
      Eigen::VectorXd per_ant = Eigen::VectorXd::Zero(g.n_antennas());
      double total = 0.0;
      CounterRng rng = CounterRng::stream(5, Stream::kTest, {std::uint64_t(los)});
      const int n = 10000;
      for (int i = 0; i < n; ++i) {
        const ChannelRealization r = synth_channel(g, s, 15.0, rng);
        per_ant += r.h.cwiseAbs2();
        total += r.h.squaredNorm() / g.n_antennas();
      }
      CHECK(total / n == doctest::Approx(expected).epsilon(0.03));
      if (!los) {
        per_ant /= n;
        CHECK(per_ant.maxCoeff() / per_ant.minCoeff() < 1.05 * 1.05);
        for (Eigen::Index i = 0; i < per_ant.size(); ++i) {
          CHECK(per_ant(i) == doctest::Approx(expected).epsilon(0.05));
        }
      }
    }
  }

  TEST_CASE("zero amplitude gives a zero channel") {
    CounterRng rng = CounterRng::stream(6, Stream::kTest);
    const ChannelRealization r = synth_channel(ArrayGeometry::multi_user(), link(false, 1e4), 15.0, rng);
    CHECK(r.h.squaredNorm() == 0.0);
  }

  TEST_CASE("coupling loss") {
    LargeScaleState s = link(true, 100.0);
    CHECK(coupling_loss_db(s, CouplingMode::kFirstRfChain) == doctest::Approx(-92.0));
    CHECK_THROWS_AS(coupling_loss_db(s, CouplingMode::kSuCombined), std::invalid_argument);
    const LargeScaleState su = make_large_scale({200.0, 30.0, -23.5}, 0.0, ArrayGeometry::single_user(),
                                                ElementPattern{}, true, 100.0, 0.0, 0.0);
    CHECK(coupling_loss_db(su, CouplingMode::kSuCombined) -
              coupling_loss_db(su, CouplingMode::kFirstRfChain) ==
          doctest::Approx(*su.su_gain_dbi - su.element_gain_dbi));
  }

  TEST_CASE("link table: O2I only indoors, LoS shared by co-sited sectors, determinism") {
    DeploymentConfig dc;
    dc.tiers = 1;
    const NetworkLayout layout = build_layout(dc);
    CounterRng urng = CounterRng::stream(7, Stream::kUsers);
    const std::vector<UserDrop> users = drop_users(layout, dc, urng);
    const ChannelProfile profile = ChannelProfile::uma_av();
    const ChannelConfig ch;
    LinkTableInputs in;
    in.layout = &layout;
    in.profile = &profile;
    in.channel = &ch;
    in.geometry = ArrayGeometry::multi_user();
    in.seed = 7;
    in.drop = 3;
    const LinkTable t = build_link_table(in, users);
    const LinkTable t2 = build_link_table(in, users);
    for (int u = 0; u < t.n_users; ++u) {
      for (int c = 0; c < t.n_cells; ++c) {
        const LargeScaleState& s = t.at(c, u);
        if (users[u].kind == UserKind::kGueIndoor) {
          CHECK(s.o2i_db > 0.0);
        } else {
          CHECK(s.o2i_db == 0.0);
        }
        CHECK(s.los == t.at(3 * (c / 3), u).los);
        CHECK(s.shadow_db == t.at(3 * (c / 3), u).shadow_db);
        CHECK(s.path_loss_db == t2.at(c, u).path_loss_db);
        CHECK(s.shadow_db == t2.at(c, u).shadow_db);
      }
    }
    Eigen::VectorXcd h1(128), h2(128), h3(128);
    link_channel_into(t, in.geometry, 7, 3, 4, 11, 2, h1);
    link_channel_into(t, in.geometry, 7, 3, 4, 11, 2, h2);
    link_channel_into(t, in.geometry, 7, 3, 4, 11, 3, h3);
    CHECK((h1 - h2).norm() == 0.0);
    CHECK((h1 - h3).norm() > 0.0);
  }

  TEST_CASE("profile JSON") {
    const ChannelProfile p = ChannelProfile::uma_av();
    const nlohmann::json j = p.to_json();
    CHECK(ChannelProfile::from_json(j).to_json() == j);
    const ChannelProfile shipped = ChannelProfile::load(UAVSIM_CONFIG_DIR "/uma_av_profile.json");
    CHECK(shipped.classes.size() == p.classes.size());
    CHECK(path_loss_db(shipped, 800.0, 1.5, true, 2.0) == doctest::Approx(path_loss_db(p, 800.0, 1.5, true, 2.0)));
    nlohmann::json bad = j;
    bad["classes"][0]["extra"] = 1;
    CHECK_THROWS_AS(ChannelProfile::from_json(bad), std::invalid_argument);
    nlohmann::json unordered = j;
    std::swap(unordered["classes"][0], unordered["classes"][1]);
    CHECK_THROWS_AS(ChannelProfile::from_json(unordered), std::invalid_argument);

    ChannelConfig ch;
    ch.rician_k_db = 12.0;
    const ChannelProfile r = resolve_profile(ch);
    CHECK(r.classes[0].rician_k_db == 9.0);
    CHECK(r.classes[1].rician_k_db == 12.0);
  }
}
