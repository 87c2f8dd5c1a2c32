#include <cmath>
#include <complex>
#include <map>

#include "doctest.h"
#include "uavsim/config.hpp"
#include "uavsim/oracle.hpp"
#include "uavsim/phy_su.hpp"
#include "uavsim/units.hpp"

using namespace uavsim;

namespace {

std::vector<int> ids(int n, int first = 0) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = first + i;
  return v;
}

Eigen::MatrixXcd random_channels(int n_ant, int n_cells, CounterRng& rng) {
  Eigen::MatrixXcd h(n_ant, n_cells);
  for (int c = 0; c < n_cells; ++c) {
    for (int i = 0; i < n_ant; ++i) h(i, c) = rng.complex_normal() * (c == 0 ? 1.0 : 0.4);
  }
  return h;
}

}  // namespace

TEST_SUITE("phy_su") {
  TEST_CASE("round-robin schedule") {
    const auto one = schedule_su(0, {7}, 50, 3);
    REQUIRE(one.size() == 50);
    for (const SuScheduleSlot& s : one) CHECK(s.user == 7);
    CHECK(schedule_su(0, {}, 50, 0).empty());

    const auto rr = schedule_su(2, ids(15), 50, 0);
    std::vector<int> held;
    for (const SuScheduleSlot& s : rr) {
      CHECK(s.cell == 2);
      if (s.user == 0) held.push_back(s.prb);
    }
    CHECK(held == std::vector<int>{0, 15, 30, 45});
    for (int k : {1, 4, 7, 15, 16, 49, 50, 51}) {
      for (int off : {0, 5, 123}) {
        std::map<int, int> count;
        for (const SuScheduleSlot& s : schedule_su(0, ids(k), 50, off)) ++count[s.user];
        for (int u = 0; u < k; ++u) {
          CHECK(count[u] >= 50 / k);
          CHECK(count[u] <= 50 / k + 1);
        }
      }
    }
  }

  TEST_CASE("rotation offset cycles users across drops") {
    std::map<int, int> total;
    for (int drop = 0; drop < 15; ++drop) {
      for (const SuScheduleSlot& s : schedule_su(0, ids(15), 50, drop)) ++total[s.user];
    }
    for (int u = 0; u < 15; ++u) CHECK(total[u] == 50);
  }

  TEST_CASE("schedule rejects double booking") {
    SuSchedule s(2, 4);
    s.add(schedule_su(0, {1, 2}, 4, 0));
    CHECK(s.user_at(0, 1) == 2);
    CHECK_FALSE(s.active(1, 0));
    CHECK_THROWS_AS(s.add({{0, 1, 5}}), std::logic_error);
  }

  TEST_CASE("noise per PRB") {
    PowerConfig p;
    CHECK(p.ue_noise_dbm() == doctest::Approx(-112.44727494896694).epsilon(1e-12));
    CHECK(prb_noise_dbm(9.0) == doctest::Approx(-112.44727494896694).epsilon(1e-12));
    CHECK(p.per_prb_dbm() == doctest::Approx(46.0 - 10.0 * std::log10(50.0)));
  }

  TEST_CASE("noise-limited SINR and scale invariance") {
    CounterRng rng = CounterRng::stream(21, Stream::kTest);
    const Eigen::MatrixXcd h = random_channels(16, 3, rng);
    SuSchedule s(3, 1);
    s.add(schedule_su(0, {0}, 1, 0));
    const Eigen::VectorXcd w = su_combiner(16);
    CHECK(w.norm() == doctest::Approx(1.0));
    const double expected = 0.8 * std::norm(h.col(0).dot(w)) / 1e-3;
    CHECK(sinr_su(s, 0, 0, 0, h, 0.8, 1e-3) == doctest::Approx(expected).epsilon(1e-12));

    s.add(schedule_su(1, {1}, 1, 0));
    s.add(schedule_su(2, {2}, 1, 0));
    const double g = sinr_su(s, 0, 0, 0, h, 0.8, 1e-3);
    CHECK(sinr_su(s, 0, 0, 0, h, 0.8 * 37.0, 1e-3 * 37.0) == doctest::Approx(g).epsilon(1e-12));
    CHECK_THROWS_AS(sinr_su(s, 1, 0, 0, h, 0.8, 1e-3), std::invalid_argument);
  }

  TEST_CASE("stronger interference lowers the SINR") {
    CounterRng rng = CounterRng::stream(22, Stream::kTest);
    Eigen::MatrixXcd h = random_channels(16, 3, rng);
    SuSchedule s(3, 1);
    for (int c = 0; c < 3; ++c) s.add(schedule_su(c, {c}, 1, 0));
    double prev = sinr_su(s, 0, 0, 0, h, 1.0, 1e-2);
    for (int step = 0; step < 5; ++step) {
      h.col(2) *= 1.3;
      const double now = sinr_su(s, 0, 0, 0, h, 1.0, 1e-2);
      CHECK(now <= prev);
      prev = now;
    }
  }

  TEST_CASE("silent cells do not interfere") {
    CounterRng rng = CounterRng::stream(23, Stream::kTest);
    const Eigen::MatrixXcd h = random_channels(16, 3, rng);
    SuSchedule s(3, 1);
    s.add(schedule_su(0, {0}, 1, 0));
    s.add(schedule_su(2, {2}, 1, 0));
    const Eigen::VectorXd rx = su_received_power(h, 1.0);
    CHECK(sinr_su(s, 0, 0, 0, h, 1.0, 1e-2) == doctest::Approx(rx(0) / (rx(2) + 1e-2)));
  }

  TEST_CASE("agrees with the symbol-level oracle") {
    for (int inst = 0; inst < 5; ++inst) {
      CounterRng rng = CounterRng::stream(24, Stream::kTest, {std::uint64_t(inst)});
      const Eigen::MatrixXcd h = random_channels(16, 2, rng);
      SuSchedule s(2, 1);
      s.add(schedule_su(0, {0}, 1, 0));
      s.add(schedule_su(1, {1}, 1, 0));
      const double p_b = 0.5, noise = 0.2;
      const double g = sinr_su(s, 0, 0, 0, h, p_b, noise);
      const Eigen::MatrixXcd w = su_combiner(16) * std::sqrt(p_b);
      CounterRng orng = CounterRng::stream(25, Stream::kTest, {std::uint64_t(inst)});
      const SymbolSinrEstimate e =
          symbol_level_sinr({h.col(0), w}, 0, {{h.col(1), w}}, noise, 100000, orng);
      CHECK(e.sinr == doctest::Approx(g).epsilon(0.02));
    }
  }
}
