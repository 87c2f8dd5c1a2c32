#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "uavsim/link_adaptation.hpp"

using namespace uavsim;

TEST_SUITE("link_adaptation") {
  TEST_CASE("anchored endpoints") {
    const McsTable t = McsTable::default_table();
    REQUIRE(t.rows().size() == 15);
    CHECK(t.rows().front().threshold_db == -5.02);
    CHECK(t.rows().front().efficiency == 0.22);
    CHECK(t.rows().back().threshold_db == 25.87);
    CHECK(t.rows().back().efficiency == 7.44);
    CHECK(t.rows()[1].threshold_db == doctest::Approx(-4.12));
    CHECK(select_mcs(t, -5.02) == 0.22);
    CHECK(select_mcs(t, -4.5) == 0.22);
    CHECK(select_mcs(t, 25.87) == 7.44);
    CHECK(select_mcs(t, 30.0) == 7.44);
    CHECK(select_mcs(t, -5.03) == 0.0);
    CHECK(select_mcs(t, -6.0) == 0.0);
  }

  TEST_CASE("monotone right-continuous steps") {
    const McsTable t = McsTable::default_table();
    double prev = 0.0;
    for (double s = -10.0; s <= 35.0; s += 0.01) {
      const double e = t.select(s);
      CHECK(e >= prev);
      prev = e;
    }
    for (const McsRow& r : t.rows()) {
      CHECK(t.select(r.threshold_db) == r.efficiency);
      CHECK(t.select(std::nextafter(r.threshold_db, -1e9)) < r.efficiency);
    }
  }

  TEST_CASE("rates") {
    CHECK(user_rate_bps(0.22, 1, kDefaultControlOverhead) ==
          doctest::Approx(0.22 * 180000.0 * 11.0 / 14.0).epsilon(1e-12));
    CHECK(user_rate_bps(0.22, 1, kDefaultControlOverhead) == doctest::Approx(31114.285714285714));
    CHECK(user_rate_bps(7.44, 50, kDefaultControlOverhead) == doctest::Approx(52611428.571428571));
    CHECK(user_rate_bps(0.0, 13, 0.5) == 0.0);
    for (int n = 1; n <= 50; ++n) {
      CHECK(user_rate_bps(2.5, n, 0.7) == doctest::Approx(n * user_rate_bps(2.5, 1, 0.7)));
    }
    CHECK_THROWS_AS(user_rate_bps(1.0, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(user_rate_bps(1.0, 1, 1.5), std::invalid_argument);
  }

  TEST_CASE("table validation and CSV") {
    CHECK_THROWS_AS(McsTable({}), std::invalid_argument);
    CHECK_THROWS_AS(McsTable({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(McsTable({{0.0, 1.0}, {1.0, 0.5}}), std::invalid_argument);

    const McsTable shipped = McsTable::load_csv(UAVSIM_CONFIG_DIR "/mcs_table.csv");
    const McsTable def = McsTable::default_table();
    REQUIRE(shipped.rows().size() == def.rows().size());
    for (std::size_t i = 0; i < def.rows().size(); ++i) {
      CHECK(shipped.rows()[i].threshold_db == doctest::Approx(def.rows()[i].threshold_db).epsilon(1e-4));
      CHECK(shipped.rows()[i].efficiency == doctest::Approx(def.rows()[i].efficiency).epsilon(1e-4));
    }

    const char* path = "mcs_bad_test.csv";
    {
      std::ofstream out(path);
      out << "threshold_db,efficiency\n1.0;2.0\n";
    }
    CHECK_THROWS_AS(McsTable::load_csv(path), std::invalid_argument);
    std::remove(path);
    CHECK_THROWS_AS(McsTable::load_csv("does/not/exist.csv"), std::invalid_argument);
  }
}
