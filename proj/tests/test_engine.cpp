#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "twc/engine_map.hpp"

using namespace twc;

namespace {

const char* kHeader =
    "speed_rpm,bmep_bar,sa_cabtdc,mdot_exh_g_per_s,bsfc_g_per_kwh,"
    "co_ppm,nox_ppm,thc_ppm,y_co2,t_exh_c,tt0_c,tt_r3_c,tt_2r3_c,tt_r_c\n";

std::string small_map_text() {
  std::string text = kHeader;
  text += "1000,2,24,5.2,384,6650,1150,684,0.125,521,498,497,491,442\n";
  text += "1010,6.9,10,13,257,3580,2500,427,0.124,600,568,567,566,537\n";
  text += "2000,5,20,20,290,7000,800,400,0.123,690,660,659,652,620\n";
  text += "3000,8,18,41,259,7620,2550,284,0.122,853,839,839,832,813\n";
  return text;
}

}  // namespace

TEST_CASE("brake power from speed and BMEP") {
  // Four-stroke: one power cycle every two revolutions.
  CHECK(brake_power_kW(2000.0, 8.0) ==
        doctest::Approx(8e5 * 1.969e-3 * 2000.0 / 120.0 / 1e3));
  CHECK(brake_power_kW(2000.0, 8.0) == doctest::Approx(26.2533).epsilon(1e-4));
}

TEST_CASE("engine map loading") {
  const auto& lib = twc_test::library();

  SUBCASE("a representative measured row loads losslessly") {
    const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);
    REQUIRE(map.size() == 4);
    const auto idx = map.find(1010.0, 6.9, 10.0);
    REQUIRE(idx.has_value());
    const OperatingPoint& p = map.point(*idx);
    CHECK(p.mdot_exh_kg_per_s == doctest::Approx(13e-3));
    CHECK(p.bsfc_g_per_kWh == 257.0);
    CHECK(p.engine_out_ppm[0] == 3580.0);
    CHECK(p.engine_out_ppm[1] == 2500.0);
    CHECK(p.engine_out_ppm[2] == 427.0);
    CHECK(p.T_exh_C == 600.0);
    CHECK(p.radial_temps_C[0] == 568.0);
    CHECK(p.radial_temps_C[3] == 537.0);
    CHECK(!p.fitted_profile.flat());
    CHECK(p.power_kW == doctest::Approx(brake_power_kW(1010.0, 6.9)));
  }
  SUBCASE("empty file is rejected") {
    CHECK_THROWS(map_from_csv_text("", "mem", lib));
    CHECK_THROWS(map_from_csv_text(kHeader, "mem", lib));
  }
  SUBCASE("nonpositive massflow is rejected") {
    std::string text = kHeader;
    text += "1000,2,24,-5,384,6650,1150,684,0.125,521,498,497,491,442\n";
    CHECK_THROWS(map_from_csv_text(text, "mem", lib));
  }
  SUBCASE("duplicate setpoints are rejected") {
    std::string text = small_map_text();
    text += "1000,2,24,5.2,384,6650,1150,684,0.125,521,498,497,491,442\n";
    CHECK_THROWS_WITH_AS(map_from_csv_text(text, "mem", lib),
                         doctest::Contains("duplicate"), std::runtime_error);
  }
  SUBCASE("a missing column is named") {
    std::string text =
        "speed_rpm,bmep_bar,sa_cabtdc,mdot_exh_g_per_s,bsfc_g_per_kwh,"
        "co_ppm,nox_ppm,thc_ppm,y_co2,t_exh_c,tt0_c,tt_r3_c,tt_2r3_c\n"
        "1000,2,24,5.2,384,6650,1150,684,0.125,521,498,497,491\n";
    CHECK_THROWS_WITH_AS(map_from_csv_text(text, "mem", lib),
                         doctest::Contains("tt_r_c"), std::runtime_error);
  }
  SUBCASE("csv round trip through save") {
    const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);
    save_map_csv(map, "test_map_roundtrip.csv", "unit test");
    const EngineMap back = load_map("test_map_roundtrip.csv", lib);
    REQUIRE(back.size() == map.size());
    CHECK(back.point(0).bsfc_g_per_kWh == map.point(0).bsfc_g_per_kWh);
    CHECK(back.min_bsfc_index() == map.min_bsfc_index());
    std::remove("test_map_roundtrip.csv");
  }
}

TEST_CASE("engine-out flows include the hydrogen estimate") {
  const auto& lib = twc_test::library();
  const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);
  const GasConstants constants;
  const SpeciesFlows f = map.point(0).engine_out_flows(constants);
  CHECK(f[Species::CO] > 0.0);
  CHECK(f[Species::NOx] > 0.0);
  CHECK(f[Species::THC] > 0.0);
  CHECK(f[Species::H2] > 0.0);
  // H2 is a minor species relative to CO.
  CHECK(f[Species::H2] < f[Species::CO]);
}

TEST_CASE("setpoint interpolation") {
  const auto& lib = twc_test::library();
  const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);

  SUBCASE("an exact setpoint returns the tabulated point") {
    const OperatingPoint p = map.interpolate_setpoint(2000.0, 5.0, 20.0);
    CHECK(p.bsfc_g_per_kWh == 290.0);
    CHECK(p.mdot_exh_kg_per_s == doctest::Approx(20e-3));
  }
  SUBCASE("the midpoint of two equidistant points averages their outputs") {
    std::string text = kHeader;
    text += "1000,4,10,10,300,5000,1000,500,0.12,500,480,479,475,450\n";
    text += "2000,4,10,20,320,6000,1200,400,0.12,600,580,579,575,550\n";
    const EngineMap two = map_from_csv_text(text, "mem", lib);
    const OperatingPoint p = two.interpolate_setpoint(1500.0, 4.0, 10.0);
    CHECK(p.bsfc_g_per_kWh == doctest::Approx(310.0));
    CHECK(p.mdot_exh_kg_per_s == doctest::Approx(15e-3));
    CHECK(p.T_exh_C == doctest::Approx(550.0));
  }
  SUBCASE("interpolated BSFC is a convex combination of its neighbors") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> speed(900.0, 3100.0);
    std::uniform_real_distribution<double> bmep(1.5, 8.5);
    std::uniform_real_distribution<double> sa(8.0, 26.0);
    for (int trial = 0; trial < 100; ++trial) {
      const OperatingPoint p =
          map.interpolate_setpoint(speed(rng), bmep(rng), sa(rng));
      double lo = 1e18, hi = -1e18;
      for (std::size_t i = 0; i < map.size(); ++i) {
        lo = std::min(lo, map.point(i).bsfc_g_per_kWh);
        hi = std::max(hi, map.point(i).bsfc_g_per_kWh);
      }
      CHECK(p.bsfc_g_per_kWh >= lo - 1e-9);
      CHECK(p.bsfc_g_per_kWh <= hi + 1e-9);
    }
  }
  SUBCASE("interpolation is locally continuous") {
    const OperatingPoint a = map.interpolate_setpoint(1500.0, 4.0, 15.0);
    const OperatingPoint b = map.interpolate_setpoint(1500.0 + 1e-6, 4.0, 15.0);
    CHECK(std::abs(a.bsfc_g_per_kWh - b.bsfc_g_per_kWh) < 1e-3);
  }
}

TEST_CASE("minimum-BSFC index is order-invariant") {
  const auto& lib = twc_test::library();
  const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);
  const auto& best = map.point(map.min_bsfc_index());
  CHECK(best.bsfc_g_per_kWh == 257.0);

  // Reorder the rows; the chosen point must be the same setpoint.
  std::string text = kHeader;
  text += "3000,8,18,41,259,7620,2550,284,0.122,853,839,839,832,813\n";
  text += "1010,6.9,10,13,257,3580,2500,427,0.124,600,568,567,566,537\n";
  text += "2000,5,20,20,290,7000,800,400,0.123,690,660,659,652,620\n";
  text += "1000,2,24,5.2,384,6650,1150,684,0.125,521,498,497,491,442\n";
  const EngineMap shuffled = map_from_csv_text(text, "mem", lib);
  const auto& best2 = shuffled.point(shuffled.min_bsfc_index());
  CHECK(best2.speed_rpm == best.speed_rpm);
  CHECK(best2.bmep_bar == best.bmep_bar);
  CHECK(best2.spark_angle_CAbTDC == best.spark_angle_CAbTDC);
}

TEST_CASE("rolling average filter") {
  SUBCASE("a constant series is unchanged") {
    const std::vector<double> series(100, 7.5);
    const auto out = rolling_average(series, 0.1, 5.0);
    for (double v : out) CHECK(v == doctest::Approx(7.5));
  }
  SUBCASE("a unit step reads 26/51 at 2.5 s past the edge") {
    // Samples from t = -5 s; the step fires at t = 0.
    std::vector<double> series;
    for (int i = 0; i <= 100; ++i) series.push_back(i >= 50 ? 1.0 : 0.0);
    const auto out = rolling_average(series, 0.1, 5.0);
    // t = 2.5 s is sample 75; its 51-sample window spans samples 25..75.
    CHECK(out[75] == doctest::Approx(26.0 / 51.0).epsilon(1e-12));
  }
  SUBCASE("stays within the input bounds") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> val(-3.0, 9.0);
    std::vector<double> series(300);
    for (auto& v : series) v = val(rng);
    const auto out = rolling_average(series, 0.1, 5.0);
    const double lo = *std::min_element(series.begin(), series.end());
    const double hi = *std::max_element(series.begin(), series.end());
    for (double v : out) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
  SUBCASE("the effective window is shorter at the start") {
    std::vector<double> series = {4.0, 0.0, 0.0};
    const auto out = rolling_average(series, 0.1, 5.0);
    CHECK(out[0] == doctest::Approx(4.0));
    CHECK(out[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("suboptimal two-phase controller") {
  const auto& lib = twc_test::library();
  const EngineMap map = map_from_csv_text(small_map_text(), "mem", lib);
  const std::size_t heat_op = 0;

  SUBCASE("switching at zero runs the minimum-BSFC point from the start") {
    const SuboptimalController c{heat_op, 0.0};
    CHECK(c.op_at(0.0, map) == map.min_bsfc_index());
    CHECK(c.op_at(100.0, map) == map.min_bsfc_index());
  }
  SUBCASE("the never-switch sentinel holds the heating point") {
    const SuboptimalController c{heat_op, kNeverSwitch};
    CHECK(c.op_at(0.0, map) == heat_op);
    CHECK(c.op_at(1e6, map) == heat_op);
  }
  SUBCASE("switches exactly at the configured time") {
    const SuboptimalController c{heat_op, 30.0};
    CHECK(c.op_at(29.9, map) == heat_op);
    CHECK(c.op_at(30.0, map) == map.min_bsfc_index());
  }
  SUBCASE("the drive function reflects the active point") {
    const SuboptimalController c{heat_op, 30.0};
    const DriveFunction drive = suboptimal_drive(map, c, GasConstants{});
    CHECK(drive(0.0).bsfc_g_per_kWh == 384.0);
    CHECK(drive(31.0).bsfc_g_per_kWh == 257.0);
  }
}
