#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "twc/core.hpp"

using namespace twc;

TEST_CASE("open frontal area basics") {
  CHECK(open_frontal_area(1e-3, 0.0) == doctest::Approx(1.0));
  CHECK(open_frontal_area(1e-3, 0.5e-3) == doctest::Approx(0.25));
  CHECK_THROWS_AS(open_frontal_area(1e-3, 1e-3), std::domain_error);
  CHECK_THROWS_AS(open_frontal_area(1e-3, 2e-3), std::domain_error);
  CHECK_THROWS_AS(open_frontal_area(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(open_frontal_area(-1e-3, 0.0), std::domain_error);
}

TEST_CASE("open frontal area from datasheet value round-trips") {
  // t_w/l_c = 1 - sqrt(0.935) ~= 0.033046
  auto [lc, tw] = channel_dims_from_ofa(0.935);
  CHECK(tw / lc == doctest::Approx(0.033046019709314191).epsilon(1e-12));
  CHECK(open_frontal_area(lc, tw) == doctest::Approx(0.935).epsilon(1e-13));
}

TEST_CASE("open frontal area decreases with wall thickness") {
  double prev = 1.1;
  for (int i = 0; i < 100; ++i) {
    const double tw = 1e-3 * i / 101.0;
    const double ofa = open_frontal_area(1e-3, tw);
    CHECK(ofa < prev);
    prev = ofa;
  }
}

TEST_CASE("reference system validates cleanly") {
  const SystemSpec spec = reference_system_spec();
  const auto report = validate_system(spec);
  for (const auto& r : report) INFO(r);
  CHECK(report.empty());
  CHECK(spec.twc1.geometry.slice_count() == 3);
  CHECK(spec.twc2.geometry.slice_count() == 1);
  CHECK(spec.twc1.geometry.open_frontal_area() ==
        doctest::Approx(0.935).epsilon(1e-12));
  CHECK(spec.twc2.geometry.open_frontal_area() ==
        doctest::Approx(0.846).epsilon(1e-12));
}

TEST_CASE("geometry violations are reported") {
  SystemSpec spec = reference_system_spec();

  SUBCASE("slice lengths must sum to the total length") {
    for (auto& l : spec.twc1.geometry.slice_lengths_m) l *= 0.9;
    const auto report = validate_system(spec);
    CHECK(!report.empty());
  }
  SUBCASE("a slice below L/5 trips the equilibrium bound") {
    const double L = spec.twc1.geometry.length_total_m;
    spec.twc1.geometry.slice_lengths_m = {L / 2, 3 * L / 8, L / 8};
    spec.twc1.geometry.derive_center_distances();
    const auto report = validate_system(spec);
    REQUIRE(!report.empty());
    bool found = false;
    for (const auto& r : report)
      if (r.find("L/5") != std::string::npos) found = true;
    CHECK(found);
  }
  SUBCASE("nonpositive mass") {
    spec.twc2.geometry.mass_kg = 0.0;
    CHECK(!validate_system(spec).empty());
  }
  SUBCASE("wall thickness out of range") {
    spec.twc1.geometry.wall_thickness_m = spec.twc1.geometry.channel_width_m;
    CHECK(!validate_system(spec).empty());
  }
  SUBCASE("H2 kinetics must mirror CO") {
    spec.twc1.kinetics[Species::H2].pre_exponential_A *= 2.0;
    CHECK(!validate_system(spec).empty());
  }
}

TEST_CASE("state envelope guard") {
  MonolithState s;
  s.slice_center_temps_C = {25.0, 30.0, 40.0};
  s.radial_delta_C = -5.0;
  CHECK(validate_state(s, "x").empty());
  s.slice_center_temps_C[1] = 1500.0;
  CHECK(!validate_state(s, "x").empty());
  s.slice_center_temps_C[1] = std::nan("");
  CHECK(!validate_state(s, "x").empty());
}

TEST_CASE("system spec JSON round trip is lossless") {
  const SystemSpec spec = reference_system_spec();
  const std::string text = system_spec_to_json_text(spec);
  const SystemSpec back = system_spec_from_json_text(text);

  CHECK(back.twc1.geometry.length_total_m == spec.twc1.geometry.length_total_m);
  CHECK(back.twc1.geometry.radius_m == spec.twc1.geometry.radius_m);
  CHECK(back.twc1.geometry.mass_kg == spec.twc1.geometry.mass_kg);
  CHECK(back.twc1.geometry.wall_thickness_m ==
        spec.twc1.geometry.wall_thickness_m);
  REQUIRE(back.twc1.geometry.slice_lengths_m.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(back.twc1.geometry.slice_lengths_m[i] ==
          spec.twc1.geometry.slice_lengths_m[i]);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(back.twc1.geometry.slice_center_distances_m[i] ==
          spec.twc1.geometry.slice_center_distances_m[i]);
  CHECK(back.twc1.thermal.k_ax_W_per_mK == spec.twc1.thermal.k_ax_W_per_mK);
  CHECK(back.twc1.thermal.cp_J_per_kgK == spec.twc1.thermal.cp_J_per_kgK);
  for (Species s : kAllSpecies) {
    CHECK(back.twc1.kinetics[s].pre_exponential_A ==
          spec.twc1.kinetics[s].pre_exponential_A);
    CHECK(back.twc2.kinetics[s].activation_energy_J_per_mol ==
          spec.twc2.kinetics[s].activation_energy_J_per_mol);
  }
  CHECK(back.p_twc_pa == spec.p_twc_pa);
  CHECK(back.channels == spec.channels);
}

TEST_CASE("geometry JSON accepts OFA instead of channel dimensions") {
  const std::string text = R"({
    "twc1": {
      "geometry": {"length_total_m": 0.10, "radius_m": 0.05,
                   "slice_lengths_m": [0.03, 0.04, 0.03],
                   "open_frontal_area": 0.9, "mass_kg": 0.4},
      "thermal": {"k_ax_W_per_mK": 300, "k_rad_W_per_mK": 40,
                  "k_amb_W_per_mK": 0.5, "t_amb_m": 0.01,
                  "cp_J_per_kgK": 2300, "cp_exh_J_per_kgK": 1050,
                  "T_amb_C": 25},
      "kinetics": {"CO": {"pre_exponential_A": 1e10,
                          "activation_energy_J_per_mol": 84e3},
                   "NOx": {"pre_exponential_A": 1e7,
                           "activation_energy_J_per_mol": 82e3},
                   "THC": {"pre_exponential_A": 1e9,
                           "activation_energy_J_per_mol": 51e3}}
    },
    "twc2": {
      "geometry": {"length_total_m": 0.05, "radius_m": 0.05,
                   "slice_lengths_m": [0.05],
                   "open_frontal_area": 0.85, "mass_kg": 0.2},
      "thermal": {"k_ax_W_per_mK": 300, "k_rad_W_per_mK": 5,
                  "k_amb_W_per_mK": 0.5, "t_amb_m": 0.01,
                  "cp_J_per_kgK": 2300, "cp_exh_J_per_kgK": 1050,
                  "T_amb_C": 25},
      "kinetics": {"CO": {"pre_exponential_A": 1e10,
                          "activation_energy_J_per_mol": 84e3},
                   "NOx": {"pre_exponential_A": 1e7,
                           "activation_energy_J_per_mol": 82e3},
                   "THC": {"pre_exponential_A": 1e9,
                           "activation_energy_J_per_mol": 51e3}}
    }
  })";
  const SystemSpec spec = system_spec_from_json_text(text);
  CHECK(spec.twc1.geometry.open_frontal_area() ==
        doctest::Approx(0.9).epsilon(1e-12));
  // H2 defaults to CO when omitted.
  CHECK(spec.twc1.kinetics[Species::H2].pre_exponential_A ==
        spec.twc1.kinetics[Species::CO].pre_exponential_A);
  // Center distances are derived when absent.
  CHECK(spec.twc1.geometry.slice_center_distances_m.size() == 2);
  CHECK(spec.twc1.geometry.slice_center_distances_m[0] ==
        doctest::Approx(0.035));
  CHECK(validate_system(spec).empty());
}

TEST_CASE("gas constants defaults") {
  const GasConstants g;
  CHECK(g.NO_fraction == doctest::Approx(0.99));
  CHECK(g.C3H6_fraction == doctest::Approx(0.75));
  CHECK(g.watergas_K == doctest::Approx(3.8));
  CHECK(g.fuel_HC_ratio_m_over_2n == doctest::Approx(0.258));
  CHECK(g.molar_mass(Species::NOx) ==
        doctest::Approx(0.030166094).epsilon(1e-9));
  CHECK(g.molar_mass(Species::THC) ==
        doctest::Approx(0.042583675).epsilon(1e-9));
  CHECK(g.exhaust_molar_mass_kg_per_mol() > 0.025);
  CHECK(g.exhaust_molar_mass_kg_per_mol() < 0.032);
}

TEST_CASE("kinetic params from measured species mirror H2 from CO") {
  const KineticParams k = KineticParams::from_measured(
      {59.5e9, 84.0e3}, {27.6e6, 82.1e3}, {11.2e9, 51.0e3});
  CHECK(k[Species::H2].pre_exponential_A == 59.5e9);
  CHECK(k[Species::H2].activation_energy_J_per_mol == 84.0e3);
  CHECK(validate_kinetics(k, "").empty());
}
