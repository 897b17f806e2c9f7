#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "twc/core.hpp"
#include "twc/kinetics.hpp"
#include "twc/thermo.hpp"

using namespace twc;

namespace {

// Fine-step RK4 integration of dy/dt = -k y, the oracle for the closed-form
// cell conversion.
double integrate_decay(double k, double t_end, int steps) {
  double y = 1.0;
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = -k * y;
    const double k2 = -k * (y + 0.5 * h * k1);
    const double k3 = -k * (y + 0.5 * h * k2);
    const double k4 = -k * (y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

}  // namespace

TEST_CASE("arrhenius rate") {
  SUBCASE("zero activation energy gives k = A") {
    for (double t : {-50.0, 25.0, 600.0})
      CHECK(arrhenius_rate(123.0, 0.0, t) == doctest::Approx(123.0));
  }
  SUBCASE("pinned regression value for the tuned CO parameters at 300 C") {
    const double k = arrhenius_rate(59.5e9, 84.0e3, 300.0);
    CHECK(k == doctest::Approx(1315.9407657628182).epsilon(1e-12));
  }
  SUBCASE("strictly increasing in temperature") {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double t = -40.0 + 9.0 * i;
      const double k = arrhenius_rate(1e10, 80e3, t);
      CHECK(k > prev);
      prev = k;
    }
  }
  SUBCASE("rejects temperatures at or below absolute zero") {
    CHECK_THROWS_AS(arrhenius_rate(1.0, 1.0, -273.15), std::domain_error);
    CHECK_THROWS_AS(arrhenius_rate(1.0, 1.0, -300.0), std::domain_error);
  }
}

TEST_CASE("residence time") {
  const SystemSpec spec = reference_system_spec();
  const GasConstants constants;
  const auto& geo = spec.twc1.geometry;

  SUBCASE("doubling the massflow halves the residence time") {
    const double t1 = residence_time(geo, 0, 0.013, 500.0, 101325.0, constants);
    const double t2 = residence_time(geo, 0, 0.026, 500.0, 101325.0, constants);
    CHECK(t2 == doctest::Approx(0.5 * t1).epsilon(1e-15));
  }
  SUBCASE("doubling the absolute temperature halves the residence time") {
    const double tc1 = 400.0;
    const double tc2 = 2.0 * (tc1 + 273.15) - 273.15;
    const double t1 = residence_time(geo, 0, 0.013, tc1, 101325.0, constants);
    const double t2 = residence_time(geo, 0, 0.013, tc2, 101325.0, constants);
    CHECK(t2 == doctest::Approx(0.5 * t1).epsilon(1e-15));
  }
  SUBCASE("whole-TWC residence time is tenths of a second at mid load") {
    double total = 0.0;
    for (std::size_t n = 0; n < geo.slice_count(); ++n)
      total += residence_time(geo, n, 0.013, 600.0, 101325.0, constants);
    for (std::size_t n = 0; n < spec.twc2.geometry.slice_count(); ++n)
      total += residence_time(spec.twc2.geometry, n, 0.013, 600.0, 101325.0,
                              constants);
    CHECK(total > 0.01);
    CHECK(total < 0.2);
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(residence_time(geo, 0, 0.0, 500.0, 101325.0, constants),
                    std::domain_error);
    CHECK_THROWS_AS(residence_time(geo, 0, 0.013, 500.0, 0.0, constants),
                    std::domain_error);
  }
}

TEST_CASE("hydrogen estimation from the water-gas shift") {
  const GasConstants constants;
  SUBCASE("no CO means no hydrogen") {
    const auto est = estimate_h2(0.0, 0.12, constants);
    CHECK(est.y_H2 == 0.0);
  }
  SUBCASE("pinned values for y_CO = 0.006, y_CO2 = 0.12") {
    const auto est = estimate_h2(0.006, 0.12, constants);
    CHECK(est.y_H2O ==
          doctest::Approx(0.031088323874406498).epsilon(1e-12));
    CHECK(est.y_H2 ==
          doctest::Approx(4.0905689308429602e-4).epsilon(1e-12));
  }
  SUBCASE("monotone in CO at fixed CO2") {
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
      const double y = estimate_h2(1e-4 * i, 0.12, constants).y_H2;
      CHECK(y > prev);
      prev = y;
    }
  }
  SUBCASE("CO without CO2 is rejected") {
    CHECK_THROWS_AS(estimate_h2(0.01, 0.0, constants), std::domain_error);
    CHECK(estimate_h2(0.0, 0.0, constants).y_H2 == 0.0);
  }
}

TEST_CASE("cell conversion closed form") {
  SpeciesFlows inflow;
  inflow[Species::CO] = 1e-4;
  inflow[Species::NOx] = 2e-5;
  inflow[Species::THC] = 3e-5;
  inflow[Species::H2] = 4e-6;

  SUBCASE("zero residence time is a pass-through") {
    const auto cell = cell_convert(inflow, {10.0, 20.0, 30.0, 40.0}, 0.0);
    for (Species s : kAllSpecies) {
      CHECK(cell.outflow[s] == inflow[s]);
      CHECK(cell.converted[s] == 0.0);
    }
  }
  SUBCASE("large rates convert everything") {
    const auto cell = cell_convert(inflow, {1e9, 1e9, 1e9, 1e9}, 0.1);
    for (Species s : kAllSpecies) {
      CHECK(cell.outflow[s] == doctest::Approx(0.0));
      CHECK(cell.converted[s] == doctest::Approx(inflow[s]));
    }
  }
  SUBCASE("matches the fine-step ODE integration within 1e-6 relative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> k_dist(0.0, 3.0);   // log10
    std::uniform_real_distribution<double> t_dist(1e-4, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
      const double k = std::pow(10.0, k_dist(rng));
      const double t_r = t_dist(rng);
      const double oracle = integrate_decay(k, t_r, 2000);
      const auto cell = cell_convert(inflow, {k, k, k, k}, t_r);
      const double closed = cell.outflow[Species::CO] / inflow[Species::CO];
      CHECK(closed == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
  SUBCASE("never negative") {
    const auto cell = cell_convert(inflow, {1e3, 1.0, 0.0, 1e-3}, 0.05);
    CHECK(cell.outflow.all_nonnegative());
    CHECK(cell.converted.all_nonnegative());
  }
}

TEST_CASE("heats of reaction from the reference table") {
  const auto& thermo = ThermoTable::builtin();
  const GasConstants constants;

  SUBCASE("standard combustion enthalpies at 25 C") {
    CHECK(thermo.heat_of_reaction_J_per_mol(Species::CO, 25.0, constants) ==
          doctest::Approx(283e3).epsilon(0.02));
    CHECK(thermo.heat_of_reaction_J_per_mol(Species::H2, 25.0, constants) ==
          doctest::Approx(242e3).epsilon(0.02));
  }
  SUBCASE("enthalpy continuity across range boundaries") {
    const std::array<Compound, kCompoundCount> compounds = {
        Compound::CO,  Compound::CO2, Compound::O2,   Compound::N2,
        Compound::H2,  Compound::H2O, Compound::NO,   Compound::NO2,
        Compound::C3H6, Compound::C3H8};
    for (Compound c : compounds) {
      const auto& ranges = thermo.compound(c).ranges;
      for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
        const double tb_C = ranges[i].T_max_K - 273.15;
        const double below = thermo.enthalpy_J_per_mol(c, tb_C - 0.01);
        const double above = thermo.enthalpy_J_per_mol(c, tb_C + 0.01);
        CHECK(std::abs(below - above) < 500.0);  // 0.5 kJ/mol
      }
    }
  }
  SUBCASE("lumped NOx lies between its constituent paths") {
    for (double t : {25.0, 300.0, 600.0, 900.0}) {
      const double no_path = -reaction_enthalpy_NO(thermo, t);
      const double no2_path = -reaction_enthalpy_NO2(thermo, t);
      const double lumped =
          thermo.heat_of_reaction_J_per_mol(Species::NOx, t, constants);
      CHECK(lumped >= std::min(no_path, no2_path) - 1e-9);
      CHECK(lumped <= std::max(no_path, no2_path) + 1e-9);
    }
  }
  SUBCASE("temperatures below the anchor clamp") {
    const double at_anchor =
        thermo.heat_of_reaction_J_per_mol(Species::CO, 25.0, constants);
    const double below =
        thermo.heat_of_reaction_J_per_mol(Species::CO, -50.0, constants);
    CHECK(below == at_anchor);
    CHECK(thermo.low_temperature_clamped());
  }
  SUBCASE("temperatures above coverage raise a named error") {
    CHECK_THROWS_WITH_AS(
        thermo.enthalpy_J_per_mol(Compound::CO, 1400.0),
        doctest::Contains("CO"), std::out_of_range);
  }
}

TEST_CASE("thermo table JSON loading") {
  // A table with one deliberately narrow CO2 range.
  const std::string text = R"({
    "CO":  {"formation_enthalpy_kJ_per_mol": -110.5271,
            "molar_mass_kg_per_mol": 28.0101e-3,
            "ranges": [{"T_min_K": 298.15, "T_max_K": 1300,
              "coeff": [25.56759,6.096130,4.054656,-2.671301,0.131021,-118.0089,227.3665,-110.5271]}]},
    "CO2": {"formation_enthalpy_kJ_per_mol": -393.5224,
            "molar_mass_kg_per_mol": 44.0095e-3,
            "ranges": [{"T_min_K": 298.15, "T_max_K": 500,
              "coeff": [24.99735,55.18696,-33.69137,7.948387,-0.136638,-403.6075,228.2431,-393.5224]}]},
    "O2":  {"formation_enthalpy_kJ_per_mol": 0.0,
            "molar_mass_kg_per_mol": 31.9988e-3,
            "ranges": [{"T_min_K": 100, "T_max_K": 700,
              "coeff": [31.32234,-20.23531,57.86644,-36.50624,-0.007374,-8.903471,246.7945,0.0]}]},
    "N2":  {"formation_enthalpy_kJ_per_mol": 0.0,
            "molar_mass_kg_per_mol": 28.0134e-3,
            "ranges": [{"T_min_K": 100, "T_max_K": 500,
              "coeff": [28.98641,1.853978,-9.647459,16.63537,0.000117,-8.671914,226.4168,0.0]}]},
    "H2":  {"formation_enthalpy_kJ_per_mol": 0.0,
            "molar_mass_kg_per_mol": 2.01588e-3,
            "ranges": [{"T_min_K": 298.15, "T_max_K": 1000,
              "coeff": [33.066178,-11.363417,11.432816,-2.772874,-0.158558,-9.980797,172.707974,0.0]}]},
    "H2O": {"formation_enthalpy_kJ_per_mol": -241.8264,
            "molar_mass_kg_per_mol": 18.01528e-3,
            "ranges": [{"T_min_K": 298.15, "T_max_K": 1700,
              "coeff": [30.09200,6.832514,6.793435,-2.534480,0.082139,-250.8810,223.3967,-241.8264]}]},
    "NO":  {"formation_enthalpy_kJ_per_mol": 90.29114,
            "molar_mass_kg_per_mol": 30.0061e-3,
            "ranges": [{"T_min_K": 100, "T_max_K": 500,
              "coeff": [23.83491,12.58878,-1.139011,-1.497459,0.214194,83.35783,237.1219,90.29114]}]},
    "NO2": {"formation_enthalpy_kJ_per_mol": 33.09502,
            "molar_mass_kg_per_mol": 46.0055e-3,
            "ranges": [{"T_min_K": 298.15, "T_max_K": 1200,
              "coeff": [16.10857,75.89525,-54.38740,14.30777,0.239423,26.17464,240.5386,33.09502]}]},
    "C3H6": {"formation_enthalpy_kJ_per_mol": 20.41,
             "molar_mass_kg_per_mol": 42.0797e-3,
             "ranges": [{"T_min_K": 298.15, "T_max_K": 1500,
               "coeff": [24.802266,145.561540,-43.663969,0,0,6.931223,0,20.41]}]},
    "C3H8": {"formation_enthalpy_kJ_per_mol": -104.68,
             "molar_mass_kg_per_mol": 44.0956e-3,
             "ranges": [{"T_min_K": 298.15, "T_max_K": 1500,
               "coeff": [28.491410,165.495620,-47.629274,0,0,-120.109668,0,-104.68]}]}
  })";
  const ThermoTable table = ThermoTable::from_json_text(text);
  CHECK(table.enthalpy_J_per_mol(Compound::CO, 25.0) ==
        doctest::Approx(-110.5271e3).epsilon(1e-3));
  // 300 C is past the narrowed CO2 range.
  CHECK_THROWS_WITH_AS(table.enthalpy_J_per_mol(Compound::CO2, 300.0),
                       doctest::Contains("CO2"), std::out_of_range);
  CHECK_THROWS(ThermoTable::from_json_text("{}"));
}

TEST_CASE("cell power") {
  const auto& thermo = ThermoTable::builtin();
  const GasConstants constants;

  SUBCASE("zero conversion develops no power") {
    CHECK(cell_power(SpeciesFlows{}, 300.0, thermo, constants) == 0.0);
  }
  SUBCASE("single-species hand value") {
    SpeciesFlows converted;
    converted[Species::CO] = 28e-6;  // ~1e-3 mol/s
    const double p = cell_power(converted, 25.0, thermo, constants);
    CHECK(p == doctest::Approx(283.0).epsilon(0.01));
  }
  SUBCASE("additive over species") {
    SpeciesFlows a, b;
    a[Species::CO] = 1e-5;
    b[Species::THC] = 2e-6;
    const double pa = cell_power(a, 400.0, thermo, constants);
    const double pb = cell_power(b, 400.0, thermo, constants);
    const double pab = cell_power(a + b, 400.0, thermo, constants);
    CHECK(pab == doctest::Approx(pa + pb).epsilon(1e-12));
  }
}

namespace {

MonolithKineticsResult run_monolith(double temp_C, const KineticParams& params,
                                    const SpeciesFlows& inlet,
                                    std::size_t channels) {
  const SystemSpec spec = reference_system_spec();
  const GasConstants constants;
  const auto& geo = spec.twc1.geometry;
  std::vector<double> temps(channels * geo.slice_count(), temp_C);
  return monolith_kinetics(temps, channels, inlet,
                           channel_massflow_weights(channels), geo, params,
                           0.013, 101325.0, ThermoTable::builtin(), constants);
}

SpeciesFlows typical_inlet() {
  SpeciesFlows f;
  f[Species::CO] = 3.2e-5;
  f[Species::NOx] = 6.0e-6;
  f[Species::THC] = 5.0e-6;
  f[Species::H2] = 1.6e-7;
  return f;
}

}  // namespace

TEST_CASE("monolith kinetics") {
  const SystemSpec spec = reference_system_spec();

  SUBCASE("frozen kinetics pass everything through") {
    // High activation energies for every species keep all rates negligible
    // at -50 C.
    const KineticParams cold = KineticParams::from_measured(
        {59.5e9, 84.0e3}, {59.5e9, 84.0e3}, {59.5e9, 84.0e3});
    const auto result = run_monolith(-50.0, cold, typical_inlet(), 10);
    for (Species s : kAllSpecies) {
      CHECK(std::abs(result.conversion_efficiency[static_cast<int>(s)]) <
            1e-6);
      CHECK(result.tailpipe[s] ==
            doctest::Approx(typical_inlet()[s]).epsilon(1e-6));
    }
  }
  SUBCASE("a hot brick converts everything") {
    const auto result =
        run_monolith(900.0, spec.twc1.kinetics, typical_inlet(), 10);
    for (Species s : kAllSpecies)
      CHECK(result.conversion_efficiency[static_cast<int>(s)] > 0.99);
  }
  SUBCASE("mass conservation at machine precision") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> temp(-50.0, 950.0);
    std::uniform_real_distribution<double> flow(0.0, 1e-4);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t channels = 2 + trial % 12;
      std::vector<double> temps(channels * 3);
      for (auto& t : temps) t = temp(rng);
      SpeciesFlows inlet;
      for (Species s : kAllSpecies) inlet[s] = flow(rng);
      const auto result = monolith_kinetics(
          temps, channels, inlet, channel_massflow_weights(channels),
          spec.twc1.geometry, spec.twc1.kinetics, 0.02, 101325.0,
          ThermoTable::builtin(), GasConstants{});
      for (Species s : kAllSpecies) {
        double converted = 0.0;
        for (const auto& cell : result.cells) converted += cell.converted[s];
        const double total = converted + result.tailpipe[s];
        if (inlet[s] > 0.0)
          CHECK(std::abs(total - inlet[s]) <= 1e-12 * inlet[s]);
      }
    }
  }
  SUBCASE("efficiency is monotone in a uniform temperature rise") {
    double prev = -1.0;
    for (double t = 100.0; t <= 500.0; t += 10.0) {
      const auto result =
          run_monolith(t, spec.twc1.kinetics, typical_inlet(), 8);
      const double eta = result.conversion_efficiency[0];
      CHECK(eta >= prev - 1e-12);
      prev = eta;
    }
  }
  SUBCASE("zero inlet gives zero efficiency by convention") {
    const auto result = run_monolith(400.0, spec.twc1.kinetics,
                                     SpeciesFlows{}, 4);
    for (Species s : kAllSpecies)
      CHECK(result.conversion_efficiency[static_cast<int>(s)] == 0.0);
  }
}

TEST_CASE("mole fraction to massflow conversion") {
  const GasConstants constants;
  const double mdot = mole_fraction_to_massflow(1.0, 0.013, Species::CO,
                                                constants);
  CHECK(mdot == doctest::Approx(0.013 * constants.molar_mass(Species::CO) /
                                constants.exhaust_molar_mass_kg_per_mol()));
  CHECK(mole_fraction_to_massflow(0.0, 0.013, Species::CO, constants) == 0.0);
}
