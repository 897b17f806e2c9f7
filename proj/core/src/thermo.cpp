#include "twc/thermo.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace twc {

const char* compound_name(Compound c) {
  switch (c) {
    case Compound::CO: return "CO";
    case Compound::CO2: return "CO2";
    case Compound::O2: return "O2";
    case Compound::N2: return "N2";
    case Compound::H2: return "H2";
    case Compound::H2O: return "H2O";
    case Compound::NO: return "NO";
    case Compound::NO2: return "NO2";
    case Compound::C3H6: return "C3H6";
    case Compound::C3H8: return "C3H8";
  }
  return "?";
}

namespace {

double shomate_increment_kJ(const ShomateRange& r, double T_K) {
  const double t = T_K / 1000.0;
  const double A = r.coeff[0], B = r.coeff[1], C = r.coeff[2],
               D = r.coeff[3], E = r.coeff[4], F = r.coeff[5],
               H = r.coeff[7];
  return A * t + B * t * t / 2.0 + C * t * t * t / 3.0 +
         D * t * t * t * t / 4.0 - E / t + F - H;
}

}  // namespace

double ThermoTable::enthalpy_J_per_mol(Compound c, double temp_C) const {
  const CompoundThermo& ct = compound(c);
  double T_K = to_kelvin(temp_C);
  const double lo = ct.ranges.front().T_min_K;
  const double hi = ct.ranges.back().T_max_K;
  if (T_K < lo) {
    if (!clamp_warned_.exchange(true)) {
      std::cerr << "thermo: clamping " << compound_name(c) << " enthalpy at "
                << lo << " K (asked for " << T_K
                << " K); further clamps not reported\n";
    }
    T_K = lo;
  }
  if (T_K > hi) {
    std::ostringstream msg;
    msg << "thermo: " << compound_name(c) << " has no data at " << T_K
        << " K (covered range " << lo << "-" << hi << " K)";
    throw std::out_of_range(msg.str());
  }
  for (const ShomateRange& r : ct.ranges) {
    if (T_K <= r.T_max_K)
      return (ct.formation_enthalpy_kJ_per_mol + shomate_increment_kJ(r, T_K)) *
             1e3;
  }
  // Unreachable given the hi check.
  throw std::out_of_range("thermo: range lookup failed");
}

double reaction_enthalpy_CO(const ThermoTable& t, double temp_C) {
  // CO + 1/2 O2 -> CO2
  return t.enthalpy_J_per_mol(Compound::CO2, temp_C) -
         t.enthalpy_J_per_mol(Compound::CO, temp_C) -
         0.5 * t.enthalpy_J_per_mol(Compound::O2, temp_C);
}

double reaction_enthalpy_H2(const ThermoTable& t, double temp_C) {
  // H2 + 1/2 O2 -> H2O (vapor)
  return t.enthalpy_J_per_mol(Compound::H2O, temp_C) -
         t.enthalpy_J_per_mol(Compound::H2, temp_C) -
         0.5 * t.enthalpy_J_per_mol(Compound::O2, temp_C);
}

double reaction_enthalpy_NO(const ThermoTable& t, double temp_C) {
  // 2NO + 2CO -> N2 + 2CO2 per mole NO, minus the CO-oxidation share that is
  // already booked under the converted CO.
  return 0.5 * t.enthalpy_J_per_mol(Compound::N2, temp_C) +
         t.enthalpy_J_per_mol(Compound::CO2, temp_C) -
         t.enthalpy_J_per_mol(Compound::NO, temp_C) -
         reaction_enthalpy_CO(t, temp_C);
}

double reaction_enthalpy_NO2(const ThermoTable& t, double temp_C) {
  // 2NO2 -> N2 + 2O2 per mole NO2
  return 0.5 * t.enthalpy_J_per_mol(Compound::N2, temp_C) +
         t.enthalpy_J_per_mol(Compound::O2, temp_C) -
         t.enthalpy_J_per_mol(Compound::NO2, temp_C);
}

double reaction_enthalpy_C3H6(const ThermoTable& t, double temp_C) {
  // C3H6 + 9/2 O2 -> 3CO2 + 3H2O
  return 3.0 * t.enthalpy_J_per_mol(Compound::CO2, temp_C) +
         3.0 * t.enthalpy_J_per_mol(Compound::H2O, temp_C) -
         t.enthalpy_J_per_mol(Compound::C3H6, temp_C) -
         4.5 * t.enthalpy_J_per_mol(Compound::O2, temp_C);
}

double reaction_enthalpy_C3H8(const ThermoTable& t, double temp_C) {
  // C3H8 + 5 O2 -> 3CO2 + 4H2O
  return 3.0 * t.enthalpy_J_per_mol(Compound::CO2, temp_C) +
         4.0 * t.enthalpy_J_per_mol(Compound::H2O, temp_C) -
         t.enthalpy_J_per_mol(Compound::C3H8, temp_C) -
         5.0 * t.enthalpy_J_per_mol(Compound::O2, temp_C);
}

double ThermoTable::heat_of_reaction_J_per_mol(
    Species s, double temp_C, const GasConstants& constants) const {
  double signed_dH = 0.0;
  switch (s) {
    case Species::CO:
      signed_dH = reaction_enthalpy_CO(*this, temp_C);
      break;
    case Species::H2:
      signed_dH = reaction_enthalpy_H2(*this, temp_C);
      break;
    case Species::NOx: {
      const double f = constants.NO_fraction;
      signed_dH = f * reaction_enthalpy_NO(*this, temp_C) +
                  (1.0 - f) * reaction_enthalpy_NO2(*this, temp_C);
      break;
    }
    case Species::THC: {
      const double f = constants.C3H6_fraction;
      signed_dH = f * reaction_enthalpy_C3H6(*this, temp_C) +
                  (1.0 - f) * reaction_enthalpy_C3H8(*this, temp_C);
      break;
    }
  }
  return -signed_dH;  // positive for exothermic release
}

namespace {

using nlohmann::json;

int compound_index(const std::string& name) {
  for (std::size_t i = 0; i < kCompoundCount; ++i)
    if (name == compound_name(static_cast<Compound>(i)))
      return static_cast<int>(i);
  return -1;
}

}  // namespace

ThermoTable ThermoTable::from_json_text(const std::string& text) {
  json j = json::parse(text);
  std::array<CompoundThermo, kCompoundCount> data{};
  std::array<bool, kCompoundCount> seen{};
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int idx = compound_index(it.key());
    if (idx < 0)
      throw std::runtime_error("thermo JSON: unknown compound " + it.key());
    CompoundThermo ct;
    ct.formation_enthalpy_kJ_per_mol =
        it.value().at("formation_enthalpy_kJ_per_mol").get<double>();
    ct.molar_mass_kg_per_mol =
        it.value().at("molar_mass_kg_per_mol").get<double>();
    for (const auto& rj : it.value().at("ranges")) {
      ShomateRange r;
      r.T_min_K = rj.at("T_min_K").get<double>();
      r.T_max_K = rj.at("T_max_K").get<double>();
      const auto coeff = rj.at("coeff").get<std::vector<double>>();
      if (coeff.size() != 8)
        throw std::runtime_error("thermo JSON: each range needs 8 Shomate "
                                 "coefficients");
      std::copy(coeff.begin(), coeff.end(), r.coeff.begin());
      ct.ranges.push_back(r);
    }
    if (ct.ranges.empty())
      throw std::runtime_error("thermo JSON: compound " + it.key() +
                               " has no ranges");
    data[idx] = std::move(ct);
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < kCompoundCount; ++i)
    if (!seen[i])
      throw std::runtime_error(
          std::string("thermo JSON: missing compound ") +
          compound_name(static_cast<Compound>(i)));
  return ThermoTable(std::move(data));
}

ThermoTable ThermoTable::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open thermo table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace twc
