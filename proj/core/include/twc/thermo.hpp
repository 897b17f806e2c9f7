// Temperature-dependent heats of reaction from Shomate enthalpy polynomials.

#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <string>
#include <vector>

#include "twc/core.hpp"

namespace twc {

enum class Compound : int {
  CO = 0,
  CO2,
  O2,
  N2,
  H2,
  H2O,
  NO,
  NO2,
  C3H6,
  C3H8,
};
inline constexpr std::size_t kCompoundCount = 10;

const char* compound_name(Compound c);

// One Shomate coefficient set, valid on [T_min_K, T_max_K]. With t = T/1000:
//   H(T) - H(298.15) = A t + B t^2/2 + C t^3/3 + D t^4/4 - E/t + F - H
// in kJ/mol, where the H constant equals the standard formation enthalpy.
struct ShomateRange {
  double T_min_K = 0.0;
  double T_max_K = 0.0;
  std::array<double, 8> coeff{};  // A, B, C, D, E, F, G, H
};

struct CompoundThermo {
  std::vector<ShomateRange> ranges;       // ascending, contiguous
  double formation_enthalpy_kJ_per_mol = 0.0;
  double molar_mass_kg_per_mol = 0.0;
};

class ThermoTable {
 public:
  // Built-in reference data (NIST WebBook coefficient sets where published;
  // fitted polynomial sets for C3H6/C3H8).
  static const ThermoTable& builtin();

  // Loads a table from a JSON resource file:
  //   { "CO": { "formation_enthalpy_kJ_per_mol": ..,
  //             "molar_mass_kg_per_mol": ..,
  //             "ranges": [ { "T_min_K":.., "T_max_K":..,
  //                           "coeff": [A,B,C,D,E,F,G,H] }, .. ] }, .. }
  static ThermoTable load_json(const std::string& path);
  static ThermoTable from_json_text(const std::string& text);

  explicit ThermoTable(std::array<CompoundThermo, kCompoundCount> data)
      : data_(std::move(data)) {}

  const CompoundThermo& compound(Compound c) const {
    return data_[static_cast<int>(c)];
  }

  // Absolute molar enthalpy (formation enthalpy + Shomate increment), J/mol.
  // Temperatures below the lowest range clamp to its start (logged once);
  // temperatures above the highest range raise std::out_of_range naming the
  // compound and its covered range.
  double enthalpy_J_per_mol(Compound c, double temp_C) const;

  // Heat released per mole of converted lumped species (positive for
  // exothermic), J/mol. NOx = (99 dH_NO + dH_NO2)/100 and
  // THC = (3 dH_C3H6 + dH_C3H8)/4; the NO path credits only the heat beyond
  // the CO oxidation already accounted by the converted CO.
  double heat_of_reaction_J_per_mol(Species s, double temp_C,
                                    const GasConstants& constants) const;

  bool low_temperature_clamped() const { return clamp_warned_.load(); }

 private:
  std::array<CompoundThermo, kCompoundCount> data_;
  mutable std::atomic<bool> clamp_warned_{false};
};

// Signed reaction enthalpies per mole of the named reactant (J/mol, negative
// for exothermic). Exposed separately for tests of the lumping convexity.
double reaction_enthalpy_CO(const ThermoTable& t, double temp_C);
double reaction_enthalpy_H2(const ThermoTable& t, double temp_C);
double reaction_enthalpy_NO(const ThermoTable& t, double temp_C);
double reaction_enthalpy_NO2(const ThermoTable& t, double temp_C);
double reaction_enthalpy_C3H6(const ThermoTable& t, double temp_C);
double reaction_enthalpy_C3H8(const ThermoTable& t, double temp_C);

}  // namespace twc
