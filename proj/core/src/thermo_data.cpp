// Built-in thermodynamic reference data.
//
// CO, CO2, O2, N2, H2, H2O, NO and NO2 use Shomate coefficient sets from the
// NIST Chemistry WebBook (Chase 1998). Two adjustments keep the table
// consistent over the model's working range:
//   - H2O's first range is applied from 298.15 K instead of its published
//     500 K start; the F constant anchors the increment to zero at 298.15 K,
//     so the extension is exact at the anchor (checked to 5e-4 kJ/mol).
//   - NO's second-range F is re-anchored (73.10787 -> 72.231983) to make the
//     enthalpy continuous at 500 K; heat capacities are unchanged.
// C3H6 and C3H8 are quadratic Shomate-form fits to tabulated gas-phase heat
// capacities, anchored to the standard formation enthalpies.

#include "twc/thermo.hpp"

namespace twc {

namespace {

CompoundThermo make(double dhf_kJ, double molar_mass,
                    std::vector<ShomateRange> ranges) {
  CompoundThermo ct;
  ct.formation_enthalpy_kJ_per_mol = dhf_kJ;
  ct.molar_mass_kg_per_mol = molar_mass;
  ct.ranges = std::move(ranges);
  return ct;
}

std::array<CompoundThermo, kCompoundCount> builtin_data() {
  std::array<CompoundThermo, kCompoundCount> d{};

  d[static_cast<int>(Compound::CO)] = make(
      -110.5271, 28.0101e-3,
      {{298.15, 1300.0,
        {25.56759, 6.096130, 4.054656, -2.671301, 0.131021, -118.0089,
         227.3665, -110.5271}},
       {1300.0, 1500.0,
        {35.15070, 1.300095, -0.205921, 0.013550, -3.282780, -127.8375,
         231.7120, -110.5271}}});

  d[static_cast<int>(Compound::CO2)] = make(
      -393.5224, 44.0095e-3,
      {{298.15, 1200.0,
        {24.99735, 55.18696, -33.69137, 7.948387, -0.136638, -403.6075,
         228.2431, -393.5224}},
       {1200.0, 6000.0,
        {58.16639, 2.720074, -0.492289, 0.038844, -6.447293, -425.9186,
         263.6125, -393.5224}}});

  d[static_cast<int>(Compound::O2)] = make(
      0.0, 31.9988e-3,
      {{100.0, 700.0,
        {31.32234, -20.23531, 57.86644, -36.50624, -0.007374, -8.903471,
         246.7945, 0.0}},
       {700.0, 2000.0,
        {30.03235, 8.772972, -3.988133, 0.788313, -0.741599, -11.32468,
         236.1663, 0.0}},
       {2000.0, 6000.0,
        {20.91111, 10.72071, -2.020498, 0.146449, 9.245722, 5.337651,
         237.6185, 0.0}}});

  d[static_cast<int>(Compound::N2)] = make(
      0.0, 28.0134e-3,
      {{100.0, 500.0,
        {28.98641, 1.853978, -9.647459, 16.63537, 0.000117, -8.671914,
         226.4168, 0.0}},
       {500.0, 2000.0,
        {19.50583, 19.88705, -8.598535, 1.369784, 0.527601, -4.935202,
         212.3900, 0.0}},
       {2000.0, 6000.0,
        {35.51872, 1.128728, -0.196103, 0.014662, -4.553760, -18.97091,
         224.9810, 0.0}}});

  d[static_cast<int>(Compound::H2)] = make(
      0.0, 2.01588e-3,
      {{298.15, 1000.0,
        {33.066178, -11.363417, 11.432816, -2.772874, -0.158558, -9.980797,
         172.707974, 0.0}},
       {1000.0, 2500.0,
        {18.563083, 12.257357, -2.859786, 0.268238, 1.977990, -1.147438,
         156.288133, 0.0}},
       {2500.0, 6000.0,
        {43.413560, -4.293079, 1.272428, -0.096876, -20.533862, -38.515158,
         162.081354, 0.0}}});

  d[static_cast<int>(Compound::H2O)] = make(
      -241.8264, 18.01528e-3,
      {{298.15, 1700.0,
        {30.09200, 6.832514, 6.793435, -2.534480, 0.082139, -250.8810,
         223.3967, -241.8264}},
       {1700.0, 6000.0,
        {41.96426, 8.622053, -1.499780, 0.098119, -11.15764, -272.1797,
         219.7809, -241.8264}}});

  d[static_cast<int>(Compound::NO)] = make(
      90.29114, 30.0061e-3,
      {{100.0, 500.0,
        {23.83491, 12.58878, -1.139011, -1.497459, 0.214194, 83.35783,
         237.1219, 90.29114}},
       {500.0, 1500.0,
        {35.99169, 0.95717, -0.148032, 0.009974, -3.004088, 72.231983,
         246.1619, 90.29114}}});

  d[static_cast<int>(Compound::NO2)] = make(
      33.09502, 46.0055e-3,
      {{298.15, 1200.0,
        {16.10857, 75.89525, -54.38740, 14.30777, 0.239423, 26.17464,
         240.5386, 33.09502}},
       {1200.0, 6000.0,
        {56.82541, 0.738053, -0.144721, 0.009777, -5.459911, 2.846456,
         290.5056, 33.09502}}});

  d[static_cast<int>(Compound::C3H6)] = make(
      20.41, 42.0797e-3,
      {{298.15, 1500.0,
        {24.802266, 145.561540, -43.663969, 0.0, 0.0, 6.931223, 0.0,
         20.41}}});

  d[static_cast<int>(Compound::C3H8)] = make(
      -104.68, 44.0956e-3,
      {{298.15, 1500.0,
        {28.491410, 165.495620, -47.629274, 0.0, 0.0, -120.109668, 0.0,
         -104.68}}});

  return d;
}

}  // namespace

const ThermoTable& ThermoTable::builtin() {
  static const ThermoTable table(builtin_data());
  return table;
}

}  // namespace twc
