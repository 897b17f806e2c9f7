#include "twc/kinetics.hpp"

#include <cmath>
#include <stdexcept>

namespace twc {

double arrhenius_rate(double pre_exponential_A,
                      double activation_energy_J_per_mol, double temp_C,
                      double R_universal) {
  const double T_K = to_kelvin(temp_C);
  if (T_K <= 0.0)
    throw std::domain_error(
        "arrhenius_rate: temperature at or below absolute zero");
  return pre_exponential_A *
         std::exp(-activation_energy_J_per_mol / (R_universal * T_K));
}

double residence_time(const MonolithGeometry& geometry,
                      std::size_t slice_index, double mdot_exh_kg_per_s,
                      double cell_temp_C, double p_twc_pa,
                      const GasConstants& constants) {
  if (mdot_exh_kg_per_s <= 0.0)
    throw std::domain_error("residence_time: massflow must be > 0");
  if (p_twc_pa <= 0.0)
    throw std::domain_error("residence_time: pressure must be > 0");
  const double gas_volume = geometry.open_frontal_area() *
                            geometry.slice_lengths_m.at(slice_index) *
                            geometry.frontal_area_m2();
  // Ideal-gas volumetric flow rate of the bulk exhaust.
  const double volume_flow = mdot_exh_kg_per_s *
                             constants.R_specific_exh_J_per_kgK *
                             to_kelvin(cell_temp_C) / p_twc_pa;
  return gas_volume / volume_flow;
}

H2Estimate estimate_h2(double y_CO, double y_CO2,
                       const GasConstants& constants) {
  if (y_CO < 0.0)
    throw std::domain_error("estimate_h2: y_CO must be >= 0");
  if (y_CO2 <= 0.0) {
    if (y_CO > 0.0)
      throw std::domain_error("estimate_h2: y_CO2 must be > 0 when CO is "
                              "present");
    return {};
  }
  const double K = constants.watergas_K;
  const double r = constants.fuel_HC_ratio_m_over_2n;
  const double y_H2O = r * (y_CO + y_CO2) /
                       (1.0 + y_CO / (K * y_CO2) + r * (y_CO + y_CO2));
  const double y_H2 = y_H2O * y_CO / (K * y_CO2);
  return {y_H2, y_H2O};
}

double mole_fraction_to_massflow(double mole_fraction,
                                 double mdot_exh_kg_per_s, Species s,
                                 const GasConstants& constants) {
  return mole_fraction * mdot_exh_kg_per_s * constants.molar_mass(s) /
         constants.exhaust_molar_mass_kg_per_mol();
}

CellResult cell_convert(const SpeciesFlows& inflow,
                        const std::array<double, kSpeciesCount>& rates_per_s,
                        double residence_time_s) {
  if (residence_time_s < 0.0)
    throw std::domain_error("cell_convert: residence time must be >= 0");
  CellResult out;
  for (std::size_t i = 0; i < kSpeciesCount; ++i) {
    const double remaining = std::exp(-rates_per_s[i] * residence_time_s);
    out.outflow.kg_per_s[i] = inflow.kg_per_s[i] * remaining;
    out.converted.kg_per_s[i] = inflow.kg_per_s[i] - out.outflow.kg_per_s[i];
  }
  return out;
}

double cell_power(const SpeciesFlows& converted, double temp_C,
                  const ThermoTable& thermo, const GasConstants& constants) {
  double power = 0.0;
  for (Species s : kAllSpecies) {
    const double conv = converted[s];
    if (conv == 0.0) continue;
    power += conv / constants.molar_mass(s) *
             thermo.heat_of_reaction_J_per_mol(s, temp_C, constants);
  }
  return power;
}

MonolithKineticsResult monolith_kinetics(
    const std::vector<double>& channel_temps_C, std::size_t channels,
    const SpeciesFlows& inlet, const std::vector<double>& channel_weights,
    const MonolithGeometry& geometry, const KineticParams& params,
    double mdot_exh_kg_per_s, double p_twc_pa, const ThermoTable& thermo,
    const GasConstants& constants) {
  const std::size_t slices = geometry.slice_count();
  if (channels == 0 || channel_temps_C.size() != channels * slices)
    throw std::invalid_argument(
        "monolith_kinetics: channel temperature grid has wrong shape");
  if (channel_weights.size() != channels)
    throw std::invalid_argument(
        "monolith_kinetics: need one massflow weight per channel");

  MonolithKineticsResult result;
  result.channels = channels;
  result.slices = slices;
  result.cells.resize(channels * slices);

  for (std::size_t m = 0; m < channels; ++m) {
    SpeciesFlows flow = inlet.scaled(channel_weights[m]);
    for (std::size_t n = 0; n < slices; ++n) {
      const double temp = channel_temps_C[m * slices + n];
      const double t_r = residence_time(geometry, n, mdot_exh_kg_per_s, temp,
                                        p_twc_pa, constants);
      std::array<double, kSpeciesCount> rates{};
      for (std::size_t s = 0; s < kSpeciesCount; ++s)
        rates[s] = arrhenius_rate(
            params.by_species[s].pre_exponential_A,
            params.by_species[s].activation_energy_J_per_mol, temp,
            constants.R_universal_J_per_molK);
      CellResult cell = cell_convert(flow, rates, t_r);
      cell.exothermic_power_W =
          cell_power(cell.converted, temp, thermo, constants);
      flow = cell.outflow;
      result.cells[m * slices + n] = std::move(cell);
    }
    result.tailpipe = result.tailpipe + flow;
  }

  for (std::size_t s = 0; s < kSpeciesCount; ++s) {
    const double in = inlet.kg_per_s[s];
    result.conversion_efficiency[s] =
        in > 0.0 ? 1.0 - result.tailpipe.kg_per_s[s] / in : 0.0;
  }
  return result;
}

}  // namespace twc
