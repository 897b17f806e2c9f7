// Chemical kinetics of an M x N cell grid: Arrhenius reaction rates,
// plug-flow residence times, explicit exponential species conversion and the
// exothermic power released per cell.

#pragma once

#include <cstddef>
#include <vector>

#include "twc/core.hpp"
#include "twc/thermo.hpp"

namespace twc {

// k = A exp(-E_a / (R T)), T in Celsius. Throws at or below absolute zero.
double arrhenius_rate(double pre_exponential_A,
                      double activation_energy_J_per_mol, double temp_C,
                      double R_universal = 8.31446261815324);

// Plug-flow residence time of slice n: OFA L_n pi R^2 / (mdot R_spec T / p).
double residence_time(const MonolithGeometry& geometry,
                      std::size_t slice_index, double mdot_exh_kg_per_s,
                      double cell_temp_C, double p_twc_pa,
                      const GasConstants& constants);

// Water-gas-shift estimate of the engine-out H2/H2O mole fractions from the
// measured CO and CO2 mole fractions.
struct H2Estimate {
  double y_H2 = 0.0;
  double y_H2O = 0.0;
};
H2Estimate estimate_h2(double y_CO, double y_CO2,
                       const GasConstants& constants);

// Converts an engine-out mole fraction to a species massflow assuming the
// bulk exhaust molar mass implied by R_specific.
double mole_fraction_to_massflow(double mole_fraction,
                                 double mdot_exh_kg_per_s, Species s,
                                 const GasConstants& constants);

// Result of one cell: what flowed out, what converted, and the exothermic
// power released by the conversion.
struct CellResult {
  SpeciesFlows outflow;
  SpeciesFlows converted;
  double exothermic_power_W = 0.0;
};

// Closed-form conversion over one residence time: out = in * exp(-k t_r).
// Power is not filled here (see cell_power).
CellResult cell_convert(const SpeciesFlows& inflow,
                        const std::array<double, kSpeciesCount>& rates_per_s,
                        double residence_time_s);

// Exothermic power P = sum_s converted_s / M_s * dH_s(T).
double cell_power(const SpeciesFlows& converted, double temp_C,
                  const ThermoTable& thermo, const GasConstants& constants);

// Full monolith evaluation. Channel m (outer index) receives weight_m of the
// inlet flows and chains axially through N cells at the given temperatures.
struct MonolithKineticsResult {
  std::size_t channels = 0;
  std::size_t slices = 0;
  std::vector<CellResult> cells;  // [m * slices + n]
  SpeciesFlows tailpipe;          // sum of last-slice outflows
  std::array<double, kSpeciesCount> conversion_efficiency{};  // eta per species

  const CellResult& cell(std::size_t channel, std::size_t slice) const {
    return cells[channel * slices + slice];
  }
  // Outflow of the radially central channel's last slice (the measured
  // mid-brick location).
  const SpeciesFlows& central_channel_outflow() const {
    return cell(0, slices - 1).outflow;
  }
  // Total exothermic power of slice n in channel m, arranged for the
  // thermal weighting.
  double cell_power_W(std::size_t channel, std::size_t slice) const {
    return cell(channel, slice).exothermic_power_W;
  }
};

// channel_temps_C is [channel][slice] flattened as channel * slices + slice.
MonolithKineticsResult monolith_kinetics(
    const std::vector<double>& channel_temps_C, std::size_t channels,
    const SpeciesFlows& inlet, const std::vector<double>& channel_weights,
    const MonolithGeometry& geometry, const KineticParams& params,
    double mdot_exh_kg_per_s, double p_twc_pa, const ThermoTable& thermo,
    const GasConstants& constants);

}  // namespace twc
