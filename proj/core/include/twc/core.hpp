// Shared domain types for the two-monolith three-way-catalyst model.
//
// Unit conventions: SI throughout, except temperatures which are stored in
// degrees Celsius in all states, parameters and files. Conversions to Kelvin
// happen only inside physics formulas (Arrhenius, ideal gas, enthalpy
// polynomials).

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace twc {

inline constexpr double kCelsiusToKelvin = 273.15;

inline double to_kelvin(double temp_c) { return temp_c + kCelsiusToKelvin; }

// Emission species tracked through the kinetics model. NOx and THC are lumped
// species (99:1 NO:NO2 and 3:1 C3H6:C3H8). H2 is not measured; its
// concentration is estimated from CO/CO2 and its rate parameters mirror CO's.
enum class Species : int { CO = 0, NOx = 1, THC = 2, H2 = 3 };

inline constexpr std::size_t kSpeciesCount = 4;
inline constexpr std::array<Species, kSpeciesCount> kAllSpecies = {
    Species::CO, Species::NOx, Species::THC, Species::H2};

const char* species_name(Species s);

// Per-species massflows in kg/s.
struct SpeciesFlows {
  std::array<double, kSpeciesCount> kg_per_s{0.0, 0.0, 0.0, 0.0};

  double& operator[](Species s) { return kg_per_s[static_cast<int>(s)]; }
  double operator[](Species s) const { return kg_per_s[static_cast<int>(s)]; }

  SpeciesFlows scaled(double factor) const;
  SpeciesFlows operator+(const SpeciesFlows& o) const;
  SpeciesFlows operator-(const SpeciesFlows& o) const;
  double total() const;
  bool all_nonnegative() const;
  bool all_finite() const;
};

// Geometry of one cylindrical monolith with N axial slices of (possibly)
// unequal length and square channels of width l_c and wall thickness t_w.
struct MonolithGeometry {
  double length_total_m = 0.0;
  double radius_m = 0.0;
  std::vector<double> slice_lengths_m;           // N entries, sum == length
  std::vector<double> slice_center_distances_m;  // N-1 entries
  double wall_thickness_m = 0.0;
  double channel_width_m = 0.0;
  double mass_kg = 0.0;

  std::size_t slice_count() const { return slice_lengths_m.size(); }
  double open_frontal_area() const;
  double frontal_area_m2() const;  // pi R^2

  // Fills slice_center_distances_m as (L_n + L_{n+1}) / 2.
  void derive_center_distances();
};

// Open frontal area of a square-channel monolith: (l_c - t_w)^2 / l_c^2.
// Throws std::domain_error unless 0 <= t_w < l_c.
double open_frontal_area(double channel_width_m, double wall_thickness_m);

// Channel width / wall thickness pair reproducing a given OFA at a reference
// channel width. Used when a datasheet specifies OFA instead of (l_c, t_w).
std::pair<double, double> channel_dims_from_ofa(double ofa,
                                                double channel_width_m = 1e-3);

// Temperature state of one monolith: radially central temperatures of the N
// axial slices plus one shared center/periphery difference. The periphery of
// slice n is slice_center_temps_C[n] + radial_delta_C.
struct MonolithState {
  std::vector<double> slice_center_temps_C;
  double radial_delta_C = 0.0;

  std::size_t slice_count() const { return slice_center_temps_C.size(); }
};

// Operational envelope guard for states (not a physical bound).
inline constexpr double kMinStateTempC = -100.0;
inline constexpr double kMaxStateTempC = 1200.0;

struct ThermalParams {
  double k_ax_W_per_mK = 0.0;
  double k_rad_W_per_mK = 0.0;
  double k_amb_W_per_mK = 0.0;
  double t_amb_m = 0.0;
  double cp_J_per_kgK = 0.0;
  double cp_exh_J_per_kgK = 0.0;
  double T_amb_C = 25.0;
};

struct ArrheniusParams {
  double pre_exponential_A = 0.0;
  double activation_energy_J_per_mol = 0.0;
};

// Per-species Arrhenius rate parameters. H2 always mirrors CO.
struct KineticParams {
  std::array<ArrheniusParams, kSpeciesCount> by_species{};

  ArrheniusParams& operator[](Species s) {
    return by_species[static_cast<int>(s)];
  }
  const ArrheniusParams& operator[](Species s) const {
    return by_species[static_cast<int>(s)];
  }

  // Sets CO/NOx/THC parameters and copies CO into H2.
  static KineticParams from_measured(const ArrheniusParams& co,
                                     const ArrheniusParams& nox,
                                     const ArrheniusParams& thc);
  void mirror_h2_from_co() { (*this)[Species::H2] = (*this)[Species::CO]; }
};

// Physical constants and composition ratios of the exhaust gas model.
struct GasConstants {
  double R_universal_J_per_molK = 8.31446261815324;
  // Specific gas constant of the bulk exhaust (N2/CO2/H2O/O2 mix).
  double R_specific_exh_J_per_kgK = 292.0;
  // Water-gas shift equilibrium constant used in the H2 estimate.
  double watergas_K = 3.8;
  // Fuel hydrogen/carbon ratio m'/(2n') for the H2 estimate.
  double fuel_HC_ratio_m_over_2n = 0.258;
  // Mole fraction of NO within lumped NOx (99:1 NO:NO2).
  double NO_fraction = 0.99;
  // Mole fraction of C3H6 within lumped THC (3:1 C3H6:C3H8).
  double C3H6_fraction = 0.75;
  // Molar masses of the lumped kinetic species, kg/mol.
  std::array<double, kSpeciesCount> molar_mass_kg_per_mol{
      28.0101e-3,    // CO
      30.166094e-3,  // NOx = 0.99 M_NO + 0.01 M_NO2
      42.583675e-3,  // THC = 0.75 M_C3H6 + 0.25 M_C3H8
      2.01588e-3,    // H2
  };

  double molar_mass(Species s) const {
    return molar_mass_kg_per_mol[static_cast<int>(s)];
  }
  // Mean molar mass of the bulk exhaust implied by R_specific.
  double exhaust_molar_mass_kg_per_mol() const {
    return R_universal_J_per_molK / R_specific_exh_J_per_kgK;
  }
};

// Full parameter set of one monolith.
struct MonolithSpec {
  std::string name;
  MonolithGeometry geometry;
  ThermalParams thermal;
  KineticParams kinetics;
};

// The series-coupled pair plus shared operating conditions.
struct SystemSpec {
  MonolithSpec twc1;
  MonolithSpec twc2;
  double p_twc_pa = 101325.0;
  int channels = 100;  // radial channels M resolved per monolith
};

// Validation. Returns human-readable descriptions of violated invariants;
// empty means valid.
std::vector<std::string> validate_geometry(const MonolithGeometry& g,
                                           const std::string& label);
std::vector<std::string> validate_state(const MonolithState& s,
                                        const std::string& label);
std::vector<std::string> validate_thermal(const ThermalParams& p,
                                          const std::string& label);
std::vector<std::string> validate_kinetics(const KineticParams& k,
                                           const std::string& label);
std::vector<std::string> validate_system(const SystemSpec& spec);

// JSON round trip for the system spec. Field names match the struct members.
// Geometry accepts either (channel_width_m, wall_thickness_m) or
// open_frontal_area; slice_center_distances_m is derived when absent.
SystemSpec system_spec_from_json_text(const std::string& text);
SystemSpec load_system_spec(const std::string& path);
std::string system_spec_to_json_text(const SystemSpec& spec);
void save_system_spec(const SystemSpec& spec, const std::string& path);

// Reference parameter set: the tuned two-monolith system used as default
// for simulation and as ground truth for synthetic data.
SystemSpec reference_system_spec();

}  // namespace twc
