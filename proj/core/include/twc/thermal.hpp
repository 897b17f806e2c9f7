// Heat-balance ODE of the monolith state vector [T_1..T_N, Delta_T], the
// fixed-step RK4 integrator and the series coupling of the two monoliths.
//
// Sign conventions: Delta_T = periphery minus center (negative while the
// periphery lags). The radial exchange power P_rad carries the sign of
// Delta_T; the center row receives +P_rad and the periphery row -P_rad, so
// a colder periphery drains the center and heats the periphery.

#pragma once

#include <functional>
#include <vector>

#include "twc/core.hpp"
#include "twc/kinetics.hpp"
#include "twc/radial_profile.hpp"

namespace twc {

// Per-slice power terms (W). Vectors have one entry per axial slice.
struct PowerBreakdown {
  std::vector<double> axial_W;
  std::vector<double> radial_W;
  std::vector<double> convection_center_W;
  std::vector<double> convection_periphery_W;
  std::vector<double> exothermic_center_W;
  std::vector<double> exothermic_periphery_W;
  std::vector<double> ambient_W;
};

// Exhaust-side boundary condition for one instant.
struct EngineInput {
  double T_exh_C = 0.0;
  double mdot_exh_kg_per_s = 0.0;
  SpeciesFlows engine_out;
  int op_index = -1;
};

// Net conduction power between neighboring slices through the solid cross
// section; zero vector for a single slice.
std::vector<double> power_axial(const MonolithState& state,
                                const MonolithGeometry& geometry,
                                const ThermalParams& params);

// Center/periphery exchange through the half-radius cylinder shell; the same
// value is applied to every slice and shares the sign of Delta_T.
std::vector<double> power_radial(const MonolithState& state,
                                 const MonolithGeometry& geometry,
                                 const ThermalParams& params);

struct ConvectionPowers {
  std::vector<double> center_W;
  std::vector<double> periphery_W;
};

// Gas-to-wall convection under the within-slice equilibrium assumption.
ConvectionPowers power_convection(const MonolithState& state, double T_exh_C,
                                  double mdot_exh_kg_per_s,
                                  const ThermalParams& params);

struct ExothermicSplit {
  std::vector<double> center_W;
  std::vector<double> periphery_W;
};

// Linear weighting of the M x N cell powers into per-slice center/periphery
// contributions. With a single channel everything goes to the center.
ExothermicSplit weight_exothermic(const std::vector<double>& cell_powers_W,
                                  std::size_t channels, std::size_t slices);

// Conductive loss from the periphery through the insulation to ambient.
std::vector<double> power_ambient(const MonolithState& state,
                                  const MonolithGeometry& geometry,
                                  const ThermalParams& params);

PowerBreakdown assemble_powers(const MonolithState& state,
                               const MonolithGeometry& geometry,
                               const ThermalParams& params,
                               const EngineInput& input,
                               const std::vector<double>& cell_powers_W,
                               std::size_t channels);

// Time derivative of [T_1..T_N, Delta_T].
struct StateDerivative {
  std::vector<double> center_C_per_s;
  double delta_C_per_s = 0.0;
};

StateDerivative state_derivative(const MonolithState& state,
                                 const PowerBreakdown& powers,
                                 const MonolithGeometry& geometry,
                                 const ThermalParams& params);

// Joint state of the series-coupled pair.
struct SystemState {
  MonolithState twc1;
  MonolithState twc2;
};

// Perfect-mixing interface between the monoliths.
struct MixResult {
  double T_exh_C = 0.0;
  SpeciesFlows total;
  std::vector<SpeciesFlows> per_channel_inflow;
};

MixResult mix_intermonolith(const std::vector<double>& outlet_temps_C,
                            const std::vector<SpeciesFlows>& outlet_flows,
                            std::size_t downstream_channels);

// Engine drive sample fed to the system model: boundary conditions plus the
// fitted radial profile of the active operating point and bookkeeping values
// for the trajectory record.
struct EngineDrive {
  EngineInput input;
  RadialProfile profile1;
  RadialProfile profile2;
  double speed_rpm = 0.0;
  double bmep_bar = 0.0;
  double spark_angle = 0.0;
  double bsfc_g_per_kWh = 0.0;
  double power_kW = 0.0;
};

using DriveFunction = std::function<EngineDrive(double t_s)>;

// The full two-monolith plant.
class TwcSystemModel {
 public:
  TwcSystemModel(SystemSpec spec, const DiscSolutionLibrary* library,
                 const ThermoTable* thermo = &ThermoTable::builtin(),
                 GasConstants constants = GasConstants{});

  const SystemSpec& spec() const { return spec_; }
  const GasConstants& constants() const { return constants_; }
  const DiscSolutionLibrary& library() const { return *library_; }
  const ThermoTable& thermo() const { return *thermo_; }

  struct Evaluation {
    StateDerivative d1;
    StateDerivative d2;
    MonolithKineticsResult kin1;
    MonolithKineticsResult kin2;
    PowerBreakdown powers1;
    PowerBreakdown powers2;
    double T_exh_twc2_C = 0.0;
    std::vector<double> channel_temps1;  // [m * N1 + n]
    std::vector<double> channel_temps2;
  };

  // One right-hand-side evaluation; kinetics are recomputed from the given
  // state, so the RHS is a pure function of (state, drive).
  Evaluation evaluate(const SystemState& state,
                      const EngineDrive& drive) const;

  // Classical RK4 step with the drive held over the step; kinetics are
  // re-evaluated at every substage. Throws on non-finite derivatives,
  // naming the stage. When given, first_stage receives the stage-1
  // evaluation (the RHS at the step's start).
  SystemState step_rk4(const SystemState& state, const EngineDrive& drive,
                       double dt_s, Evaluation* first_stage = nullptr) const;

  std::vector<double> channel_temps(const MonolithState& state,
                                    const RadialProfile& profile,
                                    const MonolithGeometry& geometry,
                                    std::size_t channels) const;

  SystemState ambient_state() const;

 private:
  SystemSpec spec_;
  const DiscSolutionLibrary* library_;
  const ThermoTable* thermo_;
  GasConstants constants_;
  std::vector<double> weights1_;
  std::vector<double> weights2_;
};

// One recorded sample of a system simulation.
struct TrajectorySample {
  double t_s = 0.0;
  SystemState state;
  double speed_rpm = 0.0;
  double bmep_bar = 0.0;
  double spark_angle = 0.0;
  double bsfc_g_per_kWh = 0.0;
  double power_kW = 0.0;
  double mdot_exh_kg_per_s = 0.0;
  double T_exh_C = 0.0;
  double T_exh_twc2_C = 0.0;
  SpeciesFlows engine_out;
  SpeciesFlows mid_brick;         // TWC1 central channel, last slice
  SpeciesFlows tailpipe_total;    // mixed TWC2 outlet
  SpeciesFlows tailpipe_center;   // TWC2 central channel (measured location)
  std::array<double, kSpeciesCount> eta{};  // engine-out to mixed tailpipe
  PowerBreakdown powers1;
  PowerBreakdown powers2;
};

struct SystemTrajectory {
  double dt_s = 0.0;
  std::vector<TrajectorySample> samples;
};

SystemTrajectory simulate_system(const TwcSystemModel& model,
                                 const SystemState& initial,
                                 const DriveFunction& drive, double duration_s,
                                 double dt_s);

}  // namespace twc
