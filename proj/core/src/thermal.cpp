#include "twc/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace twc {

std::vector<double> power_axial(const MonolithState& state,
                                const MonolithGeometry& geometry,
                                const ThermalParams& params) {
  const std::size_t n = state.slice_count();
  std::vector<double> p(n, 0.0);
  if (n < 2) return p;
  const double area =
      (1.0 - geometry.open_frontal_area()) * geometry.frontal_area_m2();
  // q[i] = k (T_{i+1} - T_i) / L_{i,i+1}: positive when the downstream slice
  // is hotter, i.e. heat arriving at slice i.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double flux = params.k_ax_W_per_mK *
                        (state.slice_center_temps_C[i + 1] -
                         state.slice_center_temps_C[i]) /
                        geometry.slice_center_distances_m[i];
    p[i] += flux * area;
    p[i + 1] -= flux * area;
  }
  return p;
}

std::vector<double> power_radial(const MonolithState& state,
                                 const MonolithGeometry& geometry,
                                 const ThermalParams& params) {
  const double flux = params.k_rad_W_per_mK * state.radial_delta_C /
                      (geometry.radius_m / 2.0);
  const double power =
      flux * M_PI * geometry.radius_m * geometry.length_total_m;
  return std::vector<double>(state.slice_count(), power);
}

ConvectionPowers power_convection(const MonolithState& state, double T_exh_C,
                                  double mdot_exh_kg_per_s,
                                  const ThermalParams& params) {
  const std::size_t n = state.slice_count();
  ConvectionPowers out;
  out.center_W.assign(n, 0.0);
  out.periphery_W.assign(n, 0.0);
  if (mdot_exh_kg_per_s <= 0.0) return out;
  const double mc = mdot_exh_kg_per_s * params.cp_exh_J_per_kgK;
  double prev_center = T_exh_C;
  double prev_periphery = T_exh_C;
  for (std::size_t i = 0; i < n; ++i) {
    const double center = state.slice_center_temps_C[i];
    const double periphery = center + state.radial_delta_C;
    out.center_W[i] = mc * (prev_center - center);
    out.periphery_W[i] = mc * (prev_periphery - periphery);
    prev_center = center;
    prev_periphery = periphery;
  }
  return out;
}

ExothermicSplit weight_exothermic(const std::vector<double>& cell_powers_W,
                                  std::size_t channels, std::size_t slices) {
  if (channels == 0 || cell_powers_W.size() != channels * slices)
    throw std::invalid_argument("weight_exothermic: bad cell power shape");
  ExothermicSplit out;
  out.center_W.assign(slices, 0.0);
  out.periphery_W.assign(slices, 0.0);
  for (std::size_t m = 0; m < channels; ++m) {
    const double w_per =
        channels == 1 ? 0.0
                      : static_cast<double>(m) /
                            static_cast<double>(channels - 1);
    for (std::size_t n = 0; n < slices; ++n) {
      const double p = cell_powers_W[m * slices + n];
      out.center_W[n] += p * (1.0 - w_per);
      out.periphery_W[n] += p * w_per;
    }
  }
  return out;
}

std::vector<double> power_ambient(const MonolithState& state,
                                  const MonolithGeometry& geometry,
                                  const ThermalParams& params) {
  if (params.t_amb_m <= 0.0)
    throw std::domain_error("power_ambient: insulation thickness must be > 0");
  const std::size_t n = state.slice_count();
  std::vector<double> p(n, 0.0);
  const double area =
      2.0 * M_PI * geometry.radius_m * geometry.length_total_m;
  for (std::size_t i = 0; i < n; ++i) {
    const double periphery =
        state.slice_center_temps_C[i] + state.radial_delta_C;
    const double flux =
        params.k_amb_W_per_mK * (periphery - params.T_amb_C) / params.t_amb_m;
    p[i] = flux * area;
  }
  return p;
}

PowerBreakdown assemble_powers(const MonolithState& state,
                               const MonolithGeometry& geometry,
                               const ThermalParams& params,
                               const EngineInput& input,
                               const std::vector<double>& cell_powers_W,
                               std::size_t channels) {
  PowerBreakdown p;
  p.axial_W = power_axial(state, geometry, params);
  p.radial_W = power_radial(state, geometry, params);
  ConvectionPowers con = power_convection(state, input.T_exh_C,
                                          input.mdot_exh_kg_per_s, params);
  p.convection_center_W = std::move(con.center_W);
  p.convection_periphery_W = std::move(con.periphery_W);
  ExothermicSplit exo =
      weight_exothermic(cell_powers_W, channels, state.slice_count());
  p.exothermic_center_W = std::move(exo.center_W);
  p.exothermic_periphery_W = std::move(exo.periphery_W);
  p.ambient_W = power_ambient(state, geometry, params);
  return p;
}

StateDerivative state_derivative(const MonolithState& state,
                                 const PowerBreakdown& powers,
                                 const MonolithGeometry& geometry,
                                 const ThermalParams& params) {
  const std::size_t n = state.slice_count();
  StateDerivative d;
  d.center_C_per_s.assign(n, 0.0);
  double weighted_diff_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w_l = geometry.slice_lengths_m[i] / geometry.length_total_m;
    const double heat_capacity = geometry.mass_kg * w_l * params.cp_J_per_kgK;
    const double p_center = powers.axial_W[i] + powers.radial_W[i] +
                            powers.convection_center_W[i] +
                            powers.exothermic_center_W[i];
    const double p_periphery = powers.axial_W[i] - powers.radial_W[i] +
                               powers.convection_periphery_W[i] +
                               powers.exothermic_periphery_W[i] -
                               powers.ambient_W[i];
    const double d_center = p_center / heat_capacity;
    const double d_periphery = p_periphery / heat_capacity;
    d.center_C_per_s[i] = d_center;
    weighted_diff_sum += w_l * (d_periphery - d_center);
  }
  // N * mean(W_L (dT_per - dT_ctr))
  d.delta_C_per_s = weighted_diff_sum;  // N * (1/N) * sum
  return d;
}

MixResult mix_intermonolith(const std::vector<double>& outlet_temps_C,
                            const std::vector<SpeciesFlows>& outlet_flows,
                            std::size_t downstream_channels) {
  if (outlet_temps_C.empty() || outlet_temps_C.size() != outlet_flows.size())
    throw std::invalid_argument("mix_intermonolith: mismatched outlet data");
  const auto upstream_weights = channel_massflow_weights(outlet_temps_C.size());
  MixResult mix;
  for (std::size_t m = 0; m < outlet_temps_C.size(); ++m) {
    mix.T_exh_C += upstream_weights[m] * outlet_temps_C[m];
    mix.total = mix.total + outlet_flows[m];
  }
  const auto downstream_weights = channel_massflow_weights(downstream_channels);
  mix.per_channel_inflow.reserve(downstream_channels);
  for (double w : downstream_weights)
    mix.per_channel_inflow.push_back(mix.total.scaled(w));
  return mix;
}

TwcSystemModel::TwcSystemModel(SystemSpec spec,
                               const DiscSolutionLibrary* library,
                               const ThermoTable* thermo,
                               GasConstants constants)
    : spec_(std::move(spec)),
      library_(library),
      thermo_(thermo),
      constants_(constants),
      weights1_(channel_massflow_weights(
          static_cast<std::size_t>(spec_.channels))),
      weights2_(channel_massflow_weights(
          static_cast<std::size_t>(spec_.channels))) {
  if (library_ == nullptr)
    throw std::invalid_argument("TwcSystemModel: disc library required");
}

std::vector<double> TwcSystemModel::channel_temps(
    const MonolithState& state, const RadialProfile& profile,
    const MonolithGeometry& geometry, std::size_t channels) const {
  const std::size_t slices = geometry.slice_count();
  std::vector<double> grid(channels * slices, 0.0);
  for (std::size_t n = 0; n < slices; ++n) {
    const auto temps = interpolate_channel_temps(
        *library_, profile, state.slice_center_temps_C[n],
        state.radial_delta_C, channels);
    for (std::size_t m = 0; m < channels; ++m) grid[m * slices + n] = temps[m];
  }
  return grid;
}

namespace {

MonolithKineticsResult zero_kinetics(std::size_t channels,
                                     std::size_t slices) {
  MonolithKineticsResult r;
  r.channels = channels;
  r.slices = slices;
  r.cells.assign(channels * slices, CellResult{});
  return r;
}

std::vector<double> cell_power_grid(const MonolithKineticsResult& kin) {
  std::vector<double> p(kin.cells.size(), 0.0);
  for (std::size_t i = 0; i < kin.cells.size(); ++i)
    p[i] = kin.cells[i].exothermic_power_W;
  return p;
}

}  // namespace

TwcSystemModel::Evaluation TwcSystemModel::evaluate(
    const SystemState& state, const EngineDrive& drive) const {
  const auto channels = static_cast<std::size_t>(spec_.channels);
  Evaluation ev;

  ev.channel_temps1 = channel_temps(state.twc1, drive.profile1,
                                    spec_.twc1.geometry, channels);
  const bool flowing = drive.input.mdot_exh_kg_per_s > 0.0;
  ev.kin1 = flowing
                ? monolith_kinetics(ev.channel_temps1, channels,
                                    drive.input.engine_out, weights1_,
                                    spec_.twc1.geometry, spec_.twc1.kinetics,
                                    drive.input.mdot_exh_kg_per_s,
                                    spec_.p_twc_pa, *thermo_, constants_)
                : zero_kinetics(channels, spec_.twc1.geometry.slice_count());
  ev.powers1 = assemble_powers(state.twc1, spec_.twc1.geometry,
                               spec_.twc1.thermal, drive.input,
                               cell_power_grid(ev.kin1), channels);
  ev.d1 = state_derivative(state.twc1, ev.powers1, spec_.twc1.geometry,
                           spec_.twc1.thermal);

  // Mix the TWC1 outlet and feed the second monolith.
  const std::size_t slices1 = spec_.twc1.geometry.slice_count();
  std::vector<double> outlet_temps(channels, 0.0);
  std::vector<SpeciesFlows> outlet_flows(channels);
  for (std::size_t m = 0; m < channels; ++m) {
    outlet_temps[m] = ev.channel_temps1[m * slices1 + (slices1 - 1)];
    outlet_flows[m] = ev.kin1.cell(m, slices1 - 1).outflow;
  }
  const MixResult mix = mix_intermonolith(outlet_temps, outlet_flows, channels);
  ev.T_exh_twc2_C = mix.T_exh_C;

  EngineInput input2 = drive.input;
  input2.T_exh_C = mix.T_exh_C;
  input2.engine_out = mix.total;

  ev.channel_temps2 = channel_temps(state.twc2, drive.profile2,
                                    spec_.twc2.geometry, channels);
  ev.kin2 = flowing
                ? monolith_kinetics(ev.channel_temps2, channels, mix.total,
                                    weights2_, spec_.twc2.geometry,
                                    spec_.twc2.kinetics,
                                    drive.input.mdot_exh_kg_per_s,
                                    spec_.p_twc_pa, *thermo_, constants_)
                : zero_kinetics(channels, spec_.twc2.geometry.slice_count());
  ev.powers2 = assemble_powers(state.twc2, spec_.twc2.geometry,
                               spec_.twc2.thermal, input2,
                               cell_power_grid(ev.kin2), channels);
  ev.d2 = state_derivative(state.twc2, ev.powers2, spec_.twc2.geometry,
                           spec_.twc2.thermal);
  return ev;
}

namespace {

SystemState apply_step(const SystemState& base, const StateDerivative& d1,
                       const StateDerivative& d2, double h) {
  SystemState out = base;
  for (std::size_t i = 0; i < out.twc1.slice_center_temps_C.size(); ++i)
    out.twc1.slice_center_temps_C[i] += h * d1.center_C_per_s[i];
  out.twc1.radial_delta_C += h * d1.delta_C_per_s;
  for (std::size_t i = 0; i < out.twc2.slice_center_temps_C.size(); ++i)
    out.twc2.slice_center_temps_C[i] += h * d2.center_C_per_s[i];
  out.twc2.radial_delta_C += h * d2.delta_C_per_s;
  return out;
}

bool derivative_finite(const StateDerivative& d) {
  for (double v : d.center_C_per_s)
    if (!std::isfinite(v)) return false;
  return std::isfinite(d.delta_C_per_s);
}

}  // namespace

SystemState TwcSystemModel::step_rk4(const SystemState& state,
                                     const EngineDrive& drive, double dt_s,
                                     Evaluation* first_stage) const {
  if (dt_s <= 0.0) throw std::domain_error("step_rk4: dt must be > 0");

  std::array<std::pair<StateDerivative, StateDerivative>, 4> k;
  const std::array<double, 4> offsets = {0.0, 0.5 * dt_s, 0.5 * dt_s, dt_s};
  SystemState stage_state = state;
  for (int stage = 0; stage < 4; ++stage) {
    if (stage > 0)
      stage_state = apply_step(state, k[stage - 1].first,
                               k[stage - 1].second, offsets[stage]);
    Evaluation ev = evaluate(stage_state, drive);
    if (!derivative_finite(ev.d1) || !derivative_finite(ev.d2))
      throw std::runtime_error("step_rk4: non-finite derivative at stage " +
                               std::to_string(stage + 1));
    k[stage] = {ev.d1, ev.d2};
    if (stage == 0 && first_stage != nullptr) *first_stage = std::move(ev);
  }

  SystemState out = state;
  auto combine = [dt_s](double k1, double k2, double k3, double k4) {
    return dt_s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  for (std::size_t i = 0; i < out.twc1.slice_center_temps_C.size(); ++i)
    out.twc1.slice_center_temps_C[i] +=
        combine(k[0].first.center_C_per_s[i], k[1].first.center_C_per_s[i],
                k[2].first.center_C_per_s[i], k[3].first.center_C_per_s[i]);
  out.twc1.radial_delta_C +=
      combine(k[0].first.delta_C_per_s, k[1].first.delta_C_per_s,
              k[2].first.delta_C_per_s, k[3].first.delta_C_per_s);
  for (std::size_t i = 0; i < out.twc2.slice_center_temps_C.size(); ++i)
    out.twc2.slice_center_temps_C[i] +=
        combine(k[0].second.center_C_per_s[i], k[1].second.center_C_per_s[i],
                k[2].second.center_C_per_s[i], k[3].second.center_C_per_s[i]);
  out.twc2.radial_delta_C +=
      combine(k[0].second.delta_C_per_s, k[1].second.delta_C_per_s,
              k[2].second.delta_C_per_s, k[3].second.delta_C_per_s);
  return out;
}

SystemState TwcSystemModel::ambient_state() const {
  SystemState s;
  s.twc1.slice_center_temps_C.assign(spec_.twc1.geometry.slice_count(),
                                     spec_.twc1.thermal.T_amb_C);
  s.twc1.radial_delta_C = 0.0;
  s.twc2.slice_center_temps_C.assign(spec_.twc2.geometry.slice_count(),
                                     spec_.twc2.thermal.T_amb_C);
  s.twc2.radial_delta_C = 0.0;
  return s;
}

SystemTrajectory simulate_system(const TwcSystemModel& model,
                                 const SystemState& initial,
                                 const DriveFunction& drive, double duration_s,
                                 double dt_s) {
  if (duration_s < 0.0)
    throw std::domain_error("simulate_system: duration must be >= 0");
  if (dt_s <= 0.0)
    throw std::domain_error("simulate_system: dt must be > 0");

  SystemTrajectory traj;
  traj.dt_s = dt_s;
  const auto steps = static_cast<std::size_t>(std::round(duration_s / dt_s));
  traj.samples.reserve(steps);

  SystemState state = initial;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    const EngineDrive d = drive(t);
    TwcSystemModel::Evaluation ev = model.evaluate(state, d);

    TrajectorySample sample;
    sample.t_s = t;
    sample.state = state;
    sample.speed_rpm = d.speed_rpm;
    sample.bmep_bar = d.bmep_bar;
    sample.spark_angle = d.spark_angle;
    sample.bsfc_g_per_kWh = d.bsfc_g_per_kWh;
    sample.power_kW = d.power_kW;
    sample.mdot_exh_kg_per_s = d.input.mdot_exh_kg_per_s;
    sample.T_exh_C = d.input.T_exh_C;
    sample.T_exh_twc2_C = ev.T_exh_twc2_C;
    sample.engine_out = d.input.engine_out;
    sample.mid_brick = ev.kin1.central_channel_outflow();
    sample.tailpipe_total = ev.kin2.tailpipe;
    sample.tailpipe_center = ev.kin2.central_channel_outflow();
    for (std::size_t s = 0; s < kSpeciesCount; ++s) {
      const double in = d.input.engine_out.kg_per_s[s];
      sample.eta[s] =
          in > 0.0 ? 1.0 - sample.tailpipe_total.kg_per_s[s] / in : 0.0;
    }
    sample.powers1 = ev.powers1;
    sample.powers2 = ev.powers2;
    traj.samples.push_back(std::move(sample));

    state = model.step_rk4(state, d, dt_s);
  }
  return traj;
}

}  // namespace twc
