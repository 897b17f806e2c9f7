#include "twc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "twc/thermal.hpp"

namespace twc {

const std::vector<SteadyStateRow>& steady_state_rows() {
  static const std::vector<SteadyStateRow> rows = {
      {1000, 2, {12, 14, 16, 18, 20, 22, 24}},
      {1000, 5, {6, 8, 10, 12, 14, 16, 18}},
      {1000, 8, {-2, 2, 4}},
      {1500, 2, {12, 14, 16, 18, 20, 21, 22, 24}},
      {1500, 5, {6, 8, 10, 12, 14, 16, 18}},
      {1500, 8, {-2, 2, 4, 6, 8, 10}},
      {2000, 2, {16, 18, 20, 22, 24, 26, 28}},
      {2000, 5, {8, 10, 12, 14, 16, 18, 20}},
      {2000, 8, {2, 4, 6, 8, 10, 12}},
      {2000, 10, {-4, 4}},
      {2000, 12, {-2, 2, 4}},
      {2000, 14, {-2, 2}},
      {2500, 2, {14, 16, 18, 20, 22, 24, 26}},
      {2500, 5, {12, 14, 16, 18, 20, 22, 24}},
      {2500, 8, {8, 10, 12, 14, 16}},
      {2500, 13, {4, 6}},
      {3000, 8, {8, 10, 12, 14, 16, 18}},
  };
  return rows;
}

const std::vector<ColdStartLoadPoint>& coldstart_load_points() {
  static const std::vector<ColdStartLoadPoint> points = {
      {1, 1000, 2, 24}, {2, 1000, 5, 18}, {3, 1500, 5, 18}, {4, 1500, 2, 24},
      {5, 2000, 2, 28}, {6, 2000, 5, 20}, {7, 3000, 8, 18}, {8, 1000, 8, 4},
      {9, 1500, 8, 10}, {10, 2000, 8, 12},
  };
  return points;
}

namespace {

// Smooth plausible trends in (speed, BMEP, spark retard). Retard is measured
// from the efficiency-optimal (largest) spark angle of the row's sweep.
struct OperatingPointModel {
  double speed, bmep, sa, sa_retard;

  double bsfc() const {
    return (228.0 + 300.0 / (bmep + 0.35) +
            4.5e-6 * (speed - 1600.0) * (speed - 1600.0)) *
           (1.0 + 0.0045 * sa_retard);
  }
  double fuel_g_per_s() const {
    return bsfc() * brake_power_kW(speed, bmep) / 3600.0;
  }
  double mdot_exh_g_per_s() const {
    // Stoichiometric air plus fuel.
    return fuel_g_per_s() * (1.0 + 14.01);
  }
  double t_exh() const {
    return 380.0 + 0.115 * speed + 16.0 * bmep + 7.0 * sa_retard;
  }
  double co_ppm() const {
    return 5200.0 + 0.9 * speed + 90.0 * bmep - 50.0 * sa_retard;
  }
  double nox_ppm() const {
    return std::max(100.0, -250.0 + 55.0 * sa + 70.0 * bmep + 0.15 * speed);
  }
  double thc_ppm() const {
    return std::max(120.0, 900.0 - 0.12 * speed - 25.0 * bmep + 8.0 * sa_retard);
  }
  double y_co2() const { return 0.125 - 0.0006 * sa_retard; }
};

}  // namespace

EngineMap generate_engine_map(const DiscSolutionLibrary& library,
                              std::uint64_t seed,
                              const SyntheticMapOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);

  std::vector<OperatingPoint> points;
  const auto& rows = steady_state_rows();
  const std::size_t stride = std::max<std::size_t>(1, options.row_stride);
  for (std::size_t r = 0; r < rows.size(); r += stride) {
    const SteadyStateRow& row = rows[r];
    std::vector<double> sweep = row.spark_angles;
    if (options.sa_per_row > 0 && sweep.size() > options.sa_per_row) {
      // Keep the ends of the sweep (most retarded and ECU-default) plus
      // evenly spaced interior values.
      std::vector<double> reduced;
      const std::size_t n = options.sa_per_row;
      for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 1.0
                                : static_cast<double>(i) /
                                      static_cast<double>(n - 1);
        reduced.push_back(
            sweep[static_cast<std::size_t>(std::round(f * (sweep.size() - 1)))]);
      }
      sweep = std::move(reduced);
    }
    const double sa_ref = *std::max_element(row.spark_angles.begin(),
                                            row.spark_angles.end());
    for (double sa : sweep) {
      const OperatingPointModel m{row.speed_rpm, row.bmep_bar, sa,
                                  sa_ref - sa};
      OperatingPoint p;
      p.speed_rpm = row.speed_rpm;
      p.bmep_bar = row.bmep_bar;
      p.spark_angle_CAbTDC = sa;
      p.mdot_exh_kg_per_s = m.mdot_exh_g_per_s() * 1e-3;
      p.bsfc_g_per_kWh = m.bsfc() + 0.4 * jitter(rng);
      p.T_exh_C = m.t_exh() + 2.0 * jitter(rng);
      p.engine_out_ppm = {m.co_ppm() + 30.0 * jitter(rng),
                          m.nox_ppm() + 15.0 * jitter(rng),
                          m.thc_ppm() + 8.0 * jitter(rng)};
      p.y_CO2 = m.y_co2();
      p.power_kW = brake_power_kW(p.speed_rpm, p.bmep_bar);

      // Steady radial profile consistent with the disc solution family: the
      // brick runs slightly below the inlet gas, with a rim drop that grows
      // at low flow.
      const double mdot_gps = p.mdot_exh_kg_per_s * 1e3;
      const double tt0 = p.T_exh_C - 8.0 - 120.0 / mdot_gps;
      const double drop = 18.0 + 160.0 / mdot_gps;
      const double frac =
          std::clamp(0.55 + 0.002 * mdot_gps, 0.30, 0.90);
      const auto t_idx = static_cast<std::size_t>(
          std::round(frac * static_cast<double>(library.n_times() - 1)));
      const double v0 = library.value_at(t_idx, 0);
      for (std::size_t i = 0; i < kProfileSampleCount; ++i) {
        const double r = static_cast<double>(i) /
                         static_cast<double>(kProfileSampleCount - 1);
        const double that = library.value_at_radius(t_idx, r);
        p.radial_temps_C[i] = (drop / v0) * that + (tt0 - drop);
      }
      p.fitted_profile = fit_profile_time(library, p.radial_temps_C);
      points.push_back(std::move(p));
    }
  }
  return EngineMap(std::move(points));
}

namespace {

// First-order dispersion lag followed by additive relative noise and the
// nonnegativity clamp of a real analyzer chain.
std::vector<double> instrument_chain(const std::vector<double>& truth,
                                     double dt_s, double delay_s, double tau_s,
                                     double noise_level, std::mt19937_64& rng) {
  const std::size_t n = truth.size();
  const auto shift = static_cast<std::size_t>(std::llround(delay_s / dt_s));
  std::vector<double> delayed(n, truth.empty() ? 0.0 : truth.front());
  for (std::size_t i = 0; i < n; ++i)
    delayed[i] = truth[i >= shift ? i - shift : 0];

  std::vector<double> lagged(n, 0.0);
  if (tau_s > 0.0) {
    double y = delayed.front();
    const double alpha = dt_s / tau_s;
    for (std::size_t i = 0; i < n; ++i) {
      y += alpha * (delayed[i] - y);
      lagged[i] = y;
    }
  } else {
    lagged = delayed;
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = noise_level * std::abs(lagged[i]);
    lagged[i] = std::max(0.0, lagged[i] + sigma * gauss(rng));
  }
  return lagged;
}

}  // namespace

std::vector<ColdStartRun> generate_coldstart_runs(
    const SystemSpec& truth, const EngineMap& map,
    const DiscSolutionLibrary& library, std::uint64_t seed,
    const SyntheticRunOptions& options) {
  TwcSystemModel model(truth, &library);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<ColdStartRun> runs;
  for (const ColdStartLoadPoint& lp : coldstart_load_points()) {
    const auto found = map.find(lp.speed_rpm, lp.bmep_bar, lp.spark_angle);
    if (!found)
      throw std::runtime_error(
          "generate_coldstart_runs: load point missing from the engine map");
    const std::size_t op_index = *found;
    const EngineDrive drive =
        map.point(op_index).drive(static_cast<int>(op_index),
                                  model.constants());
    const SystemTrajectory traj =
        simulate_system(model, model.ambient_state(),
                        [&](double) { return drive; }, options.duration_s,
                        options.dt_s);

    ColdStartRun run;
    run.load_point = lp.index;
    run.op_index = op_index;
    run.dt_s = options.dt_s;
    const std::size_t n = traj.samples.size();
    run.t_s.resize(n);
    run.twc1_states.resize(n);
    run.twc2_states.resize(n);

    std::array<std::vector<double>, 3> eo_truth, mid_truth, tp_truth;
    for (auto* series : {&eo_truth, &mid_truth, &tp_truth})
      for (auto& v : *series) v.resize(n);

    for (std::size_t k = 0; k < n; ++k) {
      const TrajectorySample& s = traj.samples[k];
      run.t_s[k] = s.t_s;
      run.twc1_states[k] = s.state.twc1;
      run.twc2_states[k] = s.state.twc2;
      // Thermocouple noise: relative to the span above ambient.
      const double t_amb = truth.twc1.thermal.T_amb_C;
      auto jitter_temp = [&](double t) {
        return t + options.noise_level * std::max(5.0, std::abs(t - t_amb)) *
                       gauss(rng);
      };
      for (auto& t : run.twc1_states[k].slice_center_temps_C)
        t = jitter_temp(t);
      run.twc1_states[k].radial_delta_C = jitter_temp(
          run.twc1_states[k].radial_delta_C + t_amb) - t_amb;
      for (auto& t : run.twc2_states[k].slice_center_temps_C)
        t = jitter_temp(t);
      run.twc2_states[k].radial_delta_C = jitter_temp(
          run.twc2_states[k].radial_delta_C + t_amb) - t_amb;

      const std::array<Species, 3> sp = {Species::CO, Species::NOx,
                                         Species::THC};
      for (std::size_t s_i = 0; s_i < 3; ++s_i) {
        eo_truth[s_i][k] = s.engine_out[sp[s_i]];
        mid_truth[s_i][k] = s.mid_brick[sp[s_i]];
        tp_truth[s_i][k] = s.tailpipe_center[sp[s_i]];
      }
    }

    for (std::size_t s_i = 0; s_i < 3; ++s_i) {
      run.engine_out[s_i] = instrument_chain(
          eo_truth[s_i], options.dt_s, options.instrument_delay_s,
          options.instrument_tau_s, options.noise_level, rng);
      run.mid_brick[s_i] = instrument_chain(
          mid_truth[s_i], options.dt_s, options.instrument_delay_s,
          options.instrument_tau_s, options.noise_level, rng);
      run.tailpipe[s_i] = instrument_chain(
          tp_truth[s_i], options.dt_s, options.instrument_delay_s,
          options.instrument_tau_s, options.noise_level, rng);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace twc
