#include "twc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "twc/csv.hpp"
#include "twc/kinetics.hpp"
#include "twc/parallel.hpp"

namespace twc {

ColdStartRun load_coldstart_run(const std::string& path,
                                std::size_t twc1_slices,
                                std::size_t twc2_slices) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty())
    throw std::runtime_error(path + ": cold-start run has no samples");
  ColdStartRun run;
  run.load_point = static_cast<int>(table.at(0, "load_point"));
  run.op_index = static_cast<std::size_t>(table.at(0, "op_index"));
  const std::size_t n = table.rows.size();
  run.t_s.resize(n);
  run.twc1_states.resize(n);
  run.twc2_states.resize(n);
  static const std::array<std::string, 3> kSpeciesCols = {"co", "nox", "thc"};
  for (auto& v : run.engine_out) v.resize(n);
  for (auto& v : run.mid_brick) v.resize(n);
  for (auto& v : run.tailpipe) v.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    run.t_s[r] = table.at(r, "t_s");
    MonolithState& s1 = run.twc1_states[r];
    s1.slice_center_temps_C.resize(twc1_slices);
    for (std::size_t i = 0; i < twc1_slices; ++i)
      s1.slice_center_temps_C[i] =
          table.at(r, "twc1_t" + std::to_string(i + 1) + "_c");
    s1.radial_delta_C = table.at(r, "twc1_dt_c");
    MonolithState& s2 = run.twc2_states[r];
    s2.slice_center_temps_C.resize(twc2_slices);
    for (std::size_t i = 0; i < twc2_slices; ++i)
      s2.slice_center_temps_C[i] =
          table.at(r, "twc2_t" + std::to_string(i + 1) + "_c");
    s2.radial_delta_C = table.at(r, "twc2_dt_c");
    for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s) {
      run.engine_out[s][r] = table.at(r, "eo_" + kSpeciesCols[s] + "_mgps") * 1e-6;
      run.mid_brick[s][r] = table.at(r, "mid_" + kSpeciesCols[s] + "_mgps") * 1e-6;
      run.tailpipe[s][r] = table.at(r, "tp_" + kSpeciesCols[s] + "_mgps") * 1e-6;
    }
  }
  if (n >= 2) run.dt_s = run.t_s[1] - run.t_s[0];
  for (std::size_t r = 1; r < n; ++r) {
    if (std::abs((run.t_s[r] - run.t_s[r - 1]) - run.dt_s) > 1e-6)
      throw std::runtime_error(path + ": non-uniform sample times");
  }
  return run;
}

void save_coldstart_run(const ColdStartRun& run, const std::string& path,
                        const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cold-start run: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  const std::size_t n1 = run.twc1_states.empty()
                             ? 0
                             : run.twc1_states[0].slice_count();
  const std::size_t n2 = run.twc2_states.empty()
                             ? 0
                             : run.twc2_states[0].slice_count();
  out << "t_s";
  for (std::size_t i = 0; i < n1; ++i) out << ",twc1_t" << (i + 1) << "_c";
  out << ",twc1_dt_c";
  for (std::size_t i = 0; i < n2; ++i) out << ",twc2_t" << (i + 1) << "_c";
  out << ",twc2_dt_c,op_index,load_point";
  for (const char* loc : {"eo", "mid", "tp"})
    for (const char* sp : {"co", "nox", "thc"})
      out << ',' << loc << '_' << sp << "_mgps";
  out << "\n";
  out.precision(10);
  for (std::size_t r = 0; r < run.samples(); ++r) {
    out << run.t_s[r];
    for (std::size_t i = 0; i < n1; ++i)
      out << ',' << run.twc1_states[r].slice_center_temps_C[i];
    out << ',' << run.twc1_states[r].radial_delta_C;
    for (std::size_t i = 0; i < n2; ++i)
      out << ',' << run.twc2_states[r].slice_center_temps_C[i];
    out << ',' << run.twc2_states[r].radial_delta_C;
    out << ',' << run.op_index << ',' << run.load_point;
    for (const auto* series : {&run.engine_out, &run.mid_brick, &run.tailpipe})
      for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s)
        out << ',' << (*series)[s][r] * 1e6;
    out << "\n";
  }
}

std::vector<double> preprocess_measurements(const std::vector<double>& raw,
                                            double dt_s, double delay_s,
                                            double hp_time_constant_s) {
  if (delay_s < 0.0)
    throw std::domain_error("preprocess_measurements: delay must be >= 0");
  const std::size_t n = raw.size();
  const auto shift =
      static_cast<std::size_t>(std::llround(delay_s / dt_s));
  if (shift >= n && n > 0)
    throw std::runtime_error(
        "preprocess_measurements: delay exceeds series length");
  // Advance by the propagation delay; the tail holds the last sample.
  std::vector<double> shifted(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    shifted[i] = raw[std::min(i + shift, n - 1)];
  if (hp_time_constant_s <= 0.0) return shifted;

  // First-order lead y + tau dy/dt undoes the instrument dispersion lag.
  // The derivative uses a lightly smoothed central difference to keep the
  // tau/dt gain from amplifying sample noise.
  std::vector<double> smooth(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    int cnt = 0;
    for (long j = static_cast<long>(i) - 2; j <= static_cast<long>(i) + 2;
         ++j) {
      if (j < 0 || j >= static_cast<long>(n)) continue;
      acc += shifted[static_cast<std::size_t>(j)];
      ++cnt;
    }
    smooth[i] = acc / cnt;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deriv;
    if (i == 0)
      deriv = (smooth[1] - smooth[0]) / dt_s;
    else if (i + 1 == n)
      deriv = (smooth[n - 1] - smooth[n - 2]) / dt_s;
    else
      deriv = (smooth[i + 1] - smooth[i - 1]) / (2.0 * dt_s);
    out[i] = std::max(0.0, shifted[i] + hp_time_constant_s * deriv);
  }
  return out;
}

void preprocess_run_flows(ColdStartRun& run, double delay_s,
                          double hp_time_constant_s) {
  for (auto* series : {&run.engine_out, &run.mid_brick, &run.tailpipe})
    for (auto& channel : *series)
      channel = preprocess_measurements(channel, run.dt_s, delay_s,
                                        hp_time_constant_s);
}

PatternSearchResult pattern_search(const Objective& objective,
                                   const std::vector<double>& x0,
                                   const std::vector<double>& lower,
                                   const std::vector<double>& upper,
                                   const PatternSearchOptions& options) {
  const std::size_t dim = x0.size();
  if (lower.size() != dim || upper.size() != dim)
    throw std::invalid_argument("pattern_search: bound dimensions mismatch");
  std::vector<double> span(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(lower[i] <= x0[i] && x0[i] <= upper[i]))
      throw std::invalid_argument("pattern_search: x0 outside bounds");
    span[i] = upper[i] - lower[i];
  }

  PatternSearchResult result;
  result.x = x0;
  result.value = objective(x0);
  result.evaluations = 1;
  if (!std::isfinite(result.value))
    throw std::runtime_error("pattern_search: objective non-finite at x0");

  double mesh = options.initial_mesh;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (mesh < options.mesh_tolerance) {
      result.converged = true;
      break;
    }
    result.iterations = iter + 1;

    // Complete 2N positive-basis poll around the incumbent.
    std::vector<std::vector<double>> poll;
    poll.reserve(2 * dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (double sign : {+1.0, -1.0}) {
        std::vector<double> p = result.x;
        p[i] = std::clamp(p[i] + sign * mesh * span[i], lower[i], upper[i]);
        poll.push_back(std::move(p));
      }
    }
    std::vector<double> values(poll.size(), 0.0);
    if (options.parallel_poll) {
      parallel_for(poll.size(),
                   [&](std::size_t i) { values[i] = objective(poll[i]); });
    } else {
      for (std::size_t i = 0; i < poll.size(); ++i)
        values[i] = objective(poll[i]);
    }
    result.evaluations += static_cast<long>(poll.size());

    std::size_t best = 0;
    for (std::size_t i = 1; i < poll.size(); ++i)
      if (values[i] < values[best]) best = i;

    if (std::isfinite(values[best]) && values[best] < result.value) {
      result.x = poll[best];
      result.value = values[best];
      mesh = std::min(mesh * options.mesh_expansion, options.max_mesh);
    } else {
      mesh *= options.mesh_contraction;
    }
  }
  if (mesh < options.mesh_tolerance) result.converged = true;
  return result;
}

KineticParams scale_twc2_kinetics(const KineticParams& params_twc1,
                                  double washcoat_thickness_ratio,
                                  double loading_ratio) {
  if (washcoat_thickness_ratio <= 0.0 || loading_ratio <= 0.0)
    throw std::domain_error("scale_twc2_kinetics: ratios must be > 0");
  const double factor = washcoat_thickness_ratio * loading_ratio;
  KineticParams out = params_twc1;
  for (Species s : kAllSpecies) out[s].pre_exponential_A *= factor;
  out.mirror_h2_from_co();
  return out;
}

std::optional<double> cumulative_error(const std::vector<double>& sim,
                                       const std::vector<double>& meas) {
  if (sim.size() != meas.size())
    throw std::invalid_argument("cumulative_error: series lengths differ");
  double sum_sim = 0.0, sum_meas = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    sum_sim += sim[i];
    sum_meas += meas[i];
  }
  if (sum_meas == 0.0) return std::nullopt;
  return sum_sim / sum_meas - 1.0;
}

CalibrationSession::CalibrationSession(SystemSpec initial_spec,
                                       const EngineMap* map,
                                       const DiscSolutionLibrary* library,
                                       std::vector<ColdStartRun> runs,
                                       DatasetSplit split)
    : spec_(std::move(initial_spec)),
      map_(map),
      library_(library),
      runs_(std::move(runs)),
      split_(std::move(split)) {
  if (map_ == nullptr || library_ == nullptr)
    throw std::invalid_argument("CalibrationSession: map and library required");
  if (runs_.empty())
    throw std::invalid_argument("CalibrationSession: no runs supplied");
}

std::vector<const ColdStartRun*> CalibrationSession::split_runs(
    bool train) const {
  const auto& wanted = train ? split_.train : split_.valid;
  std::vector<const ColdStartRun*> out;
  for (const auto& run : runs_)
    if (std::find(wanted.begin(), wanted.end(), run.load_point) != wanted.end())
      out.push_back(&run);
  return out;
}

double CalibrationSession::kinetics_objective(
    const KineticParams& candidate) const {
  const auto channels = static_cast<std::size_t>(spec_.channels);
  const double w1 = channel_massflow_weights(channels)[0];
  const MonolithGeometry& geo = spec_.twc1.geometry;
  const GasConstants constants;
  const double r1 = 0.5 / static_cast<double>(channels);

  double objective = 0.0;
  for (const ColdStartRun* run : split_runs(true)) {
    const OperatingPoint& op = map_->point(run->op_index);
    const RadialProfile profile = op.fitted_profile;
    const double that_r1 =
        profile.flat() ? 1.0
                       : library_->value_at_radius(
                             static_cast<std::size_t>(profile.time_index), r1);
    const double that_0 =
        profile.flat() ? 1.0
                       : library_->value_at(
                             static_cast<std::size_t>(profile.time_index), 0);
    for (std::size_t k = 0; k < run->samples(); ++k) {
      const MonolithState& state = run->twc1_states[k];
      std::array<double, kMeasuredSpeciesCount> flow{};
      for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s)
        flow[s] = run->engine_out[s][k] * w1;
      for (std::size_t n = 0; n < geo.slice_count(); ++n) {
        // Central channel temperature from the measured state.
        const double t_n = state.slice_center_temps_C[n];
        const double delta = state.radial_delta_C;
        const double temp =
            profile.flat() ? t_n
                           : (-delta / that_0) * that_r1 + (t_n + delta);
        const double t_r = residence_time(geo, n, op.mdot_exh_kg_per_s, temp,
                                          spec_.p_twc_pa, constants);
        for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s) {
          const auto& p = candidate.by_species[s];
          const double rate = arrhenius_rate(
              p.pre_exponential_A, p.activation_energy_J_per_mol, temp,
              constants.R_universal_J_per_molK);
          flow[s] *= std::exp(-rate * t_r);
        }
      }
      for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s)
        objective += std::abs(flow[s] - run->mid_brick[s][k]);
    }
  }
  return objective;
}

PatternSearchResult CalibrationSession::calibrate_kinetics(
    const KineticParams& initial, const KineticsBounds& bounds,
    const PatternSearchOptions& options, double twc2_activity_ratio) {
  // Search space: [log10 A_CO, log10 A_NOx, log10 A_THC, Ea_CO, Ea_NOx,
  // Ea_THC], each normalized to [0, 1]. A is polled logarithmically.
  const auto decode = [&](const std::vector<double>& x) {
    KineticParams p;
    for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s) {
      const double log_a = bounds.log10_A_min +
                           x[s] * (bounds.log10_A_max - bounds.log10_A_min);
      const double ea =
          bounds.Ea_min + x[3 + s] * (bounds.Ea_max - bounds.Ea_min);
      p.by_species[s] = {std::pow(10.0, log_a), ea};
    }
    p.mirror_h2_from_co();
    return p;
  };
  const auto encode1 = [](double v, double lo, double hi) {
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  };
  std::vector<double> x0(6, 0.0);
  for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s) {
    x0[s] = encode1(std::log10(initial.by_species[s].pre_exponential_A),
                    bounds.log10_A_min, bounds.log10_A_max);
    x0[3 + s] = encode1(initial.by_species[s].activation_energy_J_per_mol,
                        bounds.Ea_min, bounds.Ea_max);
  }
  const Objective objective = [&](const std::vector<double>& x) {
    return kinetics_objective(decode(x));
  };
  PatternSearchResult result =
      pattern_search(objective, x0, std::vector<double>(6, 0.0),
                     std::vector<double>(6, 1.0), options);
  spec_.twc1.kinetics = decode(result.x);
  spec_.twc2.kinetics =
      scale_twc2_kinetics(spec_.twc1.kinetics, twc2_activity_ratio, 1.0);
  kinetics_calibrated_ = true;
  return result;
}

SystemTrajectory CalibrationSession::simulate_run(
    const ColdStartRun& run) const {
  TwcSystemModel model(spec_, library_);
  const OperatingPoint& op = map_->point(run.op_index);
  const EngineDrive drive = op.drive(static_cast<int>(run.op_index),
                                     model.constants());
  SystemState initial;
  initial.twc1 = run.twc1_states.front();
  initial.twc2 = run.twc2_states.front();
  const double duration = static_cast<double>(run.samples()) * run.dt_s;
  return simulate_system(model, initial, [&](double) { return drive; },
                         duration, run.dt_s);
}

double CalibrationSession::thermal_objective(
    const MonolithSpec& twc1_candidate, const MonolithSpec& twc2_candidate,
    bool compare_twc1) const {
  if (!kinetics_calibrated_)
    throw std::logic_error(
        "thermal_objective: kinetics must be calibrated first");
  SystemSpec candidate = spec_;
  candidate.twc1 = twc1_candidate;
  candidate.twc2 = twc2_candidate;
  TwcSystemModel model(candidate, library_);

  double objective = 0.0;
  for (const ColdStartRun* run : split_runs(true)) {
    const OperatingPoint& op = map_->point(run->op_index);
    const EngineDrive drive =
        op.drive(static_cast<int>(run->op_index), model.constants());
    SystemState state;
    state.twc1 = run->twc1_states.front();
    state.twc2 = run->twc2_states.front();
    for (std::size_t k = 0; k < run->samples(); ++k) {
      const MonolithState& sim =
          compare_twc1 ? state.twc1 : state.twc2;
      const MonolithState& meas =
          compare_twc1 ? run->twc1_states[k] : run->twc2_states[k];
      for (std::size_t i = 0; i < meas.slice_count(); ++i)
        objective += std::abs(meas.slice_center_temps_C[i] -
                              sim.slice_center_temps_C[i]);
      objective += std::abs(meas.radial_delta_C - sim.radial_delta_C);
      if (k + 1 < run->samples())
        state = model.step_rk4(state, drive, run->dt_s);
    }
  }
  return objective;
}

std::pair<PatternSearchResult, PatternSearchResult>
CalibrationSession::calibrate_thermal(const ThermalBounds& bounds,
                                      const PatternSearchOptions& options) {
  if (!kinetics_calibrated_)
    throw std::logic_error(
        "calibrate_thermal: kinetics must be calibrated first");

  // Stage 1: TWC1 (k_ax, k_rad, k_amb, cp, L_1..L_{N-1}); the last slice
  // length is the remainder, kept above the L/5 equilibrium bound by an
  // extreme barrier.
  const MonolithGeometry geo1 = spec_.twc1.geometry;
  const std::size_t n_len = geo1.slice_count() - 1;
  const double len_lo = geo1.length_total_m / 5.0;
  const double len_hi = geo1.length_total_m * 3.0 / 5.0;

  const auto decode1 = [&](const std::vector<double>& x) {
    MonolithSpec m = spec_.twc1;
    m.thermal.k_ax_W_per_mK =
        bounds.conductivity_min +
        x[0] * (bounds.conductivity_max - bounds.conductivity_min);
    m.thermal.k_rad_W_per_mK =
        bounds.conductivity_min +
        x[1] * (bounds.conductivity_max - bounds.conductivity_min);
    m.thermal.k_amb_W_per_mK =
        bounds.conductivity_min +
        x[2] * (bounds.conductivity_max - bounds.conductivity_min);
    m.thermal.cp_J_per_kgK = bounds.cp_min + x[3] * (bounds.cp_max - bounds.cp_min);
    double used = 0.0;
    for (std::size_t i = 0; i < n_len; ++i) {
      m.geometry.slice_lengths_m[i] = len_lo + x[4 + i] * (len_hi - len_lo);
      used += m.geometry.slice_lengths_m[i];
    }
    m.geometry.slice_lengths_m[n_len] = m.geometry.length_total_m - used;
    m.geometry.derive_center_distances();
    return m;
  };
  const auto encode1 = [](double v, double lo, double hi) {
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  };
  std::vector<double> x0;
  x0.push_back(encode1(spec_.twc1.thermal.k_ax_W_per_mK,
                       bounds.conductivity_min, bounds.conductivity_max));
  x0.push_back(encode1(spec_.twc1.thermal.k_rad_W_per_mK,
                       bounds.conductivity_min, bounds.conductivity_max));
  x0.push_back(encode1(spec_.twc1.thermal.k_amb_W_per_mK,
                       bounds.conductivity_min, bounds.conductivity_max));
  x0.push_back(encode1(spec_.twc1.thermal.cp_J_per_kgK, bounds.cp_min,
                       bounds.cp_max));
  for (std::size_t i = 0; i < n_len; ++i)
    x0.push_back(encode1(geo1.slice_lengths_m[i], len_lo, len_hi));

  const Objective obj1 = [&](const std::vector<double>& x) {
    const MonolithSpec cand = decode1(x);
    const double last = cand.geometry.slice_lengths_m.back();
    if (last < len_lo - 1e-12 || last <= 0.0)
      return std::numeric_limits<double>::infinity();
    return thermal_objective(cand, spec_.twc2, true);
  };
  PatternSearchResult r1 =
      pattern_search(obj1, x0, std::vector<double>(x0.size(), 0.0),
                     std::vector<double>(x0.size(), 1.0), options);
  spec_.twc1 = decode1(r1.x);

  // Stage 2: TWC2 (k_rad, k_amb, cp); no axial conduction with one slice.
  const auto decode2 = [&](const std::vector<double>& x) {
    MonolithSpec m = spec_.twc2;
    m.thermal.k_rad_W_per_mK =
        bounds.conductivity_min +
        x[0] * (bounds.conductivity_max - bounds.conductivity_min);
    m.thermal.k_amb_W_per_mK =
        bounds.conductivity_min +
        x[1] * (bounds.conductivity_max - bounds.conductivity_min);
    m.thermal.cp_J_per_kgK = bounds.cp_min + x[2] * (bounds.cp_max - bounds.cp_min);
    return m;
  };
  std::vector<double> y0;
  y0.push_back(encode1(spec_.twc2.thermal.k_rad_W_per_mK,
                       bounds.conductivity_min, bounds.conductivity_max));
  y0.push_back(encode1(spec_.twc2.thermal.k_amb_W_per_mK,
                       bounds.conductivity_min, bounds.conductivity_max));
  y0.push_back(encode1(spec_.twc2.thermal.cp_J_per_kgK, bounds.cp_min,
                       bounds.cp_max));
  const Objective obj2 = [&](const std::vector<double>& x) {
    return thermal_objective(spec_.twc1, decode2(x), false);
  };
  PatternSearchResult r2 =
      pattern_search(obj2, y0, std::vector<double>(y0.size(), 0.0),
                     std::vector<double>(y0.size(), 1.0), options);
  spec_.twc2 = decode2(r2.x);
  return {r1, r2};
}

std::vector<CalibrationReportRow> CalibrationSession::accuracy_report() const {
  std::vector<CalibrationReportRow> rows;
  for (const auto& run : runs_) {
    const SystemTrajectory traj = simulate_run(run);
    CalibrationReportRow row;
    row.load_point = run.load_point;
    row.in_train_split =
        std::find(split_.train.begin(), split_.train.end(), run.load_point) !=
        split_.train.end();
    const std::size_t n = std::min(traj.samples.size(), run.samples());
    for (std::size_t s = 0; s < kMeasuredSpeciesCount; ++s) {
      std::vector<double> sim(n, 0.0), meas(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        sim[k] = traj.samples[k].tailpipe_center.kg_per_s[s];
        meas[k] = run.tailpipe[s][k];
      }
      row.delta[s] = cumulative_error(sim, meas);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace twc
