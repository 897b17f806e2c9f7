// Derivative-free tuning of the kinetic and thermal parameters against
// measured cold-start time series, and the cumulative-accuracy metrics.
//
// The protocol is two-staged: reaction-rate parameters first (driven by the
// measured temperature evolution, so the stages stay decoupled), thermal
// parameters second (which need the exothermic power and therefore the
// rates).

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twc/core.hpp"
#include "twc/engine_map.hpp"
#include "twc/radial_profile.hpp"
#include "twc/thermal.hpp"

namespace twc {

// Measured emission series are CO/NOx/THC only (H2 is not measured).
inline constexpr std::size_t kMeasuredSpeciesCount = 3;
using MeasuredFlowSeries =
    std::array<std::vector<double>, kMeasuredSpeciesCount>;  // kg/s

// One cold-start recording at a fixed load point, sampled at 10 Hz.
struct ColdStartRun {
  int load_point = 0;  // 1-based cold-start load point index
  std::size_t op_index = 0;  // row in the engine map
  double dt_s = 0.1;
  std::vector<double> t_s;
  std::vector<MonolithState> twc1_states;
  std::vector<MonolithState> twc2_states;
  MeasuredFlowSeries engine_out;
  MeasuredFlowSeries mid_brick;   // after TWC1, radially central channel
  MeasuredFlowSeries tailpipe;    // after TWC2, radially central channel

  std::size_t samples() const { return t_s.size(); }
};

// CSV schema: t_s, twc1_t1_c..twc1_tN_c, twc1_dt_c, twc2_t1_c, twc2_dt_c,
// op_index, load_point, then eo_/mid_/tp_{co,nox,thc}_mgps columns.
ColdStartRun load_coldstart_run(const std::string& path,
                                std::size_t twc1_slices = 3,
                                std::size_t twc2_slices = 1);
void save_coldstart_run(const ColdStartRun& run, const std::string& path,
                        const std::string& provenance);

// Train/validation split over the ten cold-start load points.
struct DatasetSplit {
  std::vector<int> train = {1, 3, 5, 7, 9};
  std::vector<int> valid = {2, 4, 6, 8, 10};
};

// Instrument compensation: shift earlier by the propagation delay
// (nearest-sample, tail-padded), then invert the first-order dispersion with
// a lead correction y + tau dy/dt, clamped at zero.
std::vector<double> preprocess_measurements(const std::vector<double>& raw,
                                            double dt_s, double delay_s,
                                            double hp_time_constant_s);

void preprocess_run_flows(ColdStartRun& run, double delay_s,
                          double hp_time_constant_s);

// ---------------------------------------------------------------------------
// Generalized pattern search with a 2N positive basis, complete polling,
// mesh halving on failed polls and doubling on successful ones.

struct PatternSearchOptions {
  double initial_mesh = 0.25;      // relative to the bounds span
  double mesh_tolerance = 1e-6;    // relative to the bounds span
  double mesh_expansion = 2.0;
  double mesh_contraction = 0.5;
  double max_mesh = 1.0;
  int max_iterations = 200;
  bool parallel_poll = true;
};

struct PatternSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;  // mesh fell below tolerance
};

using Objective = std::function<double(const std::vector<double>&)>;

PatternSearchResult pattern_search(const Objective& objective,
                                   const std::vector<double>& x0,
                                   const std::vector<double>& lower,
                                   const std::vector<double>& upper,
                                   const PatternSearchOptions& options = {});

// ---------------------------------------------------------------------------

// TWC2 rate parameters from TWC1's: identical activation energies, the
// pre-exponential factors scaled by the relative amount of active material.
KineticParams scale_twc2_kinetics(const KineticParams& params_twc1,
                                  double washcoat_thickness_ratio,
                                  double loading_ratio);

// Relative cumulative ("bag") emission error, sum(sim)/sum(meas) - 1.
// Empty when the measured total is zero.
std::optional<double> cumulative_error(const std::vector<double>& sim,
                                       const std::vector<double>& meas);

struct KineticsBounds {
  double log10_A_min = 4.0;
  double log10_A_max = 13.0;
  double Ea_min = 20e3;
  double Ea_max = 150e3;
};

struct ThermalBounds {
  double conductivity_min = 0.01;
  double conductivity_max = 1000.0;
  double cp_min = 500.0;
  double cp_max = 4000.0;
};

struct CalibrationReportRow {
  int load_point = 0;
  bool in_train_split = false;
  std::array<std::optional<double>, kMeasuredSpeciesCount> delta;
};

// Two-stage calibration driver. Holds the preprocessed runs and enforces the
// kinetics-before-thermal ordering.
class CalibrationSession {
 public:
  CalibrationSession(SystemSpec initial_spec, const EngineMap* map,
                     const DiscSolutionLibrary* library,
                     std::vector<ColdStartRun> runs, DatasetSplit split = {});

  const SystemSpec& spec() const { return spec_; }
  bool kinetics_calibrated() const { return kinetics_calibrated_; }

  // 1-norm deviation between the simulated central-channel TWC1 outflow and
  // the measured mid-brick flows over the training runs, with the kinetics
  // driven by the measured state evolution.
  double kinetics_objective(const KineticParams& candidate) const;

  // 1-norm deviation between simulated and measured state vectors over the
  // training runs. Throws std::logic_error until the kinetics stage ran.
  double thermal_objective(const MonolithSpec& twc1_candidate,
                           const MonolithSpec& twc2_candidate,
                           bool compare_twc1) const;

  PatternSearchResult calibrate_kinetics(
      const KineticParams& initial, const KineticsBounds& bounds = {},
      const PatternSearchOptions& options = {},
      double twc2_activity_ratio = 0.4);

  // Tunes (k_ax, k_rad, k_amb, cp, L_1..L_{N-1}) of TWC1 and then
  // (k_rad, k_amb, cp) of TWC2.
  std::pair<PatternSearchResult, PatternSearchResult> calibrate_thermal(
      const ThermalBounds& bounds = {},
      const PatternSearchOptions& options = {});

  // Cumulative tailpipe accuracy per load point (train and validation).
  std::vector<CalibrationReportRow> accuracy_report() const;

  // Simulated trajectory of one run with the current spec (driven by the
  // run's operating point, initialized at the measured state).
  SystemTrajectory simulate_run(const ColdStartRun& run) const;

 private:
  SystemSpec spec_;
  const EngineMap* map_;
  const DiscSolutionLibrary* library_;
  std::vector<ColdStartRun> runs_;
  DatasetSplit split_;
  bool kinetics_calibrated_ = false;

  std::vector<const ColdStartRun*> split_runs(bool train) const;
};

}  // namespace twc
