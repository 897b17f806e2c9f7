// Synthetic engine map and cold-start data: a desk-scale stand-in for the
// measured tables, with physically plausible trends and recorded ground
// truth for calibration recovery tests.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twc/calibration.hpp"
#include "twc/core.hpp"
#include "twc/engine_map.hpp"
#include "twc/radial_profile.hpp"

namespace twc {

struct SyntheticMapOptions {
  // Limit the spark-angle sweep per (speed, BMEP) row; 0 keeps every value.
  std::size_t sa_per_row = 0;
  // Restrict to every k-th (speed, BMEP) row; 1 keeps all.
  std::size_t row_stride = 1;
};

// The tested steady-state rows: (speed, BMEP, spark-angle sweep).
struct SteadyStateRow {
  double speed_rpm;
  double bmep_bar;
  std::vector<double> spark_angles;
};
const std::vector<SteadyStateRow>& steady_state_rows();

// The ten cold-start load points (speed, BMEP, default spark angle).
struct ColdStartLoadPoint {
  int index;
  double speed_rpm;
  double bmep_bar;
  double spark_angle;
};
const std::vector<ColdStartLoadPoint>& coldstart_load_points();

EngineMap generate_engine_map(const DiscSolutionLibrary& library,
                              std::uint64_t seed,
                              const SyntheticMapOptions& options = {});

struct SyntheticRunOptions {
  double duration_s = 150.0;
  double dt_s = 0.1;
  double noise_level = 0.01;      // relative, additive Gaussian
  double instrument_delay_s = 2.0;
  double instrument_tau_s = 1.0;  // first-order dispersion lag
};

// Simulates the reference plant through each cold-start load point found in
// the map and emits measurement-like series: states with additive noise,
// emission flows passed through the instrument delay/dispersion model plus
// noise. The ground truth is the spec used for simulation.
std::vector<ColdStartRun> generate_coldstart_runs(
    const SystemSpec& truth, const EngineMap& map,
    const DiscSolutionLibrary& library, std::uint64_t seed,
    const SyntheticRunOptions& options = {});

}  // namespace twc
