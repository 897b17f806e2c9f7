// Optimal cold-start control: discretization of the joint six-dimensional
// state, undiscounted backward value iteration with greedy-policy
// stabilization, closed-loop policy simulation, and the compressed/bit-packed
// export of the resulting lookup table.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "twc/core.hpp"
#include "twc/engine_map.hpp"
#include "twc/thermal.hpp"

namespace twc {

// Sorted breakpoints per state dimension. The joint-node index is row-major
// with the LAST axis fastest, i.e. ascending lexicographic enumeration by
// (axis 0, axis 1, ...).
struct StateGrid {
  std::vector<std::vector<double>> axes;
  std::vector<std::string> labels;

  std::size_t dims() const { return axes.size(); }
  std::size_t node_count() const;
  std::vector<double> node_state(std::size_t node) const;
  std::size_t node_of_indices(const std::vector<std::size_t>& idx) const;

  void validate() const;  // throws on non-monotone breakpoints
};

// The default discretization of [T1..T3, dT]_TWC1 + [T1, dT]_TWC2:
// T1 0:25:900, T2 = T3 = 0:100:900, dT in {-200, 100}, TWC2 T1 0:100:900,
// dT in {-200, 100}; 148,000 nodes.
StateGrid default_state_grid();

// The reduced first-slice temperature grid used by the compressed export:
// 100 C steps below 100 C and above 400 C, 25 C steps through light-off.
std::vector<double> reduced_t1_grid();

struct PolicyTable {
  StateGrid grid;
  std::vector<std::uint16_t> op_index;  // one per node
  double detected_horizon_s = 0.0;
  int iterations = 0;
  double dt_s = 0.0;

  void save_csv(const std::string& path, const EngineMap& map,
                const std::string& provenance) const;
  static PolicyTable load_csv(const std::string& path);

  // Multilinear interpolation of the stored indices rounded to the nearest
  // valid index; exact grid nodes return their stored op.
  std::size_t query(const std::vector<double>& state) const;
};

// Emission weighting of the stage cost. lambda[s] multiplies the tailpipe
// massflow of CO/NOx/THC; lambda_n is the normalized form where 1 weighs the
// fuel and engine-out emission terms equally:
//   lambda_s = lambda_n_s * min(BSFC) / min(mdot_eo_s).
struct LambdaWeights {
  std::array<double, 3> lambda{};
  std::array<double, 3> lambda_n{};

  static LambdaWeights from_normalized(const std::array<double, 3>& lambda_n,
                                       const EngineMap& map,
                                       const GasConstants& constants);
};

// Precomputed one-step transitions of the discretized plant. Successor
// states are stored per dimension as (lower index, fractional position) and
// the per-step tailpipe masses per species, so value iteration for any
// emission weighting reuses one table.
struct TransitionTable {
  StateGrid grid;
  std::size_t op_count = 0;
  double dt_s = 0.0;
  std::vector<double> op_fuel_cost;             // BSFC(u) * dt, per op
  std::vector<std::uint8_t> successor_lo;       // [(node*ops + u)*dims + d]
  std::vector<std::uint16_t> successor_frac;    // same layout, 1/65535 units
  std::vector<float> tailpipe_kg;               // [(node*ops + u)*3 + s]
  std::vector<float> constraint_penalty;        // [(node*ops + u)]

  std::size_t dims() const { return grid.dims(); }
  double stage_cost(std::size_t node, std::size_t op,
                    const LambdaWeights& weights) const;
};

struct DpOptions {
  double dt_s = 1.0;
  int integrator_substeps = 1;
  int stabilization_window = 5;
  int max_iterations = 1000;
  double T_max_C = 950.0;            // safe-temperature constraint
  double penalty_per_C = 1e6;        // hard penalty above T_max
};

// Builds the transition table by stepping the plant one DP interval from
// every (node, op). Grid axes must be the six TWC state dimensions.
TransitionTable build_transition_table(const TwcSystemModel& model,
                                       const EngineMap& map,
                                       const StateGrid& grid,
                                       const DpOptions& options);

// Hand-built transition tables (used for reduced test problems).
TransitionTable make_transition_table(StateGrid grid, std::size_t op_count,
                                      double dt_s);
void set_transition(TransitionTable& table, std::size_t node, std::size_t op,
                    const std::vector<double>& successor_state,
                    const std::array<double, 3>& tailpipe_kg,
                    double fuel_cost_for_op, double penalty = 0.0);

// Undiscounted backward value iteration: V_{k+1}(x) = min_u [stage(x,u) +
// V_k(f(x,u))] with multilinear interpolation at the successor, iterated
// until the greedy policy over all nodes is unchanged for
// `stabilization_window` consecutive sweeps. Ties in the minimization break
// toward the lowest op index. Throws if the cap is reached, reporting how
// many nodes were still changing.
PolicyTable solve_policy(const TransitionTable& table,
                         const LambdaWeights& weights,
                         const DpOptions& options);

// Closed-loop simulation: the policy picks an operating point each step, the
// setpoints pass through 5 s rolling-average filters, and the plant is
// driven by the interpolated engine map outputs.
struct PolicySimResult {
  std::array<double, 3> cumulative_mg{};  // CO, NOx, THC
  double fuel_g = 0.0;
  double energy_kWh = 0.0;
  double mean_bsfc_g_per_kWh = 0.0;
  SystemTrajectory trajectory;
};

PolicySimResult simulate_policy(const PolicyTable& policy,
                                const TwcSystemModel& model,
                                const EngineMap& map,
                                const SystemState& initial,
                                double duration_s = 145.0, double dt_s = 0.1,
                                double filter_window_s = 5.0);

// Open-loop counterpart for a fixed per-step op schedule (used by the
// suboptimal benchmark); applies the same filtering path.
PolicySimResult simulate_schedule(
    const std::function<std::size_t(double)>& op_at, const TwcSystemModel& model,
    const EngineMap& map, const SystemState& initial, double duration_s,
    double dt_s = 0.1, double filter_window_s = 5.0);

// Constrained enumeration export: successive TWC1 slices resolved only at or
// below the preceding slice's level (T2 <= ceil(T1), T3 <= T2), T1 on the
// reduced grid, TWC2 dimensions fully enumerated. Entries are ordered
// ascending lexicographically by (T1, T2, T3, dT, T1', dT').
struct CompressedPolicy {
  std::vector<double> t1_values;  // reduced grid
  std::vector<double> t2_values;
  std::vector<double> t3_values;
  std::vector<double> dt1_values;
  std::vector<double> t12_values;  // TWC2 T1
  std::vector<double> dt2_values;
  std::vector<std::uint16_t> op_index;  // one per enumerated state

  std::size_t entry_count() const { return op_index.size(); }
  // Enumeration rank of the given on-grid state.
  std::size_t rank(const std::array<double, 6>& state) const;
  std::array<double, 6> state_at(std::size_t rank) const;
};

CompressedPolicy compress_table(const PolicyTable& policy,
                                const std::vector<double>& reduced_t1);

// Bit-packed export. Each entry is 12 bits: speed index in bits 0..3, BMEP
// index in bits 4..7, spark-angle index in bits 8..11 (indices into the
// map's distinct sorted setpoint values). Entries are appended LSB-first
// into a little-endian byte stream following the header. Total payload is
// ceil(12 n / 8) bytes.
std::vector<std::uint8_t> pack_policy(const CompressedPolicy& compressed,
                                      const EngineMap& map);

struct PackedQueryResult {
  double speed_rpm = 0.0;
  double bmep_bar = 0.0;
  double spark_angle = 0.0;
};

PackedQueryResult query_packed(const std::vector<std::uint8_t>& bytes,
                               const std::array<double, 6>& state);

// Payload size in bytes for a given entry count: ceil(12 n / 8).
std::size_t packed_payload_bytes(std::size_t entry_count);
// Header size of a packed stream (for file-size arithmetic).
std::size_t packed_header_bytes(const std::vector<std::uint8_t>& bytes);

}  // namespace twc
