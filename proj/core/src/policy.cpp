#include "twc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "twc/parallel.hpp"

namespace twc {

std::size_t StateGrid::node_count() const {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= ax.size();
  return n;
}

std::vector<double> StateGrid::node_state(std::size_t node) const {
  std::vector<double> state(dims(), 0.0);
  for (std::size_t d = dims(); d-- > 0;) {
    const std::size_t count = axes[d].size();
    state[d] = axes[d][node % count];
    node /= count;
  }
  return state;
}

std::size_t StateGrid::node_of_indices(
    const std::vector<std::size_t>& idx) const {
  std::size_t node = 0;
  for (std::size_t d = 0; d < dims(); ++d) node = node * axes[d].size() + idx[d];
  return node;
}

void StateGrid::validate() const {
  if (axes.empty()) throw std::invalid_argument("state grid: no axes");
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (axes[d].empty())
      throw std::invalid_argument("state grid: axis " + std::to_string(d) +
                                  " empty");
    for (std::size_t i = 1; i < axes[d].size(); ++i)
      if (!(axes[d][i] > axes[d][i - 1]))
        throw std::invalid_argument(
            "state grid: axis " + std::to_string(d) +
            " breakpoints not strictly increasing");
  }
}

namespace {

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

}  // namespace

StateGrid default_state_grid() {
  StateGrid g;
  g.axes = {linspace_step(0.0, 900.0, 25.0),   // TWC1 T1
            linspace_step(0.0, 900.0, 100.0),  // TWC1 T2
            linspace_step(0.0, 900.0, 100.0),  // TWC1 T3
            {-200.0, 100.0},                   // TWC1 dT
            linspace_step(0.0, 900.0, 100.0),  // TWC2 T1
            {-200.0, 100.0}};                  // TWC2 dT
  g.labels = {"twc1_t1", "twc1_t2", "twc1_t3",
              "twc1_dt", "twc2_t1", "twc2_dt"};
  return g;
}

std::vector<double> reduced_t1_grid() {
  std::vector<double> v = {0.0, 100.0};
  for (double x = 125.0; x <= 400.0 + 1e-9; x += 25.0) v.push_back(x);
  for (double x = 500.0; x <= 900.0 + 1e-9; x += 100.0) v.push_back(x);
  return v;
}

LambdaWeights LambdaWeights::from_normalized(
    const std::array<double, 3>& lambda_n, const EngineMap& map,
    const GasConstants& constants) {
  LambdaWeights w;
  w.lambda_n = lambda_n;
  const double min_bsfc = map.min_bsfc();
  const std::array<Species, 3> species = {Species::CO, Species::NOx,
                                          Species::THC};
  for (std::size_t s = 0; s < 3; ++s) {
    if (lambda_n[s] < 0.0)
      throw std::domain_error("lambda_n components must be >= 0");
    if (lambda_n[s] == 0.0) {
      w.lambda[s] = 0.0;
      continue;
    }
    const double min_flow = map.min_engine_out_flow(species[s], constants);
    if (min_flow <= 0.0)
      throw std::domain_error(
          "lambda normalization needs positive engine-out flows");
    w.lambda[s] = lambda_n[s] * min_bsfc / min_flow;
  }
  return w;
}

double TransitionTable::stage_cost(std::size_t node, std::size_t op,
                                   const LambdaWeights& weights) const {
  const std::size_t t = node * op_count + op;
  double cost = op_fuel_cost[op] + constraint_penalty[t];
  for (std::size_t s = 0; s < 3; ++s)
    cost += weights.lambda[s] * static_cast<double>(tailpipe_kg[t * 3 + s]);
  return cost;
}

namespace {

SystemState unflatten_state(const std::vector<double>& x, std::size_t n1,
                            std::size_t n2) {
  SystemState s;
  s.twc1.slice_center_temps_C.assign(x.begin(), x.begin() + n1);
  s.twc1.radial_delta_C = x[n1];
  s.twc2.slice_center_temps_C.assign(x.begin() + n1 + 1,
                                     x.begin() + n1 + 1 + n2);
  s.twc2.radial_delta_C = x[n1 + 1 + n2];
  return s;
}

std::vector<double> flatten_state(const SystemState& s) {
  std::vector<double> x;
  x.reserve(s.twc1.slice_count() + s.twc2.slice_count() + 2);
  x.insert(x.end(), s.twc1.slice_center_temps_C.begin(),
           s.twc1.slice_center_temps_C.end());
  x.push_back(s.twc1.radial_delta_C);
  x.insert(x.end(), s.twc2.slice_center_temps_C.begin(),
           s.twc2.slice_center_temps_C.end());
  x.push_back(s.twc2.radial_delta_C);
  return x;
}

void locate_on_axis(const std::vector<double>& axis, double value,
                    std::uint8_t& lo, std::uint16_t& frac) {
  const std::size_t count = axis.size();
  if (count == 1) {
    lo = 0;
    frac = 0;
    return;
  }
  const double v = std::clamp(value, axis.front(), axis.back());
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t i = static_cast<std::size_t>(it - axis.begin());
  i = std::clamp<std::size_t>(i, 1, count - 1) - 1;
  const double f = (v - axis[i]) / (axis[i + 1] - axis[i]);
  lo = static_cast<std::uint8_t>(i);
  frac = static_cast<std::uint16_t>(
      std::lround(std::clamp(f, 0.0, 1.0) * 65535.0));
}

std::vector<std::size_t> grid_strides(const StateGrid& grid) {
  std::vector<std::size_t> strides(grid.dims(), 1);
  for (std::size_t d = grid.dims() - 1; d-- > 0;)
    strides[d] = strides[d + 1] * grid.axes[d + 1].size();
  return strides;
}

// Exceeding the safe-temperature bound on any slice center or periphery of
// the raw successor incurs a hard penalty proportional to the excess.
double safety_penalty(const SystemState& s, double T_max_C,
                      double penalty_per_C) {
  double excess = 0.0;
  for (const MonolithState* m : {&s.twc1, &s.twc2}) {
    for (double t : m->slice_center_temps_C) {
      excess += std::max(0.0, t - T_max_C);
      excess += std::max(0.0, t + m->radial_delta_C - T_max_C);
    }
  }
  return penalty_per_C * excess;
}

}  // namespace

TransitionTable make_transition_table(StateGrid grid, std::size_t op_count,
                                      double dt_s) {
  grid.validate();
  TransitionTable table;
  table.grid = std::move(grid);
  table.op_count = op_count;
  table.dt_s = dt_s;
  const std::size_t nodes = table.grid.node_count();
  const std::size_t dims = table.grid.dims();
  table.op_fuel_cost.assign(op_count, 0.0);
  table.successor_lo.assign(nodes * op_count * dims, 0);
  table.successor_frac.assign(nodes * op_count * dims, 0);
  table.tailpipe_kg.assign(nodes * op_count * 3, 0.0f);
  table.constraint_penalty.assign(nodes * op_count, 0.0f);
  return table;
}

void set_transition(TransitionTable& table, std::size_t node, std::size_t op,
                    const std::vector<double>& successor_state,
                    const std::array<double, 3>& tailpipe_kg,
                    double fuel_cost_for_op, double penalty) {
  const std::size_t dims = table.dims();
  const std::size_t t = node * table.op_count + op;
  for (std::size_t d = 0; d < dims; ++d)
    locate_on_axis(table.grid.axes[d], successor_state[d],
                   table.successor_lo[t * dims + d],
                   table.successor_frac[t * dims + d]);
  for (std::size_t s = 0; s < 3; ++s)
    table.tailpipe_kg[t * 3 + s] = static_cast<float>(tailpipe_kg[s]);
  table.op_fuel_cost[op] = fuel_cost_for_op;
  table.constraint_penalty[t] = static_cast<float>(penalty);
}

TransitionTable build_transition_table(const TwcSystemModel& model,
                                       const EngineMap& map,
                                       const StateGrid& grid,
                                       const DpOptions& options) {
  grid.validate();
  const std::size_t n1 = model.spec().twc1.geometry.slice_count();
  const std::size_t n2 = model.spec().twc2.geometry.slice_count();
  if (grid.dims() != n1 + n2 + 2)
    throw std::invalid_argument(
        "build_transition_table: grid dimensions do not match the plant "
        "state");

  TransitionTable table = make_transition_table(grid, map.size(), options.dt_s);
  for (std::size_t u = 0; u < map.size(); ++u)
    table.op_fuel_cost[u] = map.point(u).bsfc_g_per_kWh * options.dt_s;

  std::vector<EngineDrive> drives;
  drives.reserve(map.size());
  for (std::size_t u = 0; u < map.size(); ++u)
    drives.push_back(map.point(u).drive(static_cast<int>(u),
                                        model.constants()));

  const std::size_t nodes = grid.node_count();
  const std::size_t dims = grid.dims();
  const int substeps = std::max(1, options.integrator_substeps);
  const double dt_sub = options.dt_s / substeps;

  parallel_for(nodes, [&](std::size_t node) {
    const std::vector<double> coords = table.grid.node_state(node);
    const SystemState start = unflatten_state(coords, n1, n2);
    for (std::size_t u = 0; u < map.size(); ++u) {
      SystemState state = start;
      std::array<double, 3> tailpipe{};
      TwcSystemModel::Evaluation ev;
      for (int k = 0; k < substeps; ++k) {
        state = model.step_rk4(state, drives[u], dt_sub, &ev);
        tailpipe[0] += ev.kin2.tailpipe[Species::CO] * dt_sub;
        tailpipe[1] += ev.kin2.tailpipe[Species::NOx] * dt_sub;
        tailpipe[2] += ev.kin2.tailpipe[Species::THC] * dt_sub;
      }
      const std::size_t t = node * table.op_count + u;
      const std::vector<double> succ = flatten_state(state);
      for (std::size_t d = 0; d < dims; ++d)
        locate_on_axis(table.grid.axes[d], succ[d],
                       table.successor_lo[t * dims + d],
                       table.successor_frac[t * dims + d]);
      for (std::size_t s = 0; s < 3; ++s)
        table.tailpipe_kg[t * 3 + s] = static_cast<float>(tailpipe[s]);
      table.constraint_penalty[t] = static_cast<float>(
          safety_penalty(state, options.T_max_C, options.penalty_per_C));
    }
  });
  return table;
}

PolicyTable solve_policy(const TransitionTable& table,
                         const LambdaWeights& weights,
                         const DpOptions& options) {
  const std::size_t nodes = table.grid.node_count();
  const std::size_t dims = table.dims();
  const std::size_t ops = table.op_count;
  if (ops == 0) throw std::invalid_argument("solve_policy: no operating points");

  const std::vector<std::size_t> strides = grid_strides(table.grid);

  // Corner offsets for the 2^dims multilinear gather; value arrays are
  // padded so corners past a clamped axis read zero-weighted slots safely.
  const std::size_t n_corners = std::size_t{1} << dims;
  std::vector<std::size_t> corner_offset(n_corners, 0);
  for (std::size_t mask = 0; mask < n_corners; ++mask)
    for (std::size_t d = 0; d < dims; ++d)
      if (mask & (std::size_t{1} << d)) corner_offset[mask] += strides[d];
  std::size_t padding = 1;
  for (std::size_t d = 0; d < dims; ++d) padding += strides[d];

  // Stage costs are iteration-invariant; assemble them once.
  std::vector<double> stage(nodes * ops, 0.0);
  parallel_for(nodes, [&](std::size_t node) {
    for (std::size_t u = 0; u < ops; ++u)
      stage[node * ops + u] = table.stage_cost(node, u, weights);
  });

  std::vector<double> v_prev(nodes + padding, 0.0);
  std::vector<double> v_next(nodes + padding, 0.0);
  std::vector<std::uint16_t> policy(nodes, 0);
  std::vector<std::uint16_t> policy_prev(nodes, 0);

  int stable_streak = 0;
  int first_stable_iteration = -1;
  int iteration = 0;
  std::size_t changed_nodes = nodes;

  for (iteration = 1; iteration <= options.max_iterations; ++iteration) {
    parallel_for(nodes, [&](std::size_t node) {
      double best = std::numeric_limits<double>::infinity();
      std::uint16_t best_op = 0;
      const std::size_t base_t = node * ops;
      for (std::size_t u = 0; u < ops; ++u) {
        const std::size_t t = base_t + u;
        // Multilinear interpolation of V at the stored successor.
        const std::uint8_t* lo = &table.successor_lo[t * dims];
        const std::uint16_t* fr = &table.successor_frac[t * dims];
        std::size_t base = 0;
        double w[64];
        w[0] = 1.0;
        std::size_t width = 1;
        for (std::size_t d = 0; d < dims; ++d) {
          base += static_cast<std::size_t>(lo[d]) * strides[d];
          const double f = fr[d] * (1.0 / 65535.0);
          for (std::size_t i = 0; i < width; ++i) {
            w[width + i] = w[i] * f;
            w[i] *= (1.0 - f);
          }
          width <<= 1;
        }
        double v = 0.0;
        for (std::size_t mask = 0; mask < width; ++mask)
          v += w[mask] * v_prev[base + corner_offset[mask]];
        const double cost = stage[t] + v;
        if (cost < best) {
          best = cost;
          best_op = static_cast<std::uint16_t>(u);
        }
      }
      v_next[node] = best;
      policy[node] = best_op;
    });

    std::swap(v_prev, v_next);
    if (iteration > 1) {
      changed_nodes = 0;
      for (std::size_t i = 0; i < nodes; ++i)
        if (policy[i] != policy_prev[i]) ++changed_nodes;
      if (changed_nodes == 0) {
        ++stable_streak;
        if (first_stable_iteration < 0) first_stable_iteration = iteration - 1;
      } else {
        stable_streak = 0;
        first_stable_iteration = -1;
      }
      if (stable_streak >= options.stabilization_window) break;
    }
    std::swap(policy, policy_prev);
  }

  if (stable_streak < options.stabilization_window) {
    std::ostringstream msg;
    msg << "solve_policy: greedy policy not stabilized after "
        << options.max_iterations << " sweeps (" << changed_nodes
        << " nodes still changing)";
    throw std::runtime_error(msg.str());
  }

  PolicyTable result;
  result.grid = table.grid;
  result.op_index = policy;
  result.iterations = iteration;
  result.dt_s = table.dt_s;
  result.detected_horizon_s = table.dt_s * first_stable_iteration;
  return result;
}

std::size_t PolicyTable::query(const std::vector<double>& state) const {
  if (state.size() != grid.dims())
    throw std::invalid_argument("policy query: state dimension mismatch");
  const std::size_t dims = grid.dims();
  const std::vector<std::size_t> strides = grid_strides(grid);
  std::vector<std::uint8_t> lo(dims);
  std::vector<double> frac(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    std::uint16_t f16 = 0;
    locate_on_axis(grid.axes[d], state[d], lo[d], f16);
    frac[d] = f16 * (1.0 / 65535.0);
  }
  double acc = 0.0;
  const std::size_t n_corners = std::size_t{1} << dims;
  for (std::size_t mask = 0; mask < n_corners; ++mask) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      const bool hi = mask & (std::size_t{1} << d);
      w *= hi ? frac[d] : 1.0 - frac[d];
      const std::size_t count = grid.axes[d].size();
      const std::size_t i = std::min<std::size_t>(lo[d] + (hi ? 1 : 0),
                                                  count - 1);
      idx += i * strides[d];
    }
    acc += w * static_cast<double>(op_index[idx]);
  }
  const long long rounded = std::llround(acc);
  return static_cast<std::size_t>(std::max(0LL, rounded));
}

void PolicyTable::save_csv(const std::string& path, const EngineMap& map,
                           const std::string& provenance) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "# dt_s=" << dt_s << " horizon_s=" << detected_horizon_s
      << " iterations=" << iterations << "\n";
  for (std::size_t d = 0; d < grid.dims(); ++d) out << grid.labels[d] << ',';
  out << "op_index,speed_rpm,bmep_bar,sa_cabtdc\n";
  out.precision(10);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto coords = grid.node_state(node);
    for (double c : coords) out << c << ',';
    const std::size_t u = op_index[node];
    const OperatingPoint& p = map.point(u);
    out << u << ',' << p.speed_rpm << ',' << p.bmep_bar << ','
        << p.spark_angle_CAbTDC << "\n";
  }
}

PolicyTable PolicyTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy: " + path);
  PolicyTable table;
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> coord_rows;
  std::vector<std::uint16_t> ops;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos_dt = line.find("dt_s=");
      if (pos_dt != std::string::npos)
        table.dt_s = std::stod(line.substr(pos_dt + 5));
      const auto pos_h = line.find("horizon_s=");
      if (pos_h != std::string::npos)
        table.detected_horizon_s = std::stod(line.substr(pos_h + 10));
      const auto pos_i = line.find("iterations=");
      if (pos_i != std::string::npos)
        table.iterations = std::stoi(line.substr(pos_i + 11));
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    if (header.empty()) {
      while (std::getline(fields, field, ',')) header.push_back(field);
      continue;
    }
    std::vector<double> row;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    if (row.size() != header.size())
      throw std::runtime_error(path + ": ragged policy row");
    coord_rows.push_back(row);
  }
  if (header.size() < 5)
    throw std::runtime_error(path + ": policy header too short");
  const std::size_t dims = header.size() - 4;  // op_index + 3 setpoints
  table.grid.axes.assign(dims, {});
  table.grid.labels.assign(header.begin(), header.begin() + dims);
  for (std::size_t d = 0; d < dims; ++d) {
    std::set<double> values;
    for (const auto& row : coord_rows) values.insert(row[d]);
    table.grid.axes[d].assign(values.begin(), values.end());
  }
  table.grid.validate();
  if (table.grid.node_count() != coord_rows.size())
    throw std::runtime_error(path + ": policy rows do not fill the grid");
  table.op_index.assign(table.grid.node_count(), 0);
  const std::vector<std::size_t> strides = grid_strides(table.grid);
  for (const auto& row : coord_rows) {
    std::size_t node = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto& ax = table.grid.axes[d];
      const auto it = std::lower_bound(ax.begin(), ax.end(), row[d]);
      node += static_cast<std::size_t>(it - ax.begin()) * strides[d];
    }
    table.op_index[node] = static_cast<std::uint16_t>(row[dims]);
  }
  return table;
}

namespace {

PolicySimResult run_closed_loop(
    const std::function<std::size_t(double, const SystemState&)>& choose_op,
    const TwcSystemModel& model, const EngineMap& map,
    const SystemState& initial, double duration_s, double dt_s,
    double filter_window_s) {
  PolicySimResult result;
  result.trajectory.dt_s = dt_s;
  RollingAverage f_speed(dt_s, filter_window_s);
  RollingAverage f_bmep(dt_s, filter_window_s);
  RollingAverage f_sa(dt_s, filter_window_s);

  SystemState state = initial;
  const auto steps = static_cast<std::size_t>(std::round(duration_s / dt_s));
  result.trajectory.samples.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    const std::size_t raw_op =
        std::min(choose_op(t, state), map.size() - 1);
    const OperatingPoint& target = map.point(raw_op);
    const double speed = f_speed.push(target.speed_rpm);
    const double bmep = f_bmep.push(target.bmep_bar);
    const double sa = f_sa.push(target.spark_angle_CAbTDC);

    const OperatingPoint setpoint = map.interpolate_setpoint(speed, bmep, sa);
    const std::size_t nearest = map.nearest(speed, bmep, sa);
    EngineDrive drive = setpoint.drive(static_cast<int>(nearest),
                                       model.constants());

    TwcSystemModel::Evaluation ev;
    const SystemState next = model.step_rk4(state, drive, dt_s, &ev);

    TrajectorySample sample;
    sample.t_s = t;
    sample.state = state;
    sample.speed_rpm = speed;
    sample.bmep_bar = bmep;
    sample.spark_angle = sa;
    sample.bsfc_g_per_kWh = setpoint.bsfc_g_per_kWh;
    sample.power_kW = setpoint.power_kW;
    sample.mdot_exh_kg_per_s = drive.input.mdot_exh_kg_per_s;
    sample.T_exh_C = drive.input.T_exh_C;
    sample.T_exh_twc2_C = ev.T_exh_twc2_C;
    sample.engine_out = drive.input.engine_out;
    sample.mid_brick = ev.kin1.central_channel_outflow();
    sample.tailpipe_total = ev.kin2.tailpipe;
    sample.tailpipe_center = ev.kin2.central_channel_outflow();
    for (std::size_t s = 0; s < kSpeciesCount; ++s) {
      const double in = drive.input.engine_out.kg_per_s[s];
      sample.eta[s] =
          in > 0.0 ? 1.0 - sample.tailpipe_total.kg_per_s[s] / in : 0.0;
    }
    sample.powers1 = ev.powers1;
    sample.powers2 = ev.powers2;
    result.trajectory.samples.push_back(std::move(sample));

    result.cumulative_mg[0] += ev.kin2.tailpipe[Species::CO] * dt_s * 1e6;
    result.cumulative_mg[1] += ev.kin2.tailpipe[Species::NOx] * dt_s * 1e6;
    result.cumulative_mg[2] += ev.kin2.tailpipe[Species::THC] * dt_s * 1e6;
    const double energy_kWh = setpoint.power_kW * dt_s / 3600.0;
    result.energy_kWh += energy_kWh;
    result.fuel_g += setpoint.bsfc_g_per_kWh * energy_kWh;

    state = next;
  }
  result.mean_bsfc_g_per_kWh =
      result.energy_kWh > 0.0 ? result.fuel_g / result.energy_kWh : 0.0;
  return result;
}

}  // namespace

PolicySimResult simulate_policy(const PolicyTable& policy,
                                const TwcSystemModel& model,
                                const EngineMap& map,
                                const SystemState& initial, double duration_s,
                                double dt_s, double filter_window_s) {
  return run_closed_loop(
      [&](double, const SystemState& state) {
        return policy.query(flatten_state(state));
      },
      model, map, initial, duration_s, dt_s, filter_window_s);
}

PolicySimResult simulate_schedule(
    const std::function<std::size_t(double)>& op_at,
    const TwcSystemModel& model, const EngineMap& map,
    const SystemState& initial, double duration_s, double dt_s,
    double filter_window_s) {
  return run_closed_loop(
      [&](double t, const SystemState&) { return op_at(t); }, model, map,
      initial, duration_s, dt_s, filter_window_s);
}

namespace {

// Smallest grid value >= x (the grids are coarse; x always <= back()).
double ceil_to_grid(const std::vector<double>& axis, double x) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x - 1e-9);
  return it == axis.end() ? axis.back() : *it;
}

std::size_t nearest_index(const std::vector<double>& axis, double x) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it == axis.end()) return axis.size() - 1;
  if (it == axis.begin()) return 0;
  const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  return (x - axis[hi - 1] <= axis[hi] - x) ? hi - 1 : hi;
}

}  // namespace

CompressedPolicy compress_table(const PolicyTable& policy,
                                const std::vector<double>& reduced_t1) {
  if (policy.grid.dims() != 6)
    throw std::invalid_argument("compress_table: needs the 6-D TWC grid");
  CompressedPolicy c;
  c.t1_values = reduced_t1;
  c.t2_values = policy.grid.axes[1];
  c.t3_values = policy.grid.axes[2];
  c.dt1_values = policy.grid.axes[3];
  c.t12_values = policy.grid.axes[4];
  c.dt2_values = policy.grid.axes[5];

  const std::vector<std::size_t> strides = grid_strides(policy.grid);
  const auto& full_t1 = policy.grid.axes[0];

  for (double t1 : c.t1_values) {
    const double t2_cap = ceil_to_grid(c.t2_values, t1);
    const std::size_t i1 = nearest_index(full_t1, t1);
    for (std::size_t i2 = 0; i2 < c.t2_values.size(); ++i2) {
      if (c.t2_values[i2] > t2_cap + 1e-9) break;
      for (std::size_t i3 = 0; i3 < c.t3_values.size(); ++i3) {
        if (c.t3_values[i3] > c.t2_values[i2] + 1e-9) break;
        for (std::size_t i4 = 0; i4 < c.dt1_values.size(); ++i4) {
          for (std::size_t i5 = 0; i5 < c.t12_values.size(); ++i5) {
            for (std::size_t i6 = 0; i6 < c.dt2_values.size(); ++i6) {
              const std::size_t node = i1 * strides[0] + i2 * strides[1] +
                                       i3 * strides[2] + i4 * strides[3] +
                                       i5 * strides[4] + i6 * strides[5];
              c.op_index.push_back(policy.op_index[node]);
            }
          }
        }
      }
    }
  }
  return c;
}

std::size_t CompressedPolicy::rank(const std::array<double, 6>& state) const {
  const double t1 = state[0];
  const std::size_t tail =
      dt1_values.size() * t12_values.size() * dt2_values.size();
  auto t3_count = [&](double t2) {
    std::size_t n = 0;
    for (double t3 : t3_values) {
      if (t3 > t2 + 1e-9) break;
      ++n;
    }
    return n;
  };
  auto pair_count = [&](double t1_value) {
    const double cap = ceil_to_grid(t2_values, t1_value);
    std::size_t n = 0;
    for (double t2 : t2_values) {
      if (t2 > cap + 1e-9) break;
      n += t3_count(t2);
    }
    return n;
  };

  std::size_t rank = 0;
  for (double v : t1_values) {
    if (std::abs(v - t1) < 1e-9) break;
    rank += pair_count(v) * tail;
  }
  const double cap = ceil_to_grid(t2_values, t1);
  for (double t2 : t2_values) {
    if (std::abs(t2 - state[1]) < 1e-9) break;
    if (t2 > cap + 1e-9)
      throw std::invalid_argument("compressed rank: T2 above its cap");
    rank += t3_count(t2) * tail;
  }
  for (double t3 : t3_values) {
    if (std::abs(t3 - state[2]) < 1e-9) break;
    if (t3 > state[1] + 1e-9)
      throw std::invalid_argument("compressed rank: T3 above T2");
    rank += tail;
  }
  rank += nearest_index(dt1_values, state[3]) * t12_values.size() *
          dt2_values.size();
  rank += nearest_index(t12_values, state[4]) * dt2_values.size();
  rank += nearest_index(dt2_values, state[5]);
  return rank;
}

std::array<double, 6> CompressedPolicy::state_at(std::size_t rank) const {
  for (double t1 : t1_values) {
    const double cap = ceil_to_grid(t2_values, t1);
    for (double t2 : t2_values) {
      if (t2 > cap + 1e-9) break;
      for (double t3 : t3_values) {
        if (t3 > t2 + 1e-9) break;
        for (double d1 : dt1_values)
          for (double t12 : t12_values)
            for (double d2 : dt2_values) {
              if (rank == 0) return {t1, t2, t3, d1, t12, d2};
              --rank;
            }
      }
    }
  }
  throw std::out_of_range("compressed state_at: rank past the enumeration");
}

}  // namespace twc
