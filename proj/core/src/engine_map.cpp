#include "twc/engine_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "twc/csv.hpp"
#include "twc/kinetics.hpp"

namespace twc {

double brake_power_kW(double speed_rpm, double bmep_bar) {
  // P = BMEP * V_d * cycles/s, with one power cycle per two revolutions.
  const double cycles_per_s = speed_rpm / 60.0 / 2.0;
  return bmep_bar * 1e5 * kEngineDisplacementM3 * cycles_per_s / 1e3;
}

SpeciesFlows OperatingPoint::engine_out_flows(
    const GasConstants& constants) const {
  SpeciesFlows f;
  f[Species::CO] = mole_fraction_to_massflow(
      engine_out_ppm[0] * 1e-6, mdot_exh_kg_per_s, Species::CO, constants);
  f[Species::NOx] = mole_fraction_to_massflow(
      engine_out_ppm[1] * 1e-6, mdot_exh_kg_per_s, Species::NOx, constants);
  f[Species::THC] = mole_fraction_to_massflow(
      engine_out_ppm[2] * 1e-6, mdot_exh_kg_per_s, Species::THC, constants);
  const H2Estimate h2 =
      estimate_h2(engine_out_ppm[0] * 1e-6, y_CO2, constants);
  f[Species::H2] = mole_fraction_to_massflow(h2.y_H2, mdot_exh_kg_per_s,
                                             Species::H2, constants);
  return f;
}

EngineDrive OperatingPoint::drive(int op_index,
                                  const GasConstants& constants) const {
  EngineDrive d;
  d.input.T_exh_C = T_exh_C;
  d.input.mdot_exh_kg_per_s = mdot_exh_kg_per_s;
  d.input.engine_out = engine_out_flows(constants);
  d.input.op_index = op_index;
  d.profile1 = fitted_profile;
  d.profile2 = fitted_profile;
  d.speed_rpm = speed_rpm;
  d.bmep_bar = bmep_bar;
  d.spark_angle = spark_angle_CAbTDC;
  d.bsfc_g_per_kWh = bsfc_g_per_kWh;
  d.power_kW = power_kW;
  return d;
}

EngineMap::EngineMap(std::vector<OperatingPoint> points)
    : points_(std::move(points)) {
  if (points_.empty())
    throw std::runtime_error("engine map: needs at least one operating point");
  std::set<std::tuple<double, double, double>> keys;
  for (const auto& p : points_) {
    if (!keys.insert({p.speed_rpm, p.bmep_bar, p.spark_angle_CAbTDC}).second) {
      std::ostringstream msg;
      msg << "engine map: duplicate operating point (" << p.speed_rpm << ", "
          << p.bmep_bar << ", " << p.spark_angle_CAbTDC << ")";
      throw std::runtime_error(msg.str());
    }
    if (p.mdot_exh_kg_per_s <= 0.0)
      throw std::runtime_error("engine map: exhaust massflow must be > 0");
    if (p.bsfc_g_per_kWh <= 0.0)
      throw std::runtime_error("engine map: BSFC must be > 0");
    for (double ppm : p.engine_out_ppm)
      if (ppm < 0.0)
        throw std::runtime_error("engine map: ppm values must be >= 0");
  }
  // Minimum-BSFC index; ties break on the (speed, bmep, sa) key so the
  // result is invariant under row reordering.
  min_bsfc_index_ = 0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const auto& a = points_[i];
    const auto& b = points_[min_bsfc_index_];
    const auto key = [](const OperatingPoint& p) {
      return std::tuple(p.bsfc_g_per_kWh, p.speed_rpm, p.bmep_bar,
                        p.spark_angle_CAbTDC);
    };
    if (key(a) < key(b)) min_bsfc_index_ = i;
  }
}

std::optional<std::size_t> EngineMap::find(double speed_rpm, double bmep_bar,
                                           double sa) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.speed_rpm == speed_rpm && p.bmep_bar == bmep_bar &&
        p.spark_angle_CAbTDC == sa)
      return i;
  }
  return std::nullopt;
}

namespace {

double setpoint_distance2(const OperatingPoint& p, double speed, double bmep,
                          double sa) {
  const double ds = (p.speed_rpm - speed) / 1000.0;
  const double db = (p.bmep_bar - bmep) / 10.0;
  const double da = (p.spark_angle_CAbTDC - sa) / 10.0;
  return ds * ds + db * db + da * da;
}

}  // namespace

std::size_t EngineMap::nearest(double speed_rpm, double bmep_bar,
                               double sa) const {
  std::size_t best = 0;
  double best_d = setpoint_distance2(points_[0], speed_rpm, bmep_bar, sa);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = setpoint_distance2(points_[i], speed_rpm, bmep_bar, sa);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

OperatingPoint EngineMap::interpolate_setpoint(double speed_rpm,
                                               double bmep_bar,
                                               double sa) const {
  // Collect the k = 4 nearest points (fewer if the map is smaller).
  const std::size_t k = std::min<std::size_t>(4, points_.size());
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    dist.push_back({setpoint_distance2(points_[i], speed_rpm, bmep_bar, sa), i});
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  if (dist[0].first < 1e-24)  // exact hit
    return points_[dist[0].second];

  double wsum = 0.0;
  OperatingPoint out;
  out.speed_rpm = speed_rpm;
  out.bmep_bar = bmep_bar;
  out.spark_angle_CAbTDC = sa;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& p = points_[dist[j].second];
    const double w = 1.0 / std::sqrt(dist[j].first);
    wsum += w;
    out.mdot_exh_kg_per_s += w * p.mdot_exh_kg_per_s;
    out.bsfc_g_per_kWh += w * p.bsfc_g_per_kWh;
    out.T_exh_C += w * p.T_exh_C;
    for (int s = 0; s < 3; ++s) out.engine_out_ppm[s] += w * p.engine_out_ppm[s];
    out.y_CO2 += w * p.y_CO2;
  }
  out.mdot_exh_kg_per_s /= wsum;
  out.bsfc_g_per_kWh /= wsum;
  out.T_exh_C /= wsum;
  for (int s = 0; s < 3; ++s) out.engine_out_ppm[s] /= wsum;
  out.y_CO2 /= wsum;
  out.power_kW = brake_power_kW(speed_rpm, bmep_bar);
  const auto& near = points_[nearest(speed_rpm, bmep_bar, sa)];
  out.fitted_profile = near.fitted_profile;
  out.radial_temps_C = near.radial_temps_C;
  return out;
}

std::vector<double> EngineMap::distinct_speeds() const {
  std::set<double> s;
  for (const auto& p : points_) s.insert(p.speed_rpm);
  return {s.begin(), s.end()};
}

std::vector<double> EngineMap::distinct_bmeps() const {
  std::set<double> s;
  for (const auto& p : points_) s.insert(p.bmep_bar);
  return {s.begin(), s.end()};
}

std::vector<double> EngineMap::distinct_spark_angles() const {
  std::set<double> s;
  for (const auto& p : points_) s.insert(p.spark_angle_CAbTDC);
  return {s.begin(), s.end()};
}

double EngineMap::min_engine_out_flow(Species s,
                                      const GasConstants& constants) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_)
    best = std::min(best, p.engine_out_flows(constants)[s]);
  return best;
}

EngineMap map_from_csv_text(const std::string& text, const std::string& origin,
                            const DiscSolutionLibrary& library) {
  const CsvTable table = parse_csv_text(text, origin);
  if (table.rows.empty())
    throw std::runtime_error(origin + ": engine map has no data rows");
  std::vector<OperatingPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    OperatingPoint p;
    p.speed_rpm = table.at(r, "speed_rpm");
    p.bmep_bar = table.at(r, "bmep_bar");
    p.spark_angle_CAbTDC = table.at(r, "sa_cabtdc");
    p.mdot_exh_kg_per_s = table.at(r, "mdot_exh_g_per_s") * 1e-3;
    p.bsfc_g_per_kWh = table.at(r, "bsfc_g_per_kwh");
    p.engine_out_ppm = {table.at(r, "co_ppm"), table.at(r, "nox_ppm"),
                        table.at(r, "thc_ppm")};
    p.y_CO2 = table.at(r, "y_co2");
    p.T_exh_C = table.at(r, "t_exh_c");
    p.radial_temps_C = {table.at(r, "tt0_c"), table.at(r, "tt_r3_c"),
                        table.at(r, "tt_2r3_c"), table.at(r, "tt_r_c")};
    p.power_kW = brake_power_kW(p.speed_rpm, p.bmep_bar);
    p.fitted_profile = fit_profile_time(library, p.radial_temps_C);
    if (p.mdot_exh_kg_per_s <= 0.0) {
      std::ostringstream msg;
      msg << origin << ": row " << (r + 1)
          << ": exhaust massflow must be > 0";
      throw std::runtime_error(msg.str());
    }
    points.push_back(std::move(p));
  }
  return EngineMap(std::move(points));
}

EngineMap load_map(const std::string& path,
                   const DiscSolutionLibrary& library) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open engine map: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return map_from_csv_text(ss.str(), path, library);
}

void save_map_csv(const EngineMap& map, const std::string& path,
                  const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write engine map: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "speed_rpm,bmep_bar,sa_cabtdc,mdot_exh_g_per_s,bsfc_g_per_kwh,"
         "co_ppm,nox_ppm,thc_ppm,y_co2,t_exh_c,tt0_c,tt_r3_c,tt_2r3_c,tt_r_c\n";
  out.precision(10);
  for (const auto& p : map.points()) {
    out << p.speed_rpm << ',' << p.bmep_bar << ',' << p.spark_angle_CAbTDC
        << ',' << p.mdot_exh_kg_per_s * 1e3 << ',' << p.bsfc_g_per_kWh << ','
        << p.engine_out_ppm[0] << ',' << p.engine_out_ppm[1] << ','
        << p.engine_out_ppm[2] << ',' << p.y_CO2 << ',' << p.T_exh_C << ','
        << p.radial_temps_C[0] << ',' << p.radial_temps_C[1] << ','
        << p.radial_temps_C[2] << ',' << p.radial_temps_C[3] << '\n';
  }
}

std::vector<double> rolling_average(const std::vector<double>& series,
                                    double dt_s, double window_s) {
  if (dt_s <= 0.0)
    throw std::domain_error("rolling_average: dt must be > 0");
  RollingAverage filter(dt_s, window_s);
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) out.push_back(filter.push(v));
  return out;
}

RollingAverage::RollingAverage(double dt_s, double window_s)
    : capacity_(static_cast<std::size_t>(std::floor(window_s / dt_s)) + 1) {
  buffer_.assign(capacity_, 0.0);
}

double RollingAverage::push(double value) {
  if (count_ == capacity_) {
    sum_ -= buffer_[next_];
  } else {
    ++count_;
  }
  buffer_[next_] = value;
  sum_ += value;
  next_ = (next_ + 1) % capacity_;
  return sum_ / static_cast<double>(count_);
}

DriveFunction suboptimal_drive(const EngineMap& map,
                               const SuboptimalController& controller,
                               const GasConstants& constants) {
  return [&map, controller, constants](double t_s) {
    const std::size_t idx = controller.op_at(t_s, map);
    return map.point(idx).drive(static_cast<int>(idx), constants);
  };
}

}  // namespace twc
