// Static mean-value engine map: tabulated operating points, setpoint
// interpolation, the rolling-average setpoint filter, and the conventional
// two-phase heating controller used as a benchmark.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "twc/core.hpp"
#include "twc/radial_profile.hpp"
#include "twc/thermal.hpp"

namespace twc {

// Engine displacement of the measured unit, m^3 (1969 cc, four-stroke).
inline constexpr double kEngineDisplacementM3 = 1.969e-3;

// Brake power from speed and BMEP for a four-stroke engine.
double brake_power_kW(double speed_rpm, double bmep_bar);

struct OperatingPoint {
  double speed_rpm = 0.0;
  double bmep_bar = 0.0;
  double spark_angle_CAbTDC = 0.0;
  double mdot_exh_kg_per_s = 0.0;
  double bsfc_g_per_kWh = 0.0;
  double T_exh_C = 0.0;
  std::array<double, 3> engine_out_ppm{};  // CO, NOx, THC
  double y_CO2 = 0.0;
  double power_kW = 0.0;
  RadialProfile fitted_profile;
  std::array<double, kProfileSampleCount> radial_temps_C{};  // TT0..TT_R

  // Engine-out massflows including the estimated H2 share.
  SpeciesFlows engine_out_flows(const GasConstants& constants) const;
  EngineDrive drive(int op_index, const GasConstants& constants) const;
};

class EngineMap {
 public:
  explicit EngineMap(std::vector<OperatingPoint> points);

  std::size_t size() const { return points_.size(); }
  const OperatingPoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<OperatingPoint>& points() const { return points_; }

  std::size_t min_bsfc_index() const { return min_bsfc_index_; }

  // Exact (speed, bmep, sa) lookup.
  std::optional<std::size_t> find(double speed_rpm, double bmep_bar,
                                  double sa) const;
  std::size_t nearest(double speed_rpm, double bmep_bar, double sa) const;

  // Inverse-distance-weighted average over the 4 nearest points in
  // normalized (speed/1000, bmep/10, sa/10) space. An exact hit returns the
  // tabulated point. The returned point's fitted profile and radial temps
  // come from the nearest tabulated point.
  OperatingPoint interpolate_setpoint(double speed_rpm, double bmep_bar,
                                      double sa) const;
  // Index of the nearest tabulated point to a query (for profile lookup).
  std::size_t nearest_to_setpoint(double speed_rpm, double bmep_bar,
                                  double sa) const {
    return nearest(speed_rpm, bmep_bar, sa);
  }

  // Distinct sorted setpoint values (used by the policy packer).
  std::vector<double> distinct_speeds() const;
  std::vector<double> distinct_bmeps() const;
  std::vector<double> distinct_spark_angles() const;

  // Smallest engine-out species massflow over the map (kg/s), for the
  // emission weight normalization.
  double min_engine_out_flow(Species s, const GasConstants& constants) const;
  double min_bsfc() const { return points_[min_bsfc_index_].bsfc_g_per_kWh; }

 private:
  std::vector<OperatingPoint> points_;
  std::size_t min_bsfc_index_ = 0;
};

// CSV schema (header required): speed_rpm, bmep_bar, sa_cabtdc,
// mdot_exh_g_per_s, bsfc_g_per_kwh, co_ppm, nox_ppm, thc_ppm, y_co2,
// t_exh_c, tt0_c, tt_r3_c, tt_2r3_c, tt_r_c.
// The tt* columns feed the radial profile fit. Schema violations raise
// errors naming the row/column; duplicate (speed, bmep, sa) keys raise.
EngineMap load_map(const std::string& path, const DiscSolutionLibrary& library);
EngineMap map_from_csv_text(const std::string& text, const std::string& origin,
                            const DiscSolutionLibrary& library);
void save_map_csv(const EngineMap& map, const std::string& path,
                  const std::string& provenance);

// Causal boxcar average over the trailing `window_s` seconds (inclusive of
// the current sample; shorter effective window at the start).
std::vector<double> rolling_average(const std::vector<double>& series,
                                    double dt_s, double window_s = 5.0);

// Streaming form of the same filter, used by the closed-loop simulation.
class RollingAverage {
 public:
  RollingAverage(double dt_s, double window_s);
  double push(double value);

 private:
  std::size_t capacity_;
  std::vector<double> buffer_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

// Two-phase benchmark controller: a constant heating point for t < t_switch,
// the map's minimum-BSFC point afterwards. An infinite t_switch (sentinel:
// any value >= kNeverSwitch) holds the heating point forever.
inline constexpr double kNeverSwitch = 1e30;

struct SuboptimalController {
  std::size_t heat_op_index = 0;
  double t_switch_s = 0.0;

  std::size_t op_at(double t_s, const EngineMap& map) const {
    return t_s < t_switch_s ? heat_op_index : map.min_bsfc_index();
  }
};

// Drive function running the benchmark controller on the given map.
DriveFunction suboptimal_drive(const EngineMap& map,
                               const SuboptimalController& controller,
                               const GasConstants& constants);

}  // namespace twc
