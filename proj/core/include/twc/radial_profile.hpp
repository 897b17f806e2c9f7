// Radial temperature interpolation from precomputed flat-disc transient
// heat-equation solutions.
//
// The disc problem: dT/dt = laplacian(T) + q on the unit disc with T(0,r)=0,
// T(t,1)=0 and a constant homogeneous source q. Solutions are normalized so
// the global maximum over the stored time window is 1. A monolith slice's
// radial profile is A1*That(t',r) + A2 with (A1, A2) pinned by the known
// center and periphery temperatures; t' is fitted per engine operating point
// from measured steady-state radial temperatures.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace twc {

struct DiscSolutionLibrary {
  std::vector<double> radii_normalized;  // ascending grid on [0, 1]
  std::vector<double> times_normalized;  // ascending, log-spaced
  // Row-major [time][radius], normalized to [0, 1].
  std::vector<double> values;

  std::size_t n_radii() const { return radii_normalized.size(); }
  std::size_t n_times() const { return times_normalized.size(); }

  double value_at(std::size_t time_index, std::size_t radius_index) const {
    return values[time_index * n_radii() + radius_index];
  }
  // Linear interpolation along the radial grid at fixed stored time.
  double value_at_radius(std::size_t time_index, double r_normalized) const;

  void save_binary(const std::string& path) const;
  static DiscSolutionLibrary load_binary(const std::string& path);
};

// Solves the disc problem by radial method of lines (implicit Euler on a
// uniform radial grid) and stores n_times log-spaced snapshots between
// t = 1e-4 and the detected steady state. Requires n_radii, n_times >= 16.
DiscSolutionLibrary precompute_library(std::size_t n_radii,
                                       std::size_t n_times);

// Fitted interpolation profile for one operating point. A negative time
// index marks the degenerate flat profile (no radial variation resolvable).
struct RadialProfile {
  int time_index = -1;
  bool flat() const { return time_index < 0; }
};

inline constexpr std::size_t kProfileSampleCount = 4;  // r = 0, R/3, 2R/3, R

// Fits the stored time whose scaled/offset profile best matches (1-norm) the
// measured temperatures at r = {0, R/3, 2R/3, R}. The scaling pins the
// profile exactly at r=0 and r=R. Ties break toward the smaller time index.
// Equal center and edge temperatures yield the flat sentinel.
RadialProfile fit_profile_time(
    const DiscSolutionLibrary& library,
    const std::array<double, kProfileSampleCount>& measured_temps_C);

// Channel temperatures at annulus midpoints r_m = (m - 1/2)/M for m = 1..M,
// scaled so the profile passes through T_center at r=0 and
// T_center + radial_delta at r=1.
std::vector<double> interpolate_channel_temps(
    const DiscSolutionLibrary& library, const RadialProfile& profile,
    double center_temp_C, double radial_delta_C, std::size_t channel_count);

// Massflow fraction through channel m (1-based): (2m - 1) / M^2.
std::vector<double> channel_massflow_weights(std::size_t channel_count);

}  // namespace twc
