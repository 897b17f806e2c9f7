#include "twc/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace twc {

namespace {

// One implicit-Euler step of dT/dt = T'' + T'/r + q on a uniform radial grid
// with symmetry at r=0 and T=0 at r=1. The tridiagonal system is solved with
// the Thomas algorithm. Implicit Euler is unconditionally stable and, as an
// M-matrix scheme, preserves the monotonicity of the solution family.
void implicit_step(std::vector<double>& temp, double dt, double dr,
                   double source) {
  const std::size_t n = temp.size();  // grid nodes, last is the boundary
  const std::size_t m = n - 1;        // unknowns (boundary pinned at 0)
  std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rhs(m, 0.0);
  const double a = dt / (dr * dr);

  // r = 0: dT/dt = 4 (T1 - T0)/dr^2 + q  (axisymmetric limit)
  diag[0] = 1.0 + 4.0 * a;
  upper[0] = -4.0 * a;
  rhs[0] = temp[0] + dt * source;
  for (std::size_t i = 1; i < m; ++i) {
    const double r = static_cast<double>(i) * dr;
    const double c_minus = a * (1.0 - dr / (2.0 * r));
    const double c_plus = a * (1.0 + dr / (2.0 * r));
    lower[i] = -c_minus;
    diag[i] = 1.0 + c_minus + c_plus;
    upper[i] = -c_plus;
    rhs[i] = temp[i] + dt * source;
    // Boundary node value is 0, so no rhs correction needed for i = m-1.
  }

  for (std::size_t i = 1; i < m; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  temp[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    temp[i] = (rhs[i] - upper[i] * temp[i + 1]) / diag[i];
  temp[m] = 0.0;
}

// Advance from t_from to t_to in enough substeps to keep the implicit-Euler
// time error negligible relative to the interval.
void advance(std::vector<double>& temp, double t_from, double t_to, double dr,
             double source) {
  const double span = t_to - t_from;
  if (span <= 0.0) return;
  // Substep: no larger than 2% of current time (error control for the
  // log-spaced schedule) nor dr^2 (resolves the early boundary layer).
  const double target = std::min(0.02 * std::max(t_to, 1e-5), dr * dr);
  const int steps = std::max(1, static_cast<int>(std::ceil(span / target)));
  const double dt = span / steps;
  for (int k = 0; k < steps; ++k) implicit_step(temp, dt, dr, source);
}

}  // namespace

double DiscSolutionLibrary::value_at_radius(std::size_t time_index,
                                            double r_normalized) const {
  const double r = std::clamp(r_normalized, 0.0, 1.0);
  const std::size_t nr = n_radii();
  const double pos = r * static_cast<double>(nr - 1);
  const std::size_t lo =
      std::min(static_cast<std::size_t>(pos), nr - 2);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * value_at(time_index, lo) +
         frac * value_at(time_index, lo + 1);
}

DiscSolutionLibrary precompute_library(std::size_t n_radii,
                                       std::size_t n_times) {
  if (n_radii < 16 || n_times < 16)
    throw std::invalid_argument(
        "precompute_library: need at least 16 radii and 16 times");

  const double source = 1.0;
  const double dr = 1.0 / static_cast<double>(n_radii - 1);

  // Detect the steady-state time: march t -> 2t until the solution stops
  // changing. The steady solution of the discrete system is q(1 - r^2)/4.
  const double t_first = 1e-4;
  double t_steady = t_first;
  {
    std::vector<double> temp(n_radii, 0.0);
    advance(temp, 0.0, t_first, dr, source);
    std::vector<double> prev = temp;
    double t = t_first;
    for (int iter = 0; iter < 40; ++iter) {
      advance(temp, t, 2.0 * t, dr, source);
      t *= 2.0;
      double diff = 0.0;
      for (std::size_t i = 0; i < n_radii; ++i)
        diff = std::max(diff, std::abs(temp[i] - prev[i]));
      prev = temp;
      if (diff < 1e-4) {
        t_steady = t;
        break;
      }
      t_steady = t;
    }
    if (t_steady <= t_first)
      throw std::runtime_error(
          "precompute_library: steady state not reached; residual diagnostics "
          "unavailable");
  }

  DiscSolutionLibrary lib;
  lib.radii_normalized.resize(n_radii);
  for (std::size_t i = 0; i < n_radii; ++i)
    lib.radii_normalized[i] = static_cast<double>(i) * dr;

  lib.times_normalized.resize(n_times);
  const double log_lo = std::log(t_first);
  const double log_hi = std::log(t_steady);
  for (std::size_t k = 0; k < n_times; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n_times - 1);
    lib.times_normalized[k] = std::exp(log_lo + f * (log_hi - log_lo));
  }

  lib.values.assign(n_times * n_radii, 0.0);
  std::vector<double> temp(n_radii, 0.0);
  double t = 0.0;
  for (std::size_t k = 0; k < n_times; ++k) {
    advance(temp, t, lib.times_normalized[k], dr, source);
    t = lib.times_normalized[k];
    std::copy(temp.begin(), temp.end(), lib.values.begin() + k * n_radii);
  }

  const double peak = *std::max_element(lib.values.begin(), lib.values.end());
  if (!(peak > 0.0))
    throw std::runtime_error("precompute_library: degenerate solution family");
  for (double& v : lib.values) v /= peak;
  return lib;
}

namespace {
constexpr char kLibraryMagic[4] = {'T', 'W', 'C', 'D'};
constexpr std::uint32_t kLibraryVersion = 1;
}  // namespace

void DiscSolutionLibrary::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write disc library: " + path);
  out.write(kLibraryMagic, 4);
  const std::uint32_t version = kLibraryVersion;
  const std::uint32_t nt = static_cast<std::uint32_t>(n_times());
  const std::uint32_t nr = static_cast<std::uint32_t>(n_radii());
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&nt), sizeof(nt));
  out.write(reinterpret_cast<const char*>(&nr), sizeof(nr));
  auto write_vec = [&out](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  write_vec(times_normalized);
  write_vec(radii_normalized);
  write_vec(values);
}

DiscSolutionLibrary DiscSolutionLibrary::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open disc library: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kLibraryMagic, 4) != 0)
    throw std::runtime_error("disc library has wrong magic: " + path);
  std::uint32_t version = 0, nt = 0, nr = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&nt), sizeof(nt));
  in.read(reinterpret_cast<char*>(&nr), sizeof(nr));
  if (!in || version != kLibraryVersion)
    throw std::runtime_error("disc library has unsupported version: " + path);
  DiscSolutionLibrary lib;
  lib.times_normalized.resize(nt);
  lib.radii_normalized.resize(nr);
  lib.values.resize(static_cast<std::size_t>(nt) * nr);
  auto read_vec = [&in](std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  read_vec(lib.times_normalized);
  read_vec(lib.radii_normalized);
  read_vec(lib.values);
  if (!in) throw std::runtime_error("disc library truncated: " + path);
  return lib;
}

RadialProfile fit_profile_time(
    const DiscSolutionLibrary& library,
    const std::array<double, kProfileSampleCount>& measured_temps_C) {
  for (double t : measured_temps_C)
    if (!std::isfinite(t))
      throw std::invalid_argument("fit_profile_time: non-finite temperature");

  const double tt0 = measured_temps_C.front();
  const double ttR = measured_temps_C.back();
  if (tt0 == ttR) return RadialProfile{-1};

  double best_err = std::numeric_limits<double>::infinity();
  int best_index = -1;
  for (std::size_t k = 0; k < library.n_times(); ++k) {
    const double v0 = library.value_at(k, 0);
    if (v0 <= 0.0) continue;
    // A1*That + A2 with A1*v0 + A2 = tt0 and A2 = ttR (That(t, 1) = 0).
    const double a2 = ttR;
    const double a1 = (tt0 - ttR) / v0;
    double err = 0.0;
    for (std::size_t i = 0; i < kProfileSampleCount; ++i) {
      const double r = static_cast<double>(i) /
                       static_cast<double>(kProfileSampleCount - 1);
      const double fitted = a1 * library.value_at_radius(k, r) + a2;
      err += std::abs(fitted - measured_temps_C[i]);
    }
    if (err < best_err) {  // strict: ties keep the smaller index
      best_err = err;
      best_index = static_cast<int>(k);
    }
  }
  return RadialProfile{best_index};
}

std::vector<double> interpolate_channel_temps(
    const DiscSolutionLibrary& library, const RadialProfile& profile,
    double center_temp_C, double radial_delta_C, std::size_t channel_count) {
  if (channel_count < 1)
    throw std::invalid_argument("interpolate_channel_temps: M must be >= 1");
  std::vector<double> temps(channel_count, center_temp_C);
  if (profile.flat() || radial_delta_C == 0.0) return temps;

  const auto k = static_cast<std::size_t>(profile.time_index);
  const double v0 = library.value_at(k, 0);
  // Pin the profile to T_center at r=0 and T_center + delta at r=1.
  const double a2 = center_temp_C + radial_delta_C;
  const double a1 = -radial_delta_C / v0;
  for (std::size_t m = 1; m <= channel_count; ++m) {
    const double r = (static_cast<double>(m) - 0.5) /
                     static_cast<double>(channel_count);
    temps[m - 1] = a1 * library.value_at_radius(k, r) + a2;
  }
  return temps;
}

std::vector<double> channel_massflow_weights(std::size_t channel_count) {
  if (channel_count < 1)
    throw std::invalid_argument("channel_massflow_weights: M must be >= 1");
  std::vector<double> w(channel_count);
  const double m2 = static_cast<double>(channel_count) *
                    static_cast<double>(channel_count);
  for (std::size_t m = 1; m <= channel_count; ++m)
    w[m - 1] = (2.0 * static_cast<double>(m) - 1.0) / m2;
  return w;
}

}  // namespace twc
