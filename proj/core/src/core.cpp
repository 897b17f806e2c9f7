#include "twc/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace twc {

const char* species_name(Species s) {
  switch (s) {
    case Species::CO:
      return "CO";
    case Species::NOx:
      return "NOx";
    case Species::THC:
      return "THC";
    case Species::H2:
      return "H2";
  }
  return "?";
}

SpeciesFlows SpeciesFlows::scaled(double factor) const {
  SpeciesFlows out;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    out.kg_per_s[i] = kg_per_s[i] * factor;
  return out;
}

SpeciesFlows SpeciesFlows::operator+(const SpeciesFlows& o) const {
  SpeciesFlows out;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    out.kg_per_s[i] = kg_per_s[i] + o.kg_per_s[i];
  return out;
}

SpeciesFlows SpeciesFlows::operator-(const SpeciesFlows& o) const {
  SpeciesFlows out;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    out.kg_per_s[i] = kg_per_s[i] - o.kg_per_s[i];
  return out;
}

double SpeciesFlows::total() const {
  return std::accumulate(kg_per_s.begin(), kg_per_s.end(), 0.0);
}

bool SpeciesFlows::all_nonnegative() const {
  for (double v : kg_per_s)
    if (v < 0.0) return false;
  return true;
}

bool SpeciesFlows::all_finite() const {
  for (double v : kg_per_s)
    if (!std::isfinite(v)) return false;
  return true;
}

double open_frontal_area(double channel_width_m, double wall_thickness_m) {
  if (channel_width_m <= 0.0)
    throw std::domain_error("open_frontal_area: channel width must be > 0");
  if (wall_thickness_m < 0.0 || wall_thickness_m >= channel_width_m)
    throw std::domain_error(
        "open_frontal_area: requires 0 <= wall thickness < channel width");
  const double open = (channel_width_m - wall_thickness_m) / channel_width_m;
  return open * open;
}

std::pair<double, double> channel_dims_from_ofa(double ofa,
                                                double channel_width_m) {
  if (ofa <= 0.0 || ofa > 1.0)
    throw std::domain_error("channel_dims_from_ofa: OFA must be in (0, 1]");
  const double tw = channel_width_m * (1.0 - std::sqrt(ofa));
  return {channel_width_m, tw};
}

double MonolithGeometry::open_frontal_area() const {
  return twc::open_frontal_area(channel_width_m, wall_thickness_m);
}

double MonolithGeometry::frontal_area_m2() const {
  return M_PI * radius_m * radius_m;
}

void MonolithGeometry::derive_center_distances() {
  slice_center_distances_m.clear();
  for (std::size_t n = 0; n + 1 < slice_lengths_m.size(); ++n)
    slice_center_distances_m.push_back(
        0.5 * (slice_lengths_m[n] + slice_lengths_m[n + 1]));
}

KineticParams KineticParams::from_measured(const ArrheniusParams& co,
                                           const ArrheniusParams& nox,
                                           const ArrheniusParams& thc) {
  KineticParams p;
  p[Species::CO] = co;
  p[Species::NOx] = nox;
  p[Species::THC] = thc;
  p[Species::H2] = co;
  return p;
}

namespace {

void note(std::vector<std::string>& report, const std::string& label,
          const std::string& msg) {
  report.push_back(label.empty() ? msg : label + ": " + msg);
}

}  // namespace

std::vector<std::string> validate_geometry(const MonolithGeometry& g,
                                           const std::string& label) {
  std::vector<std::string> report;
  if (g.length_total_m <= 0.0) note(report, label, "total length must be > 0");
  if (g.radius_m <= 0.0) note(report, label, "radius must be > 0");
  if (g.mass_kg <= 0.0) note(report, label, "mass must be > 0");
  if (g.channel_width_m <= 0.0)
    note(report, label, "channel width must be > 0");
  if (g.wall_thickness_m <= 0.0 || g.wall_thickness_m >= g.channel_width_m)
    note(report, label, "wall thickness must satisfy 0 < t_w < l_c");
  if (g.slice_lengths_m.empty()) {
    note(report, label, "at least one axial slice required");
    return report;
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < g.slice_lengths_m.size(); ++n) {
    const double ln = g.slice_lengths_m[n];
    if (ln <= 0.0) {
      note(report, label,
           "slice " + std::to_string(n + 1) + " length must be > 0");
      continue;
    }
    sum += ln;
    // Convective equilibrium: gas must reach wall temperature within a
    // slice, which bounds slices from below at one fifth of the total
    // length (equivalently, at most five equilibrium slices).
    if (ln < g.length_total_m / 5.0 - 1e-12)
      note(report, label,
           "slice " + std::to_string(n + 1) + " length " + std::to_string(ln) +
               " below convective equilibrium bound L/5 = " +
               std::to_string(g.length_total_m / 5.0));
  }
  if (g.length_total_m > 0.0 &&
      std::abs(sum - g.length_total_m) > 1e-9 * g.length_total_m)
    note(report, label, "slice lengths sum to " + std::to_string(sum) +
                            ", expected total length " +
                            std::to_string(g.length_total_m));
  if (g.slice_center_distances_m.size() + 1 != g.slice_lengths_m.size()) {
    note(report, label, "need N-1 slice center distances");
  } else {
    for (std::size_t n = 0; n + 1 < g.slice_lengths_m.size(); ++n) {
      const double expect =
          0.5 * (g.slice_lengths_m[n] + g.slice_lengths_m[n + 1]);
      if (std::abs(g.slice_center_distances_m[n] - expect) > 1e-9)
        note(report, label,
             "center distance " + std::to_string(n + 1) +
                 " inconsistent with slice lengths");
    }
  }
  return report;
}

std::vector<std::string> validate_state(const MonolithState& s,
                                        const std::string& label) {
  std::vector<std::string> report;
  if (s.slice_center_temps_C.empty())
    note(report, label, "state must hold at least one slice temperature");
  for (double t : s.slice_center_temps_C) {
    if (!std::isfinite(t)) {
      note(report, label, "non-finite slice temperature");
      continue;
    }
    if (t < kMinStateTempC || t > kMaxStateTempC)
      note(report, label, "slice temperature " + std::to_string(t) +
                              " outside operational envelope [-100, 1200] C");
  }
  if (!std::isfinite(s.radial_delta_C))
    note(report, label, "non-finite radial delta");
  return report;
}

std::vector<std::string> validate_thermal(const ThermalParams& p,
                                          const std::string& label) {
  std::vector<std::string> report;
  if (p.k_ax_W_per_mK <= 0.0) note(report, label, "k_ax must be > 0");
  if (p.k_rad_W_per_mK <= 0.0) note(report, label, "k_rad must be > 0");
  if (p.k_amb_W_per_mK <= 0.0) note(report, label, "k_amb must be > 0");
  if (p.t_amb_m <= 0.0) note(report, label, "t_amb must be > 0");
  if (p.cp_J_per_kgK <= 0.0) note(report, label, "cp must be > 0");
  if (p.cp_exh_J_per_kgK <= 0.0) note(report, label, "cp_exh must be > 0");
  if (!std::isfinite(p.T_amb_C)) note(report, label, "T_amb must be finite");
  return report;
}

std::vector<std::string> validate_kinetics(const KineticParams& k,
                                           const std::string& label) {
  std::vector<std::string> report;
  for (Species s : kAllSpecies) {
    if (k[s].pre_exponential_A <= 0.0)
      note(report, label,
           std::string("pre-exponential A for ") + species_name(s) +
               " must be > 0");
    if (k[s].activation_energy_J_per_mol <= 0.0)
      note(report, label,
           std::string("activation energy for ") + species_name(s) +
               " must be > 0");
  }
  if (k[Species::H2].pre_exponential_A != k[Species::CO].pre_exponential_A ||
      k[Species::H2].activation_energy_J_per_mol !=
          k[Species::CO].activation_energy_J_per_mol)
    note(report, label, "H2 rate parameters must equal CO's");
  return report;
}

std::vector<std::string> validate_system(const SystemSpec& spec) {
  std::vector<std::string> report;
  for (const MonolithSpec* m : {&spec.twc1, &spec.twc2}) {
    const std::string label = m->name;
    auto geo = validate_geometry(m->geometry, label);
    report.insert(report.end(), geo.begin(), geo.end());
    auto th = validate_thermal(m->thermal, label);
    report.insert(report.end(), th.begin(), th.end());
    auto ki = validate_kinetics(m->kinetics, label);
    report.insert(report.end(), ki.begin(), ki.end());
  }
  if (spec.p_twc_pa <= 0.0) report.push_back("p_twc must be > 0");
  if (spec.channels < 1) report.push_back("channel count must be >= 1");
  return report;
}

SystemSpec reference_system_spec() {
  SystemSpec spec;
  spec.p_twc_pa = 101325.0;
  spec.channels = 100;

  // First monolith: three axial slices.
  MonolithSpec& m1 = spec.twc1;
  m1.name = "TWC1";
  m1.geometry.length_total_m = 0.1221;
  m1.geometry.radius_m = 0.0527;
  m1.geometry.slice_lengths_m = {32.1e-3, 48.2e-3, 41.8e-3};
  m1.geometry.derive_center_distances();
  std::tie(m1.geometry.channel_width_m, m1.geometry.wall_thickness_m) =
      channel_dims_from_ofa(0.935);
  m1.geometry.mass_kg = 0.418;
  m1.thermal = ThermalParams{319.0, 46.6, 0.421, 10e-3, 2318.0, 1050.0, 25.0};
  m1.kinetics = KineticParams::from_measured({59.5e9, 84.0e3},
                                             {27.6e6, 82.1e3},
                                             {11.2e9, 51.0e3});

  // Second monolith: single axial slice, roughly half the length.
  MonolithSpec& m2 = spec.twc2;
  m2.name = "TWC2";
  m2.geometry.length_total_m = 0.0611;
  m2.geometry.radius_m = 0.0527;
  m2.geometry.slice_lengths_m = {0.0611};
  m2.geometry.derive_center_distances();
  std::tie(m2.geometry.channel_width_m, m2.geometry.wall_thickness_m) =
      channel_dims_from_ofa(0.846);
  m2.geometry.mass_kg = 0.248;
  m2.thermal = ThermalParams{319.0, 4.53, 0.602, 10e-3, 2360.0, 1050.0, 25.0};
  m2.kinetics = KineticParams::from_measured({23.8e9, 84.0e3},
                                             {16.1e6, 82.1e3},
                                             {5.63e9, 51.0e3});
  return spec;
}

}  // namespace twc
