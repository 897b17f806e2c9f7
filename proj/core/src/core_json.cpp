// JSON (de)serialization of the two-monolith system spec.

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "twc/core.hpp"

namespace twc {

namespace {

using nlohmann::json;

json geometry_to_json(const MonolithGeometry& g) {
  json j;
  j["length_total_m"] = g.length_total_m;
  j["radius_m"] = g.radius_m;
  j["slice_lengths_m"] = g.slice_lengths_m;
  j["slice_center_distances_m"] = g.slice_center_distances_m;
  j["wall_thickness_m"] = g.wall_thickness_m;
  j["channel_width_m"] = g.channel_width_m;
  j["mass_kg"] = g.mass_kg;
  return j;
}

MonolithGeometry geometry_from_json(const json& j) {
  MonolithGeometry g;
  g.length_total_m = j.at("length_total_m").get<double>();
  g.radius_m = j.at("radius_m").get<double>();
  g.slice_lengths_m = j.at("slice_lengths_m").get<std::vector<double>>();
  if (j.contains("channel_width_m") || j.contains("wall_thickness_m")) {
    g.channel_width_m = j.at("channel_width_m").get<double>();
    g.wall_thickness_m = j.at("wall_thickness_m").get<double>();
  } else if (j.contains("open_frontal_area")) {
    std::tie(g.channel_width_m, g.wall_thickness_m) =
        channel_dims_from_ofa(j.at("open_frontal_area").get<double>());
  } else {
    throw std::runtime_error(
        "geometry needs (channel_width_m, wall_thickness_m) or "
        "open_frontal_area");
  }
  g.mass_kg = j.at("mass_kg").get<double>();
  if (j.contains("slice_center_distances_m"))
    g.slice_center_distances_m =
        j.at("slice_center_distances_m").get<std::vector<double>>();
  else
    g.derive_center_distances();
  return g;
}

json thermal_to_json(const ThermalParams& t) {
  return json{{"k_ax_W_per_mK", t.k_ax_W_per_mK},
              {"k_rad_W_per_mK", t.k_rad_W_per_mK},
              {"k_amb_W_per_mK", t.k_amb_W_per_mK},
              {"t_amb_m", t.t_amb_m},
              {"cp_J_per_kgK", t.cp_J_per_kgK},
              {"cp_exh_J_per_kgK", t.cp_exh_J_per_kgK},
              {"T_amb_C", t.T_amb_C}};
}

ThermalParams thermal_from_json(const json& j) {
  ThermalParams t;
  t.k_ax_W_per_mK = j.at("k_ax_W_per_mK").get<double>();
  t.k_rad_W_per_mK = j.at("k_rad_W_per_mK").get<double>();
  t.k_amb_W_per_mK = j.at("k_amb_W_per_mK").get<double>();
  t.t_amb_m = j.at("t_amb_m").get<double>();
  t.cp_J_per_kgK = j.at("cp_J_per_kgK").get<double>();
  t.cp_exh_J_per_kgK = j.at("cp_exh_J_per_kgK").get<double>();
  t.T_amb_C = j.at("T_amb_C").get<double>();
  return t;
}

json kinetics_to_json(const KineticParams& k) {
  json j;
  for (Species s : kAllSpecies) {
    j[species_name(s)] = {
        {"pre_exponential_A", k[s].pre_exponential_A},
        {"activation_energy_J_per_mol", k[s].activation_energy_J_per_mol}};
  }
  return j;
}

KineticParams kinetics_from_json(const json& j) {
  KineticParams k;
  for (Species s : {Species::CO, Species::NOx, Species::THC}) {
    const json& e = j.at(species_name(s));
    k[s].pre_exponential_A = e.at("pre_exponential_A").get<double>();
    k[s].activation_energy_J_per_mol =
        e.at("activation_energy_J_per_mol").get<double>();
  }
  if (j.contains("H2")) {
    const json& e = j.at("H2");
    k[Species::H2].pre_exponential_A =
        e.at("pre_exponential_A").get<double>();
    k[Species::H2].activation_energy_J_per_mol =
        e.at("activation_energy_J_per_mol").get<double>();
  } else {
    k.mirror_h2_from_co();
  }
  return k;
}

json monolith_to_json(const MonolithSpec& m) {
  return json{{"name", m.name},
              {"geometry", geometry_to_json(m.geometry)},
              {"thermal", thermal_to_json(m.thermal)},
              {"kinetics", kinetics_to_json(m.kinetics)}};
}

MonolithSpec monolith_from_json(const json& j, const std::string& fallback) {
  MonolithSpec m;
  m.name = j.value("name", fallback);
  m.geometry = geometry_from_json(j.at("geometry"));
  m.thermal = thermal_from_json(j.at("thermal"));
  m.kinetics = kinetics_from_json(j.at("kinetics"));
  return m;
}

}  // namespace

SystemSpec system_spec_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("system spec JSON parse error: ") +
                             e.what());
  }
  SystemSpec spec;
  spec.twc1 = monolith_from_json(j.at("twc1"), "TWC1");
  spec.twc2 = monolith_from_json(j.at("twc2"), "TWC2");
  spec.p_twc_pa = j.value("p_twc_pa", 101325.0);
  spec.channels = j.value("channels", 100);
  return spec;
}

SystemSpec load_system_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return system_spec_from_json_text(ss.str());
}

std::string system_spec_to_json_text(const SystemSpec& spec) {
  json j;
  j["twc1"] = monolith_to_json(spec.twc1);
  j["twc2"] = monolith_to_json(spec.twc2);
  j["p_twc_pa"] = spec.p_twc_pa;
  j["channels"] = spec.channels;
  return j.dump(2) + "\n";
}

void save_system_spec(const SystemSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write system spec: " + path);
  out << system_spec_to_json_text(spec);
}

}  // namespace twc
