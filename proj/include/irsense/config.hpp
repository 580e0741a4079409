// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "irsense/montecarlo.hpp"

namespace irsense {

/// Everything a command-line run needs: the sweep definition (which embeds
/// the system and grid setup), an output directory and the seed for
/// single-shot stochastic commands.
struct RunConfig {
  MonteCarloConfig montecarlo;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  bool base_seed_set = false;  ///< base_seed was given explicitly (file or flag)

  void validate() const { montecarlo.validate(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(const std::string& key, std::string_view v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double out = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw config_error(key, "expected a number, got '" + std::string(v) + "'");
  }
}

inline long long parse_int(const std::string& key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw config_error(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const std::size_t comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Applies one flat key=value pair to the run configuration. Unknown keys
/// and malformed values raise config_error naming the key.
inline void apply_config_key(RunConfig& run, const std::string& key,
                             std::string_view value) {
  MonteCarloConfig& mc = run.montecarlo;
  SystemConfig& sys = mc.system;
  GridParams& grids = mc.grids;
  using detail::parse_double;
  using detail::parse_int;

  if (key == "n_x") sys.n_x = static_cast<int>(parse_int(key, value));
  else if (key == "n_y") sys.n_y = static_cast<int>(parse_int(key, value));
  else if (key == "d_x") sys.d_x = parse_double(key, value);
  else if (key == "d_y") sys.d_y = parse_double(key, value);
  else if (key == "carrier_freq") sys.carrier_freq = parse_double(key, value);
  else if (key == "wavelength") sys.wavelength = parse_double(key, value);
  else if (key == "delta_f") sys.delta_f = parse_double(key, value);
  else if (key == "t_sym") sys.t_sym = parse_double(key, value);
  else if (key == "n_c") sys.n_c = static_cast<int>(parse_int(key, value));
  else if (key == "q") sys.q = static_cast<int>(parse_int(key, value));
  else if (key == "l") sys.l = static_cast<int>(parse_int(key, value));
  else if (key == "p_t") sys.p_t = parse_double(key, value);
  else if (key == "g1") sys.g1 = parse_double(key, value);
  else if (key == "g2") sys.g2 = parse_double(key, value);
  else if (key == "d1") sys.d1 = parse_double(key, value);
  else if (key == "d2") sys.d2 = parse_double(key, value);
  else if (key == "sigma_rcs") sys.sigma_rcs = parse_double(key, value);
  else if (key == "radiation_exponent")
    sys.radiation_exponent = parse_double(key, value);
  else if (key == "r_tau") grids.r_tau = static_cast<int>(parse_int(key, value));
  else if (key == "r_nu") grids.r_nu = static_cast<int>(parse_int(key, value));
  else if (key == "r_az") grids.r_az = static_cast<int>(parse_int(key, value));
  else if (key == "r_el") grids.r_el = static_cast<int>(parse_int(key, value));
  else if (key == "tau_max") grids.tau_max = parse_double(key, value);
  else if (key == "nu_max") grids.nu_max = parse_double(key, value);
  else if (key == "trials") mc.trials = static_cast<int>(parse_int(key, value));
  else if (key == "snr_grid_db") {
    mc.snr_grid_db.clear();
    for (auto item : detail::split_list(value))
      mc.snr_grid_db.push_back(parse_double(key, item));
  } else if (key == "q_values") {
    mc.q_values.clear();
    for (auto item : detail::split_list(value))
      mc.q_values.push_back(static_cast<int>(parse_int(key, item)));
  } else if (key == "base_seed") {
    mc.base_seed = static_cast<std::uint64_t>(parse_int(key, value));
    run.base_seed_set = true;
  } else if (key == "estimators") {
    mc.run_hosvd = false;
    mc.run_baseline = false;
    for (auto item : detail::split_list(value)) {
      if (item == "hosvd") mc.run_hosvd = true;
      else if (item == "baseline") mc.run_baseline = true;
      else if (item == "both") mc.run_hosvd = mc.run_baseline = true;
      else
        throw config_error(key, "expected hosvd, baseline or both, got '" +
                                    std::string(item) + "'");
    }
  } else if (key == "on_grid_truth") {
    mc.on_grid_truth = parse_int(key, value) != 0;
  } else if (key == "output_dir") {
    run.output_dir = std::string(value);
  } else if (key == "seed") {
    run.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else {
    throw config_error(key, "unknown configuration key");
  }
}

/// Parses flat `key = value` text ('#' starts a comment). Returns the config
/// with derived fields (wavelength, t_sym, spacings) filled in; call
/// validate() after applying any further overrides.
inline RunConfig parse_run_config(std::istream& is) {
  RunConfig run;
  // File values replace the defaults wholesale, so zero out the derived
  // fields and re-derive after parsing.
  run.montecarlo.system = SystemConfig{};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    const std::size_t hash = view.find('#');
    if (hash != std::string_view::npos) view = detail::trim(view.substr(0, hash));
    if (view.empty()) continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos)
      throw config_error("line " + std::to_string(line_no),
                         "expected 'key = value'");
    const std::string key(detail::trim(view.substr(0, eq)));
    apply_config_key(run, key, detail::trim(view.substr(eq + 1)));
  }
  run.montecarlo.system.derive();
  return run;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw config_error("config", "cannot read config file " + path.string());
  return parse_run_config(is);
}

/// Canonical serialization: one key = value per line, fixed order, parseable
/// by parse_run_config. Round trips to the same resolved run.
inline std::string serialize_run_config(const RunConfig& run) {
  const MonteCarloConfig& mc = run.montecarlo;
  const SystemConfig& sys = mc.system;
  std::ostringstream os;
  char buf[64];
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << key << " = " << buf << '\n';
  };
  os << "n_x = " << sys.n_x << '\n';
  os << "n_y = " << sys.n_y << '\n';
  num("d_x", sys.d_x);
  num("d_y", sys.d_y);
  num("carrier_freq", sys.carrier_freq);
  num("wavelength", sys.wavelength);
  num("delta_f", sys.delta_f);
  num("t_sym", sys.t_sym);
  os << "n_c = " << sys.n_c << '\n';
  os << "q = " << sys.q << '\n';
  os << "l = " << sys.l << '\n';
  num("p_t", sys.p_t);
  num("g1", sys.g1);
  num("g2", sys.g2);
  num("d1", sys.d1);
  num("d2", sys.d2);
  num("sigma_rcs", sys.sigma_rcs);
  num("radiation_exponent", sys.radiation_exponent);
  os << "r_tau = " << mc.grids.r_tau << '\n';
  os << "r_nu = " << mc.grids.r_nu << '\n';
  os << "r_az = " << mc.grids.r_az << '\n';
  os << "r_el = " << mc.grids.r_el << '\n';
  num("tau_max", mc.grids.tau_max);
  num("nu_max", mc.grids.nu_max);
  os << "trials = " << mc.trials << '\n';
  os << "snr_grid_db = ";
  for (std::size_t i = 0; i < mc.snr_grid_db.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", mc.snr_grid_db[i]);
    os << (i ? "," : "") << buf;
  }
  os << '\n';
  os << "q_values = ";
  for (std::size_t i = 0; i < mc.q_values.size(); ++i)
    os << (i ? "," : "") << mc.q_values[i];
  os << '\n';
  os << "base_seed = " << mc.base_seed << '\n';
  os << "estimators = ";
  if (mc.run_hosvd && mc.run_baseline) os << "both";
  else if (mc.run_hosvd) os << "hosvd";
  else os << "baseline";
  os << '\n';
  os << "on_grid_truth = " << (mc.on_grid_truth ? 1 : 0) << '\n';
  os << "output_dir = " << run.output_dir << '\n';
  if (run.seed) os << "seed = " << *run.seed << '\n';
  return os.str();
}

}  // namespace irsense
