#ifndef RADSCAT_CONFIG_HPP
#define RADSCAT_CONFIG_HPP

// Run configuration for the command-line driver.
//
// The file is INI-style `key = value`, one per line, with `#` or `;`
// comments. Keys (all optional):
//
//   mode      = solve | residual | timedomain | selftest
//   potential = gaussian | random <seed> | eaton | luneburg | disk <c> <b> | table <file>
//   source    = plane [angle] | beam | point <x0> <y0>
//   k         = <wavenumber>                       (solve and residual)
//   eps       = <tolerance in (1e-15, 1e-1)>
//   grid      = <nx> <ny> <extent>                 square [-extent, extent]^2
//   field     = total | scattered | incident       (solve output)
//   threads   = <n>
//   out       = <directory>
//   times     = <t1> <t2> ...                      (timedomain frames)
//   pulse     = <amplitude> <t0> <rate>            (timedomain source profile)
//   band      = <K>                                (timedomain band limit)
//   sweep     = <high> <mid> <per_level> <levels>  (timedomain frequency layout)
//   residual_h = <step>                            (0 picks 0.1 / k)

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "radscat/incident.hpp"
#include "radscat/potentials.hpp"
#include "radscat/timedomain.hpp"

namespace radscat {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class RunMode { solve, residual, timedomain, selftest };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::solve: return "solve";
    case RunMode::residual: return "residual";
    case RunMode::timedomain: return "timedomain";
    case RunMode::selftest: return "selftest";
  }
  return "unknown";
}

struct PotentialSpec {
  std::string name = "gaussian";
  std::uint64_t seed = 1234;
  double c = 0.5, radius = 1.0;  // disk
  std::string file;              // table

  RadialPotential build() const {
    if (name == "gaussian") return gaussian_bump();
    if (name == "random") return random_discontinuous(seed);
    if (name == "eaton") return eaton_lens();
    if (name == "luneburg") return luneburg_lens();
    if (name == "disk") return constant_disk(c, radius);
    if (name == "table") return table_potential(file);
    throw ConfigError("potential: unknown model '" + name + "'");
  }

  std::string describe() const {
    std::ostringstream s;
    s << name;
    if (name == "random") s << " " << seed;
    if (name == "disk") s << " " << c << " " << radius;
    if (name == "table") s << " " << file;
    return s.str();
  }
};

struct SourceSpec {
  std::string kind = "plane";
  double angle = std::numbers::pi / 3.0;
  double x0 = 10.0, y0 = 10.0;

  IncidentField build(double k) const {
    if (kind == "plane") return plane_wave(k, angle);
    if (kind == "beam") return gaussian_beam(k);
    if (kind == "point") return point_source_incident(k, x0, y0, 1.0);
    throw ConfigError("source: unknown kind '" + kind + "'");
  }

  std::string describe() const {
    std::ostringstream s;
    s.precision(17);
    s << kind;
    if (kind == "plane") s << " " << angle;
    if (kind == "point") s << " " << x0 << " " << y0;
    return s.str();
  }
};

struct RunConfig {
  RunMode mode = RunMode::solve;
  std::string preset;
  PotentialSpec potential;
  SourceSpec source;
  double k = 30.0;
  double eps = 1e-13;
  int nx = 201, ny = 201;
  double extent = 8.0;
  std::string field = "total";
  int threads = 1;
  std::string out = "radscat-out";
  double residual_h = 0.0;

  std::vector<double> times = {13.6, 19.0, 28.0, 34.0, 37.0};
  double pulse_amplitude = std::sqrt(8.0), pulse_t0 = 10.0, pulse_rate = 4.0;
  double band = 16.0;
  SweepLayout sweep;

  void validate() const {
    if (!(eps > 1e-15 && eps < 1e-1)) throw ConfigError("eps: must lie in (1e-15, 1e-1)");
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("k: must be positive");
    if (nx < 2 || ny < 2) throw ConfigError("grid: need at least 2 points per axis");
    if (!(extent > 0.0)) throw ConfigError("grid: extent must be positive");
    if (threads < 1) throw ConfigError("threads: must be at least 1");
    if (field != "total" && field != "scattered" && field != "incident") throw ConfigError("field: expected total, scattered or incident");
    if (potential.name == "table" && !std::filesystem::exists(potential.file)) {
      throw ConfigError("potential: table file '" + potential.file + "' does not exist");
    }
    if (potential.name == "disk" && !(potential.radius > 0.0)) throw ConfigError("potential: disk radius must be positive");
    if (residual_h < 0.0) throw ConfigError("residual_h: must be non-negative");
    if (mode == RunMode::timedomain) {
      if (times.empty()) throw ConfigError("times: need at least one frame time");
      if (!(band > 2.0)) throw ConfigError("band: must exceed 2");
      if (!(pulse_rate > 0.0)) throw ConfigError("pulse: rate must be positive");
      if (sweep.high < 1 || sweep.mid < 1 || sweep.per_level < 1 || sweep.levels < 0) {
        throw ConfigError("sweep: node counts must be positive");
      }
    }
  }

  SourceSpectrum spectrum() const {
    SourceSpectrum s = gaussian_pulse_spectrum(pulse_amplitude, pulse_t0, pulse_rate);
    s.x0 = source.x0;
    s.y0 = source.y0;
    s.band_limit = band;
    return s;
  }
};

namespace detail {

inline std::vector<std::string> words(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> w;
  for (std::string s; in >> s;) w.push_back(s);
  return w;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not an integer");
  }
}

inline void expect_count(const std::string& key, const std::vector<std::string>& w, std::size_t lo, std::size_t hi) {
  if (w.size() < lo || w.size() > hi) throw ConfigError(key + ": wrong number of values");
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const auto w = words(value);
  if (w.empty()) throw ConfigError(key + ": missing value");
  if (key == "mode") {
    expect_count(key, w, 1, 1);
    if (w[0] == "solve") c.mode = RunMode::solve;
    else if (w[0] == "residual") c.mode = RunMode::residual;
    else if (w[0] == "timedomain") c.mode = RunMode::timedomain;
    else if (w[0] == "selftest") c.mode = RunMode::selftest;
    else throw ConfigError("mode: unknown mode '" + w[0] + "'");
  } else if (key == "potential") {
    PotentialSpec p;
    p.name = w[0];
    if (p.name == "gaussian" || p.name == "eaton" || p.name == "luneburg") {
      expect_count(key, w, 1, 1);
    } else if (p.name == "random") {
      expect_count(key, w, 1, 2);
      if (w.size() == 2) {
        const long long s = parse_int(key, w[1]);
        if (s < 0) throw ConfigError("potential: seed must be non-negative");
        p.seed = static_cast<std::uint64_t>(s);
      }
    } else if (p.name == "disk") {
      expect_count(key, w, 3, 3);
      p.c = parse_double(key, w[1]);
      p.radius = parse_double(key, w[2]);
    } else if (p.name == "table") {
      expect_count(key, w, 2, 2);
      p.file = w[1];
    } else {
      throw ConfigError("potential: unknown model '" + w[0] + "'");
    }
    c.potential = p;
  } else if (key == "source") {
    SourceSpec s = c.source;
    s.kind = w[0];
    if (s.kind == "plane") {
      expect_count(key, w, 1, 2);
      if (w.size() == 2) s.angle = parse_double(key, w[1]);
    } else if (s.kind == "beam") {
      expect_count(key, w, 1, 1);
    } else if (s.kind == "point") {
      expect_count(key, w, 3, 3);
      s.x0 = parse_double(key, w[1]);
      s.y0 = parse_double(key, w[2]);
    } else {
      throw ConfigError("source: unknown kind '" + w[0] + "'");
    }
    c.source = s;
  } else if (key == "k") {
    expect_count(key, w, 1, 1);
    c.k = parse_double(key, w[0]);
  } else if (key == "eps") {
    expect_count(key, w, 1, 1);
    c.eps = parse_double(key, w[0]);
  } else if (key == "grid") {
    expect_count(key, w, 3, 3);
    c.nx = static_cast<int>(parse_int(key, w[0]));
    c.ny = static_cast<int>(parse_int(key, w[1]));
    c.extent = parse_double(key, w[2]);
  } else if (key == "field") {
    expect_count(key, w, 1, 1);
    c.field = w[0];
  } else if (key == "threads") {
    expect_count(key, w, 1, 1);
    c.threads = static_cast<int>(parse_int(key, w[0]));
  } else if (key == "out") {
    c.out = value;
  } else if (key == "residual_h") {
    expect_count(key, w, 1, 1);
    c.residual_h = parse_double(key, w[0]);
  } else if (key == "times") {
    c.times.clear();
    for (const auto& s : w) c.times.push_back(parse_double(key, s));
  } else if (key == "pulse") {
    expect_count(key, w, 3, 3);
    c.pulse_amplitude = parse_double(key, w[0]);
    c.pulse_t0 = parse_double(key, w[1]);
    c.pulse_rate = parse_double(key, w[2]);
  } else if (key == "band") {
    expect_count(key, w, 1, 1);
    c.band = parse_double(key, w[0]);
  } else if (key == "sweep") {
    expect_count(key, w, 4, 4);
    c.sweep.high = static_cast<int>(parse_int(key, w[0]));
    c.sweep.mid = static_cast<int>(parse_int(key, w[1]));
    c.sweep.per_level = static_cast<int>(parse_int(key, w[2]));
    c.sweep.levels = static_cast<int>(parse_int(key, w[3]));
  } else if (key == "preset") {
    throw ConfigError("preset: select presets with --preset, not inside a config file");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

/// Parses config text; `origin` names the source in messages. Syntax errors
/// report the line, value errors report the line and key.
inline RunConfig parse_config(std::istream& in, const std::string& origin, RunConfig base = {}) {
  // Keep the raw text so value errors can point at their line.
  std::stringstream text;
  text << in.rdbuf();
  const std::string raw = text.str();
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(raw);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  std::map<std::string, int> lines;
  {
    std::istringstream is(raw);
    std::string line;
    for (int n = 1; std::getline(is, line); ++n) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      lines.emplace(key, n);
    }
  }
  for (const auto& [key, node] : tree) {
    const std::string where = origin + ":" + (lines.count(key) ? std::to_string(lines[key]) : std::string("?")) + ": ";
    if (!node.empty()) throw ConfigError(where + "sections are not supported ('[" + key + "]')");
    try {
      apply_setting(base, key, node.data());
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path, std::move(base));
}

/// Built-in experiment presets.
inline std::vector<std::string> preset_names() {
  return {"gaussian-k100", "gaussian-k30", "random-k30", "eaton-k30", "luneburg-td"};
}

inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.eps = 1e-13;
  if (name == "gaussian-k100") {
    c.potential.name = "gaussian";
    c.source = SourceSpec{};
    c.k = 100.0;
    c.nx = c.ny = 161;
    c.extent = 8.0;
  } else if (name == "gaussian-k30") {
    c.potential.name = "gaussian";
    c.k = 30.0;
  } else if (name == "random-k30") {
    c.potential.name = "random";
    c.potential.seed = 1234;
    c.k = 30.0;
  } else if (name == "eaton-k30") {
    c.potential.name = "eaton";
    c.source.kind = "beam";
    c.k = 30.0;
  } else if (name == "luneburg-td") {
    c.mode = RunMode::timedomain;
    c.potential.name = "luneburg";
    c.source.kind = "point";
    c.source.x0 = c.source.y0 = 10.0;
    c.nx = c.ny = 73;
    c.extent = 9.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace radscat

#endif  // RADSCAT_CONFIG_HPP
