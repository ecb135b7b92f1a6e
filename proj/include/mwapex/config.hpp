#pragma once

#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mwapex/driver.hpp"
#include "mwapex/errors.hpp"
#include "mwapex/surface.hpp"

namespace mwapex {

/// Parsed run description. Tolerance/increment fields keep their "unset"
/// sentinels until the run is assembled (defaults depend on the material).
struct RunConfig {
  MaterialParams material{};
  std::string scenario;     // preset name or path to a program file
  int increments = 0;       // 0: use the scenario default (200 per phase)
  double toll = -1.0;       // < 0: default 1e-9 * fc (MPa)
  double tol_f = -1.0;      // < 0: default 1e-9
  std::string output;       // empty: stdout
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view v, int line) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc{} || ptr != e)
    throw ParseError(line, "expected a number, got '" + std::string(v) + "'");
  return x;
}

inline int parse_int(std::string_view v, int line) {
  int x = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc{} || ptr != e)
    throw ParseError(line, "expected an integer, got '" + std::string(v) + "'");
  return x;
}

}  // namespace detail

/// Strict flat key-value format: `key = value`, one per line; lines starting
/// with # are comments; blank lines ignored; unknown or repeated keys are
/// rejected. Material keys follow the constitutive parameter set
/// (material.E ... material.gB); run.* selects scenario, increments,
/// tolerances and output path.
///
/// A preset scenario pins the constitutive values it is defined with
/// (2.2/2.2-unload: k1d = 1e-4; 2.4: k1d = 8e-5, t = 1e-3), overriding the
/// config; the remaining material keys must all be present.
inline RunConfig parse_config(std::string_view text, std::string_view scenario_override = {}) {
  static const std::set<std::string, std::less<>> material_keys = {
      "material.E",   "material.nu",  "material.fc", "material.ft",  "material.e",
      "material.t",   "material.k1d", "material.qh0", "material.gA", "material.gB"};

  std::map<std::string, double, std::less<>> mat;
  std::set<std::string, std::less<>> seen;
  RunConfig cfg;
  bool any = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (val.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(line_no, "repeated key '" + key + "'");
    any = true;

    if (material_keys.count(key)) {
      mat[key] = detail::parse_double(val, line_no);
    } else if (key == "run.scenario") {
      cfg.scenario = std::string(val);
    } else if (key == "run.increments") {
      cfg.increments = detail::parse_int(val, line_no);
      if (cfg.increments < 1) throw ValidationError("run.increments must be >= 1");
    } else if (key == "run.toll") {
      cfg.toll = detail::parse_double(val, line_no);
      if (!(cfg.toll > 0.0)) throw ValidationError("run.toll must be positive");
    } else if (key == "run.tolf") {
      cfg.tol_f = detail::parse_double(val, line_no);
      if (!(cfg.tol_f > 0.0)) throw ValidationError("run.tolf must be positive");
    } else if (key == "run.output") {
      cfg.output = std::string(val);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (!any) throw ParseError(1, "config contains no entries");

  if (!scenario_override.empty()) cfg.scenario = std::string(scenario_override);
  if (cfg.scenario.empty()) throw ValidationError("run.scenario is required");

  if (is_preset_scenario(cfg.scenario)) {
    if (cfg.scenario == "2.2" || cfg.scenario == "2.2-unload") {
      mat["material.k1d"] = 1e-4;
    } else if (cfg.scenario == "2.4") {
      mat["material.k1d"] = 8e-5;
      mat["material.t"] = 1e-3;
    }
  }

  for (const std::string& k : material_keys)
    if (!mat.count(k)) throw ValidationError("missing required key " + k);

  cfg.material = MaterialParams{mat["material.E"],   mat["material.nu"], mat["material.fc"],
                                mat["material.ft"],  mat["material.e"],  mat["material.t"],
                                mat["material.k1d"], mat["material.qh0"], mat["material.gA"],
                                mat["material.gB"]};
  cfg.material.validate();
  return cfg;
}

/// Custom program file: one phase per line,
///   phase <increments> <c11> <c22> <c33> <c12> <c13> <c23>
/// where each control is eps:<value> or sig:<value> (absolute end-of-phase
/// targets). # comments and blank lines allowed.
inline LoadingProgram parse_program(std::string_view text, const std::string& label = "custom") {
  LoadingProgram prog;
  prog.label = label;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::istringstream iss{std::string(line)};
    std::string word;
    iss >> word;
    if (word != "phase") throw ParseError(line_no, "expected 'phase', got '" + word + "'");

    Phase ph;
    if (!(iss >> ph.increments) || ph.increments < 1)
      throw ParseError(line_no, "expected a positive increment count");

    for (int i = 0; i < 6; ++i) {
      std::string tok;
      if (!(iss >> tok)) throw ParseError(line_no, "expected 6 component controls");
      Control ctl;
      if (tok.rfind("eps:", 0) == 0)
        ctl = Control::Strain;
      else if (tok.rfind("sig:", 0) == 0)
        ctl = Control::Stress;
      else
        throw ParseError(line_no, "control must be eps:<value> or sig:<value>, got '" + tok + "'");
      ph.targets[i] = {ctl, detail::parse_double(std::string_view(tok).substr(4), line_no)};
    }
    std::string extra;
    if (iss >> extra) throw ParseError(line_no, "trailing tokens after the 6 controls");
    prog.phases.push_back(ph);
  }
  if (prog.phases.empty()) throw ParseError(1, "program contains no phases");
  return prog;
}

}  // namespace mwapex
