#pragma once

// Scenario configuration: JSON schema, validation, canonical serialization
// and the built-in presets.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

#include "riemann/bundle.hpp"
#include "riemann/connection.hpp"
#include "riemann/dynamics.hpp"
#include "riemann/error.hpp"
#include "riemann/lie.hpp"
#include "riemann/lift.hpp"

namespace riemann {

using Triple = std::array<double, 3>;

inline Vec3 to_vec(const Triple& t) { return Vec3(t[0], t[1], t[2]); }
inline Triple to_triple(const Vec3& v) { return {v[0], v[1], v[2]}; }

struct PotentialSpec {
  std::string kind = "free";  // free | harmonic
  double k = 0.0;
  Triple a0{1.0, 1.0, 1.0};
  bool operator==(const PotentialSpec&) const = default;
};

/// File names, relative to the --out directory.
struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  std::string report = "report.json";
  std::string plots = "plots";
  bool operator==(const OutputSpec&) const = default;
};

/// Wobbling-and-breathing base curve for lift mode; R0 is the config's R.
struct CurveSpec {
  Triple a_amp{0.1, 0.15, 0.08};
  Triple a_freq{1.3, 0.7, 1.9};
  Triple a_phase{0.0, 0.5, 1.0};
  Triple axis1{0.3, 0.2, 1.0};
  double rate1 = 0.8, amp1 = 0.3, freq1 = 1.1;
  Triple axis2{1.0, 0.0, 0.0};
  double rate2 = 0.0, amp2 = 0.4, freq2 = 0.9;
  double t_end = 5.0;
  bool operator==(const CurveSpec&) const = default;
};

/// Coordinate rectangle for holonomy mode, centred on the config's a. Axes 1-based.
struct LoopSpec {
  int rot_axis = 1;
  int len_axis = 2;
  double dtheta = 0.1;
  double da = 0.1;
  bool operator==(const LoopSpec&) const = default;
};

/// Grid for the curl check and the sweep used for the Gamma / Rfield plots.
struct GridSpec {
  Triple lo{1.0, 1.0, 1.0};
  Triple hi{2.0, 2.0, 2.0};
  int n = 5;
  int sweep_axis = 1;
  int sweep_points = 101;
  bool operator==(const GridSpec&) const = default;
};

/// Validated scenario. Angular data is stored canonically as momenta (L, C).
struct ScenarioConfig {
  std::string mode;  // rigid | rotvib | riemann | lift | curvature | holonomy | check
  double kappa = 1.0;
  Triple R{0.0, 0.0, 0.0};  // axis-angle
  Triple S{0.0, 0.0, 0.0};  // axis-angle
  Triple a{1.0, 1.0, 1.0};
  Triple adot{0.0, 0.0, 0.0};
  Triple L{0.0, 0.0, 0.0};
  Triple C{0.0, 0.0, 0.0};
  PotentialSpec potential;
  std::optional<std::string> connection;
  double h = 1e-3;
  long nsteps = 1000;
  OutputSpec output;
  std::uint64_t seed = 0;
  CurveSpec curve;
  LoopSpec loop;
  GridSpec grid;
  bool operator==(const ScenarioConfig&) const = default;
};

namespace config_detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& base) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw SchemaError(base + "/" + it.key(), "unknown key '" + it.key() + "'");
}

inline const json& object_at(const json& doc, const std::string& key, const std::string& base) {
  const json& v = doc.at(key);
  if (!v.is_object()) throw SchemaError(base + "/" + key, "expected an object");
  return v;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
  return x;
}

inline long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<long>();
}

inline Triple triple(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SchemaError(path, "expected an array of 3 numbers");
  Triple t{};
  for (int i = 0; i < 3; ++i) t[i] = number(v[i], path + "/" + std::to_string(i));
  return t;
}

inline std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

template <class T, class F>
void read_opt(const json& obj, const char* key, const std::string& base, T& dst, F conv) {
  if (obj.contains(key)) dst = conv(obj.at(key), base + "/" + key);
}

inline bool is_dynamics(const std::string& mode) { return mode == "rigid" || mode == "rotvib" || mode == "riemann"; }

inline bool all_zero(const Triple& t) { return t[0] == 0.0 && t[1] == 0.0 && t[2] == 0.0; }

}  // namespace config_detail

inline const std::set<std::string>& known_modes() {
  static const std::set<std::string> m{"rigid", "rotvib", "riemann", "lift", "curvature", "holonomy", "check"};
  return m;
}

inline Potential make_potential(const PotentialSpec& p) {
  if (p.kind == "free") return Potential::free();
  if (p.kind == "harmonic") return Potential::harmonic(p.k, to_vec(p.a0));
  throw std::invalid_argument("unknown potential kind '" + p.kind + "'");
}

inline MotionMode motion_mode(const ScenarioConfig& c) {
  if (c.mode == "rigid") return MotionMode::RigidBody;
  if (c.mode == "rotvib") return MotionMode::RotationVibration;
  if (c.mode == "riemann") return c.connection ? MotionMode::Lifted : MotionMode::FullRiemann;
  throw std::invalid_argument("mode '" + c.mode + "' has no equations of motion");
}

inline Model make_model(const ScenarioConfig& c) {
  Model md;
  md.mode = motion_mode(c);
  if (c.connection) md.connection = Connection::from_token(*c.connection);
  md.V = make_potential(c.potential);
  md.m = MassScale(c.kappa);
  return md;
}

inline RiemannState initial_state(const ScenarioConfig& c) {
  RiemannState s;
  s.R = exp_so3(to_vec(c.R));
  s.S = exp_so3(to_vec(c.S));
  s.A = AxisLengths(to_vec(c.a));
  s.adot = to_vec(c.adot);
  s.L = to_vec(c.L);
  s.C = to_vec(c.C);
  return s;
}

inline WobbleParams wobble_params(const ScenarioConfig& c) {
  WobbleParams w;
  w.rotation0 = to_vec(c.R);
  w.a0 = to_vec(c.a);
  w.a_amp = to_vec(c.curve.a_amp);
  w.a_freq = to_vec(c.curve.a_freq);
  w.a_phase = to_vec(c.curve.a_phase);
  w.axis1 = to_vec(c.curve.axis1);
  w.rate1 = c.curve.rate1;
  w.amp1 = c.curve.amp1;
  w.freq1 = c.curve.freq1;
  w.axis2 = to_vec(c.curve.axis2);
  w.rate2 = c.curve.rate2;
  w.amp2 = c.curve.amp2;
  w.freq2 = c.curve.freq2;
  w.t_start = 0.0;
  w.t_end = c.curve.t_end;
  return w;
}

/// Parses and validates a scenario. Unknown keys raise SchemaError naming the key;
/// (omega, lambda) input is converted to (L, C). In riemann mode without a
/// connection, degenerate axes raise AxisDegenerate.
inline ScenarioConfig parse_config(const std::string& source) {
  using namespace config_detail;
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "top level must be an object");
  reject_unknown(doc,
                 {"mode", "kappa", "R", "S", "a", "adot", "omega", "lambda", "L", "C", "potential", "connection", "h",
                  "nsteps", "output", "seed", "curve", "loop", "grid"},
                 "");

  ScenarioConfig c;
  if (!doc.contains("mode")) throw SchemaError("/mode", "missing required key 'mode'");
  c.mode = text(doc.at("mode"), "/mode");
  if (!known_modes().count(c.mode)) throw SchemaError("/mode", "unknown mode '" + c.mode + "'");

  read_opt(doc, "kappa", "", c.kappa, number);
  if (!(c.kappa > 0.0)) throw SchemaError("/kappa", "kappa must be positive");
  read_opt(doc, "R", "", c.R, triple);
  read_opt(doc, "S", "", c.S, triple);
  read_opt(doc, "a", "", c.a, triple);
  if (!(std::min({c.a[0], c.a[1], c.a[2]}) > 0.0)) throw SchemaError("/a", "axis lengths must be positive");
  read_opt(doc, "adot", "", c.adot, triple);
  read_opt(doc, "h", "", c.h, number);
  if (!(c.h > 0.0)) throw SchemaError("/h", "h must be positive");
  read_opt(doc, "nsteps", "", c.nsteps, integer);
  if (c.nsteps < 1) throw SchemaError("/nsteps", "nsteps must be at least 1");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw SchemaError("/seed", "expected a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("connection")) {
    c.connection = text(doc.at("connection"), "/connection");
    try {
      c.connection = Connection::from_token(*c.connection).token();
    } catch (const std::invalid_argument& e) {
      throw SchemaError("/connection", e.what());
    }
  }
  const bool needs_connection = c.mode == "lift" || c.mode == "curvature" || c.mode == "holonomy";
  if (needs_connection && !c.connection) throw SchemaError("/connection", "mode '" + c.mode + "' needs a connection");
  if ((c.mode == "rigid" || c.mode == "rotvib") && c.connection)
    throw SchemaError("/connection", "mode '" + c.mode + "' has no vortex sector; drop the connection");

  if (doc.contains("potential")) {
    const json& p = object_at(doc, "potential", "");
    reject_unknown(p, {"kind", "k", "a0"}, "/potential");
    read_opt(p, "kind", "/potential", c.potential.kind, text);
    read_opt(p, "k", "/potential", c.potential.k, number);
    read_opt(p, "a0", "/potential", c.potential.a0, triple);
    try {
      make_potential(c.potential);
    } catch (const std::invalid_argument& e) {
      throw SchemaError("/potential", e.what());
    }
  }
  if (doc.contains("output")) {
    const json& o = object_at(doc, "output", "");
    reject_unknown(o, {"trajectory", "report", "plots"}, "/output");
    read_opt(o, "trajectory", "/output", c.output.trajectory, text);
    read_opt(o, "report", "/output", c.output.report, text);
    read_opt(o, "plots", "/output", c.output.plots, text);
  }
  if (doc.contains("curve")) {
    const json& o = object_at(doc, "curve", "");
    const std::string b = "/curve";
    reject_unknown(o, {"a_amp", "a_freq", "a_phase", "axis1", "rate1", "amp1", "freq1", "axis2", "rate2", "amp2", "freq2",
                       "t_end"},
                   b);
    CurveSpec& cv = c.curve;
    read_opt(o, "a_amp", b, cv.a_amp, triple);
    read_opt(o, "a_freq", b, cv.a_freq, triple);
    read_opt(o, "a_phase", b, cv.a_phase, triple);
    read_opt(o, "axis1", b, cv.axis1, triple);
    read_opt(o, "rate1", b, cv.rate1, number);
    read_opt(o, "amp1", b, cv.amp1, number);
    read_opt(o, "freq1", b, cv.freq1, number);
    read_opt(o, "axis2", b, cv.axis2, triple);
    read_opt(o, "rate2", b, cv.rate2, number);
    read_opt(o, "amp2", b, cv.amp2, number);
    read_opt(o, "freq2", b, cv.freq2, number);
    read_opt(o, "t_end", b, cv.t_end, number);
  }
  if (c.mode == "lift") {
    try {
      wobble_curve(wobble_params(c));
    } catch (const std::invalid_argument& e) {
      throw SchemaError("/curve", e.what());
    }
  }
  if (doc.contains("loop")) {
    const json& o = object_at(doc, "loop", "");
    reject_unknown(o, {"rot_axis", "len_axis", "dtheta", "da"}, "/loop");
    auto axis = [](const json& v, const std::string& p) {
      const long x = integer(v, p);
      if (x < 1 || x > 3) throw SchemaError(p, "axis index must be 1, 2 or 3");
      return static_cast<int>(x);
    };
    read_opt(o, "rot_axis", "/loop", c.loop.rot_axis, axis);
    read_opt(o, "len_axis", "/loop", c.loop.len_axis, axis);
    read_opt(o, "dtheta", "/loop", c.loop.dtheta, number);
    read_opt(o, "da", "/loop", c.loop.da, number);
    if (c.loop.rot_axis == c.loop.len_axis)
      throw SchemaError("/loop/len_axis", "Gamma_r does not depend on a_r; pick a different length axis");
  }
  if (c.mode == "holonomy" && c.a[c.loop.len_axis - 1] - 0.5 * std::abs(c.loop.da) <= 0.0)
    throw SchemaError("/loop/da", "loop would drive an axis length to zero");
  if (doc.contains("grid")) {
    const json& o = object_at(doc, "grid", "");
    reject_unknown(o, {"lo", "hi", "n", "sweep_axis", "sweep_points"}, "/grid");
    auto count = [](const json& v, const std::string& p) {
      const long x = integer(v, p);
      if (x < 1 || x > 1000) throw SchemaError(p, "expected an integer in [1, 1000]");
      return static_cast<int>(x);
    };
    read_opt(o, "lo", "/grid", c.grid.lo, triple);
    read_opt(o, "hi", "/grid", c.grid.hi, triple);
    read_opt(o, "n", "/grid", c.grid.n, count);
    read_opt(o, "sweep_axis", "/grid", c.grid.sweep_axis, count);
    read_opt(o, "sweep_points", "/grid", c.grid.sweep_points, count);
    if (c.grid.sweep_axis > 3) throw SchemaError("/grid/sweep_axis", "axis index must be 1, 2 or 3");
    for (int i = 0; i < 3; ++i)
      if (!(c.grid.lo[i] > 0.0) || !(c.grid.hi[i] >= c.grid.lo[i]))
        throw SchemaError("/grid", "grid box needs 0 < lo <= hi");
  }

  // angular data: exactly one of (omega, lambda) / (L, C)
  const bool vel = doc.contains("omega") || doc.contains("lambda");
  const bool mom = doc.contains("L") || doc.contains("C");
  if (vel && mom) {
    const std::string key = doc.contains("omega") ? "omega" : "lambda";
    throw SchemaError("/" + key, "give either (omega, lambda) or (L, C), not both");
  }
  if (mom) {
    read_opt(doc, "L", "", c.L, triple);
    read_opt(doc, "C", "", c.C, triple);
  }
  if (is_dynamics(c.mode)) {
    if (c.mode == "rigid" && !all_zero(c.adot)) throw SchemaError("/adot", "rigid mode freezes the axis lengths");
    const AxisLengths a(to_vec(c.a));
    const MassScale m(c.kappa);
    if (vel) {
      Triple omega{}, lambda{};
      read_opt(doc, "omega", "", omega, triple);
      read_opt(doc, "lambda", "", lambda, triple);
      Vec3 lam = to_vec(lambda);
      if (c.mode != "riemann" && !all_zero(lambda))
        throw SchemaError("/lambda", "mode '" + c.mode + "' has no vortex motion; lambda must be zero");
      if (c.connection) {
        if (doc.contains("lambda")) throw SchemaError("/lambda", "the connection fixes lambda; give omega only");
        lam = constrain_vortex(Connection::from_token(*c.connection), a, to_vec(omega));
      }
      const Momenta mm = momenta(a, BodyVelocities{to_vec(omega), to_vec(c.adot), lam}, m);
      c.L = to_triple(mm.L);
      c.C = to_triple(mm.C);
    }
    if (c.mode == "riemann" && !c.connection) invert_momenta(a, Momenta{to_vec(c.L), to_vec(c.C)}, m);
  }
  return c;
}

/// Canonical JSON form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ScenarioConfig& c) {
  using nlohmann::json;
  json doc;
  doc["mode"] = c.mode;
  doc["kappa"] = c.kappa;
  doc["R"] = c.R;
  doc["S"] = c.S;
  doc["a"] = c.a;
  doc["adot"] = c.adot;
  doc["L"] = c.L;
  doc["C"] = c.C;
  doc["potential"] = {{"kind", c.potential.kind}, {"k", c.potential.k}, {"a0", c.potential.a0}};
  if (c.connection) doc["connection"] = *c.connection;
  doc["h"] = c.h;
  doc["nsteps"] = c.nsteps;
  doc["output"] = {{"trajectory", c.output.trajectory}, {"report", c.output.report}, {"plots", c.output.plots}};
  doc["seed"] = c.seed;
  const CurveSpec& cv = c.curve;
  doc["curve"] = {{"a_amp", cv.a_amp}, {"a_freq", cv.a_freq}, {"a_phase", cv.a_phase}, {"axis1", cv.axis1},
                  {"rate1", cv.rate1}, {"amp1", cv.amp1},       {"freq1", cv.freq1},     {"axis2", cv.axis2},
                  {"rate2", cv.rate2}, {"amp2", cv.amp2},       {"freq2", cv.freq2},     {"t_end", cv.t_end}};
  doc["loop"] = {{"rot_axis", c.loop.rot_axis}, {"len_axis", c.loop.len_axis}, {"dtheta", c.loop.dtheta},
                 {"da", c.loop.da}};
  doc["grid"] = {{"lo", c.grid.lo},
                 {"hi", c.grid.hi},
                 {"n", c.grid.n},
                 {"sweep_axis", c.grid.sweep_axis},
                 {"sweep_points", c.grid.sweep_points}};
  return doc.dump(2);
}

inline const std::array<const char*, 5>& preset_names() {
  static const std::array<const char*, 5> n{"free-rigid-triaxial", "symmetric-top", "riemann-free",
                                            "irrotational-lift", "falling-cat-lift"};
  return n;
}

/// Built-in scenarios; also accepts "s-type:<f>" (Lifted dynamics about axis 1).
inline ScenarioConfig preset(const std::string& name) {
  using nlohmann::json;
  json doc;
  if (name == "free-rigid-triaxial") {
    doc = {{"mode", "rigid"}, {"a", {1.0, 2.0, 3.0}}, {"omega", {0.2, 1.0, 0.1}}, {"h", 1e-3}, {"nsteps", 10000}};
  } else if (name == "symmetric-top") {
    doc = {{"mode", "rigid"}, {"a", {2.0, 1.0, 1.0}}, {"omega", {1.0, 0.3, 0.0}}, {"h", 1e-3}, {"nsteps", 10000}};
  } else if (name == "riemann-free") {
    doc = {{"mode", "riemann"},          {"a", {1.0, 1.5, 2.2}}, {"omega", {0.3, 0.5, 0.2}},
           {"lambda", {0.1, -0.2, 0.4}}, {"adot", {0.0, 0.0, 0.0}}, {"h", 1e-3},
           {"nsteps", 10000}};
  } else if (name == "irrotational-lift" || name == "falling-cat-lift") {
    doc = {{"mode", "lift"},
           {"connection", name == "irrotational-lift" ? "irrotational" : "falling-cat"},
           {"a", {1.0, 1.4, 1.9}},
           {"h", 1e-3}};
  } else if (name.rfind("s-type:", 0) == 0) {
    // harmonic confinement keeps the breathing shape away from axisymmetric crossings
    doc = {{"mode", "riemann"},
           {"connection", name},
           {"a", {1.0, 1.5, 2.2}},
           {"omega", {0.5, 0.0, 0.0}},
           {"potential", {{"kind", "harmonic"}, {"k", 2.0}, {"a0", {1.0, 1.5, 2.2}}}},
           {"h", 1e-3},
           {"nsteps", 5000}};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return parse_config(doc.dump());
}

}  // namespace riemann
