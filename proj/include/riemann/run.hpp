#pragma once

// Scenario runner behind the CLI: dispatch on mode, write artifacts, map
// failures to exit codes and machine-readable error JSON.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "riemann/curvature.hpp"
#include "riemann/dynamics.hpp"
#include "riemann/io.hpp"
#include "riemann/lift.hpp"
#include "riemann/scenario.hpp"

namespace riemann {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kSchema = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kIo = 4;
inline constexpr int kUsage = 5;
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

inline std::string error_json(const std::string& type, const std::string& message, int code,
                              const std::optional<std::string>& path = std::nullopt) {
  nlohmann::json e{{"type", type}, {"message", message}, {"exit_code", code}};
  if (path) e["path"] = *path;
  return nlohmann::json{{"error", e}}.dump();
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace run_detail {

inline void write_conservation_plots(const std::filesystem::path& dir, const ConservationReport& rep) {
  auto column = [&](auto get) {
    std::vector<double> y;
    y.reserve(rep.t.size());
    for (std::size_t n = 0; n < rep.t.size(); ++n) y.push_back(get(n));
    return y;
  };
  write_file(dir / "energy.dat", plot_data(rep.t, rep.energy));
  write_file(dir / "norm_L.dat", plot_data(rep.t, rep.norm_L));
  write_file(dir / "norm_C.dat", plot_data(rep.t, rep.norm_C));
  for (int i = 0; i < 3; ++i) {
    write_file(dir / fmt::format("lab_L{}.dat", i + 1), plot_data(rep.t, column([&](std::size_t n) { return rep.lab_L[n][i]; })));
    write_file(dir / fmt::format("lab_C{}.dat", i + 1), plot_data(rep.t, column([&](std::size_t n) { return rep.lab_C[n][i]; })));
  }
}

inline double max_norm(const Trajectory& tr, bool use_L) {
  double m = 0.0;
  for (const RiemannState& s : tr.samples) m = std::max(m, (use_L ? s.L : s.C).norm());
  return m;
}

inline void emit_trajectory(const ScenarioConfig& c, const RunOptions& o, const Trajectory& tr, const Potential& V,
                            std::ostream& out) {
  const ConservationReport rep = conservation_report(tr, V, MassScale(c.kappa));
  write_file(o.out_dir / c.output.trajectory, trajectory_csv(tr, rep.energy));
  nlohmann::json j{{"mode", c.mode},
                   {"dynamics", mode_name(tr.mode)},
                   {"h", c.h},
                   {"conservation", to_json(rep)},
                   {"max_norm_L", max_norm(tr, true)},
                   {"max_norm_C", max_norm(tr, false)},
                   {"final_time", tr.samples.back().t}};
  if (tr.connection) j["connection"] = tr.connection->token();
  write_file(o.out_dir / c.output.report, j.dump(2) + "\n");
  write_conservation_plots(o.out_dir / c.output.plots, rep);
  out << fmt::format("{}: {} samples to t = {}, energy drift {:.3e}, |L| drift {:.3e}, |C| drift {:.3e}\n", c.mode,
                     tr.samples.size(), tr.samples.back().t, rep.drift_energy, rep.drift_norm_L, rep.drift_norm_C);
}

inline int run_simulate(const ScenarioConfig& c, const RunOptions& o, std::ostream& out) {
  const Model md = make_model(c);
  const Trajectory tr = simulate(initial_state(c), md, c.h, c.nsteps);
  emit_trajectory(c, o, tr, md.V, out);
  return exit_code::kOk;
}

inline int run_lift(const ScenarioConfig& c, const RunOptions& o, std::ostream& out) {
  const Connection conn = Connection::from_token(*c.connection);
  const BaseCurve g = wobble_curve(wobble_params(c));
  const Trajectory tr = lift_trajectory(conn, g, exp_so3(to_vec(c.S)), c.h, MassScale(c.kappa));
  emit_trajectory(c, o, tr, make_potential(c.potential), out);
  return exit_code::kOk;
}

inline int run_curvature(const ScenarioConfig& c, const RunOptions& o, std::ostream& out) {
  const Connection conn = Connection::from_token(*c.connection);
  const AxisLengths a(to_vec(c.a));
  const CurvatureReport cr = field_tensors(conn, a);
  nlohmann::json j = to_json(cr);
  j["bianchi"]["finite_difference"] = to_json(bianchi_residuals(conn, a, DerivativeMode::FiniteDifference));
  if (conn.is_builtin()) j["bianchi"]["analytic"] = to_json(bianchi_residuals(conn, a, DerivativeMode::Analytic));
  const AxisGrid grid{to_vec(c.grid.lo), to_vec(c.grid.hi), c.grid.n};
  j["displacement"] = to_json(displacement_potential_check(conn, grid));
  write_file(o.out_dir / c.output.report, j.dump(2) + "\n");

  // Gamma_k and Rfield_k along the sweep axis, other axes held at a
  const int ax = c.grid.sweep_axis - 1;
  const int np = c.grid.sweep_points;
  std::vector<double> xs;
  std::array<std::vector<double>, 3> gam, rf;
  for (int n = 0; n < np; ++n) {
    const double x = np == 1 ? c.grid.lo[ax] : c.grid.lo[ax] + (c.grid.hi[ax] - c.grid.lo[ax]) * n / (np - 1);
    Vec3 v = a.values();
    v[ax] = x;
    const AxisLengths p(v);
    const Vec3 g = christoffel(conn, p);
    const Vec3 r = field_tensors(conn, p).Rfield;
    xs.push_back(x);
    for (int k = 0; k < 3; ++k) {
      gam[k].push_back(g[k]);
      rf[k].push_back(r[k]);
    }
  }
  const auto dir = o.out_dir / c.output.plots;
  for (int k = 0; k < 3; ++k) {
    write_file(dir / fmt::format("gamma_{}.dat", k + 1), plot_data(xs, gam[k]));
    write_file(dir / fmt::format("rfield_{}.dat", k + 1), plot_data(xs, rf[k]));
  }
  out << fmt::format("curvature: {} at a = ({}, {}, {}), T21 = {}\n", cr.connection, a[0], a[1], a[2], cr.T(1, 0));
  return exit_code::kOk;
}

inline int run_holonomy(const ScenarioConfig& c, const RunOptions& o, std::ostream& out) {
  const Connection conn = Connection::from_token(*c.connection);
  const AxisLengths a(to_vec(c.a));
  const int r = c.loop.rot_axis - 1;
  const int l = c.loop.len_axis - 1;
  const BaseCurve loop = rectangle_loop(exp_so3(to_vec(c.R)), a, r, l, c.loop.dtheta, c.loop.da);
  const auto lift = horizontal_lift(conn, loop, Rotation::identity(), c.h);
  const Rotation hol = lift.back().S * lift.front().S.inverse();
  const double area = c.loop.dtheta * c.loop.da;
  const double signed_angle = log_so3(hol)[r];
  const double predicted = -2.0 * field_tensors(conn, a).T(l, r);
  nlohmann::json j{{"connection", conn.token()},
                   {"center", to_json(a.values())},
                   {"rot_axis", c.loop.rot_axis},
                   {"len_axis", c.loop.len_axis},
                   {"dtheta", c.loop.dtheta},
                   {"da", c.loop.da},
                   {"area", area},
                   {"holonomy", to_json(hol.matrix())},
                   {"angle", rotation_angle(hol)},
                   {"signed_angle", signed_angle},
                   {"angle_per_area", area == 0.0 ? 0.0 : signed_angle / area},
                   {"predicted_angle_per_area", predicted}};
  write_file(o.out_dir / c.output.report, j.dump(2) + "\n");
  std::vector<double> ts, ang;
  for (const LiftSample& s : lift) {
    ts.push_back(s.t);
    ang.push_back(rotation_angle(s.S));
  }
  write_file(o.out_dir / c.output.plots / "lift_angle.dat", plot_data(ts, ang));
  out << fmt::format("holonomy: {} loop area {}, angle/area {}, predicted {}\n", conn.token(), area,
                     area == 0.0 ? 0.0 : signed_angle / area, predicted);
  return exit_code::kOk;
}

}  // namespace run_detail

/// Built-in invariant suite; random cases drawn from mt19937_64(seed).
inline std::vector<CheckResult> check_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> len(0.5, 3.0);
  auto rvec = [&] { return Vec3(u(rng), u(rng), u(rng)); };
  auto rshape = [&] {
    for (;;) {
      const Vec3 a(len(rng), len(rng), len(rng));
      // keep the momentum map well conditioned
      if (std::abs(a[0] - a[1]) > 0.1 && std::abs(a[1] - a[2]) > 0.1 && std::abs(a[0] - a[2]) > 0.1)
        return AxisLengths(a);
    }
  };
  const std::vector<Connection> builtins{Connection::rigid(), Connection::irrotational(), Connection::falling_cat(),
                                         Connection::s_type(-0.7)};
  std::vector<CheckResult> res;
  auto record = [&](std::string name, double worst, double tol) {
    res.push_back({std::move(name), worst <= tol, fmt::format("worst {:.3e} (tolerance {:.1e})", worst, tol)});
  };

  {
    double w = 0.0;
    for (int n = 0; n < 200; ++n) {
      const Vec3 v = 3.0 * rvec();
      w = std::max(w, (exp_so3(log_so3(exp_so3(v))).matrix() - exp_so3(v).matrix()).norm());
    }
    record("exp/log round trip", w, 1e-12);
  }
  {
    double w = 0.0;
    for (int n = 0; n < 200; ++n) {
      const AxisLengths a = rshape();
      const BodyVelocities v{rvec(), rvec(), rvec()};
      const AngularVelocities back = invert_momenta(a, momenta(a, v));
      w = std::max(w, ((back.omega - v.omega).norm() + (back.lambda - v.lambda).norm()) / (v.omega.norm() + v.lambda.norm()));
    }
    record("momentum map round trip", w, 1e-10);
  }
  {
    double w = 0.0;
    for (int n = 0; n < 200; ++n) {
      const AxisLengths a = rshape();
      const BodyVelocities v{rvec(), rvec(), rvec()};
      const Vec3 g = kinetic_energy_axis_gradient(a, v);
      for (int i = 0; i < 3; ++i) {
        Vec3 p = a.values(), m = a.values();
        p[i] += 1e-6;
        m[i] -= 1e-6;
        const double fd = (kinetic_energy(AxisLengths(p), v) - kinetic_energy(AxisLengths(m), v)) / 2e-6;
        w = std::max(w, std::abs(fd - g[i]));
      }
    }
    record("dT/da against finite differences", w, 1e-6);
  }
  {
    double w = 0.0;
    for (int n = 0; n < 100; ++n) {
      const BundlePoint p{exp_so3(3.0 * rvec()), rshape(), exp_so3(3.0 * rvec())};
      w = std::max(w, verticality_defect(Connection::irrotational(), p, rvec()));
    }
    record("irrotational lift is metric-orthogonal to the fibre", w, 1e-12);
  }
  {
    double w = 0.0;
    for (const Connection& c : builtins)
      for (int n = 0; n < 20; ++n) {
        const BianchiReport b = bianchi_residuals(c, rshape(), DerivativeMode::Analytic);
        w = std::max({w, b.residual1, b.residual2});
      }
    record("Bianchi identities (analytic derivatives)", w, 1e-12);
  }
  {
    double w = 0.0;
    for (const Connection& c : builtins)
      for (int n = 0; n < 10; ++n) {
        const BianchiReport b = bianchi_residuals(c, rshape(), DerivativeMode::FiniteDifference);
        w = std::max({w, b.residual1, b.residual2});
      }
    record("Bianchi identities (finite differences)", w, 1e-6);
  }
  {
    double w = 0.0;
    for (int n = 0; n < 5; ++n) {
      const AxisLengths a = rshape();
      const BaseCurve loop = rectangle_loop(exp_so3(rvec()), a, n % 3, (n + 1) % 3, u(rng), 0.2 * u(rng));
      w = std::max(w, rotation_angle(holonomy(Connection::rigid(), loop, 1e-2)));
    }
    record("rigid holonomy is trivial", w, 1e-10);
  }
  {
    WobbleParams wp;
    wp.t_end = 2.0;
    const BaseCurve g = wobble_curve(wp);
    const Trajectory irr = lift_trajectory(Connection::irrotational(), g, Rotation::identity(), 1e-2);
    const Trajectory cat = lift_trajectory(Connection::falling_cat(), g, Rotation::identity(), 1e-2);
    record("irrotational lift carries no circulation", run_detail::max_norm(irr, false), 1e-10);
    record("falling-cat lift carries no angular momentum", run_detail::max_norm(cat, true), 1e-10);
  }
  {
    const ScenarioConfig c = preset("riemann-free");
    const Model md = make_model(c);
    const ConservationReport rep = conservation_report(simulate(initial_state(c), md, 1e-3, 2000), md.V, md.m);
    record("free Riemann conservation laws",
           std::max({rep.drift_energy, rep.drift_lab_L, rep.drift_lab_C, rep.drift_norm_L, rep.drift_norm_C}), 1e-8);
  }
  {
    double w = 0.0;
    for (int n = 0; n < 200; ++n) {
      const AxisLengths a = rshape();
      const Vec3 gi = christoffel(Connection::irrotational(), a);
      const Vec3 gf = christoffel(Connection::falling_cat(), a);
      w = std::max({w, gi.maxCoeff() - 1.0, 1.0 - gf.minCoeff(), (gi.cwiseProduct(gf) - Vec3::Ones()).cwiseAbs().maxCoeff()});
    }
    record("irrotational <= 1 <= falling cat, reciprocal", w, 1e-14);
  }
  return res;
}

namespace run_detail {

inline int run_check(const ScenarioConfig& c, const RunOptions& o, std::ostream& out) {
  const std::uint64_t seed = o.seed.value_or(c.seed);
  const auto results = check_suite(seed);
  int passed = 0;
  nlohmann::json list = nlohmann::json::array();
  for (const CheckResult& r : results) {
    passed += r.passed ? 1 : 0;
    out << fmt::format("[{}] {}: {}\n", r.passed ? "pass" : "FAIL", r.name, r.detail);
    list.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  const int failed = static_cast<int>(results.size()) - passed;
  out << fmt::format("check: {} passed, {} failed\n", passed, failed);
  write_file(o.out_dir / c.output.report,
             nlohmann::json{{"seed", seed}, {"passed", passed}, {"failed", failed}, {"checks", list}}.dump(2) + "\n");
  return failed == 0 ? exit_code::kOk : exit_code::kCheckFailed;
}

}  // namespace run_detail

/// Runs a validated scenario. Returns the process exit code; on failure an error
/// JSON object is written as one line to `err`.
inline int run(const ScenarioConfig& c, const RunOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (c.mode == "rigid" || c.mode == "rotvib" || c.mode == "riemann") return run_detail::run_simulate(c, o, out);
    if (c.mode == "lift") return run_detail::run_lift(c, o, out);
    if (c.mode == "curvature") return run_detail::run_curvature(c, o, out);
    if (c.mode == "holonomy") return run_detail::run_holonomy(c, o, out);
    if (c.mode == "check") return run_detail::run_check(c, o, out);
    err << error_json("SchemaError", "unknown mode '" + c.mode + "'", exit_code::kSchema, "/mode") << "\n";
    return exit_code::kSchema;
  } catch (const SchemaError& e) {
    err << error_json("SchemaError", e.what(), exit_code::kSchema, e.path()) << "\n";
    return exit_code::kSchema;
  } catch (const AxisDegenerate& e) {
    err << error_json("AxisDegenerate", e.what(), exit_code::kNumerical) << "\n";
    return exit_code::kNumerical;
  } catch (const StepRejected& e) {
    err << error_json("StepRejected", e.what(), exit_code::kNumerical) << "\n";
    return exit_code::kNumerical;
  } catch (const IoError& e) {
    err << error_json("IoError", e.what(), exit_code::kIo) << "\n";
    return exit_code::kIo;
  } catch (const std::exception& e) {
    err << error_json("NumericalError", e.what(), exit_code::kNumerical) << "\n";
    return exit_code::kNumerical;
  }
}

}  // namespace riemann
