#pragma once

// Equations of motion in the momentum variables (L, C), potentials, the
// Lie-group Runge-Kutta stepper and conservation monitoring.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "riemann/bundle.hpp"
#include "riemann/connection.hpp"
#include "riemann/error.hpp"
#include "riemann/lie.hpp"
#include "riemann/lift.hpp"

namespace riemann {

enum class PotentialKind { Free, Harmonic, Custom };

/// V(A), a function of the axis lengths only.
class Potential {
 public:
  using Value = std::function<double(const AxisLengths&)>;
  using Gradient = std::function<Vec3(const AxisLengths&)>;

  static Potential free() { return Potential(PotentialKind::Free); }

  /// V = k/2 |a - a0|^2.
  static Potential harmonic(double k, const Vec3& a0) {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("harmonic potential needs k > 0");
    if (!a0.allFinite() || !(a0.minCoeff() > 0.0))
      throw std::invalid_argument("harmonic potential needs a positive rest shape a0");
    Potential p(PotentialKind::Harmonic);
    p.k_ = k;
    p.a0_ = a0;
    return p;
  }

  /// gradV is checked against centred differences of V (step 1e-5) on a fixed
  /// sample of shapes in [0.5, 3]^3; a mismatch above 1e-5 is rejected.
  static Potential custom(Value v, Gradient grad, std::string name = "custom") {
    if (!v || !grad) throw std::invalid_argument("custom potential needs both V and gradV");
    Potential p(PotentialKind::Custom);
    p.v_ = std::make_shared<const Value>(std::move(v));
    p.grad_ = std::make_shared<const Gradient>(std::move(grad));
    p.name_ = std::move(name);
    p.validate();
    return p;
  }

  PotentialKind kind() const { return kind_; }
  double k() const { return k_; }
  const Vec3& a0() const { return a0_; }
  const std::string& name() const { return name_; }

  double value(const AxisLengths& a) const {
    switch (kind_) {
      case PotentialKind::Free: return 0.0;
      case PotentialKind::Harmonic: return 0.5 * k_ * (a.values() - a0_).squaredNorm();
      case PotentialKind::Custom: return (*v_)(a);
    }
    return 0.0;
  }

  Vec3 gradient(const AxisLengths& a) const {
    switch (kind_) {
      case PotentialKind::Free: return Vec3::Zero();
      case PotentialKind::Harmonic: return k_ * (a.values() - a0_);
      case PotentialKind::Custom: return (*grad_)(a);
    }
    return Vec3::Zero();
  }

 private:
  explicit Potential(PotentialKind k) : kind_(k) {}

  void validate() const {
    std::mt19937_64 rng(20240611ULL);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    constexpr double h = 1e-5;
    for (int n = 0; n < 16; ++n) {
      const Vec3 a(u(rng), u(rng), u(rng));
      const Vec3 g = (*grad_)(AxisLengths(a));
      for (int i = 0; i < 3; ++i) {
        Vec3 ap = a, am = a;
        ap[i] += h;
        am[i] -= h;
        const double fd = ((*v_)(AxisLengths(ap)) - (*v_)(AxisLengths(am))) / (2.0 * h);
        if (!std::isfinite(g[i]) || std::abs(fd - g[i]) > 1e-5 * std::max(1.0, std::abs(fd)))
          throw std::invalid_argument("custom potential '" + name_ + "': gradV disagrees with finite differences of V");
      }
    }
  }

  PotentialKind kind_;
  double k_ = 0.0;
  Vec3 a0_ = Vec3::Ones();
  std::shared_ptr<const Value> v_;
  std::shared_ptr<const Gradient> grad_;
  std::string name_;
};

enum class MotionMode { RigidBody, RotationVibration, FullRiemann, Lifted };

inline const char* mode_name(MotionMode m) {
  switch (m) {
    case MotionMode::RigidBody: return "rigid";
    case MotionMode::RotationVibration: return "rotvib";
    case MotionMode::FullRiemann: return "riemann";
    case MotionMode::Lifted: return "lifted";
  }
  return "?";
}

struct Model {
  MotionMode mode = MotionMode::FullRiemann;
  std::optional<Connection> connection;  // required for Lifted
  Potential V = Potential::free();
  MassScale m;
};

struct RiemannState {
  Rotation R;
  AxisLengths A;
  Rotation S;
  Vec3 adot = Vec3::Zero();
  Vec3 L = Vec3::Zero();
  Vec3 C = Vec3::Zero();
  double t = 0.0;
};

/// R' = hat(omega) R, S' = hat(lambda) S, then the vector sector.
struct StateDerivative {
  Vec3 omega = Vec3::Zero();
  Vec3 lambda = Vec3::Zero();
  Vec3 adot = Vec3::Zero();
  Vec3 addot = Vec3::Zero();
  Vec3 Ldot = Vec3::Zero();
  Vec3 Cdot = Vec3::Zero();
};

/// Euler rigid rotation: -omega x L with omega_k = L_k / I_k, I_k = kappa (a_i^2 + a_j^2).
inline Vec3 rigid_rhs(const AxisLengths& a, const Vec3& L, MassScale m = {}) {
  Vec3 w;
  for (int k = 0; k < 3; ++k) w[k] = L[k] / (m.kappa * a.sum_sq(k));
  return -w.cross(L);
}

namespace detail {

/// Constrained motion lambda = Gamma omega carries P = L - Gamma C = kappa I omega with
/// I_k = s_k - 2 p_k Gamma_k + s_k Gamma_k^2 (the kinetic energy restricted to the constraint).
inline Vec3 lifted_omega(const Model& md, const AxisLengths& a, const Vec3& gamma, const Vec3& P) {
  Vec3 w;
  for (int k = 0; k < 3; ++k) {
    const double s = a.sum_sq(k);
    const double inertia = s - 2.0 * a.cross2(k) * gamma[k] + s * gamma[k] * gamma[k];
    if (inertia <= kDefaultAxisEpsilon * s) {
      auto [i, j] = cyclic_partners(k);
      throw AxisDegenerate(std::min(i, j) + 1, std::max(i, j) + 1,
                           "constrained motion has no rotational inertia about axis " + std::to_string(k + 1));
    }
    w[k] = P[k] / (md.m.kappa * inertia);
  }
  return w;
}

inline const Connection& lifted_connection(const Model& md) {
  if (!md.connection) throw std::invalid_argument("lifted dynamics needs a connection");
  return *md.connection;
}

}  // namespace detail

/// (omega, lambda) for the given mode. Rigid sectors have lambda = 0; Lifted
/// recovers omega from P = L - Gamma C and sets lambda = Gamma omega.
inline AngularVelocities mode_velocities(const Model& md, const AxisLengths& a, const Vec3& L, const Vec3& C) {
  AngularVelocities v;
  switch (md.mode) {
    case MotionMode::RigidBody:
    case MotionMode::RotationVibration:
      for (int k = 0; k < 3; ++k) v.omega[k] = L[k] / (md.m.kappa * a.sum_sq(k));
      return v;
    case MotionMode::FullRiemann: return invert_momenta(a, Momenta{L, C}, md.m);
    case MotionMode::Lifted: {
      const Vec3 g = christoffel(detail::lifted_connection(md), a);
      v.omega = detail::lifted_omega(md, a, g, L - g.cwiseProduct(C));
      v.lambda = g.cwiseProduct(v.omega);
      return v;
    }
  }
  return v;
}

namespace detail {

/// Vector-sector derivative. In Lifted mode the first momentum slot holds P and
/// the second is unused: the d'Alembert constraint forces F_S = mu, F_R = -Gamma mu
/// drop out of P' = -omega x L + Gamma (lambda x C) - Gamma' C.
inline StateDerivative vector_rhs(const Model& md, const AxisLengths& a, const Vec3& adot, const Vec3& L,
                                  const Vec3& C) {
  StateDerivative d;
  BodyVelocities bv;
  bv.adot = adot;
  if (md.mode == MotionMode::Lifted) {
    const Connection& conn = lifted_connection(md);
    const Vec3 g = christoffel(conn, a);
    bv.omega = lifted_omega(md, a, g, L);
    bv.lambda = g.cwiseProduct(bv.omega);
    const Momenta mom = momenta(a, bv, md.m);
    const Vec3 gdot = christoffel_gradient(conn, a).transpose() * adot;
    d.Ldot = -bv.omega.cross(mom.L) + g.cwiseProduct(bv.lambda.cross(mom.C)) - gdot.cwiseProduct(mom.C);
  } else {
    const AngularVelocities v = mode_velocities(md, a, L, C);
    bv.omega = v.omega;
    bv.lambda = v.lambda;
    d.Ldot = -v.omega.cross(L);
    if (md.mode == MotionMode::FullRiemann) d.Cdot = -v.lambda.cross(C);
  }
  d.omega = bv.omega;
  d.lambda = bv.lambda;
  if (md.mode != MotionMode::RigidBody) {
    d.adot = adot;
    d.addot = (kinetic_energy_axis_gradient(a, bv, md.m) - md.V.gradient(a)) / md.m.kappa;
  }
  return d;
}

}  // namespace detail

namespace detail {

inline Vec3 lifted_P(const Model& md, const AxisLengths& a, const Vec3& L, const Vec3& C) {
  return L - christoffel(lifted_connection(md), a).cwiseProduct(C);
}

}  // namespace detail

/// Full right-hand side, kappa a'' = dT/da - dV/da, L' = -omega x L, C' = -lambda x C.
/// In Lifted mode Ldot is the derivative of P = L - Gamma C (see vector_rhs) and Cdot = 0.
inline StateDerivative riemann_rhs(const RiemannState& s, const Model& md) {
  if (md.mode == MotionMode::Lifted)
    return detail::vector_rhs(md, s.A, s.adot, detail::lifted_P(md, s.A, s.L, s.C), Vec3::Zero());
  return detail::vector_rhs(md, s.A, s.adot, s.L, s.C);
}

/// (L, C) implied by the velocities of slaved sectors, where C is not evolved.
inline Momenta slaved_momenta(const Model& md, const AxisLengths& a, const Vec3& L, const Vec3& C) {
  const AngularVelocities v = mode_velocities(md, a, L, C);
  const Momenta m = momenta(a, BodyVelocities{v.omega, Vec3::Zero(), v.lambda}, md.m);
  if (md.mode == MotionMode::Lifted) return m;
  return Momenta{L, m.C};
}

/// Makes a state consistent with its mode: rigid freezes adot, slaved modes recompute C
/// (and L, for Lifted, so that the pair obeys the constraint).
inline RiemannState normalize_state(RiemannState s, const Model& md) {
  if (md.mode == MotionMode::RigidBody) s.adot = Vec3::Zero();
  if (md.mode != MotionMode::FullRiemann) {
    const Momenta m = slaved_momenta(md, s.A, s.L, s.C);
    s.L = m.L;
    s.C = m.C;
  }
  return s;
}

namespace detail {

struct NonPositiveAxis {};

inline AxisLengths checked_axes(const Vec3& a) {
  if (!a.allFinite() || !(a.minCoeff() > 0.0)) throw NonPositiveAxis{};
  return AxisLengths(a);
}

/// One RKMK4 step. The vector sector (a, adot, L, C) does not depend on R, S,
/// so it is classical RK4; the rotation factors take the exponential of the
/// Simpson-weighted increment plus the [k1, k4] Magnus correction.
inline RiemannState rkmk4(const RiemannState& s, const Model& md, double h) {
  const Vec3 a = s.A.values();
  const bool lifted = md.mode == MotionMode::Lifted;
  const Vec3 y1 = lifted ? lifted_P(md, s.A, s.L, s.C) : s.L;
  const Vec3 y2 = lifted ? Vec3::Zero() : s.C;
  auto eval = [&](const Vec3& da, const Vec3& dad, const Vec3& dL, const Vec3& dC, double c) {
    return vector_rhs(md, checked_axes(a + c * da), s.adot + c * dad, y1 + c * dL, y2 + c * dC);
  };
  const Vec3 z = Vec3::Zero();
  const StateDerivative k1 = eval(z, z, z, z, 0.0);
  const StateDerivative k2 = eval(k1.adot, k1.addot, k1.Ldot, k1.Cdot, 0.5 * h);
  const StateDerivative k3 = eval(k2.adot, k2.addot, k2.Ldot, k2.Cdot, 0.5 * h);
  const StateDerivative k4 = eval(k3.adot, k3.addot, k3.Ldot, k3.Cdot, h);
  auto simpson = [&](auto field) {
    return Vec3((h / 6.0) * (field(k1) + 2.0 * field(k2) + 2.0 * field(k3) + field(k4)));
  };

  RiemannState out = s;
  out.t = s.t + h;
  if (md.mode != MotionMode::RigidBody) {
    out.A = checked_axes(a + simpson([](const StateDerivative& d) { return d.adot; }));
    out.adot = s.adot + simpson([](const StateDerivative& d) { return d.addot; });
  }
  out.L = y1 + simpson([](const StateDerivative& d) { return d.Ldot; });
  // -[K1, K4]/12 with [hat x, hat y] = -hat(x cross y)
  const Vec3 vr = simpson([](const StateDerivative& d) { return d.omega; }) + (h * h / 12.0) * k1.omega.cross(k4.omega);
  out.R = exp_so3(vr) * s.R;
  if (md.mode == MotionMode::FullRiemann || md.mode == MotionMode::Lifted) {
    const Vec3 vs =
        simpson([](const StateDerivative& d) { return d.lambda; }) + (h * h / 12.0) * k1.lambda.cross(k4.lambda);
    out.S = exp_so3(vs) * s.S;
  }
  if (md.mode == MotionMode::FullRiemann) {
    out.C = s.C + simpson([](const StateDerivative& d) { return d.Cdot; });
  } else if (lifted) {
    const Vec3 g = christoffel(lifted_connection(md), out.A);
    const Vec3 w = lifted_omega(md, out.A, g, out.L);
    const Momenta m = momenta(out.A, BodyVelocities{w, Vec3::Zero(), g.cwiseProduct(w)}, md.m);
    out.L = m.L;
    out.C = m.C;
  } else {
    out.C = slaved_momenta(md, out.A, out.L, s.C).C;
  }
  return out;
}

inline RiemannState step_bisect(const RiemannState& s, const Model& md, double h, int depth, int cap) {
  try {
    return rkmk4(s, md, h);
  } catch (const NonPositiveAxis&) {
    if (depth >= cap)
      throw StepRejected("axis length would become non-positive at t = " + std::to_string(s.t) +
                         " even after " + std::to_string(cap) + " bisections");
    const RiemannState mid = step_bisect(s, md, 0.5 * h, depth + 1, cap);
    return step_bisect(mid, md, 0.5 * h, depth + 1, cap);
  }
}

}  // namespace detail

inline constexpr int kStepRetryCap = 10;

/// Advances by h. A step that would drive an axis length to zero or below is
/// bisected and retried, up to kStepRetryCap levels, then StepRejected.
inline RiemannState step(const RiemannState& s, const Model& md, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive");
  RiemannState out = detail::step_bisect(s, md, h, 0, kStepRetryCap);
  out.t = s.t + h;
  return out;
}

struct Trajectory {
  std::vector<RiemannState> samples;
  MotionMode mode = MotionMode::FullRiemann;
  std::optional<Connection> connection;
  /// Body angular velocity per sample when the motion is a prescribed base
  /// curve (lift_trajectory); empty for integrated dynamics.
  std::vector<Vec3> prescribed_omega;
};

/// nsteps uniform steps from the mode-normalized s0; returns nsteps + 1 samples.
inline Trajectory simulate(const RiemannState& s0, const Model& md, double h, long nsteps) {
  if (nsteps < 1) throw std::invalid_argument("simulate needs nsteps >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive");
  Trajectory tr;
  tr.mode = md.mode;
  tr.connection = md.connection;
  tr.samples.reserve(static_cast<std::size_t>(nsteps) + 1);
  tr.samples.push_back(normalize_state(s0, md));
  const double t0 = tr.samples.front().t;
  for (long n = 1; n <= nsteps; ++n) {
    RiemannState next = step(tr.samples.back(), md, h);
    next.t = t0 + static_cast<double>(n) * h;
    tr.samples.push_back(next);
  }
  return tr;
}

/// E = T + V at a state.
inline double energy(const RiemannState& s, const Model& md) {
  const AngularVelocities v = mode_velocities(md, s.A, s.L, s.C);
  return kinetic_energy(s.A, BodyVelocities{v.omega, s.adot, v.lambda}, md.m) + md.V.value(s.A);
}

/// Motion along a prescribed base curve with S from the horizontal lift.
/// Momenta follow from momenta(A, omega, Gamma omega).
inline Trajectory lift_trajectory(const Connection& c, const BaseCurve& g, const Rotation& s0, double h,
                                  MassScale m = {}, const LiftOptions& opt = {}) {
  Trajectory tr;
  tr.mode = MotionMode::Lifted;
  tr.connection = c;
  const auto lift = horizontal_lift(c, g, s0, h, opt);
  tr.samples.reserve(lift.size());
  for (const LiftSample& ls : lift) {
    const BaseSample b = g(ls.t);
    const Vec3 lambda = constrain_vortex(c, b.A, b.tangent.omega);
    const Momenta mom = momenta(b.A, BodyVelocities{b.tangent.omega, b.tangent.adot, lambda}, m);
    tr.samples.push_back(RiemannState{b.R, b.A, ls.S, b.tangent.adot, mom.L, mom.C, ls.t});
    tr.prescribed_omega.push_back(b.tangent.omega);
  }
  return tr;
}

struct ConservationReport {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<Vec3> lab_L;  // R^t L
  std::vector<Vec3> lab_C;  // S^t C
  std::vector<double> norm_L;
  std::vector<double> norm_C;
  double drift_energy = 0.0;
  double drift_lab_L = 0.0;
  double drift_lab_C = 0.0;
  double drift_norm_L = 0.0;
  double drift_norm_C = 0.0;
};

namespace detail {
inline double rel(double x, double x0) { return x0 == 0.0 ? std::abs(x - x0) : std::abs(x - x0) / std::abs(x0); }
/// max_i |x_i - x0_i| scaled by |x0| (absolute when x0 = 0).
inline double rel(const Vec3& x, const Vec3& x0) {
  const double d = (x - x0).cwiseAbs().maxCoeff();
  const double n = x0.norm();
  return n == 0.0 ? d : d / n;
}
}  // namespace detail

/// Energies of prescribed (Lifted, curve-driven) trajectories use the sampled adot
/// and the connection's lambda; dynamical trajectories recover velocities from (L, C).
inline ConservationReport conservation_report(const Trajectory& tr, const Potential& V, MassScale m = {}) {
  if (tr.samples.empty()) throw std::invalid_argument("conservation_report needs a non-empty trajectory");
  const Model md{tr.mode, tr.connection, V, m};
  ConservationReport rep;
  const bool prescribed = !tr.prescribed_omega.empty();
  if (prescribed && (tr.prescribed_omega.size() != tr.samples.size() || !tr.connection))
    throw std::invalid_argument("conservation_report: malformed prescribed trajectory");
  for (std::size_t n = 0; n < tr.samples.size(); ++n) {
    const RiemannState& s = tr.samples[n];
    const auto [lab_l, lab_c] = lab_momenta(BundlePoint{s.R, s.A, s.S}, Momenta{s.L, s.C});
    rep.t.push_back(s.t);
    if (prescribed) {
      const Vec3& w = tr.prescribed_omega[n];
      const BodyVelocities bv{w, s.adot, constrain_vortex(*tr.connection, s.A, w)};
      rep.energy.push_back(kinetic_energy(s.A, bv, m) + V.value(s.A));
    } else {
      rep.energy.push_back(energy(s, md));
    }
    rep.lab_L.push_back(lab_l);
    rep.lab_C.push_back(lab_c);
    rep.norm_L.push_back(s.L.norm());
    rep.norm_C.push_back(s.C.norm());
  }
  for (std::size_t n = 1; n < tr.samples.size(); ++n) {
    rep.drift_energy = std::max(rep.drift_energy, detail::rel(rep.energy[n], rep.energy[0]));
    rep.drift_lab_L = std::max(rep.drift_lab_L, detail::rel(rep.lab_L[n], rep.lab_L[0]));
    rep.drift_lab_C = std::max(rep.drift_lab_C, detail::rel(rep.lab_C[n], rep.lab_C[0]));
    rep.drift_norm_L = std::max(rep.drift_norm_L, detail::rel(rep.norm_L[n], rep.norm_L[0]));
    rep.drift_norm_C = std::max(rep.drift_norm_C, detail::rel(rep.norm_C[n], rep.norm_C[0]));
  }
  return rep;
}

}  // namespace riemann
