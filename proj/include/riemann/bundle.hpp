#pragma once

// Configuration chart xi = R^t A S on GL+(3,R), its projection to the shape
// space, the kinetic-energy metric and the momentum / circulation maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "riemann/error.hpp"
#include "riemann/lie.hpp"

namespace riemann {

/// Cyclic partners (i, j) of axis k, 0-based: k=0 -> (1,2), k=1 -> (2,0), k=2 -> (0,1).
constexpr std::pair<int, int> cyclic_partners(int k) { return {(k + 1) % 3, (k + 2) % 3}; }

/// Diagonal stretch A = diag(a1, a2, a3), half-lengths in units of R0.
class AxisLengths {
 public:
  AxisLengths() : a_(Vec3::Ones()) {}
  explicit AxisLengths(const Vec3& a) : a_(a) {
    if (!a.allFinite() || !(a.minCoeff() > 0.0))
      throw std::invalid_argument("axis lengths must be finite and strictly positive");
  }
  AxisLengths(double a1, double a2, double a3) : AxisLengths(Vec3(a1, a2, a3)) {}

  const Vec3& values() const { return a_; }
  double operator[](int i) const { return a_[i]; }
  Mat3 matrix() const { return a_.asDiagonal(); }
  /// s_k = a_i^2 + a_j^2 (rigid moment factor of axis k).
  double sum_sq(int k) const {
    auto [i, j] = cyclic_partners(k);
    return a_[i] * a_[i] + a_[j] * a_[j];
  }
  /// p_k = 2 a_i a_j (Coriolis factor of axis k).
  double cross2(int k) const {
    auto [i, j] = cyclic_partners(k);
    return 2.0 * a_[i] * a_[j];
  }

 private:
  Vec3 a_;
};

/// kappa = M R0^2 / 5.
struct MassScale {
  double kappa = 1.0;

  MassScale() = default;
  explicit MassScale(double k) : kappa(k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("mass scale kappa must be positive");
  }
};

/// Point of the base manifold: symmetric positive-definite q.
struct Shape {
  Mat3 q;

  Vec3 eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Mat3> es(q, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
};

struct BundlePoint {
  Rotation R;  // lab orientation
  AxisLengths A;
  Rotation S;  // vortex frame
};

struct BodyVelocities {
  Vec3 omega = Vec3::Zero();
  Vec3 adot = Vec3::Zero();
  Vec3 lambda = Vec3::Zero();
};

struct Momenta {
  Vec3 L = Vec3::Zero();  // body-frame angular momentum
  Vec3 C = Vec3::Zero();  // body-frame Kelvin circulation
};

/// xi = R^t A S.
inline Mat3 assemble(const BundlePoint& p) {
  return p.R.matrix().transpose() * p.A.matrix() * p.S.matrix();
}

/// q = xi xi^t = R^t A^2 R, evaluated without S so gauge invariance is exact.
inline Shape project(const BundlePoint& p) {
  const Mat3& r = p.R.matrix();
  const Vec3 a2 = p.A.values().cwiseProduct(p.A.values());
  Mat3 q = r.transpose() * a2.asDiagonal() * r;
  q = 0.5 * (q + q.transpose());
  return Shape{q};
}

/// g_xi(R_X, R_Y) = tr(X xi xi^t Y^t) for right-invariant fields generated by X, Y in M3(R).
inline double metric(const BundlePoint& p, const Mat3& x, const Mat3& y) {
  return (x * project(p).q * y.transpose()).trace();
}

/// Riemann kinetic energy in its scalar form,
/// T = kappa/2 [ sum_k s_k (w_k^2 + l_k^2) - 2 p_k w_k l_k + |adot|^2 ].
inline double kinetic_energy(const AxisLengths& a, const BodyVelocities& v, MassScale m = {}) {
  double t = v.adot.squaredNorm();
  for (int k = 0; k < 3; ++k) {
    const double w = v.omega[k];
    const double l = v.lambda[k];
    t += a.sum_sq(k) * (w * w + l * l) - 2.0 * a.cross2(k) * w * l;
  }
  return 0.5 * m.kappa * t;
}

/// dT/da at fixed (omega, adot, lambda).
inline Vec3 kinetic_energy_axis_gradient(const AxisLengths& a, const BodyVelocities& v, MassScale m = {}) {
  Vec3 g = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    auto [i, j] = cyclic_partners(k);
    const double w = v.omega[k];
    const double l = v.lambda[k];
    const double ws = w * w + l * l;
    // d/da_i of [(a_i^2 + a_j^2) ws - 4 a_i a_j w l] / 2
    g[i] += a[i] * ws - 2.0 * a[j] * w * l;
    g[j] += a[j] * ws - 2.0 * a[i] * w * l;
  }
  return m.kappa * g;
}

/// L_k = kappa [s_k w_k - p_k l_k],  C_k = kappa [p_k w_k - s_k l_k].
inline Momenta momenta(const AxisLengths& a, const BodyVelocities& v, MassScale m = {}) {
  Momenta out;
  for (int k = 0; k < 3; ++k) {
    const double s = a.sum_sq(k);
    const double p = a.cross2(k);
    out.L[k] = m.kappa * (s * v.omega[k] - p * v.lambda[k]);
    out.C[k] = m.kappa * (p * v.omega[k] - s * v.lambda[k]);
  }
  return out;
}

inline constexpr double kDefaultAxisEpsilon = 1e-8;

struct AngularVelocities {
  Vec3 omega = Vec3::Zero();
  Vec3 lambda = Vec3::Zero();
};

/// Per-axis 2x2 inverse of momenta(); the block determinant is -kappa^2 (a_i^2 - a_j^2)^2.
/// Throws AxisDegenerate(i, j) when |a_i^2 - a_j^2| < eps.
inline AngularVelocities invert_momenta(const AxisLengths& a, const Momenta& mom, MassScale m = {},
                                        double eps = kDefaultAxisEpsilon) {
  AngularVelocities out;
  for (int k = 0; k < 3; ++k) {
    auto [i, j] = cyclic_partners(k);
    const double gap = a[i] * a[i] - a[j] * a[j];
    if (std::abs(gap) < eps) throw AxisDegenerate(std::min(i, j) + 1, std::max(i, j) + 1);
    const double s = a.sum_sq(k);
    const double p = a.cross2(k);
    const double det = -m.kappa * gap * gap;  // = kappa (p^2 - s^2)
    const double lk = mom.L[k];
    const double ck = mom.C[k];
    out.omega[k] = (-s * lk + p * ck) / det;
    out.lambda[k] = (-p * lk + s * ck) / det;
  }
  return out;
}

/// Conserved lab-frame charges (R^t L, S^t C).
inline std::pair<Vec3, Vec3> lab_momenta(const BundlePoint& p, const Momenta& mom) {
  return {p.R.matrix().transpose() * mom.L, p.S.matrix().transpose() * mom.C};
}

}  // namespace riemann
