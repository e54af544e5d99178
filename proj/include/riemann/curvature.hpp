#pragma once

// Field tensors of a diagonal connection, the two Bianchi residuals, the
// curl-free check on the displacement vectors, and loop holonomy.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "riemann/bundle.hpp"
#include "riemann/connection.hpp"
#include "riemann/jet.hpp"
#include "riemann/lie.hpp"
#include "riemann/lift.hpp"

namespace riemann {

/// T(i, j) = 1/2 dGamma_j / da_i, Rfield_k = 1/2 (Gamma_k - Gamma_i Gamma_j).
/// Reported in the base pullback normalization (no Ad_{S^-1} conjugation).
struct CurvatureReport {
  Mat3 T = Mat3::Zero();
  Vec3 Rfield = Vec3::Zero();
  AxisLengths at;
  std::string connection;
};

struct BianchiReport {
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// Analytic uses exact jets (built-ins only); FiniteDifference uses centred
/// stencils; Auto picks Analytic for built-ins and FiniteDifference for Custom.
enum class DerivativeMode { Auto, Analytic, FiniteDifference };

namespace fd_step {
inline constexpr double kFirst = 1e-5;
inline constexpr double kNestedOuter = 1e-4;
}  // namespace fd_step

namespace detail {

/// Gamma, dGamma[k](i) = dGamma_k/da_i, and d2Gamma[k](i, j).
struct ChristoffelJet {
  Vec3 value = Vec3::Zero();
  Mat3 grad = Mat3::Zero();  // grad(i, k) = dGamma_k / da_i
  std::array<Mat3, 3> hess{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
};

inline bool use_analytic(const Connection& c, DerivativeMode mode) {
  if (mode == DerivativeMode::Analytic) {
    if (!c.is_builtin()) throw std::invalid_argument("analytic derivatives are only available for built-in connections");
    return true;
  }
  return mode == DerivativeMode::Auto && c.is_builtin();
}

inline ChristoffelJet analytic_jet(const Connection& c, const AxisLengths& a) {
  using J = Jet2<3>;
  const std::array<J, 3> x{J::variable(0, a[0]), J::variable(1, a[1]), J::variable(2, a[2])};
  const auto g = c.builtin_christoffel<J>(x);
  ChristoffelJet out;
  for (int k = 0; k < 3; ++k) {
    out.value[k] = g[k].v;
    for (int i = 0; i < 3; ++i) {
      out.grad(i, k) = g[k].g[i];
      for (int j = 0; j < 3; ++j) out.hess[k](i, j) = g[k].h[i][j];
    }
  }
  return out;
}

inline AxisLengths shifted(const AxisLengths& a, int i, double d) {
  Vec3 v = a.values();
  v[i] += d;
  return AxisLengths(v);
}

/// Centred first derivatives of Gamma, grad(i, k) = dGamma_k / da_i.
inline Mat3 fd_gradient(const Connection& c, const AxisLengths& a, double h) {
  Mat3 g;
  for (int i = 0; i < 3; ++i) g.row(i) = ((c.evaluate(shifted(a, i, h)) - c.evaluate(shifted(a, i, -h))) / (2.0 * h)).transpose();
  return g;
}

/// Nested centred differences: outer step in a_i applied to the inner gradient.
/// hess[k](i, j) = d/da_i (dGamma_k/da_j); not symmetrized, so residual1 sees the stencil error.
inline ChristoffelJet fd_jet(const Connection& c, const AxisLengths& a) {
  ChristoffelJet out;
  out.value = c.evaluate(a);
  out.grad = fd_gradient(c, a, fd_step::kFirst);
  const double ho = fd_step::kNestedOuter;
  for (int i = 0; i < 3; ++i) {
    const Mat3 d = (fd_gradient(c, shifted(a, i, ho), fd_step::kFirst) -
                    fd_gradient(c, shifted(a, i, -ho), fd_step::kFirst)) / (2.0 * ho);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out.hess[k](i, j) = d(j, k);
  }
  return out;
}

inline ChristoffelJet christoffel_jet(const Connection& c, const AxisLengths& a, DerivativeMode mode) {
  return use_analytic(c, mode) ? analytic_jet(c, a) : fd_jet(c, a);
}

}  // namespace detail

inline CurvatureReport field_tensors(const Connection& c, const AxisLengths& a,
                                     DerivativeMode mode = DerivativeMode::Auto) {
  CurvatureReport r;
  r.at = a;
  r.connection = c.token();
  if (c.kind() == ConnectionKind::Rigid) return r;
  const Vec3 g = c.evaluate(a);
  r.T = 0.5 * (detail::use_analytic(c, mode) ? detail::analytic_jet(c, a).grad
                                             : detail::fd_gradient(c, a, fd_step::kFirst));
  for (int k = 0; k < 3; ++k) {
    auto [i, j] = cyclic_partners(k);
    r.Rfield[k] = 0.5 * (g[k] - g[i] * g[j]);
  }
  return r;
}

/// residual1 = max |dT_ki/da_j - dT_ji/da_k| over all index triples;
/// residual2 = max |G_i T_kj + G_j T_ki - T_km + dR_m/da_k| over k and cyclic (i, j, m).
inline BianchiReport bianchi_residuals(const Connection& c, const AxisLengths& a,
                                       DerivativeMode mode = DerivativeMode::Auto) {
  BianchiReport out;
  if (c.kind() == ConnectionKind::Rigid) return out;
  const detail::ChristoffelJet jet = detail::christoffel_jet(c, a, mode);
  const Vec3& g = jet.value;
  const Mat3 t = 0.5 * jet.grad;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        // dT_ki/da_j = 1/2 d_j d_k Gamma_i
        const double lhs = 0.5 * jet.hess[i](j, k);
        const double rhs = 0.5 * jet.hess[i](k, j);
        out.residual1 = std::max(out.residual1, std::abs(lhs - rhs));
      }
  for (int m = 0; m < 3; ++m) {
    auto [i, j] = cyclic_partners(m);
    for (int k = 0; k < 3; ++k) {
      // dR_m/da_k = 1/2 (dG_m - dG_i G_j - G_i dG_j)
      const double dr = 0.5 * (jet.grad(k, m) - jet.grad(k, i) * g[j] - g[i] * jet.grad(k, j));
      const double res = g[i] * t(k, j) + g[j] * t(k, i) - t(k, m) + dr;
      out.residual2 = std::max(out.residual2, std::abs(res));
    }
  }
  return out;
}

/// Uniform n x n x n grid over the box [lo, hi].
struct AxisGrid {
  Vec3 lo{1.0, 1.0, 1.0};
  Vec3 hi{2.0, 2.0, 2.0};
  int n = 5;

  template <class F>
  void for_each(F&& f) const {
    if (n < 1) throw std::invalid_argument("axis grid needs at least one point per direction");
    auto coord = [&](int d, int idx) { return n == 1 ? lo[d] : lo[d] + (hi[d] - lo[d]) * idx / (n - 1); };
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) f(AxisLengths(coord(0, x), coord(1, y), coord(2, z)));
  }
};

struct DisplacementReport {
  double max_curl = 0.0;
  /// max |D_i - 1/2 grad Gamma_i| against an independent centred difference of Gamma.
  double max_potential_mismatch = 0.0;
  int points = 0;
};

/// The displacement vectors D_i (columns i of T) are gradients of Gamma_i / 2,
/// so each must be curl-free. The curl is taken by centred differences of T.
inline DisplacementReport displacement_potential_check(const Connection& c, const AxisGrid& grid,
                                                       DerivativeMode mode = DerivativeMode::Auto) {
  DisplacementReport rep;
  const double h = fd_step::kFirst;
  grid.for_each([&](const AxisLengths& a) {
    ++rep.points;
    const Mat3 t = field_tensors(c, a, mode).T;
    const Mat3 fd = 0.5 * detail::fd_gradient(c, a, h);
    rep.max_potential_mismatch = std::max(rep.max_potential_mismatch, (t - fd).cwiseAbs().maxCoeff());
    // dT[d](r, col) = d T(r, col) / da_d
    std::array<Mat3, 3> dT;
    for (int d = 0; d < 3; ++d)
      dT[d] = (field_tensors(c, detail::shifted(a, d, h), mode).T -
               field_tensors(c, detail::shifted(a, d, -h), mode).T) / (2.0 * h);
    for (int col = 0; col < 3; ++col)
      for (int m = 0; m < 3; ++m) {
        auto [p, q] = cyclic_partners(m);
        const double curl = dT[p](q, col) - dT[q](p, col);
        rep.max_curl = std::max(rep.max_curl, std::abs(curl));
      }
  });
  return rep;
}

/// S(t_end) S(t_start)^-1 for the horizontal lift around a closed base loop.
inline Rotation holonomy(const Connection& c, const BaseCurve& loop, double h, const LiftOptions& opt = {},
                         double closure_tol = 1e-9) {
  const BaseSample first = loop(loop.t_start);
  const BaseSample last = loop(loop.t_end);
  const double gap = (first.R.matrix() - last.R.matrix()).norm() + (first.A.values() - last.A.values()).norm();
  if (gap > closure_tol)
    throw std::invalid_argument("holonomy needs a closed loop (endpoint mismatch " + std::to_string(gap) + ")");
  const auto lift = horizontal_lift(c, loop, Rotation::identity(), h, opt);
  return lift.back().S * lift.front().S.inverse();
}

}  // namespace riemann
