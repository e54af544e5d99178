#pragma once

// Base-manifold curves and their horizontal lifts S(t), S' = Lambda(t) S.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riemann/bundle.hpp"
#include "riemann/connection.hpp"
#include "riemann/error.hpp"
#include "riemann/lie.hpp"

namespace riemann {

struct BaseSample {
  Rotation R;
  AxisLengths A;
  BaseTangent tangent;
};

/// gamma : t -> (R(t), A(t)) with its tangent (body omega, adot).
struct BaseCurve {
  std::function<BaseSample(double)> sampler;
  double t_start = 0.0;
  double t_end = 1.0;

  BaseSample operator()(double t) const { return sampler(t); }
};

/// R(t) = exp(th1(t) n1) exp(th2(t) n2) R0 with th(t) = rate t + amp sin(freq t),
/// a(t) = a0 + amp .* sin(freq .* t + phase). Body angular velocity is
/// omega = th1' n1 + th2' exp(th1 n1) n2.
struct WobbleParams {
  Vec3 rotation0 = Vec3::Zero();  // axis-angle of R0
  Vec3 a0{1.0, 1.4, 1.9};
  Vec3 a_amp{0.1, 0.15, 0.08};
  Vec3 a_freq{1.3, 0.7, 1.9};
  Vec3 a_phase{0.0, 0.5, 1.0};
  Vec3 axis1{0.3, 0.2, 1.0};
  double rate1 = 0.8, amp1 = 0.3, freq1 = 1.1;
  Vec3 axis2{1.0, 0.0, 0.0};
  double rate2 = 0.0, amp2 = 0.4, freq2 = 0.9;
  double t_start = 0.0;
  double t_end = 5.0;
};

inline BaseCurve wobble_curve(const WobbleParams& w) {
  if (!(w.a0 - w.a_amp.cwiseAbs()).allFinite() || !((w.a0 - w.a_amp.cwiseAbs()).minCoeff() > 0.0))
    throw std::invalid_argument("wobble curve: a0 - |a_amp| must stay positive");
  if (!(w.t_end > w.t_start)) throw std::invalid_argument("wobble curve: t_end must exceed t_start");
  auto unit = [](const Vec3& n, bool needed) {
    const double len = n.norm();
    if (len == 0.0) {
      if (needed) throw std::invalid_argument("wobble curve: zero rotation axis with nonzero motion");
      return Vec3(Vec3::UnitX());
    }
    return Vec3(n / len);
  };
  const Vec3 n1 = unit(w.axis1, w.rate1 != 0.0 || w.amp1 != 0.0);
  const Vec3 n2 = unit(w.axis2, w.rate2 != 0.0 || w.amp2 != 0.0);
  const Rotation r0 = exp_so3(w.rotation0);

  BaseCurve c;
  c.t_start = w.t_start;
  c.t_end = w.t_end;
  c.sampler = [=](double t) {
    const double th1 = w.rate1 * t + w.amp1 * std::sin(w.freq1 * t);
    const double th2 = w.rate2 * t + w.amp2 * std::sin(w.freq2 * t);
    const double d1 = w.rate1 + w.amp1 * w.freq1 * std::cos(w.freq1 * t);
    const double d2 = w.rate2 + w.amp2 * w.freq2 * std::cos(w.freq2 * t);
    const Rotation e1 = exp_so3(th1 * n1);
    const Rotation e2 = exp_so3(th2 * n2);
    BaseSample s;
    s.R = e1 * e2 * r0;
    Vec3 a, adot;
    for (int k = 0; k < 3; ++k) {
      const double phase = w.a_freq[k] * t + w.a_phase[k];
      a[k] = w.a0[k] + w.a_amp[k] * std::sin(phase);
      adot[k] = w.a_amp[k] * w.a_freq[k] * std::cos(phase);
    }
    s.A = AxisLengths(a);
    s.tangent.omega = d1 * n1 + d2 * (e1 * n2);
    s.tangent.adot = adot;
    return s;
  };
  return c;
}

/// Closed coordinate rectangle in (rotation angle about body axis `rot_axis`,
/// length of axis `len_axis`), centred on `center`. Four unit-time legs:
/// rotate by +dtheta, stretch by +da, rotate back, shrink back. Axes are 0-based.
inline BaseCurve rectangle_loop(const Rotation& r0, const AxisLengths& center, int rot_axis, int len_axis,
                                double dtheta, double da) {
  if (rot_axis < 0 || rot_axis > 2 || len_axis < 0 || len_axis > 2)
    throw std::invalid_argument("rectangle loop: axis index out of range");
  if (center[len_axis] - 0.5 * std::abs(da) <= 0.0)
    throw std::invalid_argument("rectangle loop: axis length would become non-positive");
  const Vec3 n = Vec3::Unit(rot_axis);
  BaseCurve c;
  c.t_start = 0.0;
  c.t_end = 4.0;
  c.sampler = [=](double t) {
    const double tc = std::clamp(t, 0.0, 4.0);
    const int leg = std::min(3, static_cast<int>(std::floor(tc)));
    const double u = tc - leg;
    const double lo = center[len_axis] - 0.5 * da;
    const double hi = center[len_axis] + 0.5 * da;
    double theta = 0.0, len = lo, w = 0.0, ad = 0.0;
    switch (leg) {
      case 0: theta = u * dtheta; len = lo; w = dtheta; break;
      case 1: theta = dtheta; len = (1.0 - u) * lo + u * hi; ad = da; break;
      case 2: theta = (1.0 - u) * dtheta; len = hi; w = -dtheta; break;
      default: theta = 0.0; len = (1.0 - u) * hi + u * lo; ad = -da; break;
    }
    Vec3 a = center.values();
    a[len_axis] = len;
    BaseSample s;
    s.R = exp_so3(theta * n) * r0;
    s.A = AxisLengths(a);
    s.tangent.omega = w * n;
    s.tangent.adot = Vec3::Zero();
    s.tangent.adot[len_axis] = ad;
    return s;
  };
  return c;
}

struct LiftSample {
  double t;
  Rotation S;
};

struct LiftOptions {
  /// Step-doubling local error bound on ||S||_F per step.
  double tolerance = 1e-10;
  int max_halvings = 12;
};

namespace detail {

/// Two-point Gauss Magnus step of order 4: exact when Lambda is constant.
inline Rotation magnus_step(const Connection& c, const BaseCurve& g, const Rotation& s, double t, double h) {
  constexpr double kOff = 0.28867513459481288225;  // sqrt(3)/6
  auto vortex = [&](double tau) {
    const BaseSample b = g(tau);
    return constrain_vortex(c, b.A, b.tangent.omega);
  };
  const Vec3 l1 = vortex(t + (0.5 - kOff) * h);
  const Vec3 l2 = vortex(t + (0.5 + kOff) * h);
  // h/2 (L1 + L2) + sqrt(3)/12 h^2 [L2, L1], with [hat x, hat y] = -hat(x cross y)
  const Vec3 incr = 0.5 * h * (l1 + l2) - (2.0 * kOff / 4.0) * h * h * l2.cross(l1);
  return exp_so3(incr) * s;
}

inline Rotation lift_interval(const Connection& c, const BaseCurve& g, const Rotation& s, double t, double h,
                              const LiftOptions& opt, int depth) {
  const Rotation big = magnus_step(c, g, s, t, h);
  if (opt.tolerance <= 0.0) return big;
  const Rotation half = magnus_step(c, g, s, t, 0.5 * h);
  const Rotation two = magnus_step(c, g, half, t + 0.5 * h, 0.5 * h);
  const double err = (big.matrix() - two.matrix()).norm();
  if (err <= opt.tolerance) return two;
  if (depth >= opt.max_halvings)
    throw StepRejected("horizontal lift local error " + std::to_string(err) + " exceeds tolerance at t = " +
                       std::to_string(t));
  const Rotation mid = lift_interval(c, g, s, t, 0.5 * h, opt, depth + 1);
  return lift_interval(c, g, mid, t + 0.5 * h, 0.5 * h, opt, depth + 1);
}

}  // namespace detail

/// Integrates S' = Lambda S, Lambda = hat(Gamma(A(t)) .* omega(t)), from S0 on a
/// uniform grid of step h (the last step is shortened to land on t_end).
inline std::vector<LiftSample> horizontal_lift(const Connection& c, const BaseCurve& g, const Rotation& s0, double h,
                                               const LiftOptions& opt = {}) {
  if (!(h > 0.0)) throw std::invalid_argument("horizontal_lift: step h must be positive");
  if (!g.sampler) throw std::invalid_argument("horizontal_lift: empty base curve");
  const double span = g.t_end - g.t_start;
  if (!(span > 0.0)) throw std::invalid_argument("horizontal_lift: empty time interval");
  const auto n = static_cast<long>(std::ceil(span / h - 1e-9));
  std::vector<LiftSample> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back({g.t_start, s0});
  Rotation s = s0;
  for (long k = 0; k < n; ++k) {
    const double t0 = g.t_start + static_cast<double>(k) * h;
    const double t1 = (k + 1 == n) ? g.t_end : g.t_start + static_cast<double>(k + 1) * h;
    s = detail::lift_interval(c, g, s, t0, t1 - t0, opt, 0);
    out.push_back({t1, s});
  }
  return out;
}

}  // namespace riemann
