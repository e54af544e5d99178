#pragma once

// Diagonal connections on the ellipsoid bundle. A connection assigns to every
// shape A the Christoffel symbols Gamma_k(A) = lambda_k / omega_k.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "riemann/bundle.hpp"
#include "riemann/jet.hpp"
#include "riemann/lie.hpp"

namespace riemann {

enum class ConnectionKind { Rigid, Irrotational, FallingCat, SType, Custom };

class Connection {
 public:
  using Christoffel = std::function<Vec3(const AxisLengths&)>;

  static Connection rigid() { return Connection(ConnectionKind::Rigid); }
  static Connection irrotational() { return Connection(ConnectionKind::Irrotational); }
  static Connection falling_cat() { return Connection(ConnectionKind::FallingCat); }

  /// S-type family, Gamma_k = -f a_i a_j / (a_i^2 + a_j^2), f in [-2, 0].
  static Connection s_type(double f) {
    if (!(f >= -2.0 && f <= 0.0)) throw std::invalid_argument("s-type parameter f must lie in [-2, 0]");
    Connection c(ConnectionKind::SType);
    c.f_ = f;
    return c;
  }

  /// User-supplied diagonal Christoffels. `fn` must be safe to call concurrently.
  static Connection custom(Christoffel fn, std::string name = "custom") {
    if (!fn) throw std::invalid_argument("custom connection needs a Christoffel function");
    Connection c(ConnectionKind::Custom);
    c.custom_ = std::make_shared<const Christoffel>(std::move(fn));
    c.name_ = std::move(name);
    return c;
  }

  /// Parses "rigid", "irrotational", "falling-cat" or "s-type:<f>".
  static Connection from_token(const std::string& token) {
    if (token == "rigid") return rigid();
    if (token == "irrotational") return irrotational();
    if (token == "falling-cat") return falling_cat();
    const std::string prefix = "s-type:";
    if (token.rfind(prefix, 0) == 0) {
      const std::string num = token.substr(prefix.size());
      char* end = nullptr;
      const double f = std::strtod(num.c_str(), &end);
      if (num.empty() || end != num.c_str() + num.size())
        throw std::invalid_argument("malformed s-type parameter in connection token '" + token + "'");
      return s_type(f);
    }
    throw std::invalid_argument("unknown connection token '" + token + "'");
  }

  std::string token() const {
    switch (kind_) {
      case ConnectionKind::Rigid: return "rigid";
      case ConnectionKind::Irrotational: return "irrotational";
      case ConnectionKind::FallingCat: return "falling-cat";
      case ConnectionKind::SType: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "s-type:%.17g", f_);
        return buf;
      }
      case ConnectionKind::Custom: return name_;
    }
    return {};
  }

  ConnectionKind kind() const { return kind_; }
  double f() const { return f_; }
  bool is_builtin() const { return kind_ != ConnectionKind::Custom; }

  /// Built-in Christoffels for any scalar type supporting + - * / (double or Jet2).
  template <class T>
  std::array<T, 3> builtin_christoffel(const std::array<T, 3>& a) const {
    std::array<T, 3> g{T(0.0), T(0.0), T(0.0)};
    if (kind_ == ConnectionKind::Rigid) return g;
    for (int k = 0; k < 3; ++k) {
      auto [i, j] = cyclic_partners(k);
      const T s = a[i] * a[i] + a[j] * a[j];
      const T p = a[i] * a[j];
      switch (kind_) {
        case ConnectionKind::Irrotational: g[k] = T(2.0) * p / s; break;
        case ConnectionKind::FallingCat: g[k] = s / (T(2.0) * p); break;
        case ConnectionKind::SType: g[k] = T(-f_) * p / s; break;
        default: throw std::logic_error("builtin_christoffel called on a custom connection");
      }
    }
    return g;
  }

  Vec3 evaluate(const AxisLengths& a) const {
    if (kind_ == ConnectionKind::Custom) {
      const Vec3 g = (*custom_)(a);
      if (!g.allFinite()) throw std::domain_error("custom connection returned non-finite Christoffels");
      return g;
    }
    const auto g = builtin_christoffel<double>({a[0], a[1], a[2]});
    return Vec3(g[0], g[1], g[2]);
  }

 private:
  explicit Connection(ConnectionKind k) : kind_(k) {}

  ConnectionKind kind_;
  double f_ = 0.0;
  std::shared_ptr<const Christoffel> custom_;
  std::string name_;
};

/// Diagonal Christoffels (Gamma^1_1, Gamma^2_2, Gamma^3_3); off-diagonals vanish.
inline Vec3 christoffel(const Connection& c, const AxisLengths& a) { return c.evaluate(a); }

/// grad(i, k) = dGamma_k / da_i; exact for built-ins, centred differences (step 1e-5) for Custom.
inline Mat3 christoffel_gradient(const Connection& c, const AxisLengths& a) {
  Mat3 grad = Mat3::Zero();
  if (c.is_builtin()) {
    using J = Jet2<3>;
    const auto g = c.builtin_christoffel<J>({J::variable(0, a[0]), J::variable(1, a[1]), J::variable(2, a[2])});
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) grad(i, k) = g[k].g[i];
    return grad;
  }
  constexpr double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Vec3 p = a.values(), m = a.values();
    p[i] += h;
    m[i] -= h;
    grad.row(i) = ((c.evaluate(AxisLengths(p)) - c.evaluate(AxisLengths(m))) / (2.0 * h)).transpose();
  }
  return grad;
}

struct BaseTangent {
  Vec3 omega = Vec3::Zero();
  Vec3 adot = Vec3::Zero();
};

/// lambda_k = Gamma_k(A) omega_k, no summation.
inline Vec3 constrain_vortex(const Connection& c, const AxisLengths& a, const Vec3& omega) {
  return christoffel(c, a).cwiseProduct(omega);
}

/// Connection one-form pulled back to the base: A(V) = -Lambda, zero on vibrations.
inline AntiSym3 pullback_one_form(const Connection& c, const AxisLengths& a, const BaseTangent& t) {
  return -hat(constrain_vortex(c, a, t.omega));
}

/// max_b |g_xi(E, V_b)| where E is the horizontal lift of the rotational tangent
/// with body angular velocity omega and V_b = (R_{e_b})_S are the vertical generators.
/// Both are expressed as right-invariant fields on GL+(3): the rotational part
/// (R_{e_i})_R = -(R_{R^t e_i R})_xi, the vortex part (R_L)_S = (R_{R^t A L A^-1 R})_xi.
inline double verticality_defect(const Connection& c, const BundlePoint& p, const Vec3& omega) {
  const Mat3 r = p.R.matrix();
  const Mat3 am = p.A.matrix();
  const Mat3 am_inv = p.A.values().cwiseInverse().asDiagonal();
  const Vec3 gamma = christoffel(c, p.A);

  auto rotational = [&](int i) {
    return Mat3(-(r.transpose() * hat(Vec3::Unit(i)).matrix() * r));
  };
  auto vortex = [&](int b) {
    return Mat3(r.transpose() * am * hat(Vec3::Unit(b)).matrix() * am_inv * r);
  };

  // Tangent is -sum_i omega_i E_i with E_i = (R_{e_i})_R + Gamma_i (R_{e_i})_S.
  Mat3 lift = Mat3::Zero();
  for (int i = 0; i < 3; ++i) lift -= omega[i] * (rotational(i) + gamma[i] * vortex(i));

  double worst = 0.0;
  for (int b = 0; b < 3; ++b) worst = std::max(worst, std::abs(metric(p, lift, vortex(b))));
  return worst;
}

}  // namespace riemann
