#pragma once

// Second-order forward-mode jets: value, gradient and Hessian with respect to
// N independent variables, propagated exactly through + - * /.

#include <array>

namespace riemann {

template <int N>
struct Jet2 {
  double v = 0.0;
  std::array<double, N> g{};
  std::array<std::array<double, N>, N> h{};

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT(google-explicit-constructor): constants promote

  static Jet2 variable(int index, double value) {
    Jet2 x(value);
    x.g[index] = 1.0;
    return x;
  }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) {
      g[i] += o.g[i];
      for (int j = 0; j < N; ++j) h[i][j] += o.h[i][j];
    }
    return *this;
  }
  Jet2& operator-=(const Jet2& o) { return *this += -o; }

  Jet2 operator-() const {
    Jet2 r;
    r.v = -v;
    for (int i = 0; i < N; ++i) {
      r.g[i] = -g[i];
      for (int j = 0; j < N; ++j) r.h[i][j] = -h[i][j];
    }
    return r;
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) {
      r.g[i] = a.g[i] * b.v + a.v * b.g[i];
      for (int j = 0; j < N; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.v * b.h[i][j] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
    return r;
  }

  /// 1/x with d(1/x) = -dx/x^2, d2(1/x) = 2 dx dx^t / x^3 - d2x / x^2.
  friend Jet2 reciprocal(const Jet2& x) {
    Jet2 r;
    const double inv = 1.0 / x.v;
    const double inv2 = inv * inv;
    r.v = inv;
    for (int i = 0; i < N; ++i) {
      r.g[i] = -x.g[i] * inv2;
      for (int j = 0; j < N; ++j) r.h[i][j] = 2.0 * x.g[i] * x.g[j] * inv2 * inv - x.h[i][j] * inv2;
    }
    return r;
  }

  friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet2<N>& x) {
  return x.v;
}

}  // namespace riemann
