#pragma once

// Fixed-size SO(3) / so(3) kernel.
//
// Basis convention: (e_i)_{jk} = eps_{ijk}, so hat(v) = sum_i v_i e_i is the
// *negative* of the usual cross-product matrix, hat(v) x = -v x x. With this
// convention exp(theta e_3) = [[c, s, 0], [-s, c, 0], [0, 0, 1]] and
// [hat(u), hat(v)] = -hat(u x v).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "riemann/error.hpp"

namespace riemann {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace lie_tolerance {
/// Max ||R^t R - I||_F accepted for a Rotation.
inline constexpr double kOrthogonality = 1e-12;
/// Below this angle exp/log switch to Taylor series.
inline constexpr double kSeriesAngle = 1e-4;
}  // namespace lie_tolerance

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

/// Element of so(3), stored by its axial vector only.
class AntiSym3 {
 public:
  AntiSym3() : axial_(Vec3::Zero()) {}
  explicit AntiSym3(const Vec3& axial) : axial_(axial) {}

  const Vec3& axial() const { return axial_; }

  Mat3 matrix() const {
    const Vec3& v = axial_;
    Mat3 m;
    // m_jk = sum_i v_i eps_ijk
    m << 0.0, v.z(), -v.y(),
        -v.z(), 0.0, v.x(),
        v.y(), -v.x(), 0.0;
    return m;
  }

  AntiSym3 operator+(const AntiSym3& o) const { return AntiSym3(axial_ + o.axial_); }
  AntiSym3 operator-(const AntiSym3& o) const { return AntiSym3(axial_ - o.axial_); }
  AntiSym3 operator-() const { return AntiSym3(-axial_); }
  AntiSym3 operator*(double s) const { return AntiSym3(s * axial_); }
  friend AntiSym3 operator*(double s, const AntiSym3& a) { return a * s; }
  bool operator==(const AntiSym3& o) const { return axial_ == o.axial_; }

 private:
  Vec3 axial_;
};

inline AntiSym3 hat(const Vec3& v) { return AntiSym3(v); }
inline Vec3 unhat(const AntiSym3& m) { return m.axial(); }

/// Axial vector of the antisymmetric part of an arbitrary matrix.
inline Vec3 axial_of(const Mat3& m) {
  const Mat3 a = 0.5 * (m - m.transpose());
  return Vec3(a(1, 2), a(2, 0), a(0, 1));
}

/// Matrix commutator, evaluated on axial vectors: [hat u, hat v] = -hat(u x v).
inline AntiSym3 commutator(const AntiSym3& x, const AntiSym3& y) {
  return AntiSym3(-x.axial().cross(y.axial()));
}

/// Element of SO(3). Construction through from_matrix() enforces the invariants.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws std::invalid_argument if m is not orthogonal within `tol` or det m <= 0.
  static Rotation from_matrix(const Mat3& m, double tol = lie_tolerance::kOrthogonality) {
    if (!m.allFinite()) throw std::invalid_argument("rotation matrix has non-finite entries");
    const double defect = (m.transpose() * m - Mat3::Identity()).norm();
    if (defect > tol)
      throw std::invalid_argument("matrix is not orthogonal (||R^t R - I|| = " + std::to_string(defect) + ")");
    if (m.determinant() <= 0.0) throw NonOrientable(m.determinant());
    return Rotation(m);
  }

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation transpose() const { return inverse(); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  double orthogonality_defect() const { return (m_.transpose() * m_ - Mat3::Identity()).norm(); }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  friend Rotation exp_so3(const Vec3& v);
  friend Rotation project_rotation(const Mat3& m);

  Mat3 m_;
};

/// Rodrigues formula R = I + (sin t / t) K + ((1 - cos t) / t^2) K^2, K = hat(v), t = |v|.
inline Rotation exp_so3(const Vec3& v) {
  const double t2 = v.squaredNorm();
  const double t = std::sqrt(t2);
  double a, b;
  if (t < lie_tolerance::kSeriesAngle) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = hat(v).matrix();
  // K^2 = v v^t - |v|^2 I
  const Mat3 k2 = v * v.transpose() - t2 * Mat3::Identity();
  return Rotation(Mat3::Identity() + a * k + b * k2);
}

/// Inverse of exp_so3 on the principal branch, |result| <= pi.
inline Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 w = axial_of(m);  // = (sin t / t) v
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double s = w.norm();
  const double t = std::atan2(s, c);
  if (t < lie_tolerance::kSeriesAngle) return w * (1.0 + t * t / 6.0);
  if (t < 3.0) return w * (t / std::sin(t));
  // Near pi: recover v v^t from the symmetric part, (R + R^t)/2 = I + b (v v^t - t^2 I).
  const double b = (1.0 - std::cos(t)) / (t * t);
  const Mat3 vvt = (0.5 * (m + m.transpose()) - Mat3::Identity()) / b + t * t * Mat3::Identity();
  int col = 0;
  vvt.diagonal().maxCoeff(&col);
  Vec3 v = vvt.col(col) / std::sqrt(std::max(vvt(col, col), 0.0));
  if (v.dot(w) < 0.0) v = -v;
  return v;
}

/// Rotation angle of r in [0, pi].
inline double rotation_angle(const Rotation& r) { return log_so3(r).norm(); }

/// Ad_R(Omega) = R Omega R^{-1}; on axial vectors this is v -> R v (det R = +1).
inline AntiSym3 ad_action(const Rotation& r, const AntiSym3& omega) {
  return AntiSym3(r.matrix() * omega.axial());
}

/// Frobenius-nearest rotation (orthogonal polar factor). Throws NonOrientable if det m <= 0.
inline Rotation project_rotation(const Mat3& m) {
  if (!m.allFinite()) throw std::invalid_argument("project_rotation: non-finite input");
  const double det = m.determinant();
  if (!(det > 0.0)) throw NonOrientable(det);
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace riemann
