#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace riemann {

/// Base of every numerical failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix with det <= 0 was asked to become a rotation.
class NonOrientable : public Error {
 public:
  explicit NonOrientable(double det)
      : Error("matrix is not orientation preserving (det = " + std::to_string(det) + ")"), det_(det) {}
  double det() const noexcept { return det_; }

 private:
  double det_;
};

/// Two axis lengths coincide, so the (omega, lambda) <-> (L, C) map is singular.
/// Axis indices are 1-based, matching the usual a1, a2, a3 naming.
class AxisDegenerate : public Error {
 public:
  AxisDegenerate(int i, int j, const std::string& detail = {})
      : Error("axes " + std::to_string(i) + " and " + std::to_string(j) +
              " are degenerate: the rotation/vortex block is singular at an axisymmetric shape" +
              (detail.empty() ? std::string{} : " (" + detail + ")")),
        i_(i),
        j_(j) {}
  int first() const noexcept { return i_; }
  int second() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

/// The integrator could not take a step even after repeated bisection.
class StepRejected : public Error {
 public:
  explicit StepRejected(const std::string& why) : Error("step rejected: " + why) {}
};

/// Invalid scenario configuration. `path` is a JSON-pointer-like location.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, std::string reason)
      : Error("schema error at '" + path + "': " + reason), path_(std::move(path)), reason_(std::move(reason)) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

}  // namespace riemann
