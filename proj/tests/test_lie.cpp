#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "riemann/lie.hpp"

using namespace riemann;

TEST(Hat, MatchesLeviCivitaBasis) {
  oracle::Rng rng(1);
  for (int n = 0; n < 20; ++n) {
    const Vec3 v = rng.vec();
    EXPECT_LT((hat(v).matrix() - oracle::eps_hat(v)).norm(), 1e-15);
    EXPECT_EQ(unhat(hat(v)), v);
    EXPECT_LT((axial_of(hat(v).matrix()) - v).norm(), 1e-15);
  }
}

TEST(Hat, IsMinusCrossProductMatrix) {
  const Vec3 v(0.3, -1.2, 2.0), x(1.0, 0.5, -0.25);
  EXPECT_LT((hat(v).matrix() * x + v.cross(x)).norm(), 1e-15);
}

TEST(Commutator, EqualsMinusHatOfCross) {
  oracle::Rng rng(2);
  for (int n = 0; n < 20; ++n) {
    const Vec3 u = rng.vec(), v = rng.vec();
    const Mat3 ab = hat(u).matrix() * hat(v).matrix() - hat(v).matrix() * hat(u).matrix();
    EXPECT_LT((ab - commutator(hat(u), hat(v)).matrix()).norm(), 1e-14);
    EXPECT_LT((ab + hat(u.cross(v)).matrix()).norm(), 1e-14);
  }
}

TEST(ExpSo3, RotationAboutThirdAxis) {
  const double t = 0.7;
  Mat3 expect;
  expect << std::cos(t), std::sin(t), 0, -std::sin(t), std::cos(t), 0, 0, 0, 1;
  EXPECT_LT((exp_so3(Vec3(0, 0, t)).matrix() - expect).norm(), 1e-15);
}

TEST(ExpSo3, MatchesPowerSeries) {
  oracle::Rng rng(3);
  for (double scale : {1e-9, 1e-5, 1e-3, 0.1, 1.0, 3.0}) {
    for (int n = 0; n < 10; ++n) {
      const Vec3 v = scale * rng.vec();
      const Mat3 ref = oracle::exp_series(oracle::eps_hat(v));
      EXPECT_LT((exp_so3(v).matrix() - ref).norm(), 1e-14) << "scale " << scale;
      EXPECT_LT(exp_so3(v).orthogonality_defect(), 1e-14);
      EXPECT_NEAR(exp_so3(v).matrix().determinant(), 1.0, 1e-14);
    }
  }
}

TEST(ExpSo3, HomomorphismOnCommutingArguments) {
  const Vec3 n = Vec3(1, 2, -0.5).normalized();
  EXPECT_LT(((exp_so3(0.4 * n) * exp_so3(0.9 * n)).matrix() - exp_so3(1.3 * n).matrix()).norm(), 1e-14);
}

TEST(LogSo3, InvertsExpAcrossRegimes) {
  oracle::Rng rng(4);
  for (double angle : {0.0, 1e-10, 1e-6, 1e-4, 2e-4, 0.5, 2.0, 2.9, 3.1, M_PI - 1e-6, M_PI - 1e-9}) {
    for (int n = 0; n < 5; ++n) {
      const Vec3 v = angle * rng.vec().normalized();
      const Vec3 back = log_so3(exp_so3(v));
      const double tol = angle > 3.0 ? 1e-6 : 1e-12;
      EXPECT_LT((back - v).norm(), tol) << "angle " << angle;
      EXPECT_NEAR(rotation_angle(exp_so3(v)), angle, tol);
    }
  }
}

TEST(LogSo3, ExpOfLogAtPiIsTheSameRotation) {
  const Rotation r = exp_so3(M_PI * Vec3(0, 1, 1).normalized());
  EXPECT_LT((exp_so3(log_so3(r)).matrix() - r.matrix()).norm(), 1e-12);
  EXPECT_NEAR(log_so3(r).norm(), M_PI, 1e-12);
}

TEST(AdAction, ConjugationActsOnAxialVector) {
  oracle::Rng rng(5);
  for (int n = 0; n < 20; ++n) {
    const Rotation r = exp_so3(2.0 * rng.vec());
    const Vec3 v = rng.vec();
    const Mat3 conj = r.matrix() * hat(v).matrix() * r.matrix().transpose();
    EXPECT_LT((ad_action(r, hat(v)).matrix() - conj).norm(), 1e-14);
  }
}

TEST(Rotation, FromMatrixChecksInvariants) {
  const Rotation r = exp_so3(Vec3(0.1, 0.2, 0.3));
  EXPECT_NO_THROW(Rotation::from_matrix(r.matrix()));
  Mat3 bad = r.matrix();
  bad(0, 0) += 1e-6;
  EXPECT_THROW(Rotation::from_matrix(bad), std::invalid_argument);
  EXPECT_THROW(Rotation::from_matrix(-r.matrix()), NonOrientable);
  Mat3 nan = r.matrix();
  nan(1, 1) = std::nan("");
  EXPECT_THROW(Rotation::from_matrix(nan), std::invalid_argument);
}

TEST(Rotation, InverseIsTranspose) {
  const Rotation r = exp_so3(Vec3(-0.4, 1.1, 0.2));
  EXPECT_LT(((r * r.inverse()).matrix() - Mat3::Identity()).norm(), 1e-15);
  EXPECT_EQ(r.inverse().matrix(), r.matrix().transpose());
  EXPECT_EQ(Rotation::identity().matrix(), Mat3::Identity());
}

TEST(ProjectRotation, AgreesWithNewtonPolarFactor) {
  oracle::Rng rng(6);
  int tested = 0;
  while (tested < 50) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) m.row(i) = rng.vec().transpose();
    if (m.determinant() < 0.05) continue;
    ++tested;
    const Rotation r = project_rotation(m);
    EXPECT_LT((r.matrix() - oracle::newton_polar(m)).norm(), 1e-10);
    EXPECT_LT(r.orthogonality_defect(), 1e-13);
  }
}

TEST(ProjectRotation, FixesRotationsAndRejectsReflections) {
  const Rotation r = exp_so3(Vec3(0.3, -0.2, 1.0));
  EXPECT_LT((project_rotation(r.matrix()).matrix() - r.matrix()).norm(), 1e-14);
  EXPECT_LT((project_rotation(2.5 * r.matrix()).matrix() - r.matrix()).norm(), 1e-14);
  Mat3 refl = Mat3::Identity();
  refl(2, 2) = -1.0;
  EXPECT_THROW(project_rotation(refl), NonOrientable);
  EXPECT_THROW(project_rotation(Mat3::Zero()), NonOrientable);
}
