#include <gtest/gtest.h>

#include "oracles.hpp"
#include "riemann/bundle.hpp"

using namespace riemann;

namespace {

BundlePoint random_point(oracle::Rng& rng) {
  return BundlePoint{exp_so3(3.0 * rng.vec()), AxisLengths(rng.shape()), exp_so3(3.0 * rng.vec())};
}

}  // namespace

TEST(AxisLengths, RejectsNonPositiveOrNonFinite) {
  EXPECT_THROW(AxisLengths(1.0, 0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(AxisLengths(1.0, -1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(AxisLengths(1.0, std::nan(""), 2.0), std::invalid_argument);
  const AxisLengths a(1.0, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(a.sum_sq(0), 13.0);
  EXPECT_DOUBLE_EQ(a.sum_sq(1), 10.0);
  EXPECT_DOUBLE_EQ(a.sum_sq(2), 5.0);
  EXPECT_DOUBLE_EQ(a.cross2(0), 12.0);
  EXPECT_DOUBLE_EQ(a.cross2(2), 4.0);
}

TEST(MassScale, MustBePositive) {
  EXPECT_THROW(MassScale(0.0), std::invalid_argument);
  EXPECT_THROW(MassScale(-2.0), std::invalid_argument);
}

TEST(Bundle, AssembleAndProject) {
  oracle::Rng rng(10);
  for (int n = 0; n < 20; ++n) {
    const BundlePoint p = random_point(rng);
    const Mat3 xi = assemble(p);
    EXPECT_GT(xi.determinant(), 0.0);
    EXPECT_LT((project(p).q - xi * xi.transpose()).norm(), 1e-12);
    const Vec3 ev = project(p).eigenvalues();
    Vec3 a2 = p.A.values().cwiseProduct(p.A.values());
    std::sort(a2.data(), a2.data() + 3);
    EXPECT_LT((ev - a2).norm(), 1e-12);
  }
}

TEST(Bundle, ProjectionIsGaugeInvariant) {
  oracle::Rng rng(11);
  const BundlePoint p = random_point(rng);
  for (int n = 0; n < 10; ++n) {
    BundlePoint g = p;
    g.S = exp_so3(3.0 * rng.vec()) * p.S;
    EXPECT_EQ(project(g).q, project(p).q);
  }
}

TEST(Bundle, MetricInnerProductsOfGenerators) {
  // g(rot_i, vortex_b) = -2 delta_ib a_j a_k,  g(vortex_a, vortex_b) = delta_ab (a_j^2 + a_k^2)
  oracle::Rng rng(12);
  const BundlePoint p = random_point(rng);
  const Mat3 r = p.R.matrix();
  const Mat3 am = p.A.matrix();
  const Mat3 ai = am.inverse();
  auto rot = [&](int i) { return Mat3(-(r.transpose() * hat(Vec3::Unit(i)).matrix() * r)); };
  auto vor = [&](int b) { return Mat3(r.transpose() * am * hat(Vec3::Unit(b)).matrix() * ai * r); };
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 3; ++b) {
      const double expect_rv = i == b ? -p.A.cross2(i) : 0.0;
      const double expect_vv = i == b ? p.A.sum_sq(i) : 0.0;
      EXPECT_NEAR(metric(p, rot(i), vor(b)), expect_rv, 1e-12);
      EXPECT_NEAR(metric(p, vor(i), vor(b)), expect_vv, 1e-12);
      EXPECT_NEAR(metric(p, rot(i), rot(b)), expect_vv, 1e-12);
    }
}

TEST(KineticEnergy, ScalarFormMatchesTraceForm) {
  oracle::Rng rng(13);
  for (int n = 0; n < 200; ++n) {
    const Vec3 a = rng.vec(0.3, 3.0);
    const BodyVelocities v{rng.vec(), rng.vec(), rng.vec()};
    const double kappa = rng.uniform(0.5, 2.0);
    const double ref = oracle::kinetic_trace_form(a, v.omega, v.adot, v.lambda, kappa);
    EXPECT_NEAR(kinetic_energy(AxisLengths(a), v, MassScale(kappa)), ref, 1e-12 * (1.0 + ref));
  }
}

TEST(KineticEnergy, AxisGradientMatchesFiniteDifferences) {
  oracle::Rng rng(14);
  for (int n = 0; n < 200; ++n) {
    const Vec3 a = rng.vec(0.5, 3.0);
    const BodyVelocities v{rng.vec(), rng.vec(), rng.vec()};
    const Vec3 g = kinetic_energy_axis_gradient(AxisLengths(a), v);
    for (int i = 0; i < 3; ++i) {
      auto f = [&](double x) {
        Vec3 b = a;
        b[i] = x;
        return oracle::kinetic_trace_form(b, v.omega, v.adot, v.lambda);
      };
      EXPECT_NEAR(g[i], oracle::central(f, a[i], 1e-6), 1e-6);
    }
  }
}

TEST(Momenta, AreVelocityDerivativesOfKineticEnergy) {
  oracle::Rng rng(15);
  for (int n = 0; n < 100; ++n) {
    const Vec3 a = rng.vec(0.5, 3.0);
    BodyVelocities v{rng.vec(), rng.vec(), rng.vec()};
    const Momenta m = momenta(AxisLengths(a), v);
    for (int k = 0; k < 3; ++k) {
      auto t_of_w = [&](double x) {
        Vec3 w = v.omega;
        w[k] = x;
        return oracle::kinetic_trace_form(a, w, v.adot, v.lambda);
      };
      auto t_of_l = [&](double x) {
        Vec3 l = v.lambda;
        l[k] = x;
        return oracle::kinetic_trace_form(a, v.omega, v.adot, l);
      };
      EXPECT_NEAR(m.L[k], oracle::central(t_of_w, v.omega[k], 1e-5), 1e-6);
      EXPECT_NEAR(m.C[k], -oracle::central(t_of_l, v.lambda[k], 1e-5), 1e-6);
    }
  }
}

TEST(Momenta, RigidLimitGivesPrincipalMoments) {
  const AxisLengths a(1.0, 2.0, 3.0);
  const Momenta m = momenta(a, BodyVelocities{Vec3(1, 1, 1), Vec3::Zero(), Vec3::Zero()}, MassScale(2.0));
  EXPECT_EQ(m.L, Vec3(26.0, 20.0, 10.0));
  EXPECT_EQ(m.C, Vec3(24.0, 12.0, 8.0));
}

TEST(InvertMomenta, RoundTrips) {
  oracle::Rng rng(16);
  for (int n = 0; n < 200; ++n) {
    const AxisLengths a(rng.shape());
    const BodyVelocities v{rng.vec(), Vec3::Zero(), rng.vec()};
    const MassScale m(rng.uniform(0.5, 2.0));
    const AngularVelocities back = invert_momenta(a, momenta(a, v, m), m);
    EXPECT_LT((back.omega - v.omega).norm(), 1e-10 * v.omega.norm() + 1e-14);
    EXPECT_LT((back.lambda - v.lambda).norm(), 1e-10 * v.lambda.norm() + 1e-14);
  }
}

TEST(InvertMomenta, DegenerateAxesAreReported) {
  try {
    invert_momenta(AxisLengths(1.0, 1.0, 2.0), Momenta{Vec3(0, 0, 1), Vec3::Zero()});
    FAIL() << "expected AxisDegenerate";
  } catch (const AxisDegenerate& e) {
    EXPECT_EQ(e.first(), 1);
    EXPECT_EQ(e.second(), 2);
  }
  try {
    invert_momenta(AxisLengths(2.0, 1.5, 2.0 + 1e-12), Momenta{});
    FAIL() << "expected AxisDegenerate";
  } catch (const AxisDegenerate& e) {
    EXPECT_EQ(e.first(), 1);
    EXPECT_EQ(e.second(), 3);
  }
  EXPECT_NO_THROW(invert_momenta(AxisLengths(1.0, 1.0 + 1e-3, 2.0), Momenta{}));
}

TEST(LabMomenta, RotatesByTransposes) {
  oracle::Rng rng(17);
  const BundlePoint p = random_point(rng);
  const Momenta m{rng.vec(), rng.vec()};
  const auto [l, c] = lab_momenta(p, m);
  EXPECT_LT((p.R * l - m.L).norm(), 1e-14);
  EXPECT_LT((p.S * c - m.C).norm(), 1e-14);
}
