#include <gtest/gtest.h>

#include "oracles.hpp"
#include "riemann/connection.hpp"
#include "riemann/dynamics.hpp"
#include "riemann/lift.hpp"

using namespace riemann;

namespace {

const AxisLengths k123(1.0, 2.0, 3.0);

// fixed shape and fixed body angular velocity, R(t) = exp(t omega) R0
BaseCurve steady_curve(const AxisLengths& a, const Vec3& omega, double t_end) {
  BaseCurve c;
  c.t_end = t_end;
  c.sampler = [=](double t) { return BaseSample{exp_so3(t * omega), a, BaseTangent{omega, Vec3::Zero()}}; };
  return c;
}

void expect_tangent_consistent(const BaseCurve& g, double t) {
  const double h = 1e-5;
  const BaseSample p = g(t + h), m = g(t - h), s = g(t);
  const Mat3 rdot = (p.R.matrix() - m.R.matrix()) / (2.0 * h);
  const Vec3 omega = axial_of(rdot * s.R.matrix().transpose());
  const Vec3 adot = (p.A.values() - m.A.values()) / (2.0 * h);
  EXPECT_LT((omega - s.tangent.omega).norm(), 1e-8) << "t = " << t;
  EXPECT_LT((adot - s.tangent.adot).norm(), 1e-8) << "t = " << t;
}

}  // namespace

TEST(Christoffel, TableValues) {
  EXPECT_EQ(christoffel(Connection::rigid(), k123), Vec3::Zero());
  EXPECT_LT((christoffel(Connection::irrotational(), k123) - Vec3(12.0 / 13, 6.0 / 10, 4.0 / 5)).norm(), 1e-15);
  EXPECT_LT((christoffel(Connection::falling_cat(), k123) - Vec3(13.0 / 12, 10.0 / 6, 5.0 / 4)).norm(), 1e-15);
}

TEST(Christoffel, STypeEndpoints) {
  oracle::Rng rng(20);
  for (int n = 0; n < 20; ++n) {
    const AxisLengths a(rng.vec(0.5, 3.0));
    EXPECT_EQ(christoffel(Connection::s_type(-2.0), a), christoffel(Connection::irrotational(), a));
    EXPECT_EQ(christoffel(Connection::s_type(0.0), a).cwiseAbs(), Vec3::Zero());
    const double f = rng.uniform(-2.0, 0.0);
    EXPECT_LT((christoffel(Connection::s_type(f), a) + 0.5 * f * christoffel(Connection::irrotational(), a)).norm(),
              1e-15);
  }
}

TEST(Christoffel, AmGmOrderingAndReciprocity) {
  oracle::Rng rng(21);
  for (int n = 0; n < 500; ++n) {
    const AxisLengths a(rng.vec(0.2, 5.0));
    const Vec3 gi = christoffel(Connection::irrotational(), a);
    const Vec3 gf = christoffel(Connection::falling_cat(), a);
    EXPECT_LE(gi.maxCoeff(), 1.0);
    EXPECT_GE(gf.minCoeff(), 1.0);
    EXPECT_LT((gi.cwiseProduct(gf) - Vec3::Ones()).cwiseAbs().maxCoeff(), 1e-14);
  }
  const AxisLengths sphere(1.3, 1.3, 1.3);
  EXPECT_EQ(christoffel(Connection::irrotational(), sphere), Vec3::Ones());
  EXPECT_EQ(christoffel(Connection::falling_cat(), sphere), Vec3::Ones());
}

TEST(Connection, TokensRoundTrip) {
  for (const char* t : {"rigid", "irrotational", "falling-cat", "s-type:-1.5", "s-type:0", "s-type:-2"})
    EXPECT_EQ(Connection::from_token(Connection::from_token(t).token()).token(), Connection::from_token(t).token());
  const Connection s = Connection::from_token("s-type:-1.5");
  EXPECT_EQ(s.kind(), ConnectionKind::SType);
  EXPECT_EQ(s.f(), -1.5);
  const Connection odd = Connection::from_token("s-type:-0.1");
  EXPECT_EQ(Connection::from_token(odd.token()).f(), odd.f());
}

TEST(Connection, RejectsBadTokensAndParameters) {
  for (const char* t : {"", "Rigid", "falling_cat", "s-type:", "s-type:abc", "s-type:-1x", "s-type:0.5", "s-type:-2.01"})
    EXPECT_THROW(Connection::from_token(t), std::invalid_argument) << t;
  EXPECT_THROW(Connection::s_type(std::nan("")), std::invalid_argument);
  EXPECT_THROW(Connection::custom(nullptr), std::invalid_argument);
}

TEST(Connection, CustomMustReturnFiniteValues) {
  const Connection c = Connection::custom([](const AxisLengths& a) { return Vec3(a[0], 1.0 / (a[1] - 2.0), 0.0); });
  EXPECT_FALSE(c.is_builtin());
  EXPECT_NO_THROW(christoffel(c, AxisLengths(1.0, 1.0, 1.0)));
  EXPECT_THROW(christoffel(c, AxisLengths(1.0, 2.0, 1.0)), std::domain_error);
}

TEST(ConstrainVortex, ComponentwiseProduct) {
  EXPECT_EQ(constrain_vortex(Connection::rigid(), k123, Vec3(3, -2, 1)), Vec3::Zero());
  EXPECT_LT((constrain_vortex(Connection::irrotational(), k123, Vec3(1, 1, 1)) - Vec3(12.0 / 13, 0.6, 0.8)).norm(),
            1e-15);
  EXPECT_EQ(constrain_vortex(Connection::falling_cat(), k123, Vec3::Zero()), Vec3::Zero());
}

TEST(PullbackOneForm, IsMinusVortexVelocity) {
  EXPECT_EQ(pullback_one_form(Connection::irrotational(), k123, BaseTangent{Vec3::Zero(), Vec3(1, 2, 3)}).axial(),
            Vec3::Zero());
  const AntiSym3 a = pullback_one_form(Connection::irrotational(), k123, BaseTangent{Vec3(1, 0, 0), Vec3::Zero()});
  EXPECT_LT((a.matrix() + hat(Vec3(12.0 / 13, 0, 0)).matrix()).norm(), 1e-15);
  EXPECT_EQ(pullback_one_form(Connection::rigid(), k123, BaseTangent{Vec3(1, 2, 3), Vec3(1, 1, 1)}).axial(),
            Vec3::Zero());
}

TEST(Verticality, IrrotationalLiftIsOrthogonalToFibre) {
  oracle::Rng rng(22);
  for (int n = 0; n < 100; ++n) {
    const BundlePoint p{exp_so3(3.0 * rng.vec()), AxisLengths(rng.shape()), exp_so3(3.0 * rng.vec())};
    EXPECT_LE(verticality_defect(Connection::irrotational(), p, rng.vec()), 1e-12);
  }
}

TEST(Verticality, OtherConnectionsAreNotOrthogonal) {
  const BundlePoint p{Rotation::identity(), k123, Rotation::identity()};
  EXPECT_NEAR(verticality_defect(Connection::rigid(), p, Vec3(1, 0, 0)), 12.0, 1e-12);
  // falling cat: |-2 a2 a3 + (13/12)(13)| = |-12 + 169/12|
  EXPECT_NEAR(verticality_defect(Connection::falling_cat(), p, Vec3(1, 0, 0)), 169.0 / 12 - 12.0, 1e-12);
  const BundlePoint sphere{exp_so3(Vec3(0.3, 0.1, -0.7)), AxisLengths(1.0, 1.0, 1.0), exp_so3(Vec3(1, 0, 0))};
  EXPECT_LE(verticality_defect(Connection::irrotational(), sphere, Vec3(1, 2, 3)), 1e-12);
  EXPECT_LE(verticality_defect(Connection::falling_cat(), sphere, Vec3(1, 2, 3)), 1e-12);
}

TEST(BaseCurves, TangentsMatchFiniteDifferences) {
  WobbleParams w;
  w.rotation0 = Vec3(0.4, -0.3, 0.2);
  const BaseCurve g = wobble_curve(w);
  for (double t : {0.1, 0.77, 1.9, 3.3, 4.8}) expect_tangent_consistent(g, t);
  const BaseCurve loop = rectangle_loop(exp_so3(Vec3(0.1, 0.2, 0.3)), k123, 0, 2, 0.3, 0.2);
  for (double t : {0.3, 1.5, 2.5, 3.7}) expect_tangent_consistent(loop, t);
}

TEST(BaseCurves, RectangleLoopCloses) {
  const BaseCurve loop = rectangle_loop(exp_so3(Vec3(0.1, 0.2, 0.3)), k123, 1, 0, 0.5, 0.4);
  EXPECT_LT((loop(0.0).R.matrix() - loop(4.0).R.matrix()).norm(), 1e-15);
  EXPECT_EQ(loop(0.0).A.values(), loop(4.0).A.values());
  EXPECT_THROW(rectangle_loop(Rotation::identity(), k123, 0, 0, 0.1, 3.0), std::invalid_argument);
  EXPECT_THROW(rectangle_loop(Rotation::identity(), k123, 3, 0, 0.1, 0.1), std::invalid_argument);
}

TEST(HorizontalLift, RigidStaysAtIdentity) {
  const auto lift = horizontal_lift(Connection::rigid(), wobble_curve({}), Rotation::identity(), 1e-2);
  ASSERT_EQ(lift.size(), 501u);
  for (const LiftSample& s : lift) EXPECT_EQ(s.S.matrix(), Mat3::Identity());
  EXPECT_DOUBLE_EQ(lift.back().t, 5.0);
}

TEST(HorizontalLift, ConstantVortexIsExponential) {
  const auto lift = horizontal_lift(Connection::irrotational(), steady_curve(k123, Vec3(0, 0, 1), 1.0),
                                    Rotation::identity(), 0.1);
  EXPECT_LT((lift.back().S.matrix() - exp_so3(Vec3(0, 0, 0.8)).matrix()).norm(), 1e-14);
  const auto general = horizontal_lift(Connection::falling_cat(), steady_curve(k123, Vec3(0.3, -1, 0.5), 2.0),
                                       Rotation::identity(), 0.05);
  const Vec3 lam = constrain_vortex(Connection::falling_cat(), k123, Vec3(0.3, -1, 0.5));
  for (const LiftSample& s : general)
    EXPECT_LT((s.S.matrix() - oracle::exp_series(s.t * hat(lam).matrix())).norm(), 1e-12);
}

TEST(HorizontalLift, SamplesStayOrthogonal) {
  const auto lift = horizontal_lift(Connection::falling_cat(), wobble_curve({}), exp_so3(Vec3(1, 2, 0)), 1e-2);
  for (const LiftSample& s : lift) EXPECT_LT(s.S.orthogonality_defect(), 1e-13);
}

TEST(HorizontalLift, GaugeEquivariance) {
  const Rotation s0 = exp_so3(Vec3(0.2, -0.5, 0.9));
  const Rotation g = exp_so3(Vec3(-1.0, 0.3, 0.4));
  const BaseCurve curve = wobble_curve({});
  const auto a = horizontal_lift(Connection::irrotational(), curve, s0, 1e-2);
  const auto b = horizontal_lift(Connection::irrotational(), curve, s0 * g.inverse(), 1e-2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t n = 0; n < a.size(); ++n)
    EXPECT_LT(((a[n].S * g.inverse()).matrix() - b[n].S.matrix()).norm(), 1e-12);
}

TEST(HorizontalLift, FourthOrderInStep) {
  WobbleParams w;
  w.t_end = 2.0;
  w.rate1 = 2.0;
  const BaseCurve curve = wobble_curve(w);
  LiftOptions plain;
  plain.tolerance = 0.0;
  const Mat3 ref = horizontal_lift(Connection::falling_cat(), curve, Rotation::identity(), 1e-3, plain).back().S.matrix();
  const double e1 = (horizontal_lift(Connection::falling_cat(), curve, Rotation::identity(), 0.1, plain).back().S.matrix() - ref).norm();
  const double e2 = (horizontal_lift(Connection::falling_cat(), curve, Rotation::identity(), 0.05, plain).back().S.matrix() - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(HorizontalLift, IncompatibleToleranceIsRejected) {
  LiftOptions strict;
  strict.tolerance = 1e-30;
  strict.max_halvings = 4;
  EXPECT_THROW(horizontal_lift(Connection::falling_cat(), wobble_curve({}), Rotation::identity(), 0.1, strict),
               StepRejected);
  EXPECT_THROW(horizontal_lift(Connection::rigid(), wobble_curve({}), Rotation::identity(), 0.0), std::invalid_argument);
}

TEST(HorizontalLift, ConstraintIdentities) {
  const BaseCurve curve = wobble_curve({});
  double max_c = 0.0, max_l = 0.0;
  for (const RiemannState& s : lift_trajectory(Connection::irrotational(), curve, Rotation::identity(), 1e-2).samples)
    max_c = std::max(max_c, s.C.norm());
  for (const RiemannState& s : lift_trajectory(Connection::falling_cat(), curve, Rotation::identity(), 1e-2).samples)
    max_l = std::max(max_l, s.L.norm());
  EXPECT_LE(max_c, 1e-10);
  EXPECT_LE(max_l, 1e-10);
}
