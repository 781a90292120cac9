#include <doctest.h>

#include "oracles.hpp"
#include "tripose/errors.hpp"
#include "tripose/localization.hpp"
#include "tripose/manifold.hpp"

using namespace tripose;

namespace {

const ManifoldParams kParams{0.2, 0.5};

VertexSet equilateral_at_origin(double d) {
  return vertices_from_pose(Pose{}, ManifoldParams{d, 0.5});
}

}  // namespace

TEST_CASE("skew matches the displayed sign pattern") {
  CHECK(skew(Vec3::Zero()).isZero(0.0));

  Mat3 expected;
  expected << 0, -3, 2,
              3, 0, -1,
              -2, 1, 0;
  CHECK((skew(Vec3(1, 2, 3)) - expected).norm() == doctest::Approx(0.0));

  auto gen = oracles::rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 w = oracles::random_vec3(gen);
    const Vec3 v = oracles::random_vec3(gen);
    const Mat3 s = skew(w);
    CHECK((s + s.transpose()).norm() == doctest::Approx(0.0));
    CHECK((s * v - w.cross(v)).norm() < 1e-14);
  }
}

TEST_CASE("constraint residuals vanish on the canonical triangle") {
  const VertexSet p = equilateral_at_origin(kParams.side);
  const Vec2 res = constraint_residuals(p, kParams);
  CHECK(std::abs(res(0)) < 1e-15);
  CHECK(std::abs(res(1)) < 1e-15);
  CHECK(on_manifold(p, kParams));
}

TEST_CASE("constraint residuals match a scalar-loop evaluation") {
  auto residuals_loops = [](const VertexSet& p, const ManifoldParams& mp) {
    const Vec3 d12 = p.col(0) - p.col(1);
    const Vec3 d13 = p.col(0) - p.col(2);
    const Vec3 d23 = p.col(1) - p.col(2);
    const double target = mp.side * mp.side * mp.apex_cos;
    return Vec2(oracles::dot_loops(d12, d23) + target,
                oracles::dot_loops(d13, d23) - target);
  };

  // Scaling the canonical triangle by 2 scales both inner products by 4.
  const VertexSet p = 2.0 * equilateral_at_origin(kParams.side);
  const Vec2 res = constraint_residuals(p, kParams);
  CHECK(res(0) == doctest::Approx(residuals_loops(p, kParams)(0)));
  CHECK(res(1) == doctest::Approx(residuals_loops(p, kParams)(1)));
  const double t = kParams.constraint_target();
  CHECK(res(0) == doctest::Approx(-4.0 * t + t));
  CHECK(res(1) == doctest::Approx(4.0 * t - t));

  auto gen = oracles::rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const VertexSet z = oracles::random_matrix(gen);
    const Vec2 got = constraint_residuals(z, kParams);
    const Vec2 want = residuals_loops(z, kParams);
    CHECK((got - want).norm() < 1e-14 * (1.0 + want.norm()));
  }
}

TEST_CASE("u_matrix substitution cases") {
  Mat3 u10, u01;
  u10 << 0, 1, -1,
         1, -2, 1,
         -1, 1, 0;
  u01 << 0, 1, -1,
         1, 0, -1,
         -1, -1, 2;
  CHECK((u_matrix(1, 0) - u10).norm() == doctest::Approx(0.0));
  CHECK((u_matrix(0, 1) - u01).norm() == doctest::Approx(0.0));
  CHECK(u_matrix(0, 0).isZero(0.0));
}

TEST_CASE("s_matrix is the Gram matrix of the normal basis") {
  auto gen = oracles::rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const VertexSet p = oracles::random_matrix(gen);
    const Mat2 s = s_matrix(p);
    CHECK(s(0, 1) == doctest::Approx(s(1, 0)));
  }

  const VertexSet p = equilateral_at_origin(kParams.side);
  const Mat2 s = s_matrix(p);
  const Mat3 na = p * u_matrix(1, 0);
  const Mat3 nb = p * u_matrix(0, 1);
  CHECK(s(0, 0) == doctest::Approx(oracles::trace_dot_loops(na, na)));
  CHECK(s(0, 1) == doctest::Approx(oracles::trace_dot_loops(nb, na)));
  CHECK(s(1, 1) == doctest::Approx(oracles::trace_dot_loops(nb, nb)));

  VertexSet collapsed;
  collapsed.col(0) = collapsed.col(1) = collapsed.col(2) = Vec3(1, 2, 3);
  CHECK(s_matrix(collapsed).norm() == doctest::Approx(0.0));
}

TEST_CASE("solve_correction solves the 2x2 Gram system") {
  auto gen = oracles::rng(14);
  const VertexSet p = oracles::random_manifold_point(gen, kParams);

  const CorrectionCoefficients zero = solve_correction(p, Mat3::Zero());
  CHECK(zero.alpha == doctest::Approx(0.0));
  CHECK(zero.beta == doctest::Approx(0.0));

  const CorrectionCoefficients unit = solve_correction(p, p * u_matrix(1, 0));
  CHECK(unit.alpha == doctest::Approx(1.0));
  CHECK(unit.beta == doctest::Approx(0.0).epsilon(1e-9));

  for (int trial = 0; trial < 100; ++trial) {
    const VertexSet q = oracles::random_manifold_point(gen, kParams);
    const Mat3 g = oracles::random_matrix(gen);
    const CorrectionCoefficients c = solve_correction(q, g);
    const Mat2 s = s_matrix(q);
    const Vec2 rhs(trace_dot(g, q * u_matrix(1, 0)), trace_dot(g, q * u_matrix(0, 1)));
    const Vec2 residual = s * Vec2(c.alpha, c.beta) - rhs;
    CHECK(residual.norm() < 1e-12 * (1.0 + rhs.norm()));
  }

  VertexSet collapsed;
  collapsed.col(0) = collapsed.col(1) = collapsed.col(2) = Vec3(1, 2, 3);
  CHECK_THROWS_AS(solve_correction(collapsed, Mat3::Identity()), SingularGeometry);
}

TEST_CASE("tangent projection is idempotent and annihilates the normal space") {
  auto gen = oracles::rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const VertexSet p = oracles::random_manifold_point(gen, kParams);
    const Mat3 z = oracles::random_matrix(gen);
    const Mat3 projected = tangent_project(p, z);
    const Mat3 twice = tangent_project(p, projected);
    CHECK((twice - projected).norm() < 1e-10 * (1.0 + projected.norm()));
    CHECK(std::abs(trace_dot(projected, p * u_matrix(1, 0))) <
          1e-10 * (1.0 + z.norm() * p.norm()));
    CHECK(std::abs(trace_dot(projected, p * u_matrix(0, 1))) <
          1e-10 * (1.0 + z.norm() * p.norm()));
  }

  // A pure normal-space element projects to zero.
  const VertexSet p = oracles::random_manifold_point(gen, kParams);
  const Mat3 normal = p * u_matrix(1, 0);
  CHECK(tangent_project(p, normal).norm() < 1e-10 * normal.norm());
}

TEST_CASE("riemannian gradient is tangent and matches retracted finite differences") {
  auto gen = oracles::rng(16);
  CHECK(riemannian_gradient(equilateral_at_origin(kParams.side), Mat3::Zero()).norm() ==
        doctest::Approx(0.0));

  // Stationarity at the global optimum of the noiseless problem.
  BeaconMatrix beacons;
  beacons << 0.1, 0.1, 3.0,
             9.9, 0.1, 2.6,
             9.9, 4.9, 3.0,
             0.1, 4.9, 2.6;
  Pose pose;
  pose.position = Vec3(4.0, 2.0, 1.2);
  pose.orientation = oracles::random_rotation(gen);
  const VertexSet truth = vertices_from_pose(pose, kParams);
  RangeSet ranges;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      ranges.r(i, j) = (truth.col(i) - beacons.row(j).transpose()).norm();
    }
  }
  const TargetMatrix targets = linearize_targets(beacons, ranges);
  const Mat3 rgrad_at_truth =
      riemannian_gradient(truth, localization_egrad(truth, beacons, targets));
  CHECK(rgrad_at_truth.norm() < 1e-8);

  // Directional derivative along the retracted curve.
  for (int trial = 0; trial < 30; ++trial) {
    const VertexSet p = oracles::random_manifold_point(gen, kParams, 2.0);
    const Mat3 xi = oracles::random_tangent(gen, p, 1.0);
    const Mat3 rgrad =
        riemannian_gradient(p, localization_egrad(p, beacons, targets));
    const double analytic = trace_dot(rgrad, xi);
    const double t = 1e-5;
    const double fd =
        (localization_cost(retract_nearest(p + t * xi, kParams), beacons, targets) -
         localization_cost(retract_nearest(p - t * xi, kParams), beacons, targets)) /
        (2.0 * t);
    CHECK(std::abs(fd - analytic) < 1e-5 * (1.0 + std::abs(analytic)));

    CHECK((tangent_project(p, rgrad) - rgrad).norm() < 1e-10 * (1.0 + rgrad.norm()));
  }
}

TEST_CASE("riemannian hessian is linear, self-adjoint, and consistent with the gradient") {
  auto gen = oracles::rng(17);
  BeaconMatrix beacons;
  beacons << 0.1, 0.1, 3.0,
             9.9, 0.1, 2.6,
             9.9, 4.9, 3.0,
             0.1, 4.9, 2.6;
  Pose pose;
  pose.position = Vec3(5.0, 2.5, 1.0);
  pose.orientation = oracles::random_rotation(gen);
  const VertexSet truth = vertices_from_pose(pose, kParams);
  RangeSet ranges;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      ranges.r(i, j) = (truth.col(i) - beacons.row(j).transpose()).norm();
    }
  }
  const TargetMatrix targets = linearize_targets(beacons, ranges);

  auto hess = [&](const VertexSet& p, const Mat3& v) {
    return riemannian_hessian(p, v, localization_egrad(p, beacons, targets),
                              localization_ehess(p, beacons, targets, v));
  };

  const VertexSet p = truth;
  CHECK(hess(p, Mat3::Zero()).norm() == doctest::Approx(0.0));

  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 xi = oracles::random_tangent(gen, p, 1.0);
    const Mat3 eta = oracles::random_tangent(gen, p, 1.0);
    const double lhs = trace_dot(hess(p, xi), eta);
    const double rhs = trace_dot(hess(p, eta), xi);
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
  }

  // Finite difference of the Riemannian gradient along a retraction, near
  // the optimum where transport terms are negligible. The nearest retraction
  // is used for the curve: it has no poles, so the difference quotient stays
  // well conditioned for every direction.
  for (int trial = 0; trial < 20; ++trial) {
    const Mat3 xi = oracles::random_tangent(gen, p, 1.0);
    const double t = 1e-5;
    auto rgrad_at = [&](double step) {
      const VertexSet q = retract_nearest(p + step * xi, kParams);
      return riemannian_gradient(q, localization_egrad(q, beacons, targets));
    };
    const Mat3 fd = (rgrad_at(t) - rgrad_at(-t)) / (2.0 * t);
    const Mat3 analytic = hess(p, xi);
    CHECK((tangent_project(p, fd) - analytic).norm() <
          1e-4 * (1.0 + analytic.norm()));
  }
}

TEST_CASE("scaling retraction lands on the manifold and fixes the base length") {
  auto gen = oracles::rng(18);
  // Identity at zero step needs a point away from the origin: an
  // origin-centered triangle is a genuine pole of the gamma formula.
  const VertexSet p = oracles::random_manifold_point(gen, kParams);
  CHECK((retract_scaling(p, Mat3::Zero(), 0.0, kParams) - p).norm() < 1e-12);

  for (int trial = 0; trial < 500; ++trial) {
    const VertexSet q = oracles::random_manifold_point(gen, kParams);
    const Mat3 xi = oracles::random_tangent(gen, q, 0.02);
    const VertexSet out = retract_scaling(q, xi, 1.0, kParams);
    CHECK(constraint_residuals(out, kParams).cwiseAbs().maxCoeff() <
          1e-9 * kParams.side * kParams.side);
    CHECK(std::abs((out.col(1) - out.col(2)).norm() - kParams.side) < 1e-9);
  }
}

TEST_CASE("scaling retraction poles raise and the wrapper falls back") {
  // z1 orthogonal to the base direction makes gamma's denominator vanish.
  VertexSet z;
  z.col(0) = Vec3(0, 0, 1);
  z.col(1) = Vec3(1, 0, 0);
  z.col(2) = Vec3(-1, 0, 0);
  CHECK_THROWS_AS(retract_scaling(z, Mat3::Zero(), 0.0, kParams), PoleEncountered);

  const VertexSet fallback = retract(z, Mat3::Zero(), 0.0, kParams);
  CHECK(on_manifold(fallback, kParams));
}

TEST_CASE("nearest retraction: fixed point, scaling, and oracle equivalence") {
  auto gen = oracles::rng(19);
  const VertexSet p = oracles::random_manifold_point(gen, kParams);
  CHECK((retract_nearest(p, kParams) - p).norm() < 1e-12);

  // Uniform scaling about the centroid is undone exactly.
  const Vec3 centroid = p.rowwise().mean();
  VertexSet doubled = p;
  for (int i = 0; i < 3; ++i) {
    doubled.col(i) = centroid + 2.0 * (p.col(i) - centroid);
  }
  const VertexSet rescaled = retract_nearest(doubled, kParams);
  CHECK(constraint_residuals(rescaled, kParams).cwiseAbs().maxCoeff() <
        1e-9 * kParams.side * kParams.side);
  CHECK(std::abs((rescaled.col(1) - rescaled.col(2)).norm() - kParams.side) < 1e-9);

  for (int trial = 0; trial < 1000; ++trial) {
    const VertexSet q = oracles::random_manifold_point(gen, kParams);
    const VertexSet z = q + oracles::random_matrix(gen, 0.05);
    const VertexSet closed_form = retract_nearest(z, kParams);
    const Mat3 geometric = oracles::four_step_retraction(z, kParams.side);
    CHECK((closed_form - geometric).norm() < 1e-12 * (1.0 + geometric.norm()));
  }

  VertexSet degenerate;
  degenerate.col(0) = Vec3(1, 1, 1);
  degenerate.col(1) = Vec3(0, 0, 0);
  degenerate.col(2) = Vec3(0, 0, 0);
  CHECK_THROWS_AS(retract_nearest(degenerate, kParams), DegenerateBase);
}

TEST_CASE("nearest retraction preserves the base direction and triangle plane") {
  auto gen = oracles::rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    const VertexSet q = oracles::random_manifold_point(gen, kParams);
    const VertexSet z = q + oracles::random_matrix(gen, 0.05);
    const VertexSet out = retract_nearest(z, kParams);
    const Vec3 base_in = z.col(1) - z.col(2);
    const Vec3 base_out = out.col(1) - out.col(2);
    CHECK(base_out.cross(base_in).norm() < 1e-12 * base_in.norm());

    // The output stays in the plane spanned by the centered input triangle.
    const Vec3 normal = (z.col(0) - z.col(1)).cross(z.col(2) - z.col(1)).normalized();
    const Vec3 zc = z.rowwise().mean();
    for (int i = 0; i < 3; ++i) {
      const double in_plane_before = std::abs(normal.dot(z.col(i) - zc));
      const double in_plane_after = std::abs(normal.dot(out.col(i) - zc));
      CHECK(in_plane_after < in_plane_before + 1e-12);
    }
  }
}

TEST_CASE("both retractions are first order: error shrinks like t^2") {
  auto gen = oracles::rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const VertexSet p = oracles::random_manifold_point(gen, kParams);
    const Mat3 xi = oracles::random_tangent(gen, p, 1.0);
    auto ratio = [&](auto&& retraction) {
      const double e2 = (retraction(1e-2) - (p + 1e-2 * xi)).norm();
      const double e3 = (retraction(1e-3) - (p + 1e-3 * xi)).norm();
      return e2 / e3;
    };
    const double r_scaling =
        ratio([&](double t) { return retract_scaling(p, xi, t, kParams); });
    const double r_nearest =
        ratio([&](double t) { return retract_nearest(p + Mat3(1.0 * t * xi), kParams); });
    CHECK(r_scaling > 50.0);
    CHECK(r_scaling < 200.0);
    CHECK(r_nearest > 50.0);
    CHECK(r_nearest < 200.0);
  }
}

TEST_CASE("membership holds over random perturbed triangles for both retractions") {
  auto gen = oracles::rng(22);
  const double tol = 1e-9 * kParams.side * kParams.side;
  int poles = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Mat3 z = oracles::random_matrix(gen, kParams.side);
    const VertexSet nearest = retract_nearest(z, kParams);
    CHECK(constraint_residuals(nearest, kParams).cwiseAbs().maxCoeff() < tol);
    try {
      const VertexSet scaled = retract_scaling(z, Mat3::Zero(), 0.0, kParams);
      CHECK(constraint_residuals(scaled, kParams).cwiseAbs().maxCoeff() < tol);
    } catch (const PoleEncountered&) {
      ++poles;
    }
  }
  CHECK(poles < 200);  // poles are rare for Gaussian inputs
}
