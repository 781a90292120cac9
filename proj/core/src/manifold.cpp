#include "tripose/manifold.hpp"

#include <cmath>

#include "tripose/errors.hpp"

namespace tripose {

namespace {

// Normal-space spanning directions at P.
Mat3 normal_basis_a(const VertexSet& p) { return p * u_matrix(1.0, 0.0); }
Mat3 normal_basis_b(const VertexSet& p) { return p * u_matrix(0.0, 1.0); }

}  // namespace

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return s;
}

Vec2 constraint_residuals(const VertexSet& vertices, const ManifoldParams& params) {
  const Vec3 p1 = vertices.col(0);
  const Vec3 p2 = vertices.col(1);
  const Vec3 p3 = vertices.col(2);
  const double target = params.constraint_target();
  return {(p1 - p2).dot(p2 - p3) + target, (p1 - p3).dot(p2 - p3) - target};
}

bool on_manifold(const VertexSet& vertices, const ManifoldParams& params) {
  return constraint_residuals(vertices, params).cwiseAbs().maxCoeff() <=
         params.membership_tol();
}

Mat3 u_matrix(double alpha, double beta) {
  Mat3 u;
  u << 0.0, alpha + beta, -alpha - beta,
       alpha + beta, -2.0 * alpha, alpha - beta,
       -alpha - beta, alpha - beta, 2.0 * beta;
  return u;
}

Mat2 s_matrix(const VertexSet& vertices) {
  const Mat3 na = normal_basis_a(vertices);
  const Mat3 nb = normal_basis_b(vertices);
  Mat2 s;
  s << trace_dot(na, na), trace_dot(nb, na),
       trace_dot(na, nb), trace_dot(nb, nb);
  return s;
}

namespace {

Vec2 solve_correction_system(const Mat2& s, const Vec2& rhs) {
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  // S is a Gram matrix, so det >= 0 with equality iff the basis degenerates.
  const double scale = s(0, 0) * s(1, 1);
  if (!(det > 1e-13 * scale) || scale == 0.0) {
    throw SingularGeometry("correction system singular (degenerate triangle)");
  }
  return {(s(1, 1) * rhs(0) - s(0, 1) * rhs(1)) / det,
          (s(0, 0) * rhs(1) - s(1, 0) * rhs(0)) / det};
}

}  // namespace

CorrectionCoefficients solve_correction(const VertexSet& vertices, const Mat3& direction) {
  const Mat2 s = s_matrix(vertices);
  const Vec2 rhs{trace_dot(direction, normal_basis_a(vertices)),
                 trace_dot(direction, normal_basis_b(vertices))};
  const Vec2 ab = solve_correction_system(s, rhs);
  return {ab(0), ab(1), 0.0, 0.0};
}

Mat3 tangent_project(const VertexSet& vertices, const Mat3& ambient) {
  const CorrectionCoefficients c = solve_correction(vertices, ambient);
  return ambient - vertices * u_matrix(c.alpha, c.beta);
}

Mat3 riemannian_gradient(const VertexSet& vertices, const Mat3& euclidean_grad) {
  return tangent_project(vertices, euclidean_grad);
}

Mat3 riemannian_hessian(const VertexSet& vertices, const Mat3& xi,
                        const Mat3& euclidean_grad, const Mat3& euclidean_hess_xi) {
  const Mat3 na = normal_basis_a(vertices);
  const Mat3 nb = normal_basis_b(vertices);
  const Mat3 xa = xi * u_matrix(1.0, 0.0);
  const Mat3 xb = xi * u_matrix(0.0, 1.0);

  const Mat2 s = s_matrix(vertices);
  const Vec2 ab = solve_correction_system(
      s, {trace_dot(euclidean_grad, na), trace_dot(euclidean_grad, nb)});

  // Directional derivative of S along xi.
  Mat2 s_dot;
  s_dot << 2.0 * trace_dot(xa, na), trace_dot(xb, na) + trace_dot(nb, xa),
           trace_dot(xa, nb) + trace_dot(na, xb), 2.0 * trace_dot(xb, nb);

  const Vec2 rhs{trace_dot(euclidean_hess_xi, na) + trace_dot(euclidean_grad, xa),
                 trace_dot(euclidean_hess_xi, nb) + trace_dot(euclidean_grad, xb)};
  const Vec2 ab_dot = solve_correction_system(s, rhs - s_dot * ab);

  const Mat3 corrected = euclidean_hess_xi - xi * u_matrix(ab(0), ab(1)) -
                         vertices * u_matrix(ab_dot(0), ab_dot(1));
  return tangent_project(vertices, corrected);
}

VertexSet retract_scaling(const VertexSet& vertices, const Mat3& xi, double step,
                          const ManifoldParams& params) {
  const VertexSet z = vertices + step * xi;
  const Vec3 z1 = z.col(0);
  const Vec3 z2 = z.col(1);
  const Vec3 z3 = z.col(2);
  const Vec3 base = z2 - z3;

  const double gamma_denom = 2.0 * z1.dot(base);
  const double pole_tol = 1e-12 * (1.0 + z1.norm() * base.norm());
  if (std::abs(gamma_denom) < pole_tol) {
    throw PoleEncountered("apex nearly orthogonal to base direction");
  }
  const double gamma = (z2 + z3).dot(base) / gamma_denom;

  const Vec3 u1 = gamma * z1;
  const double radicand_denom = (u1 - z3).dot(base);
  if (!(radicand_denom > pole_tol)) {
    throw PoleEncountered("non-positive scaling radicand");
  }
  const double lambda = std::sqrt(params.constraint_target() / radicand_denom);

  VertexSet out;
  out.col(0) = lambda * u1;
  out.col(1) = lambda * z2;
  out.col(2) = lambda * z3;
  return out;
}

VertexSet retract_nearest(const VertexSet& ambient, const ManifoldParams& params) {
  const Vec3 z1 = ambient.col(0);
  const Vec3 z2 = ambient.col(1);
  const Vec3 z3 = ambient.col(2);

  const Vec3 base = z3 - z2;
  const double base_len = base.norm();
  if (base_len < 1e-9 * params.side) {
    throw DegenerateBase("base vertices coincide");
  }

  // Both constraints pin the base length to sqrt(2 d^2 cos(pi/3)); that is d
  // itself in the equilateral case.
  const double base_target = std::sqrt(2.0 * params.constraint_target());
  const Vec3 centroid = (z1 + z2 + z3) / 3.0;
  const double lambda = base_target / base_len;
  // Base-parallel component of the scaled median; subtracting it puts the
  // apex on the perpendicular bisector of the base.
  const double gamma =
      lambda * lambda * (z1 - 0.5 * (z2 + z3)).dot(base / base_target);

  VertexSet out;
  out.col(0) =
      lambda * (z1 - centroid) - (gamma / base_target) * lambda * base + centroid;
  out.col(1) = lambda * (z2 - centroid) + centroid;
  out.col(2) = lambda * (z3 - centroid) + centroid;
  return out;
}

VertexSet retract(const VertexSet& vertices, const Mat3& xi, double step,
                  const ManifoldParams& params) {
  try {
    return retract_scaling(vertices, xi, step, params);
  } catch (const PoleEncountered&) {
    return retract_nearest(vertices + step * xi, params);
  }
}

}  // namespace tripose
