#pragma once

#include "tripose/types.hpp"

namespace tripose {

/// Parameters of the isosceles triangle manifold. All paper scenarios use the
/// equilateral case (apex_cos = cos(pi/3) = 1/2) so both constraint targets
/// reduce to +-d^2/2.
struct ManifoldParams {
  double side{0.2};      // d, meters
  double apex_cos{0.5};  // cos(pi/3)

  /// d^2 cos(pi/3), the right-hand side of both quadratic constraints.
  double constraint_target() const { return side * side * apex_cos; }

  /// Scale-aware membership tolerance (constraints are quadratic in length).
  double membership_tol() const { return 1e-9 * side * side; }
};

/// Skew-symmetric matrix with skew(w) * v = w x v.
Mat3 skew(const Vec3& w);

/// The two constraint residuals:
///   ( <p1-p2, p2-p3> + d^2 cos(pi/3),  <p1-p3, p2-p3> - d^2 cos(pi/3) ).
/// Both vanish exactly on the manifold.
Vec2 constraint_residuals(const VertexSet& vertices, const ManifoldParams& params);

/// Membership test against the scale-aware tolerance.
bool on_manifold(const VertexSet& vertices, const ManifoldParams& params);

/// The symmetric pattern matrix U_alpha^beta used by the tangent-space
/// correction machinery.
Mat3 u_matrix(double alpha, double beta);

/// Gram matrix of {P U_1^0, P U_0^1} under the trace inner product.
/// Positive semidefinite; singular exactly when the triangle degenerates.
Mat2 s_matrix(const VertexSet& vertices);

/// Solution of the correction systems. alpha/beta correct first derivatives,
/// alpha_dot/beta_dot their directional derivatives (zero when not computed).
struct CorrectionCoefficients {
  double alpha{0.0};
  double beta{0.0};
  double alpha_dot{0.0};
  double beta_dot{0.0};
};

/// Solves S [alpha; beta] = [<G, P U_1^0>; <G, P U_0^1>].
/// Throws SingularGeometry when S is singular beyond tolerance.
CorrectionCoefficients solve_correction(const VertexSet& vertices, const Mat3& direction);

/// Orthogonal projection onto the tangent space: Z - P U_alpha^beta.
Mat3 tangent_project(const VertexSet& vertices, const Mat3& ambient);

/// Riemannian gradient from the Euclidean gradient.
Mat3 riemannian_gradient(const VertexSet& vertices, const Mat3& euclidean_grad);

/// Riemannian Hessian applied to a tangent vector xi, given the Euclidean
/// gradient and the Euclidean Hessian already applied to xi.
Mat3 riemannian_hessian(const VertexSet& vertices, const Mat3& xi,
                        const Mat3& euclidean_grad, const Mat3& euclidean_hess_xi);

/// Scaling retraction of the prior localization work: Z = P + step * xi, then
/// gamma recenters the apex over the base bisector and a single scaling about
/// the origin restores the base length. Throws PoleEncountered near the poles
/// of the gamma/lambda formulas; callers fall back to retract_nearest.
VertexSet retract_scaling(const VertexSet& vertices, const Mat3& xi, double step,
                          const ManifoldParams& params);

/// Nearest-style retraction: center the triangle at the origin, scale the base
/// to length d, slide the apex along the base direction until its median is
/// perpendicular to the base, then restore the centroid. Defined for any input
/// with distinct base vertices. Throws DegenerateBase otherwise.
VertexSet retract_nearest(const VertexSet& ambient, const ManifoldParams& params);

/// Solver-facing retraction: scaling retraction with nearest-retraction
/// fallback at poles.
VertexSet retract(const VertexSet& vertices, const Mat3& xi, double step,
                  const ManifoldParams& params);

}  // namespace tripose
