#include "tripose/localization.hpp"

#include <cmath>

#include "tripose/errors.hpp"

namespace tripose {

TargetMatrix linearize_targets(const BeaconMatrix& beacons, const RangeSet& ranges) {
  const Eigen::Vector4d beacon_sq = beacons.rowwise().squaredNorm();
  TargetMatrix targets;
  for (int i = 0; i < 3; ++i) {
    targets.col(i) =
        0.5 * (beacon_sq - ranges.r.row(i).transpose().cwiseProduct(
                               ranges.r.row(i).transpose()));
  }
  return targets;
}

namespace {

// Residual of receiver i over the active beacons; inactive entries are zeroed
// so they drop out of every sum.
Eigen::Vector4d receiver_residual(const Vec3& p, const BeaconMatrix& beacons,
                                  const TargetMatrix& targets, int receiver,
                                  const std::array<bool, 4>& active) {
  Eigen::Vector4d e = beacons * p - Eigen::Vector4d::Constant(0.5 * p.squaredNorm()) -
                      targets.col(receiver);
  for (int j = 0; j < 4; ++j) {
    if (!active[j]) e(j) = 0.0;
  }
  return e;
}

int active_count(const std::array<bool, 4>& active) {
  int n = 0;
  for (bool a : active) n += a ? 1 : 0;
  return n;
}

}  // namespace

double localization_cost(const VertexSet& vertices, const BeaconMatrix& beacons,
                         const TargetMatrix& targets,
                         const std::array<bool, 4>& active) {
  double f = 0.0;
  for (int i = 0; i < 3; ++i) {
    f += receiver_residual(vertices.col(i), beacons, targets, i, active).squaredNorm();
  }
  return f;
}

Mat3 localization_egrad(const VertexSet& vertices, const BeaconMatrix& beacons,
                        const TargetMatrix& targets,
                        const std::array<bool, 4>& active) {
  Mat3 grad;
  for (int i = 0; i < 3; ++i) {
    const Vec3 p = vertices.col(i);
    const Eigen::Vector4d e = receiver_residual(p, beacons, targets, i, active);
    grad.col(i) = 2.0 * (beacons.transpose() * e - e.sum() * p);
  }
  return grad;
}

Mat3 localization_ehess(const VertexSet& vertices, const BeaconMatrix& beacons,
                        const TargetMatrix& targets, const Mat3& xi,
                        const std::array<bool, 4>& active) {
  Mat3 hess;
  for (int i = 0; i < 3; ++i) {
    const Vec3 p = vertices.col(i);
    const Vec3 v = xi.col(i);
    const Eigen::Vector4d e = receiver_residual(p, beacons, targets, i, active);
    Eigen::Vector4d de = beacons * v - Eigen::Vector4d::Constant(p.dot(v));
    for (int j = 0; j < 4; ++j) {
      if (!active[j]) de(j) = 0.0;
    }
    hess.col(i) =
        2.0 * (beacons.transpose() * de - de.sum() * p - e.sum() * v);
  }
  return hess;
}

namespace {

void check_finite_cost(double f) {
  if (!std::isfinite(f)) {
    throw NonFiniteCost("localization cost is not finite");
  }
}

}  // namespace

SolverReport rsd_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                       const VertexSet& start, const ManifoldParams& params,
                       const SolverOptions& opts) {
  const TargetMatrix targets = linearize_targets(beacons, ranges);
  VertexSet p = start;
  double f = localization_cost(p, beacons, targets, opts.active);
  check_finite_cost(f);
  const double gtol = opts.gtol * std::max(1.0, f);

  SolverReport report;
  Mat3 rgrad = riemannian_gradient(p, localization_egrad(p, beacons, targets, opts.active));
  double gnorm = rgrad.norm();
  int stalled = 0;

  int it = 0;
  for (; it < opts.max_iters && gnorm > gtol; ++it) {
    const Mat3 direction = -rgrad / gnorm;
    const double slope = -gnorm;  // <rgrad, direction>

    double eta = opts.initial_step;
    VertexSet candidate = p;
    double f_candidate = f;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      candidate = retract(p, direction, eta, params);
      f_candidate = localization_cost(candidate, beacons, targets, opts.active);
      check_finite_cost(f_candidate);
      if (f_candidate <= f + opts.armijo_c1 * eta * slope) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;

    // Stagnation at the floating-point floor of the cost evaluation.
    stalled = (f - f_candidate <= 1e-14 * f) ? stalled + 1 : 0;
    p = candidate;
    f = f_candidate;
    rgrad = riemannian_gradient(p, localization_egrad(p, beacons, targets, opts.active));
    gnorm = rgrad.norm();
    if (stalled >= 3) break;
  }

  report.vertices = p;
  report.iterations = it;
  report.final_cost = f;
  report.final_grad_norm = gnorm;
  report.converged = gnorm <= gtol;
  return report;
}

namespace {

// Positive root of ||xi + tau * dir|| = radius.
double boundary_step(const Mat3& xi, const Mat3& dir, double radius) {
  const double a = trace_dot(dir, dir);
  const double b = trace_dot(xi, dir);
  const double c = trace_dot(xi, xi) - radius * radius;
  return (-b + std::sqrt(std::max(b * b - a * c, 0.0))) / a;
}

struct SubproblemResult {
  Mat3 step;
  double model_decrease;
};

// Steihaug truncated CG on the tangent-space model
//   m(xi) = <g, xi> + 0.5 <H xi, xi>,  ||xi|| <= radius.
template <typename HessOp>
SubproblemResult truncated_cg(const Mat3& rgrad, HessOp&& hess, double radius) {
  Mat3 xi = Mat3::Zero();
  Mat3 r = rgrad;
  Mat3 dir = -r;
  const double g0 = rgrad.norm();
  const double tol = g0 * std::min(0.1, std::sqrt(g0));

  double linear = 0.0;     // <g, xi>
  double quadratic = 0.0;  // <H xi, xi>
  auto finish = [&](const Mat3& step, const Mat3& h_step, double tau) {
    // Model terms for xi + tau * step using cached partial sums.
    const Mat3 total = xi + tau * step;
    const double lin = trace_dot(rgrad, total);
    const double quad = quadratic + 2.0 * tau * trace_dot(h_step, xi) +
                        tau * tau * trace_dot(h_step, step);
    return SubproblemResult{total, -(lin + 0.5 * quad)};
  };

  double rr = trace_dot(r, r);
  for (int j = 0; j < 32; ++j) {
    const Mat3 h_dir = hess(dir);
    const double curvature = trace_dot(dir, h_dir);
    if (curvature <= 0.0) {
      return finish(dir, h_dir, boundary_step(xi, dir, radius));
    }
    const double alpha = rr / curvature;
    if ((xi + alpha * dir).norm() >= radius) {
      return finish(dir, h_dir, boundary_step(xi, dir, radius));
    }
    quadratic += 2.0 * alpha * trace_dot(h_dir, xi) + alpha * alpha * curvature;
    xi += alpha * dir;
    r += alpha * h_dir;
    const double rr_next = trace_dot(r, r);
    if (std::sqrt(rr_next) <= tol) break;
    dir = -r + (rr_next / rr) * dir;
    rr = rr_next;
  }
  linear = trace_dot(rgrad, xi);
  return {xi, -(linear + 0.5 * quadratic)};
}

}  // namespace

SolverReport rtr_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                       const VertexSet& start, const ManifoldParams& params,
                       const SolverOptions& opts) {
  const TargetMatrix targets = linearize_targets(beacons, ranges);
  VertexSet p = start;
  double f = localization_cost(p, beacons, targets, opts.active);
  check_finite_cost(f);
  const double gtol = opts.gtol * std::max(1.0, f);

  double radius = opts.trust_init_factor * params.side;
  const double radius_max = opts.trust_max_factor * params.side;

  SolverReport report;
  Mat3 egrad = localization_egrad(p, beacons, targets, opts.active);
  Mat3 rgrad = riemannian_gradient(p, egrad);
  double gnorm = rgrad.norm();

  int outer = 0;
  for (; outer < opts.max_outer && gnorm > gtol; ++outer) {
    auto hess_op = [&](const Mat3& v) {
      return riemannian_hessian(p, v, egrad,
                                localization_ehess(p, beacons, targets, v, opts.active));
    };
    const SubproblemResult sub = truncated_cg(rgrad, hess_op, radius);

    if (!(sub.model_decrease > 0.0)) {
      radius *= 0.5;
      if (radius < 1e-14 * params.side) break;
      continue;
    }

    // Candidates are retracted with the nearest retraction: its deviation
    // from P + xi is governed by the local triangle scale, so the quadratic
    // model stays predictive and steps are rarely rejected. The scaling
    // retraction's deviation grows with the distance from the origin.
    const VertexSet candidate = retract_nearest(p + sub.step, params);
    const double f_candidate = localization_cost(candidate, beacons, targets, opts.active);
    check_finite_cost(f_candidate);
    const double rho = (f - f_candidate) / sub.model_decrease;

    if (rho < 0.25) {
      radius *= 0.5;
      if (radius < 1e-14 * params.side) break;
      continue;
    }
    p = candidate;
    f = f_candidate;
    if (rho > 0.75) {
      radius = std::min(2.0 * radius, radius_max);
    }
    egrad = localization_egrad(p, beacons, targets, opts.active);
    rgrad = riemannian_gradient(p, egrad);
    gnorm = rgrad.norm();
  }

  report.vertices = p;
  report.iterations = outer;
  report.final_cost = f;
  report.final_grad_norm = gnorm;
  report.converged = gnorm <= gtol;
  return report;
}

namespace {

Vec3 gauss_newton_point(const BeaconMatrix& beacons, const Eigen::Vector4d& target,
                        const Vec3& start, const std::array<bool, 4>& active,
                        int max_iters, int* iterations_out) {
  Vec3 p = start;
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::Vector4d e = beacons * p - Eigen::Vector4d::Constant(0.5 * p.squaredNorm()) - target;
    Eigen::Matrix<double, 4, 3> jac = beacons;
    jac.rowwise() -= p.transpose();
    for (int j = 0; j < 4; ++j) {
      if (!active[j]) {
        e(j) = 0.0;
        jac.row(j).setZero();
      }
    }
    const Vec3 g = jac.transpose() * e;
    Mat3 normal = jac.transpose() * jac;
    Vec3 step = normal.ldlt().solve(-g);
    if (!step.allFinite() || (normal * step + g).norm() > 1e-6 * (g.norm() + 1e-30)) {
      // Levenberg damping on singular steps.
      normal += 1e-9 * Mat3::Identity();
      step = normal.ldlt().solve(-g);
      if (!step.allFinite()) {
        throw SingularNormalEquations("Gauss-Newton normal equations are rank deficient");
      }
    }
    p += step;
    if (step.norm() <= 1e-13 * (1.0 + p.norm())) {
      ++it;
      break;
    }
  }
  if (iterations_out) *iterations_out = it;
  return p;
}

}  // namespace

SolverReport gn_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                      const VertexSet& start, const SolverOptions& opts) {
  if (active_count(opts.active) < 3) {
    throw SingularNormalEquations("fewer than 3 active beacons");
  }
  const TargetMatrix targets = linearize_targets(beacons, ranges);
  SolverReport report;
  int worst_iters = 0;
  for (int i = 0; i < 3; ++i) {
    int iters = 0;
    report.vertices.col(i) = gauss_newton_point(beacons, targets.col(i), start.col(i),
                                                opts.active, opts.max_iters, &iters);
    worst_iters = std::max(worst_iters, iters);
  }
  report.iterations = worst_iters;
  report.final_cost = localization_cost(report.vertices, beacons, targets, opts.active);
  report.final_grad_norm =
      localization_egrad(report.vertices, beacons, targets, opts.active).norm();
  report.converged = true;
  return report;
}

Vec3 gn_solve_point(const BeaconMatrix& beacons, const Eigen::Vector4d& point_ranges,
                    const Vec3& start, const std::array<bool, 4>& active) {
  if (active_count(active) < 3) {
    throw SingularNormalEquations("fewer than 3 active beacons");
  }
  const Eigen::Vector4d beacon_sq = beacons.rowwise().squaredNorm();
  const Eigen::Vector4d target =
      0.5 * (beacon_sq - point_ranges.cwiseProduct(point_ranges));
  return gauss_newton_point(beacons, target, start, active, 50, nullptr);
}

Pose centroid_orientation(const VertexSet& vertices) {
  Pose pose;
  pose.position = vertices.rowwise().mean();

  const Vec3 apex_arm = vertices.col(0) - pose.position;
  const double tol = 1e-12 * (1.0 + vertices.norm());
  if (apex_arm.norm() < tol) {
    throw DegenerateTriangle("apex coincides with centroid");
  }
  const Vec3 axis_x = apex_arm.normalized();

  const Vec3 second_arm = vertices.col(1) - pose.position;
  const Vec3 axis_y_raw = second_arm - second_arm.dot(axis_x) * axis_x;
  if (axis_y_raw.norm() < tol) {
    throw DegenerateTriangle("vertices are collinear");
  }
  const Vec3 axis_y = axis_y_raw.normalized();

  pose.orientation.col(0) = axis_x;
  pose.orientation.col(1) = axis_y;
  pose.orientation.col(2) = axis_x.cross(axis_y);
  return pose;
}

Mat3 body_offsets(const ManifoldParams& params) {
  const double d = params.side;
  const double s3 = std::sqrt(3.0);
  Mat3 offsets;
  offsets << s3 * d / 3.0, -s3 * d / 6.0, -s3 * d / 6.0,
             0.0, d / 2.0, -d / 2.0,
             0.0, 0.0, 0.0;
  return offsets;
}

VertexSet vertices_from_pose(const Pose& pose, const ManifoldParams& params) {
  VertexSet out = pose.orientation * body_offsets(params);
  out.colwise() += pose.position;
  return out;
}

}  // namespace tripose
