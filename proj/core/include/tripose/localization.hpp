#pragma once

#include <array>

#include "tripose/manifold.hpp"
#include "tripose/types.hpp"

namespace tripose {

/// Receiver-to-beacon distances, r(i, j) = distance from receiver i to
/// beacon j, with per-beacon line-of-sight flags (the scenario oracle's
/// truth; solvers never infer them).
struct RangeSet {
  Eigen::Matrix<double, 3, 4> r{Eigen::Matrix<double, 3, 4>::Zero()};
  std::array<bool, 4> los{true, true, true, true};
};

/// Linearized targets, column i is y_i = (b^2 - r_i^2) / 2.
using TargetMatrix = Eigen::Matrix<double, 4, 3>;

TargetMatrix linearize_targets(const BeaconMatrix& beacons, const RangeSet& ranges);

/// Squared-residual cost sum_i ||B p_i - 0.5 ||p_i||^2 1 - y_i||^2 restricted
/// to the active beacons.
double localization_cost(const VertexSet& vertices, const BeaconMatrix& beacons,
                         const TargetMatrix& targets,
                         const std::array<bool, 4>& active = {true, true, true, true});

/// Euclidean gradient of the cost, column i is 2 (B^T e_i - (1^T e_i) p_i).
Mat3 localization_egrad(const VertexSet& vertices, const BeaconMatrix& beacons,
                        const TargetMatrix& targets,
                        const std::array<bool, 4>& active = {true, true, true, true});

/// Euclidean Hessian applied to xi (columnwise directional derivative of the
/// gradient).
Mat3 localization_ehess(const VertexSet& vertices, const BeaconMatrix& beacons,
                        const TargetMatrix& targets, const Mat3& xi,
                        const std::array<bool, 4>& active = {true, true, true, true});

struct SolverOptions {
  double gtol{1e-8};    // gradient norm tolerance, scaled by max(1, f0)
  int max_iters{600};   // RSD iteration budget; steep-descent tails need the room
                        // when the array sits close to the beacon plane
  int max_outer{50};    // RTR outer iteration budget
  double armijo_c1{1e-4};
  double wolfe_c2{0.9};  // recorded; halving backtracking enforces Armijo only
  double initial_step{1.0};
  double trust_init_factor{1.0};  // Delta0 = factor * d
  double trust_max_factor{10.0};  // Delta_max = factor * d
  std::array<bool, 4> active{true, true, true, true};  // beacons in the solve
};

struct SolverReport {
  VertexSet vertices{VertexSet::Zero()};
  int iterations{0};
  double final_cost{0.0};
  double final_grad_norm{0.0};
  bool converged{false};
};

/// Riemannian steepest descent with normalized direction and backtracking.
SolverReport rsd_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                       const VertexSet& start, const ManifoldParams& params,
                       const SolverOptions& opts = {});

/// Riemannian trust region with a Steihaug truncated-CG subproblem solver.
SolverReport rtr_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                       const VertexSet& start, const ManifoldParams& params,
                       const SolverOptions& opts = {});

/// Unconstrained per-receiver Gauss-Newton benchmark; its output ignores the
/// triangle constraints entirely.
SolverReport gn_solve(const BeaconMatrix& beacons, const RangeSet& ranges,
                      const VertexSet& start, const SolverOptions& opts = {});

/// Single-point Gauss-Newton for one receiver's ranges (used by the
/// single-receiver baseline).
Vec3 gn_solve_point(const BeaconMatrix& beacons, const Eigen::Vector4d& point_ranges,
                    const Vec3& start,
                    const std::array<bool, 4>& active = {true, true, true, true});

/// Centroid plus Gram-Schmidt body axes from the vertex positions.
Pose centroid_orientation(const VertexSet& vertices);

/// Vertex positions from a pose: P = [pc pc pc] + C D, with D the canonical
/// body-frame offsets (apex on the body x axis, base parallel to y).
VertexSet vertices_from_pose(const Pose& pose, const ManifoldParams& params);

/// Columns of the canonical offset matrix D.
Mat3 body_offsets(const ManifoldParams& params);

}  // namespace tripose
