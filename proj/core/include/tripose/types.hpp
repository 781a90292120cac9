#pragma once

#include <Eigen/Dense>

namespace tripose {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;

using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

/// Receiver triangle vertices, one per column: P = [p1, p2, p3] in the
/// navigation frame.
using VertexSet = Mat3;

/// Beacon positions, one per row: row j is b_j^T.
using BeaconMatrix = Eigen::Matrix<double, 4, 3>;

/// Centroid position plus body-to-navigation rotation.
struct Pose {
  Vec3 position{Vec3::Zero()};
  Mat3 orientation{Mat3::Identity()};
};

/// Canonical matrix inner product Tr(X^T Y); the metric used throughout.
inline double trace_dot(const Mat3& x, const Mat3& y) {
  return (x.array() * y.array()).sum();
}

}  // namespace tripose
