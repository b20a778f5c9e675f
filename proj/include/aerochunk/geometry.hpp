#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <utility>

namespace aerochunk {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2 = Vector2<double>;
using Vec3 = Vector3<double>;

// Vertex table (one row per vertex) and face table (one row per CCW triangle).
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Distance below which a vertex is classified as lying on a plane (meters).
inline constexpr double kPlaneSnapTolerance = 1e-7;

/// Oriented cutting plane. The positive half-space is the one the normal points into.
struct CutPlane {
  Vec3 normal = Vec3::UnitZ();
  Vec3 point = Vec3::Zero();

  double signed_distance(const Vec3& q) const { return normal.dot(q - point); }
  double offset() const { return normal.dot(point); }
};

/// Angle between a direction and +z, in radians.
template <typename Derived>
typename Derived::Scalar angle_from_z(const Eigen::MatrixBase<Derived>& n) {
  using std::acos;
  using std::clamp;
  using Scalar = typename Derived::Scalar;
  const Scalar c = n.normalized().z();
  return acos(std::clamp(c, Scalar(-1), Scalar(1)));
}

/// Divergence-theorem signed volume of a closed triangle soup.
template <typename DerivedV, typename DerivedF>
typename DerivedV::Scalar signed_volume(const Eigen::MatrixBase<DerivedV>& V,
                                        const Eigen::MatrixBase<DerivedF>& F) {
  using Scalar = typename DerivedV::Scalar;
  Scalar sum(0);
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vector3<Scalar> a = V.row(F(f, 0)).transpose();
    const Vector3<Scalar> b = V.row(F(f, 1)).transpose();
    const Vector3<Scalar> c = V.row(F(f, 2)).transpose();
    sum += a.dot(b.cross(c));
  }
  return sum / Scalar(6);
}

/// Min and max of the vertex projections onto `n`.
template <typename DerivedV, typename DerivedN>
std::pair<typename DerivedV::Scalar, typename DerivedV::Scalar> projection_interval(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedN>& n) {
  const auto proj = (V * n).eval();
  return {proj.minCoeff(), proj.maxCoeff()};
}

/// Orthonormal basis (u, v) of the plane orthogonal to `n` with u x v = n.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = helper.cross(n).normalized();
  return {u, n.cross(u)};
}

}  // namespace aerochunk
