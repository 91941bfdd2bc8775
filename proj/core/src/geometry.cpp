#include "vibronic/geometry.hpp"

#include <cmath>
#include <limits>

#include "vibronic/errors.hpp"

namespace vibronic {

namespace {

// Unit axis of a collinear arrangement, or zero if the atoms are not collinear.
Eigen::Vector3d collinear_axis(const std::vector<Eigen::Vector3d>& pos) {
  const Eigen::Vector3d axis = (pos[1] - pos[0]).normalized();
  for (const auto& p : pos) {
    const Eigen::Vector3d rel = p - pos[0];
    if (rel.cross(axis).norm() > 1e-9 * std::max(1.0, rel.norm())) return Eigen::Vector3d::Zero();
  }
  return axis;
}

Eigen::Vector3d plane_normal(const std::vector<Eigen::Vector3d>& pos) {
  for (std::size_t i = 2; i < pos.size(); ++i) {
    const Eigen::Vector3d n = (pos[1] - pos[0]).cross(pos[i] - pos[0]);
    if (n.norm() > 1e-9 * (pos[1] - pos[0]).squaredNorm()) return n.normalized();
  }
  // Collinear: any plane containing the axis; pick the one closest to xy.
  const Eigen::Vector3d axis = (pos[1] - pos[0]).normalized();
  Eigen::Vector3d trial = Eigen::Vector3d::UnitZ();
  if (std::abs(axis.dot(trial)) > 0.9) trial = Eigen::Vector3d::UnitX();
  return (trial - axis.dot(trial) * axis).normalized();
}

}  // namespace

Geometry::Geometry(std::vector<Eigen::Vector3d> positions, MotionPolicy motion, Preset preset)
    : positions_(std::move(positions)), motion_(motion), preset_(preset) {
  if (positions_.empty()) throw GeometryError("geometry needs at least one atom");
  if (positions_.size() > 1 && !(min_distance() > 0.0)) {
    throw GeometryError("coincident atoms in geometry");
  }
  if (motion_ != MotionPolicy::Full && positions_.size() < 2) {
    throw GeometryError("restricted motion needs at least two atoms");
  }
  if (motion_ == MotionPolicy::Axial && collinear_axis(positions_).isZero()) {
    throw GeometryError("axial motion requires collinear atoms");
  }
  if (motion_ == MotionPolicy::Planar) {
    const Eigen::Vector3d n = plane_normal(positions_);
    for (const auto& p : positions_) {
      if (std::abs((p - positions_[0]).dot(n)) > 1e-9 * std::max(1.0, (p - positions_[0]).norm())) {
        throw GeometryError("planar motion requires coplanar atoms");
      }
    }
  }
}

Geometry Geometry::dumbbell(double d) {
  return Geometry({Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(d, 0, 0)}, MotionPolicy::Axial,
                  Preset::Dumbbell);
}

Geometry Geometry::triangle(double d) {
  return Geometry({Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(d, 0, 0),
                   Eigen::Vector3d(0.5 * d, 0.5 * std::sqrt(3.0) * d, 0)},
                  MotionPolicy::Planar, Preset::Triangle);
}

Geometry Geometry::tetrahedron(double d) {
  const double s = d / (2.0 * std::sqrt(2.0));
  return Geometry({Eigen::Vector3d(s, s, s), Eigen::Vector3d(s, -s, -s), Eigen::Vector3d(-s, s, -s),
                   Eigen::Vector3d(-s, -s, s)},
                  MotionPolicy::Full, Preset::Tetrahedron);
}

Geometry Geometry::preset(Preset which, double d) {
  switch (which) {
    case Preset::Dumbbell: return dumbbell(d);
    case Preset::Triangle: return triangle(d);
    case Preset::Tetrahedron: return tetrahedron(d);
    case Preset::Custom: break;
  }
  throw GeometryError("custom geometry has no preset constructor");
}

Geometry Geometry::with_motion(MotionPolicy motion) const {
  return Geometry(positions_, motion, preset_);
}

double Geometry::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < size(); ++k)
    for (int l = 0; l < k; ++l) best = std::min(best, distance(k, l));
  return best;
}

Eigen::MatrixXd Geometry::allowed_displacements() const {
  const int n = size();
  std::vector<Eigen::Vector3d> dirs;
  switch (motion_) {
    case MotionPolicy::Full:
      dirs = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
      break;
    case MotionPolicy::Axial:
      dirs = {collinear_axis(positions_)};
      break;
    case MotionPolicy::Planar: {
      const Eigen::Vector3d normal = plane_normal(positions_);
      Eigen::Vector3d e1 = (positions_[1] - positions_[0]);
      e1 = (e1 - e1.dot(normal) * normal).normalized();
      dirs = {e1, normal.cross(e1).normalized()};
      break;
    }
  }
  const int per_atom = static_cast<int>(dirs.size());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3 * n, per_atom * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < per_atom; ++j) basis.block<3, 1>(3 * k, per_atom * k + j) = dirs[j];
  return basis;
}

Eigen::MatrixXd Geometry::motion_projector() const {
  const Eigen::MatrixXd b = allowed_displacements();
  return b * b.transpose();
}

Preset parse_preset(const std::string& name) {
  if (name == "dumbbell") return Preset::Dumbbell;
  if (name == "triangle") return Preset::Triangle;
  if (name == "tetrahedron") return Preset::Tetrahedron;
  if (name == "custom") return Preset::Custom;
  throw std::invalid_argument("unknown geometry preset '" + name + "'");
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Dumbbell: return "dumbbell";
    case Preset::Triangle: return "triangle";
    case Preset::Tetrahedron: return "tetrahedron";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

MotionPolicy parse_motion(const std::string& name) {
  if (name == "axial") return MotionPolicy::Axial;
  if (name == "planar") return MotionPolicy::Planar;
  if (name == "full") return MotionPolicy::Full;
  throw std::invalid_argument("unknown motion policy '" + name + "'");
}

std::string to_string(MotionPolicy motion) {
  switch (motion) {
    case MotionPolicy::Axial: return "axial";
    case MotionPolicy::Planar: return "planar";
    case MotionPolicy::Full: return "full";
  }
  return "full";
}

MotionPolicy default_motion(Preset preset) {
  switch (preset) {
    case Preset::Dumbbell: return MotionPolicy::Axial;
    case Preset::Triangle: return MotionPolicy::Planar;
    default: return MotionPolicy::Full;
  }
}

}  // namespace vibronic
