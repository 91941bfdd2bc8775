#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vibronic {

enum class Preset { Dumbbell, Triangle, Tetrahedron, Custom };

/// Which displacement directions an atom may explore.
///  - Axial: along the dumbbell axis only.
///  - Planar: inside the plane of the array.
///  - Full: all three Cartesian directions.
enum class MotionPolicy { Axial, Planar, Full };

/// Equilibrium tweezer positions plus the motion policy used for vibrations.
class Geometry {
 public:
  Geometry(std::vector<Eigen::Vector3d> positions, MotionPolicy motion = MotionPolicy::Full,
           Preset preset = Preset::Custom);

  static Geometry dumbbell(double d);
  static Geometry triangle(double d);
  static Geometry tetrahedron(double d);
  static Geometry preset(Preset which, double d);

  /// Same positions, full 3D motion for every atom.
  Geometry with_motion(MotionPolicy motion) const;

  int size() const noexcept { return static_cast<int>(positions_.size()); }
  const std::vector<Eigen::Vector3d>& positions() const noexcept { return positions_; }
  const Eigen::Vector3d& position(int k) const { return positions_.at(k); }
  Preset preset_kind() const noexcept { return preset_; }
  MotionPolicy motion() const noexcept { return motion_; }

  double distance(int k, int l) const { return (positions_.at(k) - positions_.at(l)).norm(); }
  double min_distance() const;

  /// Orthonormal basis (3N x m) of the allowed displacement subspace.
  Eigen::MatrixXd allowed_displacements() const;
  /// Orthogonal projector (3N x 3N) onto the allowed displacement subspace.
  Eigen::MatrixXd motion_projector() const;

 private:
  std::vector<Eigen::Vector3d> positions_;
  MotionPolicy motion_;
  Preset preset_;
};

Preset parse_preset(const std::string& name);
std::string to_string(Preset preset);
MotionPolicy parse_motion(const std::string& name);
std::string to_string(MotionPolicy motion);

/// Motion policy that reproduces the textbook Hamiltonians for each preset.
MotionPolicy default_motion(Preset preset);

}  // namespace vibronic
