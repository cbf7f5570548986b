#pragma once

#include "bsgd/common.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace bsgd {

enum class ScanMode { Fan2D, Cone3D };

std::string to_string(ScanMode mode);
ScanMode scan_mode_from_string(const std::string& text);

/// Raw scan description as read from a config file.
struct GeometryParams {
  ScanMode mode = ScanMode::Fan2D;
  double source_to_center = 0.0;
  double center_to_detector = 0.0;
  Index detector_elements = 0;  // per axis
  double detector_pitch = 1.0;
  std::vector<double> angles_deg;
  Index volume_side = 0;  // voxels per axis
  double voxel_size = 1.0;
};

/// Angles start, start+step, ... up to and including `stop` (within 1e-9).
std::vector<double> angle_range(double start, double step, double stop);

/// Source on a circle around the volume centre, flat detector opposite it.
/// Rows of the system matrix are ordered angle-major, then detector row
/// (3D only), then detector column. Columns are ordered z-major, then y,
/// then x, with voxel centres symmetric about the origin.
class Geometry {
 public:
  ScanMode mode() const { return p_.mode; }
  int ndim() const { return p_.mode == ScanMode::Fan2D ? 2 : 3; }
  double source_to_center() const { return p_.source_to_center; }
  double center_to_detector() const { return p_.center_to_detector; }
  Index detector_elements() const { return p_.detector_elements; }
  double detector_pitch() const { return p_.detector_pitch; }
  const std::vector<double>& angles_deg() const { return p_.angles_deg; }
  Index angle_count() const { return static_cast<Index>(p_.angles_deg.size()); }
  Index volume_side() const { return p_.volume_side; }
  double voxel_size() const { return p_.voxel_size; }
  const GeometryParams& params() const { return p_; }

  /// Detector readings per projection angle.
  Index rays_per_angle() const;
  /// Row count r of A.
  Index ray_count() const { return rays_per_angle() * angle_count(); }
  /// Column count c of A.
  Index voxel_count() const;

  Index angle_of_ray(Index ray) const { return ray / rays_per_angle(); }

  /// Lower corner of the reconstruction grid along every axis.
  double grid_min() const { return -0.5 * static_cast<double>(p_.volume_side) * p_.voxel_size; }
  double grid_max() const { return -grid_min(); }

  Eigen::Vector3d source_position(Index angle) const;
  Eigen::Vector3d detector_center(Index angle) const;
  /// In-plane detector axis (horizontal) and, in 3D, the vertical axis.
  Eigen::Vector3d detector_u_axis(Index angle) const;
  Eigen::Vector3d detector_v_axis() const { return {0.0, 0.0, 1.0}; }
  /// Offset of element `e` centre from the detector centre along an axis.
  double element_offset(Index e) const;
  /// World position of the detector element hit by `ray`.
  Eigen::Vector3d detector_point(Index ray) const;

  /// Maps a world point to detector-plane coordinates (u, v) by central
  /// projection from the source at `angle`. Returns false when the point is
  /// not strictly between source and detector plane.
  bool project_to_detector(Index angle, const Eigen::Vector3d& point, double& u, double& v) const;

 private:
  friend Geometry build_geometry(const GeometryParams& params);
  explicit Geometry(GeometryParams p);

  GeometryParams p_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Validates and freezes a scan description.
/// Throws InvalidGeometry on non-positive distances, empty angle lists or
/// zero counts.
Geometry build_geometry(const GeometryParams& params);

}  // namespace bsgd
