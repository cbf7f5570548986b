#include "bsgd/geometry.hpp"

#include <cmath>
#include <numbers>

namespace bsgd {

std::string to_string(ScanMode mode) { return mode == ScanMode::Fan2D ? "fan2d" : "cone3d"; }

ScanMode scan_mode_from_string(const std::string& text) {
  if (text == "fan2d") return ScanMode::Fan2D;
  if (text == "cone3d") return ScanMode::Cone3D;
  throw InvalidGeometry("unknown scan mode '" + text + "' (expected fan2d or cone3d)");
}

std::vector<double> angle_range(double start, double step, double stop) {
  if (step <= 0.0) throw InvalidGeometry("angle step must be positive");
  std::vector<double> out;
  for (Index k = 0;; ++k) {
    const double a = start + static_cast<double>(k) * step;
    if (a > stop + 1e-9) break;
    out.push_back(a);
  }
  return out;
}

Geometry build_geometry(const GeometryParams& params) {
  if (!(params.source_to_center > 0.0))
    throw InvalidGeometry("source_to_center must be positive");
  if (!(params.center_to_detector > 0.0))
    throw InvalidGeometry("center_to_detector must be positive");
  if (params.detector_elements < 1) throw InvalidGeometry("detector_elements must be >= 1");
  if (!(params.detector_pitch > 0.0)) throw InvalidGeometry("detector_pitch must be positive");
  if (params.angles_deg.empty()) throw InvalidGeometry("angle list is empty");
  if (params.volume_side < 1) throw InvalidGeometry("volume_side must be >= 1");
  if (!(params.voxel_size > 0.0)) throw InvalidGeometry("voxel_size must be positive");
  return Geometry(params);
}

Geometry::Geometry(GeometryParams p) : p_(std::move(p)) {
  cos_.reserve(p_.angles_deg.size());
  sin_.reserve(p_.angles_deg.size());
  for (double a : p_.angles_deg) {
    const double rad = a * std::numbers::pi / 180.0;
    cos_.push_back(std::cos(rad));
    sin_.push_back(std::sin(rad));
  }
}

Index Geometry::rays_per_angle() const {
  return p_.mode == ScanMode::Fan2D ? p_.detector_elements
                                    : p_.detector_elements * p_.detector_elements;
}

Index Geometry::voxel_count() const {
  Index c = p_.volume_side * p_.volume_side;
  if (p_.mode == ScanMode::Cone3D) c *= p_.volume_side;
  return c;
}

Eigen::Vector3d Geometry::source_position(Index angle) const {
  return {p_.source_to_center * cos_[angle], p_.source_to_center * sin_[angle], 0.0};
}

Eigen::Vector3d Geometry::detector_center(Index angle) const {
  return {-p_.center_to_detector * cos_[angle], -p_.center_to_detector * sin_[angle], 0.0};
}

Eigen::Vector3d Geometry::detector_u_axis(Index angle) const {
  return {-sin_[angle], cos_[angle], 0.0};
}

double Geometry::element_offset(Index e) const {
  return (static_cast<double>(e) - 0.5 * static_cast<double>(p_.detector_elements - 1)) *
         p_.detector_pitch;
}

Eigen::Vector3d Geometry::detector_point(Index ray) const {
  const Index angle = ray / rays_per_angle();
  const Index local = ray % rays_per_angle();
  Eigen::Vector3d pt = detector_center(angle);
  if (p_.mode == ScanMode::Fan2D) {
    pt += element_offset(local) * detector_u_axis(angle);
  } else {
    const Index row = local / p_.detector_elements;
    const Index col = local % p_.detector_elements;
    pt += element_offset(col) * detector_u_axis(angle) + element_offset(row) * detector_v_axis();
  }
  return pt;
}

bool Geometry::project_to_detector(Index angle, const Eigen::Vector3d& point, double& u,
                                   double& v) const {
  const Eigen::Vector3d s = source_position(angle);
  const Eigen::Vector3d d = detector_center(angle);
  const Eigen::Vector3d normal = (s - d).normalized();
  const double denom = (point - s).dot(normal);
  if (denom >= 0.0) return false;
  const double t = (d - s).dot(normal) / denom;
  if (t <= 1.0) return false;
  const Eigen::Vector3d hit = s + t * (point - s);
  u = (hit - d).dot(detector_u_axis(angle));
  v = (hit - d).dot(detector_v_axis());
  return true;
}

}  // namespace bsgd
