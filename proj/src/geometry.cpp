#include "lcfuse/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lcfuse {

namespace {

constexpr double kDegenerateEps = 1e-12;

double round_half_up(double x) { return std::floor(x + 0.5); }

}  // namespace

double camera_longitude(const LidarPoint& p, const RigExtrinsics& rig) {
  const double ground = p.range * std::cos(p.latitude);
  const double frontal = ground * std::cos(p.longitude) - rig.frontal_offset;
  const double lateral = ground * std::sin(p.longitude) + rig.lateral_offset;
  if (std::abs(frontal) < kDegenerateEps && std::abs(lateral) < kDegenerateEps)
    throw DegenerateGeometry(
        "camera_longitude: return projects onto the camera axis origin");
  return std::atan2(lateral, frontal);
}

double camera_latitude(const LidarPoint& p, const RigExtrinsics& rig,
                       double longitude) {
  const double ground = p.range * std::cos(p.latitude);
  const double frontal = ground * std::cos(p.longitude) - rig.frontal_offset;
  const double lateral = ground * std::sin(p.longitude) + rig.lateral_offset;
  if (std::abs(frontal) < kDegenerateEps && std::abs(lateral) < kDegenerateEps)
    throw DegenerateGeometry(
        "camera_latitude: return projects onto the camera axis origin");
  const double drop = (rig.cam_height - rig.lidar_height) +
                      p.range * std::sin(p.latitude);
  // Horizontal camera range = (frontal, lateral) projected on the longitude
  // direction; equals frontal/cos(gamma_C) without the cos-sign hazard
  // behind the camera, so atan2 stays within [-pi/2, pi/2].
  const double horiz = frontal * std::cos(longitude) + lateral * std::sin(longitude);
  return std::atan2(drop, horiz);
}

CameraDirection align_point(const LidarPoint& p, const RigExtrinsics& rig) {
  CameraDirection dir;
  dir.longitude = camera_longitude(p, rig);
  dir.latitude = camera_latitude(p, rig, dir.longitude);
  return dir;
}

PixelCoord direction_to_pixel(const CameraDirection& dir, int width, int height) {
  const double u = (dir.longitude / (2.0 * kPi) + 0.5) * (width - 1);
  const double v = (0.5 + dir.latitude / kPi) * (height - 1);
  PixelCoord px;
  px.col = static_cast<int>(round_half_up(u));
  px.row = static_cast<int>(round_half_up(v));
  px.col = std::clamp(px.col, 0, width - 1);
  px.row = std::clamp(px.row, 0, height - 1);
  return px;
}

CameraDirection pixel_to_direction(const PixelCoord& px, int width, int height) {
  CameraDirection dir;
  dir.longitude =
      width > 1 ? (static_cast<double>(px.col) / (width - 1) - 0.5) * 2.0 * kPi
                : 0.0;
  dir.latitude =
      height > 1 ? (static_cast<double>(px.row) / (height - 1) - 0.5) * kPi
                 : 0.0;
  return dir;
}

DepthMap project_cloud(const PointCloud& cloud, const RigExtrinsics& rig,
                       int width, int height) {
  if (cloud.empty()) throw EmptyCloud("project_cloud: empty point cloud");
  DepthMap map(height, width);
  for (const LidarPoint& p : cloud) {
    const double d = ground_distance(p);
    if (!(d > 0.0)) continue;
    const PixelCoord px = direction_to_pixel(align_point(p, rig), width, height);
    const float df = static_cast<float>(d);
    if (!map.known(px.row, px.col) || df < map.values(px.row, px.col)) {
      map.values(px.row, px.col) = df;
      map.known(px.row, px.col) = true;
    }
  }
  return map;
}

SensorReading inverse_project(const Eigen::Vector3d& world,
                              const RigExtrinsics& rig) {
  const Eigen::Vector3d from_lidar = world - rig.lidar_center();
  const Eigen::Vector3d from_cam = world - rig.camera_center();
  if (from_lidar.norm() < kDegenerateEps || from_cam.norm() < kDegenerateEps)
    throw DegenerateGeometry("inverse_project: point at a sensor center");

  SensorReading out;
  const double ground_l = std::hypot(from_lidar.x(), from_lidar.y());
  out.lidar.range = from_lidar.norm();
  out.lidar.latitude = std::atan2(-from_lidar.z(), ground_l);
  out.lidar.longitude = std::atan2(from_lidar.y(), from_lidar.x());

  const double ground_c = std::hypot(from_cam.x(), from_cam.y());
  out.camera.latitude = std::atan2(-from_cam.z(), ground_c);
  out.camera.longitude = std::atan2(from_cam.y(), from_cam.x());
  return out;
}

}  // namespace lcfuse
