#pragma once

#include "lcfuse/types.hpp"

namespace lcfuse {

/// Longitude gamma_C of a LiDAR return as seen from the camera, via the
/// two-argument arctangent of the lateral and frontal ground offsets from
/// the camera center. Throws DegenerateGeometry when the return's ground
/// projection coincides with the camera's (both arguments < 1e-12).
double camera_longitude(const LidarPoint& p, const RigExtrinsics& rig);

/// Latitude alpha of a LiDAR return as seen from the camera. `longitude`
/// must be the value from camera_longitude. The two-argument form
/// atan2(height drop, horizontal camera range) keeps |alpha| <= pi/2 even
/// behind the camera.
double camera_latitude(const LidarPoint& p, const RigExtrinsics& rig,
                       double longitude);

/// Longitude first, then latitude (the latitude formula depends on it).
CameraDirection align_point(const LidarPoint& p, const RigExtrinsics& rig);

/// Frontal ground-plane distance D of a return, measured from the LiDAR
/// ground point along the main axis.
inline double ground_distance(const LidarPoint& p) {
  return p.range * std::cos(p.latitude) * std::cos(p.longitude);
}

/// Equirectangular direction -> pixel map. Columns span longitude
/// (-pi, pi], rows span latitude with the horizon at the middle row and
/// positive (downward) latitudes below it. Round-half-up, then clamp;
/// never fails.
PixelCoord direction_to_pixel(const CameraDirection& dir, int width, int height);

/// Center ray of a pixel; exact inverse of direction_to_pixel up to the
/// pixel quantization.
CameraDirection pixel_to_direction(const PixelCoord& px, int width, int height);

/// Projects every cloud point onto an image-sized sparse depth map holding
/// ground-plane distances D. Pixel collisions keep the smaller D. Points
/// with D <= 0 (at or behind the LiDAR's lateral plane) are dropped.
/// Throws EmptyCloud on an empty cloud.
DepthMap project_cloud(const PointCloud& cloud, const RigExtrinsics& rig,
                       int width, int height);

/// A world point as both sensors would report it.
struct SensorReading {
  LidarPoint lidar;
  CameraDirection camera;
};

/// Exact polar readings of a world point (X, Y, Z) for both sensors.
/// Throws DegenerateGeometry for points at a sensor center.
SensorReading inverse_project(const Eigen::Vector3d& world,
                              const RigExtrinsics& rig);

}  // namespace lcfuse
