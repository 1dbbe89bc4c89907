#pragma once

#include "lcfuse/ogmap.hpp"
#include "lcfuse/types.hpp"

#include <string>
#include <vector>

namespace lcfuse {

/// Axis-aligned box with a flat surface intensity.
struct Box {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
  float intensity = 0.3f;
};

/// Analytic world: a flat floor plus boxes. Ray intersections are exact, so
/// renders and scans double as ground truth.
struct Scene {
  double floor_height = 0.0;
  float floor_intensity = 0.75f;
  float background_intensity = 0.95f;
  std::vector<Box> boxes;
  int width = 720;   // default render size
  int height = 360;
  double noise_std = 0.0;     // additive range noise on LiDAR samples
  std::uint64_t noise_seed = 0;

  void validate() const {
    for (const Box& b : boxes)
      if (!((b.hi.array() > b.lo.array()).all()))
        throw RangeError("scene: box must have positive volume");
  }
};

/// 16-beam scan pattern; elevations are latitudes (positive below the
/// horizontal), by default 2 degrees apart from -15 to +15 with no zero
/// channel.
struct LidarScanSpec {
  std::vector<double> elevations;  // [rad]
  double azimuth_step = deg2rad(0.2);
  double max_range = 100.0;

  static LidarScanSpec vlp16(int channels = 16, double azimuth_step_deg = 0.2,
                             double max_range = 100.0);
};

struct RenderResult {
  GreyImage grey;
  DepthMap depth;  // ground-truth frontal distance; background pixels unknown
};

/// Casts the pixel-center equirectangular ray of every pixel from the camera
/// center; first hit wins. Depth is the hit's frontal ground-plane distance.
RenderResult render_camera(const Scene& scene, const RigExtrinsics& rig,
                           int width, int height);

/// Casts every (elevation, azimuth) beam from the LiDAR center and returns
/// the polar readings of first hits within max_range; misses are omitted.
PointCloud sample_lidar(const Scene& scene, const RigExtrinsics& rig,
                        const LidarScanSpec& spec);

/// Per-pixel oracle labels: floor hit -> free, box hit -> occupied,
/// background -> unknown.
LabelGrid ground_truth_free_mask(const Scene& scene, const RigExtrinsics& rig,
                                 int width, int height,
                                 double height_tol = 0.05);

/// Per-cell oracle labels on the ground grid: box footprints are occupied,
/// cells whose line of sight from the robot crosses a footprint are unknown,
/// everything else is free.
OGMap ground_truth_ogmap(const Scene& scene, const GridSpec& grid);

/// Built-in scenes: "floor", "floor_box3m", "ball_blindspot", "wall5m",
/// "trainset". Throws RangeError for unknown names.
Scene scene_preset(const std::string& name);

}  // namespace lcfuse
