#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcfuse {

using ArrayXXf = Eigen::ArrayXXf;
using ArrayXXd = Eigen::ArrayXXd;
using ArrayXXb = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Grey-level image, intensities normalized to [0, 1], indexed (row, col).
using GreyImage = ArrayXXf;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LCFUSE_DEFINE_ERROR(NAME)              \
  class NAME : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

LCFUSE_DEFINE_ERROR(DegenerateGeometry);
LCFUSE_DEFINE_ERROR(EmptyCloud);
LCFUSE_DEFINE_ERROR(SingularKernel);
LCFUSE_DEFINE_ERROR(DimensionMismatch);
LCFUSE_DEFINE_ERROR(GridMismatch);
LCFUSE_DEFINE_ERROR(EmptyMap);
LCFUSE_DEFINE_ERROR(EmptyValidSet);
LCFUSE_DEFINE_ERROR(DegenerateLabels);
LCFUSE_DEFINE_ERROR(ParseError);
LCFUSE_DEFINE_ERROR(RangeError);

#undef LCFUSE_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Sensor rig
// ---------------------------------------------------------------------------

/// Rigid placement of the camera relative to the LiDAR plus the LiDAR's
/// limits. The world frame has its origin at the LiDAR's ground point, X
/// along the shared main axis and Z up. The LiDAR center sits at
/// (0, 0, lidar_height), the camera center at
/// (frontal_offset, -lateral_offset, cam_height): a positive lateral_offset
/// displaces the camera toward negative Y. Latitudes are positive BELOW the
/// sensor's horizontal plane, longitudes are measured by atan2(Y, X) in
/// (-pi, pi].
struct RigExtrinsics {
  double cam_height = 0.55;             // H_C [m]
  double lidar_height = 0.61;           // H_L [m]
  double frontal_offset = 0.5;          // [m], camera ahead of the LiDAR
  double lateral_offset = 0.07;         // [m], camera toward -Y
  double lidar_vfov_halfangle = deg2rad(15.0);
  double lidar_max_range = 100.0;       // [m]

  void validate() const {
    if (!(cam_height > 0.0)) throw RangeError("rig: cam_height must be > 0");
    if (!(lidar_height > 0.0)) throw RangeError("rig: lidar_height must be > 0");
    if (!(lidar_max_range > 0.0)) throw RangeError("rig: lidar_max_range must be > 0");
    if (!(lidar_vfov_halfangle > 0.0 && lidar_vfov_halfangle < kPi / 2.0))
      throw RangeError("rig: lidar_vfov_halfangle must be in (0, pi/2)");
  }

  Eigen::Vector3d lidar_center() const { return {0.0, 0.0, lidar_height}; }
  Eigen::Vector3d camera_center() const {
    return {frontal_offset, -lateral_offset, cam_height};
  }

  /// Ground radius inside which no beam can reach the floor.
  double blind_radius() const {
    return lidar_height / std::tan(lidar_vfov_halfangle);
  }
};

// ---------------------------------------------------------------------------
// Sensor readings
// ---------------------------------------------------------------------------

/// One polar LiDAR return. Latitude positive below the sensor's horizontal
/// plane; longitude in (-pi, pi].
struct LidarPoint {
  double range = 0.0;      // d_L [m]
  double latitude = 0.0;   // beta [rad]
  double longitude = 0.0;  // gamma_L [rad]
};

using PointCloud = std::vector<LidarPoint>;

/// Viewing direction from the camera center, same sign conventions as
/// LidarPoint. |latitude| <= pi/2.
struct CameraDirection {
  double latitude = 0.0;   // alpha [rad]
  double longitude = 0.0;  // gamma_C [rad]
};

struct PixelCoord {
  int row = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Image-gridded depth
// ---------------------------------------------------------------------------

/// Image-sized depth map; `known` flags pixels that carry a value. Used both
/// for the sparse projected map and for completed dense maps.
struct DepthMap {
  ArrayXXf values;  // ground-plane distance D [m]
  ArrayXXb known;

  DepthMap() = default;
  DepthMap(Eigen::Index rows, Eigen::Index cols)
      : values(ArrayXXf::Zero(rows, cols)),
        known(ArrayXXb::Constant(rows, cols, false)) {}

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index known_count() const { return known.count(); }
};

/// Dense depth plus per-pixel variance from GP fusion. `depth.known` is
/// false where no patch had enough support; variance there is the prior.
struct FusedFrame {
  DepthMap depth;
  ArrayXXf variance;  // [m^2]
};

// ---------------------------------------------------------------------------
// Free-space labels
// ---------------------------------------------------------------------------

enum class CellLabel : std::uint8_t { Occupied = 0, Free = 1, Unknown = 2 };

/// Per-pixel (or per-grid-cell) {occupied, free, unknown} labels.
using LabelGrid = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline LabelGrid make_label_grid(Eigen::Index rows, Eigen::Index cols,
                                 CellLabel fill = CellLabel::Unknown) {
  return LabelGrid::Constant(rows, cols, static_cast<std::uint8_t>(fill));
}

inline CellLabel label_at(const LabelGrid& g, Eigen::Index r, Eigen::Index c) {
  return static_cast<CellLabel>(g(r, c));
}

inline void set_label(LabelGrid& g, Eigen::Index r, Eigen::Index c, CellLabel v) {
  g(r, c) = static_cast<std::uint8_t>(v);
}

}  // namespace lcfuse
