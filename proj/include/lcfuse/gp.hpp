#pragma once

#include "lcfuse/types.hpp"

#include <limits>
#include <vector>

namespace lcfuse {

/// Gaussian-process resolution-matching parameters. The covariance between
/// two pixels is signal_scale * closeness(spatial) * similarity(intensity);
/// observations carry noise_variance on the diagonal.
struct GpParams {
  double k_p = 16.0;             // spatial kernel width [px^2]
  double k_l = 0.01;             // intensity kernel width [normalized^2]
  double noise_variance = 1e-4;  // sigma_n^2 [m^2]
  double signal_scale = 1.0;     // prior variance [m^2]
  int patch_size = 32;           // n
  int patch_overlap = 8;
  int min_train_points = 4;

  void validate() const {
    if (!(k_p > 0.0)) throw RangeError("gp: k_p must be > 0");
    if (!(k_l > 0.0)) throw RangeError("gp: k_l must be > 0");
    if (!(noise_variance >= 0.0)) throw RangeError("gp: noise_variance must be >= 0");
    if (!(signal_scale > 0.0)) throw RangeError("gp: signal_scale must be > 0");
    if (patch_size < 1) throw RangeError("gp: patch_size must be >= 1");
    if (patch_overlap < 0 || patch_overlap >= patch_size)
      throw RangeError("gp: patch_overlap must be in [0, patch_size)");
    if (min_train_points < 1) throw RangeError("gp: min_train_points must be >= 1");
  }
};

/// Spatial closeness factor exp(-|x - x'|^2 / (2 k_p)), Euclidean in (row, col).
inline double kernel_closeness(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                               double k_p) {
  return std::exp(-(a - b).squaredNorm() / (2.0 * k_p));
}

/// Intensity similarity factor exp(-(I - I')^2 / (2 k_l)).
inline double kernel_similarity(double ia, double ib, double k_l) {
  const double d = ia - ib;
  return std::exp(-d * d / (2.0 * k_l));
}

/// Product kernel over pixels of one image; symmetric, in (0, 1], 1 on the
/// diagonal.
inline double kernel(const Eigen::Vector2i& a, const Eigen::Vector2i& b,
                     const GreyImage& image, const GpParams& p) {
  return kernel_closeness(a.cast<double>(), b.cast<double>(), p.k_p) *
         kernel_similarity(image(a.x(), a.y()), image(b.x(), b.y()), p.k_l);
}

struct GpPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Posterior predictive mean and variance at the query pixels, conditioned
/// on (train, f). Constant prior mean equal to mean(f); solved by Cholesky
/// factorization of K + (noise + jitter) I with deterministic jitter
/// escalation. Throws SingularKernel when factorization fails at the jitter
/// cap.
GpPosterior gp_posterior(const std::vector<Eigen::Vector2i>& train,
                         const Eigen::VectorXd& f,
                         const std::vector<Eigen::Vector2i>& query,
                         const GreyImage& image, const GpParams& p);

/// One fused window: when supported, every pixel carries a value (known
/// pixels keep their input depth) and a posterior variance; otherwise the
/// window is all-unknown at the prior variance.
struct PatchResult {
  bool supported = false;
  ArrayXXd mean;
  ArrayXXd variance;
};

/// Fuses a single window: known pixels train the GP, empty pixels are the
/// queries. Windows with fewer than min_train_points known pixels come back
/// unsupported.
PatchResult fuse_patch(const Eigen::Ref<const ArrayXXf>& depth_window,
                       const Eigen::Ref<const ArrayXXb>& known_window,
                       const Eigen::Ref<const ArrayXXf>& grey_window,
                       const GpParams& p);

/// Tiles the frame into overlapping patches, fuses each, and blends the
/// overlaps by inverse-variance weighting in fixed patch order. With
/// threads > 1 the per-patch solves run in parallel; the blend stays
/// sequential, so outputs are identical for any thread count.
FusedFrame fuse_frame(const DepthMap& sparse, const GreyImage& grey,
                      const GpParams& p, int threads = 1);

/// Nearest-filled-pixel fill (Euclidean; ties broken by smaller row, then
/// smaller col). Throws EmptyMap when no pixel is filled.
DepthMap baseline_nearest(const DepthMap& sparse);

/// Inverse-distance-weighted fill over filled pixels within `radius` (in
/// pixels; infinite by default). Pixels with no support stay unknown.
DepthMap baseline_idw(const DepthMap& sparse, double power = 2.0,
                      double radius = std::numeric_limits<double>::infinity());

}  // namespace lcfuse
