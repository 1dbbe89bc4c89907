#include "lcfuse/gp.hpp"

#include <Eigen/Cholesky>

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <utility>

namespace lcfuse {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterCap = 1e-4;

Eigen::MatrixXd gram(const std::vector<Eigen::Vector2i>& a,
                     const std::vector<Eigen::Vector2i>& b,
                     const Eigen::Ref<const ArrayXXf>& image, const GpParams& p) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    const Eigen::Vector2d bj = b[j].cast<double>();
    const double ib = image(b[j].x(), b[j].y());
    for (std::size_t i = 0; i < a.size(); ++i) {
      k(i, j) = p.signal_scale *
                kernel_closeness(a[i].cast<double>(), bj, p.k_p) *
                kernel_similarity(image(a[i].x(), a[i].y()), ib, p.k_l);
    }
  }
  return k;
}

}  // namespace

GpPosterior gp_posterior(const std::vector<Eigen::Vector2i>& train,
                         const Eigen::VectorXd& f,
                         const std::vector<Eigen::Vector2i>& query,
                         const GreyImage& image, const GpParams& p) {
  p.validate();
  if (train.empty()) throw DimensionMismatch("gp_posterior: empty training set");
  if (static_cast<Eigen::Index>(train.size()) != f.size())
    throw DimensionMismatch("gp_posterior: |train| != |f|");

  const Eigen::MatrixXd k = gram(train, train, image, p);
  if (!k.allFinite()) throw SingularKernel("gp_posterior: non-finite kernel matrix");
  const double diag_mean = k.diagonal().mean();

  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = kJitterStart;
  for (;;) {
    Eigen::MatrixXd ky = k;
    ky.diagonal().array() += p.noise_variance + jitter * diag_mean;
    llt.compute(ky);
    if (llt.info() == Eigen::Success) break;
    if (jitter >= kJitterCap)
      throw SingularKernel("gp_posterior: factorization failed at jitter cap");
    jitter *= 10.0;
  }

  const double mu = f.mean();
  const Eigen::VectorXd alpha = llt.solve((f.array() - mu).matrix());

  GpPosterior out;
  out.mean.resize(query.size());
  out.variance.resize(query.size());
  if (query.empty()) return out;

  const Eigen::MatrixXd k_star = gram(train, query, image, p);
  out.mean = ((k_star.transpose() * alpha).array() + mu).matrix();
  // diag(K** - K*^T Ky^-1 K*) via the Cholesky factor; K**_jj = signal_scale.
  const Eigen::MatrixXd v = llt.matrixL().solve(k_star);
  for (Eigen::Index j = 0; j < out.variance.size(); ++j)
    out.variance(j) = std::max(0.0, p.signal_scale - v.col(j).squaredNorm());
  return out;
}

PatchResult fuse_patch(const Eigen::Ref<const ArrayXXf>& depth_window,
                       const Eigen::Ref<const ArrayXXb>& known_window,
                       const Eigen::Ref<const ArrayXXf>& grey_window,
                       const GpParams& p) {
  const Eigen::Index rows = depth_window.rows();
  const Eigen::Index cols = depth_window.cols();
  if (known_window.rows() != rows || known_window.cols() != cols ||
      grey_window.rows() != rows || grey_window.cols() != cols)
    throw DimensionMismatch("fuse_patch: window shapes differ");

  PatchResult result;
  result.mean = ArrayXXd::Zero(rows, cols);
  result.variance = ArrayXXd::Constant(rows, cols, p.signal_scale);

  std::vector<Eigen::Vector2i> train;
  std::vector<double> f_raw;
  std::vector<Eigen::Vector2i> all;
  all.reserve(rows * cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      all.emplace_back(static_cast<int>(r), static_cast<int>(c));
      if (known_window(r, c)) {
        train.emplace_back(static_cast<int>(r), static_cast<int>(c));
        f_raw.push_back(depth_window(r, c));
      }
    }
  }
  if (static_cast<int>(train.size()) < p.min_train_points) return result;

  const Eigen::VectorXd f =
      Eigen::Map<const Eigen::VectorXd>(f_raw.data(), f_raw.size());
  const ArrayXXf grey = grey_window;  // owns storage for kernel lookups
  const GpPosterior post = gp_posterior(train, f, all, grey, p);

  result.supported = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    result.mean(all[i].x(), all[i].y()) = post.mean(i);
    result.variance(all[i].x(), all[i].y()) = post.variance(i);
  }
  // measured pixels pass through unchanged
  for (std::size_t i = 0; i < train.size(); ++i)
    result.mean(train[i].x(), train[i].y()) = f_raw[i];
  return result;
}

namespace {

std::vector<Eigen::Index> tile_origins(Eigen::Index extent, Eigen::Index size,
                                       Eigen::Index stride) {
  std::vector<Eigen::Index> origins;
  if (extent <= size) {
    origins.push_back(0);
    return origins;
  }
  for (Eigen::Index o = 0;; o += stride) {
    if (o + size >= extent) {
      origins.push_back(extent - size);
      break;
    }
    origins.push_back(o);
  }
  return origins;
}

}  // namespace

FusedFrame fuse_frame(const DepthMap& sparse, const GreyImage& grey,
                      const GpParams& p, int threads) {
  p.validate();
  if (sparse.rows() != grey.rows() || sparse.cols() != grey.cols())
    throw DimensionMismatch("fuse_frame: sparse and grey dimensions differ");
  const Eigen::Index rows = sparse.rows();
  const Eigen::Index cols = sparse.cols();
  const Eigen::Index n = std::min<Eigen::Index>(p.patch_size, std::min(rows, cols));
  const Eigen::Index stride = std::max<Eigen::Index>(1, p.patch_size - p.patch_overlap);

  struct Tile {
    Eigen::Index r0, c0, h, w;
  };
  std::vector<Tile> tiles;
  for (Eigen::Index r0 : tile_origins(rows, n, stride))
    for (Eigen::Index c0 : tile_origins(cols, n, stride))
      tiles.push_back({r0, c0, std::min(n, rows - r0), std::min(n, cols - c0)});

  std::vector<PatchResult> results(tiles.size());
  std::vector<std::exception_ptr> errors(tiles.size());
  const auto run = [&](std::size_t i) {
    const Tile& t = tiles[i];
    try {
      results[i] = fuse_patch(sparse.values.block(t.r0, t.c0, t.h, t.w),
                              sparse.known.block(t.r0, t.c0, t.h, t.w),
                              grey.block(t.r0, t.c0, t.h, t.w), p);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (threads <= 1) {
    for (std::size_t i = 0; i < tiles.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<int>(threads, static_cast<int>(tiles.size()));
    for (int t = 0; t < count; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tiles.size()) return;
          run(i);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const SingularKernel& e) {
      throw SingularKernel("patch " + std::to_string(i) + ": " + e.what());
    }
  }

  // inverse-variance blend, accumulated in patch-index order
  ArrayXXd num = ArrayXXd::Zero(rows, cols);
  ArrayXXd den = ArrayXXd::Zero(rows, cols);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (!results[i].supported) continue;
    const Tile& t = tiles[i];
    for (Eigen::Index c = 0; c < t.w; ++c) {
      for (Eigen::Index r = 0; r < t.h; ++r) {
        const double w = 1.0 / std::max(results[i].variance(r, c), 1e-12);
        num(t.r0 + r, t.c0 + c) += w * results[i].mean(r, c);
        den(t.r0 + r, t.c0 + c) += w;
      }
    }
  }

  FusedFrame out;
  out.depth = DepthMap(rows, cols);
  out.variance = ArrayXXf::Constant(rows, cols, static_cast<float>(p.signal_scale));
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (den(r, c) > 0.0) {
        out.depth.known(r, c) = true;
        out.depth.values(r, c) = static_cast<float>(num(r, c) / den(r, c));
        out.variance(r, c) = static_cast<float>(1.0 / den(r, c));
      }
    }
  }
  return out;
}

DepthMap baseline_nearest(const DepthMap& sparse) {
  if (sparse.known_count() == 0) throw EmptyMap("baseline_nearest: no filled pixels");
  const Eigen::Index rows = sparse.rows();
  const Eigen::Index cols = sparse.cols();

  // nearest filled row per (row, column); ties keep the smaller row
  Eigen::ArrayXXi col_row(rows, cols);
  col_row.setConstant(-1);
  for (Eigen::Index c = 0; c < cols; ++c) {
    Eigen::Index last = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (sparse.known(r, c)) last = r;
      col_row(r, c) = static_cast<int>(last);
    }
    Eigen::Index next = -1;
    for (Eigen::Index r = rows - 1; r >= 0; --r) {
      if (sparse.known(r, c)) next = r;
      const Eigen::Index up = col_row(r, c);
      if (up < 0) {
        col_row(r, c) = static_cast<int>(next);
      } else if (next >= 0 && next - r < r - up) {
        col_row(r, c) = static_cast<int>(next);
      }
    }
  }

  DepthMap out(rows, cols);
  out.known.setConstant(true);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      long best_d2 = -1;
      Eigen::Index best_r = -1, best_c = -1;
      const auto consider = [&](Eigen::Index cc) {
        const int rr = col_row(r, cc);
        if (rr < 0) return;
        const long d2 = (r - rr) * (r - rr) + (c - cc) * (c - cc);
        if (best_d2 < 0 || d2 < best_d2 ||
            (d2 == best_d2 && (rr < best_r || (rr == best_r && cc < best_c)))) {
          best_d2 = d2;
          best_r = rr;
          best_c = cc;
        }
      };
      for (Eigen::Index k = 0;; ++k) {
        if (best_d2 >= 0 && k * k > best_d2) break;
        const bool left_ok = c - k >= 0;
        const bool right_ok = k > 0 && c + k < cols;
        if (!left_ok && !right_ok && best_d2 >= 0) break;
        if (!left_ok && !right_ok && k >= cols) break;
        if (left_ok) consider(c - k);
        if (right_ok) consider(c + k);
      }
      out.values(r, c) = sparse.values(best_r, best_c);
    }
  }
  return out;
}

DepthMap baseline_idw(const DepthMap& sparse, double power, double radius) {
  if (sparse.known_count() == 0) throw EmptyMap("baseline_idw: no filled pixels");
  const Eigen::Index rows = sparse.rows();
  const Eigen::Index cols = sparse.cols();
  std::vector<Eigen::Vector2i> filled;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (sparse.known(r, c)) filled.emplace_back(static_cast<int>(r), static_cast<int>(c));

  DepthMap out(rows, cols);
  const double r2 = radius * radius;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (sparse.known(r, c)) {
        out.values(r, c) = sparse.values(r, c);
        out.known(r, c) = true;
        continue;
      }
      double wsum = 0.0, vsum = 0.0;
      for (const Eigen::Vector2i& q : filled) {
        const double d2 = static_cast<double>((q.x() - r) * (q.x() - r) +
                                              (q.y() - c) * (q.y() - c));
        if (d2 > r2) continue;
        const double w = 1.0 / std::pow(std::sqrt(d2), power);
        wsum += w;
        vsum += w * sparse.values(q.x(), q.y());
      }
      if (wsum > 0.0) {
        out.values(r, c) = static_cast<float>(vsum / wsum);
        out.known(r, c) = true;
      }
    }
  }
  return out;
}

}  // namespace lcfuse
