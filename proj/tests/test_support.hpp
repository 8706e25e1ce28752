#pragma once

// Random generators and independent reference implementations shared by the
// unit and acceptance suites. Nothing here calls into the code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "deforma/affine.hpp"
#include "deforma/keypoints.hpp"
#include "deforma/regions.hpp"
#include "deforma/tensor.hpp"

namespace deforma::testing {

using Rng = std::mt19937_64;

inline Tensor random_tensor(Rng& rng, Shape shape, float lo = 0.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  Tensor t(shape);
  for (float& v : t.values()) v = u(rng);
  return t;
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline AffineTransform random_affine(Rng& rng, double min_abs_det = 0.2) {
  for (;;) {
    AffineTransform t{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2),
                      uniform(rng, -2, 2), uniform(rng, -50, 50), uniform(rng, -50, 50)};
    if (std::abs(t.det()) >= min_abs_det) return t;
  }
}

/// Plausible standing pose inside a height x width image, every joint present.
inline Keypoints random_pose(Rng& rng, double height, double width) {
  Keypoints kp;
  for (auto& j : kp.joints) j = Point2{uniform(rng, 0.1 * width, 0.9 * width), uniform(rng, 0.05 * height, 0.95 * height)};
  return kp;
}

/// Rotated rectangle with the given centre, half extents and angle, corners
/// in counter-clockwise (on screen) order.
inline Quad rotated_rect(Point2 centre, double half_len, double half_wid, double angle) {
  const Point2 u{std::cos(angle), std::sin(angle)};
  const Point2 n{-u.y, u.x};
  const Point2 a = centre - half_len * u, b = centre + half_len * u;
  return {a + half_wid * n, b + half_wid * n, b - half_wid * n, a - half_wid * n};
}

/// Point-in-rectangle by projection onto the rectangle's own axes, inclusive.
inline bool point_in_rect_oracle(const Quad& q, Point2 p) {
  const Point2 e1 = q[1] - q[0];
  const Point2 e2 = q[3] - q[0];
  const Point2 d = p - q[0];
  const double s = dot(d, e1) / dot(e1, e1);
  const double t = dot(d, e2) / dot(e2, e2);
  constexpr double eps = 1e-9;
  return s >= -eps && s <= 1 + eps && t >= -eps && t <= 1 + eps;
}

inline double l1_oracle(const Tensor& x, const Tensor& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(static_cast<double>(x.values()[i]) - y.values()[i]);
  return s;
}

/// SSIM straight from the definition: full 2-D Gaussian window evaluated at
/// every valid position, no separable filtering.
inline double ssim_oracle(const Tensor& x, const Tensor& y, int window = 11, double sigma = 1.5, double k1 = 0.01,
                          double k2 = 0.03, double range = 1.0) {
  const int half = window / 2;
  std::vector<double> g(static_cast<std::size_t>(window * window));
  double gsum = 0.0;
  for (int i = 0; i < window; ++i) {
    for (int j = 0; j < window; ++j) {
      const double v = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2 * sigma * sigma));
      g[static_cast<std::size_t>(i * window + j)] = v;
      gsum += v;
    }
  }
  for (double& v : g) v /= gsum;
  const double c1 = (k1 * range) * (k1 * range), c2 = (k2 * range) * (k2 * range);
  const int h = static_cast<int>(x.height()), w = static_cast<int>(x.width());
  double total = 0.0;
  for (std::size_t ch = 0; ch < x.channels(); ++ch) {
    double sum = 0.0;
    int count = 0;
    for (int r = 0; r + window <= h; ++r) {
      for (int c = 0; c + window <= w; ++c) {
        double mx = 0, my = 0;
        for (int i = 0; i < window; ++i) {
          for (int j = 0; j < window; ++j) {
            const double wt = g[static_cast<std::size_t>(i * window + j)];
            mx += wt * x.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j), ch);
            my += wt * y.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j), ch);
          }
        }
        double vx = 0, vy = 0, cxy = 0;
        for (int i = 0; i < window; ++i) {
          for (int j = 0; j < window; ++j) {
            const double wt = g[static_cast<std::size_t>(i * window + j)];
            const double dx = x.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j), ch) - mx;
            const double dy = y.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j), ch) - my;
            vx += wt * dx * dx;
            vy += wt * dy * dy;
            cxy += wt * dx * dy;
          }
        }
        sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    }
    total += sum / count;
  }
  return total / static_cast<double>(x.channels());
}

/// Output of an integer translation by (dx, dy) applied to `g`, zero filled.
inline Tensor shift_oracle(const Tensor& g, long dx, long dy) {
  Tensor out(g.shape());
  for (long r = 0; r < static_cast<long>(g.height()); ++r) {
    for (long c = 0; c < static_cast<long>(g.width()); ++c) {
      const long sr = r - dy, sc = c - dx;
      if (sr < 0 || sc < 0 || sr >= static_cast<long>(g.height()) || sc >= static_cast<long>(g.width())) continue;
      for (std::size_t ch = 0; ch < g.channels(); ++ch) {
        out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch) =
            g.at(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc), ch);
      }
    }
  }
  return out;
}

inline bool close_rel(double a, double b, double rel, double abs_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel * std::max(std::abs(a), std::abs(b)));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("deforma_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct ProcessResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command line, capturing stdout.
inline ProcessResult run_process(const std::string& command) {
  ProcessResult r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace deforma::testing
