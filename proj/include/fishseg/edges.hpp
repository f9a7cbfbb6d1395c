#pragma once

// Canny edge detection: Gaussian smoothing, Sobel gradients, non-maximum
// suppression, double thresholding and hysteresis tracking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fishseg/image.hpp"

namespace fishseg {

struct GradientField {
  RealImage magnitude;
  RealImage direction;  // radians in (-pi, pi], y axis pointing down

  int width() const noexcept { return magnitude.width(); }
  int height() const noexcept { return magnitude.height(); }
};

/// Thresholds are absolute gradient magnitudes. Unset thresholds default to
/// kLowRatio / kHighRatio of the image's maximum gradient magnitude.
struct CannyParams {
  static constexpr double kLowRatio = 0.1;
  static constexpr double kHighRatio = 0.2;

  double sigma = 1.0;
  std::optional<double> low;
  std::optional<double> high;

  friend bool operator==(const CannyParams&, const CannyParams&) = default;
};

inline int gaussian_radius(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("gaussian: sigma must be positive");
  const int r = gaussian_radius(sigma);
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable Gaussian smoothing with replicated borders.
inline RealImage gaussian_blur(const RealImage& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = gaussian_radius(sigma);
  const int w = img.width();
  const int h = img.height();
  RealImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * img(std::clamp(x + i, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  }
  RealImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(x, std::clamp(y + i, 0, h - 1));
      out(x, y) = acc;
    }
  }
  return out;
}

inline RealImage to_real(const GrayImage& img) {
  RealImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i];
  return out;
}

inline RealImage gaussian_blur(const GrayImage& img, double sigma) {
  return gaussian_blur(to_real(img), sigma);
}

inline GradientField sobel_gradients(const RealImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw ArgumentError("sobel: image must be at least 3x3");
  GradientField g{RealImage(w, h), RealImage(w, h)};
  auto at = [&](int x, int y) { return img(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      g.magnitude(x, y) = std::hypot(gx, gy);
      double dir = std::atan2(gy, gx);
      if (dir <= -std::numbers::pi) dir = std::numbers::pi;
      g.direction(x, y) = dir;
    }
  }
  return g;
}

struct Step {
  int dx;
  int dy;
};

/// Neighbor step along the gradient, quantized to 0, 45, 90 or 135 degrees.
inline Step gradient_step(double radians) {
  double deg = radians * 180.0 / std::numbers::pi;
  deg = std::fmod(deg, 180.0);
  if (deg < 0.0) deg += 180.0;
  if (deg < 22.5 || deg >= 157.5) return {1, 0};
  if (deg < 67.5) return {1, 1};
  if (deg < 112.5) return {0, 1};
  return {-1, 1};
}

/// Keeps a pixel iff its magnitude is >= both neighbors along the quantized
/// gradient direction; out-of-bounds neighbors count as zero.
inline RealImage non_max_suppression(const GradientField& g) {
  const int w = g.width();
  const int h = g.height();
  RealImage out(w, h, 0.0);
  auto mag = [&](int x, int y) { return g.magnitude.contains(x, y) ? g.magnitude(x, y) : 0.0; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = g.magnitude(x, y);
      if (m <= 0.0) continue;
      const Step s = gradient_step(g.direction(x, y));
      if (m >= mag(x + s.dx, y + s.dy) && m >= mag(x - s.dx, y - s.dy)) out(x, y) = m;
    }
  }
  return out;
}

/// Strong pixels (>= high) plus weak pixels (>= low) 8-connected to one.
/// Zero-magnitude pixels are never edges, whatever the thresholds.
inline BinaryImage hysteresis(const RealImage& thin, double low, double high) {
  if (!(low <= high)) throw ArgumentError("hysteresis: low threshold exceeds high");
  const int w = thin.width();
  const int h = thin.height();
  BinaryImage out(w, h);
  auto candidate = [&](int x, int y) { return thin(x, y) > 0.0 && thin(x, y) >= low; };

  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thin(x, y) > 0.0 && thin(x, y) >= high) {
        out(x, y) = Mark::foreground;
        stack.emplace_back(x, y);
      }
    }
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!thin.contains(nx, ny) || out(nx, ny) == Mark::foreground || !candidate(nx, ny)) continue;
        out(nx, ny) = Mark::foreground;
        stack.emplace_back(nx, ny);
      }
    }
  }
  return out;
}

struct CannyThresholds {
  double low = 0.0;
  double high = 0.0;
};

inline CannyThresholds resolve_thresholds(const CannyParams& p, const RealImage& thin) {
  double peak = 0.0;
  for (double v : thin) peak = std::max(peak, v);
  CannyThresholds t{p.low.value_or(CannyParams::kLowRatio * peak),
                    p.high.value_or(CannyParams::kHighRatio * peak)};
  if (!(t.low >= 0.0)) throw ArgumentError("canny: low threshold must be >= 0");
  if (!(t.low <= t.high)) throw ArgumentError("canny: low threshold exceeds high");
  return t;
}

inline BinaryImage canny(const GrayImage& img, const CannyParams& params = {}) {
  if (img.width() < 3 || img.height() < 3) throw ArgumentError("canny: image must be at least 3x3");
  const RealImage thin = non_max_suppression(sobel_gradients(gaussian_blur(img, params.sigma)));
  const auto t = resolve_thresholds(params, thin);
  return hysteresis(thin, t.low, t.high);
}

/// Copy of `img` with edge pixels painted `color`.
inline RasterImage overlay_edges(const RasterImage& img, const BinaryImage& edges, Rgb color) {
  require_same_shape(img, edges, "overlay_edges");
  RasterImage out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (edges[i] == Mark::foreground) out[i] = color;
  }
  return out;
}

}  // namespace fishseg
