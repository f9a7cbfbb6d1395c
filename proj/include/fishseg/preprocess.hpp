#pragma once

// Working-resolution resize and the pixel <-> feature-matrix reshape.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fishseg/image.hpp"

namespace fishseg {

using Point3 = std::array<double, 3>;

/// N x 3 matrix of unit-scaled RGB features in raster scan order.
class PixelMatrix {
 public:
  PixelMatrix() = default;

  explicit PixelMatrix(std::vector<Point3> rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_) {
      for (double v : r) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ArgumentError("pixel matrix value out of [0, 1]: " + std::to_string(v));
        }
      }
    }
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  static constexpr std::size_t cols() noexcept { return 3; }

  const Point3& operator[](std::size_t i) const { return rows_[i]; }
  std::span<const Point3> data() const noexcept { return rows_; }
  operator std::span<const Point3>() const noexcept { return rows_; }

  friend bool operator==(const PixelMatrix&, const PixelMatrix&) = default;

 private:
  std::vector<Point3> rows_;
};

enum class ResizeKernel { bilinear, nearest };

namespace detail {

// Pixel-center aligned source coordinate, clamped to the valid sample range.
inline double source_coord(int dst, int src_dim, int dst_dim) {
  const double s = (dst + 0.5) * (static_cast<double>(src_dim) / dst_dim) - 0.5;
  return std::clamp(s, 0.0, static_cast<double>(src_dim - 1));
}

}  // namespace detail

inline RasterImage resize(const RasterImage& img, int out_w, int out_h,
                          ResizeKernel kernel = ResizeKernel::bilinear) {
  if (out_w <= 0 || out_h <= 0) {
    throw ArgumentError("resize target must be positive, got " + std::to_string(out_w) + "x" +
                        std::to_string(out_h));
  }
  RasterImage out(out_w, out_h);
  const int sw = img.width();
  const int sh = img.height();

  if (kernel == ResizeKernel::nearest) {
    for (int y = 0; y < out_h; ++y) {
      const int sy = std::min(sh - 1, static_cast<int>(std::floor((y + 0.5) * sh / out_h)));
      for (int x = 0; x < out_w; ++x) {
        const int sx = std::min(sw - 1, static_cast<int>(std::floor((x + 0.5) * sw / out_w)));
        out(x, y) = img(sx, sy);
      }
    }
    return out;
  }

  for (int y = 0; y < out_h; ++y) {
    const double fy = detail::source_coord(y, sh, out_h);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = detail::source_coord(x, sw, out_w);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, sw - 1);
      const double wx = fx - x0;
      auto lerp = [&](auto channel) {
        const double top = (1.0 - wx) * channel(img(x0, y0)) + wx * channel(img(x1, y0));
        const double bottom = (1.0 - wx) * channel(img(x0, y1)) + wx * channel(img(x1, y1));
        return to_level((1.0 - wy) * top + wy * bottom);
      };
      out(x, y) = Rgb{lerp([](Rgb p) { return double(p.r); }),
                      lerp([](Rgb p) { return double(p.g); }),
                      lerp([](Rgb p) { return double(p.b); })};
    }
  }
  return out;
}

inline PixelMatrix reshape_to_features(const RasterImage& img) {
  std::vector<Point3> rows;
  rows.reserve(img.size());
  for (const Rgb& p : img) rows.push_back({p.r / 255.0, p.g / 255.0, p.b / 255.0});
  return PixelMatrix(std::move(rows));
}

inline Rgb to_rgb(const Point3& p) {
  return Rgb{to_level(p[0] * 255.0), to_level(p[1] * 255.0), to_level(p[2] * 255.0)};
}

inline RasterImage unreshape(const PixelMatrix& m, int w, int h) {
  if (w <= 0 || h <= 0 || m.rows() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw ArgumentError("unreshape: " + std::to_string(m.rows()) + " rows cannot form " +
                        std::to_string(w) + "x" + std::to_string(h));
  }
  RasterImage out(w, h);
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = to_rgb(m[i]);
  return out;
}

}  // namespace fishseg
