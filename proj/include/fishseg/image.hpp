#pragma once

// Raster containers, channel conversions and binarization.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fishseg {

/// Raised when an operation receives arguments violating its preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the PNM decoder; `field()` names the header field or payload at fault.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::string field, const std::string& what)
      : std::runtime_error("pnm decode error (" + field + "): " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline constexpr int kLevels = 256;
inline constexpr int kMaxLevel = kLevels - 1;

/// Rounds half-up. Every real-to-level conversion in the library goes through here.
inline double round_half_up(double v) { return std::floor(v + 0.5); }

/// Rounds half-up and clamps into [0, 255].
inline std::uint8_t to_level(double v) {
  const double r = round_half_up(v);
  if (r <= 0.0) return 0;
  if (r >= kMaxLevel) return kMaxLevel;
  return static_cast<std::uint8_t>(r);
}

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Mark : std::uint8_t { background = 0, foreground = 1 };

/// Row-major raster of `T` with strictly positive dimensions.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ArgumentError("raster payload length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw ArgumentError("raster dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
    }
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RasterImage = Raster<Rgb>;
using GrayImage = Raster<std::uint8_t>;
using BinaryImage = Raster<Mark>;
using RealImage = Raster<double>;

template <typename A, typename B>
bool same_shape(const Raster<A>& a, const Raster<B>& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (!same_shape(a, b)) {
    throw ArgumentError(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                        "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                        "x" + std::to_string(b.height()));
  }
}

// Luma weights as published; they sum to 1.0030, so white overflows and is clamped.
inline constexpr double kGrayR = 0.2989;
inline constexpr double kGrayG = 0.587;
inline constexpr double kGrayB = 0.1141;

inline double gray_value(Rgb p) { return kGrayR * p.r + kGrayG * p.g + kGrayB * p.b; }

inline GrayImage to_grayscale(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = to_level(gray_value(img[i]));
  return out;
}

/// Replicates a gray level into all three channels.
inline RasterImage to_rgb(const GrayImage& img) {
  RasterImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = Rgb{img[i], img[i], img[i]};
  return out;
}

/// Background as 0, foreground as 255.
inline GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] == Mark::foreground ? 255 : 0;
  return out;
}

inline std::size_t foreground_count(const BinaryImage& img) {
  std::size_t n = 0;
  for (Mark m : img) n += m == Mark::foreground;
  return n;
}

struct Threshold {
  enum class Kind { otsu, fixed };
  Kind kind = Kind::otsu;
  int level = 127;

  static Threshold otsu() { return {}; }
  static Threshold fixed(int t) { return {Kind::fixed, t}; }

  friend bool operator==(const Threshold&, const Threshold&) = default;
};

/// Otsu's threshold over a 256-bin histogram: the first level t maximizing the
/// between-class variance of {<= t} and {> t}. A single-level histogram
/// returns that level, so the whole image ends up background.
inline int otsu_threshold(const std::array<std::size_t, kLevels>& bins) {
  std::size_t total = 0;
  double weighted = 0.0;
  int present = 0;
  int only = 0;
  for (int i = 0; i < kLevels; ++i) {
    total += bins[i];
    weighted += static_cast<double>(i) * static_cast<double>(bins[i]);
    if (bins[i] != 0) {
      ++present;
      only = i;
    }
  }
  if (present <= 1) return only;

  double best = -1.0;
  int best_t = 0;
  double w0 = 0.0;
  double sum0 = 0.0;
  const auto n = static_cast<double>(total);
  for (int t = 0; t < kLevels; ++t) {
    w0 += static_cast<double>(bins[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(bins[t]);
    const double w1 = n - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (weighted - sum0) / w1;
    const double between = (w0 / n) * (w1 / n) * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

inline int otsu_threshold(const GrayImage& img) {
  std::array<std::size_t, kLevels> bins{};
  for (auto v : img) ++bins[v];
  return otsu_threshold(bins);
}

/// Foreground where level > threshold.
inline BinaryImage binarize(const GrayImage& img, Threshold method = Threshold::otsu()) {
  const int t = method.kind == Threshold::Kind::otsu ? otsu_threshold(img) : method.level;
  BinaryImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = static_cast<int>(img[i]) > t ? Mark::foreground : Mark::background;
  }
  return out;
}

}  // namespace fishseg
