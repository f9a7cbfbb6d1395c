#pragma once

// Histograms, global histogram equalization and CLAHE.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fishseg/image.hpp"

namespace fishseg {

struct HistogramData {
  std::array<std::size_t, kLevels> bins{};
  std::size_t total = 0;
  std::array<double, kLevels> normalized{};
};

using Lut = std::array<std::uint8_t, kLevels>;

/// CLAHE tuning. The clip limit per tile is
///   beta = (M / n_bins) * (1 + alpha / 100 * (s_max - 1))
/// with M the tile's pixel count.
struct ClaheParams {
  double alpha = 1.0;
  int tiles_x = 8;
  int tiles_y = 8;
  int n_bins = kLevels;
  double s_max = 4.0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 100.0)) throw ArgumentError("clahe: alpha must lie in [0, 100]");
    if (tiles_x < 1 || tiles_y < 1) throw ArgumentError("clahe: tile grid must be at least 1x1");
    if (n_bins != kLevels) throw ArgumentError("clahe: only 256 histogram bins are supported");
    if (!(s_max > 1.0)) throw ArgumentError("clahe: s_max must exceed 1");
  }

  friend bool operator==(const ClaheParams&, const ClaheParams&) = default;
};

inline HistogramData histogram(const GrayImage& img) {
  if (img.empty()) throw ArgumentError("histogram: zero-pixel image");
  HistogramData h;
  for (auto v : img) ++h.bins[v];
  h.total = img.size();
  for (int i = 0; i < kLevels; ++i) {
    h.normalized[i] = static_cast<double>(h.bins[i]) / static_cast<double>(h.total);
  }
  return h;
}

/// level,count,normalized rows with a header line.
inline std::string histogram_csv(const HistogramData& h) {
  std::ostringstream out;
  out.precision(17);
  out << "level,count,normalized\n";
  for (int i = 0; i < kLevels; ++i) out << i << ',' << h.bins[i] << ',' << h.normalized[i] << '\n';
  return out.str();
}

/// T(v) = round((L - 1) * CDF(v)) over counts summing to `total`.
inline Lut equalization_lut(const std::array<std::size_t, kLevels>& bins, std::size_t total) {
  Lut lut{};
  std::size_t cum = 0;
  for (int v = 0; v < kLevels; ++v) {
    cum += bins[v];
    lut[v] = to_level(static_cast<double>(kMaxLevel) * static_cast<double>(cum) /
                      static_cast<double>(total));
  }
  return lut;
}

inline GrayImage apply_lut(const GrayImage& img, const Lut& lut) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = lut[img[i]];
  return out;
}

inline GrayImage equalize_hist(const GrayImage& img) {
  const HistogramData h = histogram(img);
  return apply_lut(img, equalization_lut(h.bins, h.total));
}

inline double clip_limit(std::size_t region_pixels, const ClaheParams& p) {
  return static_cast<double>(region_pixels) / p.n_bins * (1.0 + p.alpha / 100.0 * (p.s_max - 1.0));
}

struct ClippedHistogram {
  std::array<double, kLevels> clipped{};        // before redistribution
  std::array<double, kLevels> redistributed{};  // final
  double limit = 0.0;
  double excess = 0.0;
};

/// Clips every bin at beta and spreads the clipped mass evenly over all bins
/// in a single pass. Bins stay real-valued, so beta below one count (small
/// tiles) still limits contrast instead of flattening the tile.
inline ClippedHistogram clip_histogram(const std::array<std::size_t, kLevels>& bins, double beta) {
  ClippedHistogram out;
  out.limit = std::max(beta, 0.0);
  for (int i = 0; i < kLevels; ++i) {
    const auto v = static_cast<double>(bins[i]);
    if (v > out.limit) {
      out.excess += v - out.limit;
      out.clipped[i] = out.limit;
    } else {
      out.clipped[i] = v;
    }
  }
  const double share = out.excess / kLevels;
  for (int i = 0; i < kLevels; ++i) out.redistributed[i] = out.clipped[i] + share;
  return out;
}

/// Equalization mapping for a real-valued histogram of `total` samples.
inline Lut equalization_lut(const std::array<double, kLevels>& bins, double total) {
  Lut lut{};
  double cum = 0.0;
  for (int v = 0; v < kLevels; ++v) {
    cum += bins[v];
    lut[v] = to_level(static_cast<double>(kMaxLevel) * cum / total);
  }
  return lut;
}

/// Tile boundaries along one axis; the last tile absorbs the remainder.
inline std::vector<int> tile_edges(int extent, int tiles) {
  std::vector<int> edges(static_cast<std::size_t>(tiles) + 1);
  const int step = extent / tiles;
  for (int t = 0; t < tiles; ++t) edges[t] = t * step;
  edges[tiles] = extent;
  return edges;
}

struct ClaheTiles {
  std::vector<int> x_edges;
  std::vector<int> y_edges;
  std::vector<Lut> luts;  // row-major over the tile grid
  std::vector<ClippedHistogram> histograms;

  const Lut& lut(int tx, int ty) const {
    return luts[static_cast<std::size_t>(ty) * (x_edges.size() - 1) + static_cast<std::size_t>(tx)];
  }
};

inline ClaheTiles clahe_tiles(const GrayImage& img, const ClaheParams& params) {
  params.validate();
  if (img.width() < params.tiles_x || img.height() < params.tiles_y) {
    throw ArgumentError("clahe: image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + " smaller than tile grid " +
                        std::to_string(params.tiles_x) + "x" + std::to_string(params.tiles_y));
  }
  ClaheTiles tiles;
  tiles.x_edges = tile_edges(img.width(), params.tiles_x);
  tiles.y_edges = tile_edges(img.height(), params.tiles_y);
  for (int ty = 0; ty < params.tiles_y; ++ty) {
    for (int tx = 0; tx < params.tiles_x; ++tx) {
      std::array<std::size_t, kLevels> bins{};
      for (int y = tiles.y_edges[ty]; y < tiles.y_edges[ty + 1]; ++y) {
        for (int x = tiles.x_edges[tx]; x < tiles.x_edges[tx + 1]; ++x) ++bins[img(x, y)];
      }
      const auto m = static_cast<std::size_t>(tiles.x_edges[tx + 1] - tiles.x_edges[tx]) *
                     static_cast<std::size_t>(tiles.y_edges[ty + 1] - tiles.y_edges[ty]);
      auto clipped = clip_histogram(bins, clip_limit(m, params));
      tiles.luts.push_back(equalization_lut(clipped.redistributed, static_cast<double>(m)));
      tiles.histograms.push_back(clipped);
    }
  }
  return tiles;
}

namespace detail {

struct Blend {
  int lo = 0;
  int hi = 0;
  double w = 0.0;  // weight of `hi`
};

// Position of pixel `p` between the two nearest tile centers.
inline Blend blend_axis(const std::vector<int>& edges, int p) {
  const int tiles = static_cast<int>(edges.size()) - 1;
  auto center = [&](int t) { return edges[t] + (edges[t + 1] - edges[t] - 1) / 2.0; };
  if (p <= center(0)) return {0, 0, 0.0};
  if (p >= center(tiles - 1)) return {tiles - 1, tiles - 1, 0.0};
  int t = 0;
  while (center(t + 1) <= p) ++t;
  return {t, t + 1, (p - center(t)) / (center(t + 1) - center(t))};
}

}  // namespace detail

inline GrayImage clahe(const GrayImage& img, const ClaheParams& params = {}) {
  const ClaheTiles tiles = clahe_tiles(img, params);
  std::vector<detail::Blend> bx(static_cast<std::size_t>(img.width()));
  for (int x = 0; x < img.width(); ++x) bx[x] = detail::blend_axis(tiles.x_edges, x);

  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const auto by = detail::blend_axis(tiles.y_edges, y);
    for (int x = 0; x < img.width(); ++x) {
      const auto v = img(x, y);
      const auto& h = bx[x];
      const double top =
          (1.0 - h.w) * tiles.lut(h.lo, by.lo)[v] + h.w * tiles.lut(h.hi, by.lo)[v];
      const double bottom =
          (1.0 - h.w) * tiles.lut(h.lo, by.hi)[v] + h.w * tiles.lut(h.hi, by.hi)[v];
      out(x, y) = to_level((1.0 - by.w) * top + by.w * bottom);
    }
  }
  return out;
}

/// CLAHE followed by a global equalization pass.
inline GrayImage enhance_clahe_he(const GrayImage& img, const ClaheParams& params = {}) {
  return equalize_hist(clahe(img, params));
}

}  // namespace fishseg
