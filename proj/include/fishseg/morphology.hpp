#pragma once

// Binary morphology with flat structuring elements.
//
// Pixels outside the image are background for both erosion and dilation.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fishseg/image.hpp"

namespace fishseg {

struct Offset {
  int dx = 0;
  int dy = 0;

  friend auto operator<=>(const Offset&, const Offset&) = default;
};

/// Structuring element: a non-empty set of lattice offsets around the origin.
class Strel {
 public:
  Strel(std::vector<Offset> offsets, std::string descriptor)
      : offsets_(std::move(offsets)), descriptor_(std::move(descriptor)) {
    if (offsets_.empty()) throw ArgumentError("strel: empty offset set");
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  }

  const std::vector<Offset>& offsets() const noexcept { return offsets_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  int radius() const noexcept {
    int r = 0;
    for (const auto& o : offsets_) r = std::max({r, std::abs(o.dx), std::abs(o.dy)});
    return r;
  }

  Strel reflect() const {
    std::vector<Offset> r;
    r.reserve(offsets_.size());
    for (const auto& o : offsets_) r.push_back({-o.dx, -o.dy});
    return Strel(std::move(r), "reflect(" + descriptor_ + ")");
  }

  /// Equality is on the offset set only.
  friend bool operator==(const Strel& a, const Strel& b) { return a.offsets_ == b.offsets_; }

 private:
  std::vector<Offset> offsets_;
  std::string descriptor_;
};

inline Strel single_strel() { return Strel({{0, 0}}, "single"); }

/// `length` collinear points centered on the origin. Angles are measured
/// counter-clockwise on screen, so 45 degrees steps by (+1, -1) in image rows.
inline Strel make_line_strel(int length, int angle_deg) {
  if (length < 1) throw ArgumentError("line strel: length must be >= 1");
  Offset step;
  switch (angle_deg) {
    case 0: step = {1, 0}; break;
    case 45: step = {1, -1}; break;
    case 90: step = {0, -1}; break;
    case 135: step = {-1, -1}; break;
    default:
      throw ArgumentError("line strel: unsupported angle " + std::to_string(angle_deg) +
                          " (expected 0, 45, 90 or 135)");
  }
  std::vector<Offset> offsets;
  const int lo = -((length - 1) / 2);
  for (int t = lo; t < lo + length; ++t) offsets.push_back({t * step.dx, t * step.dy});
  return Strel(std::move(offsets),
               "line:" + std::to_string(length) + ":" + std::to_string(angle_deg));
}

inline Strel make_box_strel(int w, int h) {
  if (w < 1 || h < 1) throw ArgumentError("box strel: dimensions must be >= 1");
  std::vector<Offset> offsets;
  const int x0 = -((w - 1) / 2);
  const int y0 = -((h - 1) / 2);
  for (int dy = y0; dy < y0 + h; ++dy) {
    for (int dx = x0; dx < x0 + w; ++dx) offsets.push_back({dx, dy});
  }
  return Strel(std::move(offsets), "box:" + std::to_string(w) + "x" + std::to_string(h));
}

namespace detail {

inline int parse_int(std::string_view s, std::string_view desc) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ArgumentError("malformed strel descriptor '" + std::string(desc) + "'");
  }
  return v;
}

}  // namespace detail

/// Parses "line:<len>:<angle>", "box:<w>x<h>" or "single".
inline Strel parse_strel(std::string_view desc) {
  if (desc == "single") return single_strel();
  if (desc.starts_with("line:")) {
    const auto rest = desc.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw ArgumentError("malformed strel descriptor '" + std::string(desc) + "'");
    }
    return make_line_strel(detail::parse_int(rest.substr(0, colon), desc),
                           detail::parse_int(rest.substr(colon + 1), desc));
  }
  if (desc.starts_with("box:")) {
    const auto rest = desc.substr(4);
    const auto x = rest.find('x');
    if (x == std::string_view::npos) {
      throw ArgumentError("malformed strel descriptor '" + std::string(desc) + "'");
    }
    return make_box_strel(detail::parse_int(rest.substr(0, x), desc),
                          detail::parse_int(rest.substr(x + 1), desc));
  }
  throw ArgumentError("unknown strel descriptor '" + std::string(desc) + "'");
}

namespace detail {

inline bool is_fg(const BinaryImage& img, int x, int y) {
  return img.contains(x, y) && img(x, y) == Mark::foreground;
}

}  // namespace detail

inline BinaryImage erode(const BinaryImage& img, const Strel& s) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      bool all = true;
      for (const auto& o : s.offsets()) {
        if (!detail::is_fg(img, x + o.dx, y + o.dy)) {
          all = false;
          break;
        }
      }
      out(x, y) = all ? Mark::foreground : Mark::background;
    }
  }
  return out;
}

inline BinaryImage dilate(const BinaryImage& img, const Strel& s) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      bool any = false;
      for (const auto& o : s.offsets()) {
        if (detail::is_fg(img, x - o.dx, y - o.dy)) {
          any = true;
          break;
        }
      }
      out(x, y) = any ? Mark::foreground : Mark::background;
    }
  }
  return out;
}

inline BinaryImage open(const BinaryImage& img, const Strel& s) { return dilate(erode(img, s), s); }

inline BinaryImage close(const BinaryImage& img, const Strel& s) { return erode(dilate(img, s), s); }

inline BinaryImage complement(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = img[i] == Mark::foreground ? Mark::background : Mark::foreground;
  }
  return out;
}

namespace detail {

// 8-neighborhood in ring order.
inline constexpr std::array<Offset, 8> kRing{
    {{-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}}};

// True iff the foreground pixels among the 8 neighbors of (x, y) form exactly
// one 8-connected set when only neighbor-to-neighbor links are considered.
inline bool neighbors_single_component(const BinaryImage& img, int x, int y) {
  std::array<bool, 8> fg{};
  int count = 0;
  for (int i = 0; i < 8; ++i) {
    fg[i] = is_fg(img, x + kRing[i].dx, y + kRing[i].dy);
    count += fg[i];
  }
  if (count == 0) return false;

  std::array<bool, 8> seen{};
  std::array<int, 8> stack{};
  int top = 0;
  int first = 0;
  while (!fg[first]) ++first;
  stack[top++] = first;
  seen[first] = true;
  int reached = 0;
  while (top > 0) {
    const int i = stack[--top];
    ++reached;
    for (int j = 0; j < 8; ++j) {
      if (!fg[j] || seen[j]) continue;
      if (std::abs(kRing[i].dx - kRing[j].dx) <= 1 && std::abs(kRing[i].dy - kRing[j].dy) <= 1) {
        seen[j] = true;
        stack[top++] = j;
      }
    }
  }
  return reached == count;
}

}  // namespace detail

/// Grows foreground by connectivity-preserving layers. Candidates for a pass
/// are the background pixels 8-adjacent to foreground at the start of that
/// pass; in raster order each is admitted iff its current foreground
/// neighbors form one 8-connected set, so distinct components never merge.
/// Runs `passes` passes, or until nothing changes when `passes` is empty.
inline BinaryImage thicken(const BinaryImage& img, std::optional<int> passes = 1) {
  if (passes && *passes < 0) throw ArgumentError("thicken: negative pass count");
  BinaryImage cur = img;
  for (int pass = 0; !passes || pass < *passes; ++pass) {
    const BinaryImage start = cur;
    bool changed = false;
    for (int y = 0; y < cur.height(); ++y) {
      for (int x = 0; x < cur.width(); ++x) {
        if (start(x, y) == Mark::foreground) continue;
        bool touches = false;
        for (const auto& o : detail::kRing) {
          if (detail::is_fg(start, x + o.dx, y + o.dy)) {
            touches = true;
            break;
          }
        }
        if (touches && detail::neighbors_single_component(cur, x, y)) {
          cur(x, y) = Mark::foreground;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return cur;
}

}  // namespace fishseg
