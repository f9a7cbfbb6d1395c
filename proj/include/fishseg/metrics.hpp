#pragma once

// Structural similarity (SSIM) and batch distribution summaries.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fishseg/image.hpp"

namespace fishseg {

/// SSIM = l^exp_l * c^exp_c * s^exp_s averaged over every full Gaussian window.
struct SsimParams {
  double exp_l = 1.0;
  double exp_c = 1.0;
  double exp_s = 1.0;
  double dynamic_range = 255.0;
  double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double c3 = (0.03 * 255.0) * (0.03 * 255.0) / 2.0;
  int window = 11;
  double window_sigma = 1.5;

  void validate() const {
    if (!(exp_l > 0.0 && exp_c > 0.0 && exp_s > 0.0)) throw ArgumentError("ssim: exponents must be > 0");
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) throw ArgumentError("ssim: constants must be > 0");
    if (window < 1) throw ArgumentError("ssim: window size must be >= 1");
    if (!(window_sigma > 0.0)) throw ArgumentError("ssim: window sigma must be > 0");
  }
};

/// Sum in a fixed binary-tree order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

inline std::vector<double> ssim_window(const SsimParams& p) {
  std::vector<double> k(static_cast<std::size_t>(p.window));
  const double c = (p.window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < p.window; ++i) {
    k[i] = std::exp(-((i - c) * (i - c)) / (2.0 * p.window_sigma * p.window_sigma));
    sum += k[i];
  }
  std::vector<double> w(k.size() * k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    for (std::size_t i = 0; i < k.size(); ++i) w[j * k.size() + i] = k[j] * k[i] / (sum * sum);
  }
  return w;
}

// Odd extension keeps negative structure terms finite for non-integer exponents.
inline double signed_pow(double base, double e) {
  if (e == 1.0) return base;
  return base < 0.0 ? -std::pow(-base, e) : std::pow(base, e);
}

}  // namespace detail

/// Per-window SSIM map over all window positions fully inside the images.
inline std::vector<double> ssim_map(const GrayImage& x, const GrayImage& y,
                                    const SsimParams& params = {}) {
  params.validate();
  require_same_shape(x, y, "ssim");
  const int n = params.window;
  if (x.width() < n || x.height() < n) {
    throw ArgumentError("ssim: image " + std::to_string(x.width()) + "x" +
                        std::to_string(x.height()) + " smaller than " + std::to_string(n) +
                        "x" + std::to_string(n) + " window");
  }
  const auto w = detail::ssim_window(params);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(x.width() - n + 1) *
                 static_cast<std::size_t>(x.height() - n + 1));
  for (int oy = 0; oy + n <= x.height(); ++oy) {
    for (int ox = 0; ox + n <= x.width(); ++ox) {
      double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double wt = w[static_cast<std::size_t>(j) * n + i];
          const double a = x(ox + i, oy + j);
          const double b = y(ox + i, oy + j);
          mx += wt * a;
          my += wt * b;
          mxx += wt * a * a;
          myy += wt * b * b;
          mxy += wt * a * b;
        }
      }
      const double vx = std::max(0.0, mxx - mx * mx);
      const double vy = std::max(0.0, myy - my * my);
      const double cov = mxy - mx * my;
      const double sx = std::sqrt(vx);
      const double sy = std::sqrt(vy);
      const double l = (2.0 * mx * my + params.c1) / (mx * mx + my * my + params.c1);
      const double c = (2.0 * sx * sy + params.c2) / (vx + vy + params.c2);
      const double s = (cov + params.c3) / (sx * sy + params.c3);
      values.push_back(detail::signed_pow(l, params.exp_l) * detail::signed_pow(c, params.exp_c) *
                       detail::signed_pow(s, params.exp_s));
    }
  }
  return values;
}

inline double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params = {}) {
  const auto m = ssim_map(x, y, params);
  return pairwise_sum(m) / static_cast<double>(m.size());
}

struct SsimReport {
  std::vector<std::string> names;  // optional, parallel to `values`
  std::vector<double> values;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> edges;         // bins + 1 edges over [0, 1]
  std::vector<std::size_t> counts;   // values below 0 land in the first bin
};

inline SsimReport summarize_ssim(std::vector<double> values, std::vector<std::string> names = {},
                                 int bins = 50) {
  if (values.empty()) throw ArgumentError("ssim distribution: no values");
  if (bins < 1) throw ArgumentError("ssim distribution: bins must be >= 1");
  SsimReport r;
  r.values = std::move(values);
  r.names = std::move(names);
  r.mean = pairwise_sum(r.values) / static_cast<double>(r.values.size());
  const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
  r.min = *lo;
  r.max = *hi;
  r.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) r.edges[i] = static_cast<double>(i) / bins;
  r.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : r.values) {
    const int b = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    ++r.counts[b];
  }
  return r;
}

using ImagePair = std::pair<GrayImage, GrayImage>;

inline SsimReport ssim_distribution(std::span<const ImagePair> pairs, const SsimParams& params = {},
                                    int bins = 50) {
  if (pairs.empty()) throw ArgumentError("ssim distribution: empty pair list");
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& [a, b] : pairs) values.push_back(ssim(a, b, params));
  return summarize_ssim(std::move(values), {}, bins);
}

/// Shortest round-trip decimal form.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json to_json(const SsimReport& r) {
  nlohmann::ordered_json j;
  j["values"] = r.values;
  j["mean"] = r.mean;
  j["min"] = r.min;
  j["max"] = r.max;
  j["histogram"] = {{"edges", r.edges}, {"counts", r.counts}};
  return j;
}

/// name,ssim rows; unnamed reports use the pair index as the name.
inline std::string to_csv(const SsimReport& r) {
  std::string out = "name,ssim\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    out += i < r.names.size() ? r.names[i] : std::to_string(i);
    out += ',';
    out += format_real(r.values[i]);
    out += '\n';
  }
  return out;
}

}  // namespace fishseg
