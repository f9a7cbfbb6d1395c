#pragma once

// Binary PNM codec (P5 gray, P6 RGB, maxval 255).
//
// The encoder always writes the canonical header "Pn\n<w> <h>\n255\n" followed by
// the raw payload, so load_pnm(save_pnm(x)) == x bit-exactly.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fishseg/image.hpp"

namespace fishseg {

using Bytes = std::vector<std::uint8_t>;
using AnyImage = std::variant<RasterImage, GrayImage>;

namespace detail {

class PnmReader {
 public:
  explicit PnmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string magic() {
    if (bytes_.size() < 2) throw DecodeError("magic", "input shorter than magic number");
    std::string m{static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
    pos_ = 2;
    return m;
  }

  long long number(const char* field) {
    skip_separators(field);
    if (pos_ >= bytes_.size()) throw DecodeError(field, "header ends before value");
    if (!std::isdigit(bytes_[pos_])) {
      throw DecodeError(field, std::string("unexpected character '") +
                                   static_cast<char>(bytes_[pos_]) + "'");
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1LL << 31)) throw DecodeError(field, "value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DecodeError("maxval", "missing whitespace before payload");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> payload(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw DecodeError("payload", "truncated: expected " + std::to_string(n) + " bytes, got " +
                                       std::to_string(bytes_.size() - pos_));
    }
    return bytes_.subspan(pos_, n);
  }

 private:
  void skip_separators(const char* field) {
    bool any = false;
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (std::isspace(c)) {
        ++pos_;
        any = true;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
        any = true;
      } else {
        break;
      }
    }
    if (!any) throw DecodeError(field, "missing separator before value");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline void append(Bytes& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

inline Bytes header(char kind, int w, int h) {
  Bytes out;
  append(out, std::string("P") + kind + "\n" + std::to_string(w) + " " + std::to_string(h) +
                  "\n255\n");
  return out;
}

}  // namespace detail

inline AnyImage load_pnm(std::span<const std::uint8_t> bytes) {
  detail::PnmReader in(bytes);
  const std::string magic = in.magic();
  if (magic != "P5" && magic != "P6") throw DecodeError("magic", "unsupported magic '" + magic + "'");

  const long long w = in.number("width");
  const long long h = in.number("height");
  const long long maxval = in.number("maxval");
  if (w <= 0) throw DecodeError("width", "must be positive");
  if (h <= 0) throw DecodeError("height", "must be positive");
  if (maxval != 255) throw DecodeError("maxval", "unsupported maxval " + std::to_string(maxval));
  in.end_of_header();

  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (magic == "P5") {
    auto data = in.payload(n);
    return GrayImage(static_cast<int>(w), static_cast<int>(h),
                     std::vector<std::uint8_t>(data.begin(), data.end()));
  }
  auto data = in.payload(3 * n);
  std::vector<Rgb> px(n);
  for (std::size_t i = 0; i < n; ++i) px[i] = Rgb{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  return RasterImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

inline Bytes save_pnm(const GrayImage& img) {
  Bytes out = detail::header('5', img.width(), img.height());
  out.insert(out.end(), img.begin(), img.end());
  return out;
}

inline Bytes save_pnm(const RasterImage& img) {
  Bytes out = detail::header('6', img.width(), img.height());
  out.reserve(out.size() + 3 * img.size());
  for (const Rgb& p : img) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

inline Bytes save_pnm(const BinaryImage& img) { return save_pnm(to_gray(img)); }

/// Promotes a decoded image to RGB; gray inputs are replicated per channel.
inline RasterImage as_rgb(const AnyImage& img) {
  if (const auto* rgb = std::get_if<RasterImage>(&img)) return *rgb;
  return to_rgb(std::get<GrayImage>(img));
}

/// Reduces a decoded image to gray; RGB inputs go through to_grayscale.
inline GrayImage as_gray(const AnyImage& img) {
  if (const auto* g = std::get_if<GrayImage>(&img)) return *g;
  return to_grayscale(std::get<RasterImage>(img));
}

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline AnyImage read_pnm(const std::filesystem::path& path) { return load_pnm(read_file(path)); }

template <typename Image>
void write_pnm(const std::filesystem::path& path, const Image& img) {
  write_file(path, save_pnm(img));
}

}  // namespace fishseg
