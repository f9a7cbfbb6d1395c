// Generates the bundled synthetic fish images: a rotated elliptical body with a
// tail fin, dorsal stripe and eye over a water-like background (vertical
// gradient, low ripples, mild sensor noise).
//
//   make_fixtures <output-dir>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include "fishseg/pnm.hpp"

namespace {

struct FishSpec {
  int width;
  int height;
  double cx, cy;     // body center, fraction of image size
  double rx, ry;     // semi-axes, fraction of width
  double angle_deg;  // body tilt
  fishseg::Rgb body;
  fishseg::Rgb stripe;
  fishseg::Rgb water_top;
  fishseg::Rgb water_bottom;
};

double lerp(double a, double b, double t) { return a + (b - a) * t; }

fishseg::RasterImage render(const FishSpec& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.5);
  fishseg::RasterImage img(f.width, f.height);

  const double cx = f.cx * f.width;
  const double cy = f.cy * f.height;
  const double rx = f.rx * f.width;
  const double ry = f.ry * f.width;
  const double a = f.angle_deg * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);

  for (int y = 0; y < f.height; ++y) {
    const double t = static_cast<double>(y) / (f.height - 1);
    for (int x = 0; x < f.width; ++x) {
      const double ripple = 3.0 * std::sin(x * 0.21 + 1.7 * std::sin(y * 0.13)) *
                            std::cos(y * 0.17 - x * 0.05);
      double r = lerp(f.water_top.r, f.water_bottom.r, t) + ripple;
      double g = lerp(f.water_top.g, f.water_bottom.g, t) + ripple;
      double b = lerp(f.water_top.b, f.water_bottom.b, t) + ripple;

      // Body frame: u along the fish, v across it.
      const double dx = x - cx, dy = y - cy;
      const double u = (dx * ca + dy * sa) / rx;
      const double v = (-dx * sa + dy * ca) / ry;
      const bool in_body = u * u + v * v <= 1.0;
      // Tail: triangle behind the body, widening away from it.
      const bool in_tail = u < -0.85 && u > -1.45 && std::abs(v) < (-u - 0.85) * 1.6;
      if (in_body || in_tail) {
        const double shade = 1.0 - 0.12 * v;  // lit from above
        r = f.body.r * shade;
        g = f.body.g * shade;
        b = f.body.b * shade;
        if (in_body && v < -0.35 && std::abs(u) < 0.6) {
          r = f.stripe.r;
          g = f.stripe.g;
          b = f.stripe.b;
        }
        const double eu = u - 0.62, ev = v + 0.1;
        if (eu * eu + ev * ev < 0.012) r = g = b = 20.0;
      }
      img(x, y) = fishseg::Rgb{fishseg::to_level(r + noise(rng)), fishseg::to_level(g + noise(rng)),
                               fishseg::to_level(b + noise(rng))};
    }
  }
  return img;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out);

  const FishSpec specs[] = {
      {434, 243, 0.50, 0.50, 0.28, 0.10, 0.0, {200, 140, 60}, {120, 70, 30}, {40, 110, 150}, {20, 60, 90}},
      {320, 200, 0.45, 0.55, 0.25, 0.09, 12.0, {210, 190, 80}, {90, 80, 40}, {60, 120, 140}, {30, 70, 80}},
      {300, 300, 0.55, 0.45, 0.30, 0.12, -20.0, {180, 60, 50}, {240, 230, 220}, {50, 100, 130}, {20, 50, 70}},
      {400, 220, 0.50, 0.50, 0.22, 0.08, 5.0, {150, 150, 160}, {60, 60, 70}, {70, 130, 120}, {30, 80, 70}},
      {256, 192, 0.40, 0.60, 0.30, 0.11, -8.0, {230, 120, 30}, {250, 250, 250}, {30, 90, 140}, {10, 40, 80}},
      {360, 240, 0.60, 0.40, 0.24, 0.09, 30.0, {100, 140, 60}, {50, 70, 30}, {80, 140, 170}, {40, 80, 110}},
      {280, 210, 0.50, 0.50, 0.32, 0.13, 0.0, {190, 170, 150}, {110, 90, 80}, {40, 100, 110}, {15, 55, 60}},
      {420, 260, 0.45, 0.50, 0.26, 0.10, -15.0, {220, 200, 40}, {30, 30, 30}, {50, 120, 160}, {25, 60, 100}},
      {240, 240, 0.50, 0.55, 0.30, 0.12, 45.0, {170, 90, 140}, {230, 170, 210}, {60, 110, 120}, {20, 60, 70}},
      {380, 200, 0.55, 0.50, 0.23, 0.08, -5.0, {140, 170, 190}, {60, 90, 120}, {30, 80, 100}, {10, 40, 50}},
  };

  int i = 0;
  for (const auto& spec : specs) {
    char name[32];
    std::snprintf(name, sizeof name, "fish_%02d.ppm", i);
    fishseg::write_pnm(out / name, render(spec, 1000 + i));
    ++i;
  }
  std::cout << "wrote " << i << " fixtures to " << out << "\n";
  return 0;
}
