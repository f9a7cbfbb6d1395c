#include <gtest/gtest.h>

#include <random>

#include "fishseg/morphology.hpp"
#include "test_support.hpp"

using namespace fishseg;

namespace {

BinaryImage from_rows(const std::vector<std::string>& rows) {
  BinaryImage img(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      img(x, y) = rows[y][x] == '#' ? Mark::foreground : Mark::background;
    }
  }
  return img;
}

bool subset(const BinaryImage& a, const BinaryImage& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Mark::foreground && b[i] != Mark::foreground) return false;
  }
  return true;
}

std::vector<Strel> property_strels() {
  return {make_box_strel(3, 3), make_box_strel(2, 3), make_line_strel(3, 45),
          make_line_strel(4, 0), make_line_strel(5, 135), make_line_strel(3, 90)};
}

}  // namespace

TEST(Strel, LineExamples) {
  EXPECT_EQ(make_line_strel(1, 45).offsets(), (std::vector<Offset>{{0, 0}}));
  EXPECT_EQ(make_line_strel(3, 45).offsets(), (std::vector<Offset>{{-1, 1}, {0, 0}, {1, -1}}));
  EXPECT_EQ(make_line_strel(3, 0).offsets(), (std::vector<Offset>{{-1, 0}, {0, 0}, {1, 0}}));
  EXPECT_EQ(make_line_strel(3, 90).offsets(), (std::vector<Offset>{{0, -1}, {0, 0}, {0, 1}}));
  EXPECT_EQ(make_line_strel(1, 45), single_strel());
}

TEST(Strel, BadArguments) {
  EXPECT_THROW(make_line_strel(3, 30), ArgumentError);
  EXPECT_THROW(make_line_strel(0, 45), ArgumentError);
  EXPECT_THROW(make_box_strel(0, 2), ArgumentError);
  EXPECT_THROW(Strel({}, "empty"), ArgumentError);
}

TEST(Strel, ReflectTwiceIsIdentity) {
  for (const auto& s : property_strels()) EXPECT_EQ(s.reflect().reflect(), s);
  EXPECT_EQ(make_line_strel(3, 45).reflect(), make_line_strel(3, 45));
  EXPECT_EQ(make_box_strel(2, 2).reflect().offsets(),
            (std::vector<Offset>{{-1, -1}, {-1, 0}, {0, -1}, {0, 0}}));
}

TEST(Strel, ParseDescriptors) {
  EXPECT_EQ(parse_strel("line:3:45"), make_line_strel(3, 45));
  EXPECT_EQ(parse_strel("box:3x2"), make_box_strel(3, 2));
  EXPECT_EQ(parse_strel("single"), single_strel());
  EXPECT_EQ(parse_strel("box:3x2").descriptor(), "box:3x2");
  EXPECT_THROW(parse_strel("line:3"), ArgumentError);
  EXPECT_THROW(parse_strel("line:a:45"), ArgumentError);
  EXPECT_THROW(parse_strel("box:3"), ArgumentError);
  EXPECT_THROW(parse_strel("disk:3"), ArgumentError);
}

TEST(Erode, FullBlockShrinksToCenter) {
  const BinaryImage full(5, 5, Mark::foreground);
  EXPECT_EQ(erode(full, make_box_strel(3, 3)),
            from_rows({".....", ".###.", ".###.", ".###.", "....."}));
}

TEST(Erode, IdentityAndEmpty) {
  std::mt19937_64 rng(1);
  const BinaryImage img = support::random_binary(9, 7, rng);
  EXPECT_EQ(erode(img, single_strel()), img);
  const BinaryImage empty(6, 6);
  EXPECT_EQ(erode(empty, make_box_strel(3, 3)), empty);
}

TEST(Dilate, CenterPixelGrowsToBlock) {
  const BinaryImage dot = from_rows({".....", ".....", "..#..", ".....", "....."});
  EXPECT_EQ(dilate(dot, make_box_strel(3, 3)),
            from_rows({".....", ".###.", ".###.", ".###.", "....."}));
}

TEST(Dilate, UsesReflectedOffsets) {
  // Asymmetric strel {(0,0), (1,0)}: a dot at x = 2 spreads to x = 2 and x = 3.
  const Strel s({{0, 0}, {1, 0}}, "pair");
  EXPECT_EQ(dilate(from_rows({"..#..."}), s), from_rows({"..##.."}));
  EXPECT_EQ(erode(from_rows({"..##.."}), s), from_rows({"..#..."}));
}

TEST(Dilate, IdentityAndEmpty) {
  std::mt19937_64 rng(2);
  const BinaryImage img = support::random_binary(9, 7, rng);
  EXPECT_EQ(dilate(img, single_strel()), img);
  const BinaryImage empty(6, 6);
  EXPECT_EQ(dilate(empty, make_box_strel(3, 3)), empty);
}

TEST(Open, RemovesIsolatedPixel) {
  const BinaryImage dot = from_rows({".....", ".....", "..#..", ".....", "....."});
  EXPECT_EQ(open(dot, make_box_strel(3, 3)), BinaryImage(5, 5));
}

TEST(Open, FullBlockRestored) {
  const BinaryImage full(5, 5, Mark::foreground);
  EXPECT_EQ(open(full, make_box_strel(3, 3)), full);
}

TEST(Close, FillsCenterHole) {
  const BinaryImage ring = from_rows({".....", ".###.", ".#.#.", ".###.", "....."});
  EXPECT_EQ(close(ring, make_box_strel(3, 3)),
            from_rows({".....", ".###.", ".###.", ".###.", "....."}));
}

TEST(OpenClose, SingleStrelIsIdentity) {
  std::mt19937_64 rng(3);
  const BinaryImage img = support::random_binary(12, 10, rng);
  EXPECT_EQ(open(img, single_strel()), img);
  EXPECT_EQ(close(img, single_strel()), img);
  EXPECT_EQ(close(BinaryImage(4, 4), make_box_strel(3, 3)), BinaryImage(4, 4));
}

TEST(Complement, Examples) {
  std::mt19937_64 rng(4);
  const BinaryImage img = support::random_binary(11, 13, rng);
  EXPECT_EQ(complement(complement(img)), img);
  EXPECT_EQ(complement(BinaryImage(3, 3, Mark::foreground)), BinaryImage(3, 3));
  EXPECT_EQ(foreground_count(img) + foreground_count(complement(img)), img.size());
}

TEST(MorphologyProperties, DualityOnPaddedImages) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    for (const auto& s : property_strels()) {
      const BinaryImage x = support::pad(support::random_binary(32, 32, rng), s.radius());
      EXPECT_EQ(erode(x, s), complement(dilate(complement(x), s.reflect())));
    }
  }
}

TEST(MorphologyProperties, Idempotence) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryImage x = support::random_binary(32, 32, rng);
    for (const auto& s : property_strels()) {
      const BinaryImage o = open(x, s);
      const BinaryImage c = close(x, s);
      EXPECT_EQ(open(o, s), o);
      EXPECT_EQ(close(c, s), c);
    }
  }
}

TEST(MorphologyProperties, Ordering) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryImage x = support::random_binary(32, 32, rng);
    for (const auto& s : property_strels()) {
      // Inclusions hold for strels containing the origin.
      EXPECT_TRUE(subset(erode(x, s), x));
      EXPECT_TRUE(subset(x, dilate(x, s)));
      EXPECT_TRUE(subset(open(x, s), x));
    }
  }
}

TEST(MorphologyProperties, CloseContainsInputAwayFromBorder) {
  // With background outside the image, closing can lose pixels on the border
  // for strels wider than one pixel; inclusion is exact on padded inputs.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    for (const auto& s : property_strels()) {
      const BinaryImage x = support::pad(support::random_binary(32, 32, rng), s.radius());
      EXPECT_TRUE(subset(x, close(x, s)));
    }
  }
}

TEST(Thicken, EmptyStaysEmpty) {
  EXPECT_EQ(thicken(BinaryImage(7, 7)), BinaryImage(7, 7));
  EXPECT_EQ(thicken(BinaryImage(7, 7), std::nullopt), BinaryImage(7, 7));
}

TEST(Thicken, SinglePixelGrows) {
  const BinaryImage dot = from_rows({".....", ".....", "..#..", ".....", "....."});
  const BinaryImage out = thicken(dot);
  EXPECT_TRUE(subset(dot, out));
  EXPECT_GT(foreground_count(out), 1u);
  EXPECT_EQ(support::count_components(out), 1);
}

TEST(Thicken, OnePixelGapNeverCloses) {
  const BinaryImage two = from_rows({".......", ".......", "..#.#..", ".......", "......."});
  for (int passes : {1, 2, 5}) EXPECT_EQ(support::count_components(thicken(two, passes)), 2);
  EXPECT_EQ(support::count_components(thicken(two, std::nullopt)), 2);
}

TEST(Thicken, TwoPixelGapNeverCloses) {
  const BinaryImage two = from_rows({"........", "........", "..#..#..", "........", "........"});
  for (int passes : {1, 3}) EXPECT_EQ(support::count_components(thicken(two, passes)), 2);
}

TEST(Thicken, ZeroPassesIsIdentity) {
  std::mt19937_64 rng(9);
  const BinaryImage img = support::random_binary(10, 10, rng, 0.2);
  EXPECT_EQ(thicken(img, 0), img);
  EXPECT_THROW(thicken(img, -1), ArgumentError);
}

TEST(Thicken, PreservesComponentCount) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> density(0.02, 0.35);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryImage x = support::random_binary(32, 32, rng, density(rng));
    const int before = support::count_components(x);
    for (std::optional<int> passes : {std::optional<int>(1), std::optional<int>(3), std::optional<int>()}) {
      const BinaryImage t = thicken(x, passes);
      EXPECT_TRUE(subset(x, t));
      EXPECT_EQ(support::count_components(t), before);
    }
  }
}

TEST(Thicken, UntilStableIsFixpoint) {
  std::mt19937_64 rng(11);
  const BinaryImage x = support::random_binary(20, 20, rng, 0.05);
  const BinaryImage t = thicken(x, std::nullopt);
  EXPECT_EQ(thicken(t, 1), t);
}
