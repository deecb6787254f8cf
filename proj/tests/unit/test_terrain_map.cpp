#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "artnav/errors.hpp"
#include "artnav/terrain_map.hpp"
#include "oracles.hpp"

using namespace artnav;

namespace {

HeightMap flat(int n, double z, double res = 0.04) {
  HeightMap m(n, n, res, {0.0, 0.0});
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) m.set_elevation({ix, iy}, z);
  return m;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(TerrainMap, DefaultIs8mAt4cm) {
  HeightMap m;
  EXPECT_EQ(m.size_x(), 200);
  EXPECT_EQ(m.size_y(), 200);
  EXPECT_DOUBLE_EQ(m.resolution(), 0.04);
  EXPECT_TRUE(std::isnan(m.elevation({5, 5})));
  EXPECT_FALSE(m.observed({5, 5}));
}

TEST(TerrainMap, RejectsBadDimensions) {
  EXPECT_THROW(HeightMap(0, 5, 0.04, {0, 0}), std::invalid_argument);
  EXPECT_THROW(HeightMap(5, 5, 0.0, {0, 0}), std::invalid_argument);
  EXPECT_THROW(HeightMap(5, 5, -1.0, {0, 0}), std::invalid_argument);
}

TEST(TerrainMap, FootholdRange) {
  HeightMap m(3, 3, 0.1, {0, 0});
  EXPECT_THROW(m.set_foothold({1, 1}, 1.5), std::invalid_argument);
  EXPECT_THROW(m.set_foothold({1, 1}, -0.1), std::invalid_argument);
  m.set_foothold({1, 1}, kUnknown);
  m.set_foothold({1, 1}, 0.0);
  m.set_foothold({1, 1}, 1.0);
  EXPECT_EQ(m.foothold({1, 1}), 1.0);
}

TEST(TerrainMap, WorldToCellExamples) {
  HeightMap m(200, 200, 0.04, {-4.0, -4.0});
  auto c = m.world_to_cell(-4.0, -4.0);
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, (CellIndex{0, 0}));
  for (int k : {1, 7, 100, 199}) {
    c = m.world_to_cell(-4.0 + 0.04 * k, -4.0);
    ASSERT_TRUE(c);
    EXPECT_EQ(*c, (CellIndex{k, 0}));
  }
  EXPECT_FALSE(m.world_to_cell(-4.03, 0.0));
  EXPECT_FALSE(m.world_to_cell(0.0, 4.0));
  EXPECT_FALSE(m.world_to_cell(std::nan(""), 0.0));
}

TEST(TerrainMap, WorldToCellMatchesNearestCenter) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  HeightMap m(25, 17, 0.05, {0.1, -0.2});
  for (int i = 0; i < 5000; ++i) {
    const double x = u(rng), y = u(rng);
    int best_x = -1, best_y = -1;
    double bx = 1e9, by = 1e9;
    for (int ix = -2; ix < 30; ++ix) {
      const double d = std::abs(x - (0.1 + 0.05 * ix));
      if (d < bx) bx = d, best_x = ix;
    }
    for (int iy = -2; iy < 30; ++iy) {
      const double d = std::abs(y - (-0.2 + 0.05 * iy));
      if (d < by) by = d, best_y = iy;
    }
    const auto c = m.world_to_cell(x, y);
    const bool inside = best_x >= 0 && best_x < 25 && best_y >= 0 && best_y < 17;
    ASSERT_EQ(c.has_value(), inside);
    if (inside) {
      EXPECT_EQ(*c, (CellIndex{best_x, best_y}));
    }
  }
}

TEST(TerrainMap, EffectiveElevation) {
  HeightMap m(3, 1, 0.1, {0, 0});
  m.set_sensor_z(0.5);
  m.set_elevation({0, 0}, 0.2);
  m.set_upper_bound({1, 0}, 0.7);
  m.set_upper_bound({2, 0}, 0.3);
  EXPECT_EQ(m.effective_elevation({0, 0}), 0.2);
  EXPECT_EQ(m.effective_elevation({1, 0}), 0.7);
  EXPECT_TRUE(std::isnan(m.effective_elevation({2, 0})));
}

TEST(TerrainMap, ElevationAtExamples) {
  const HeightMap f = flat(10, 0.5);
  EXPECT_DOUBLE_EQ(f.elevation_at(0.13, 0.21), 0.5);

  HeightMap m(2, 2, 1.0, {0, 0});
  m.set_elevation({0, 0}, 0.0);
  m.set_elevation({1, 0}, 0.0);
  m.set_elevation({0, 1}, 1.0);
  m.set_elevation({1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(m.elevation_at(0.5, 0.5), 0.5);

  HeightMap p(2, 2, 1.0, {0, 0});
  p.set_elevation({0, 0}, 0.2);
  p.set_elevation({1, 0}, 0.2);
  p.set_elevation({0, 1}, 0.2);
  EXPECT_DOUBLE_EQ(p.elevation_at(0.5, 0.5), 0.2);

  HeightMap u(2, 2, 1.0, {0, 0});
  EXPECT_TRUE(std::isnan(u.elevation_at(0.5, 0.5)));
  EXPECT_TRUE(std::isnan(m.elevation_at(5.0, 5.0)));
}

TEST(TerrainMap, ElevationAtCellCentersIsExact) {
  std::mt19937_64 rng(11);
  const HeightMap m = oracle::random_map(rng, 40, 0.05);
  for (int iy = 0; iy < m.size_y(); ++iy) {
    for (int ix = 0; ix < m.size_x(); ++ix) {
      const double v = m.elevation({ix, iy});
      const Vec2 c = m.cell_center({ix, iy});
      const double got = m.elevation_at(c.x, c.y);
      if (is_known(v)) {
        EXPECT_EQ(got, v) << ix << "," << iy;
      }
    }
  }
}

TEST(TerrainMap, RecenterExamples) {
  std::mt19937_64 rng(5);
  const HeightMap m = oracle::random_map(rng, 200, 0.04);
  EXPECT_EQ(m.recentered(m.grid_center()), m);

  const Vec2 c = m.grid_center();
  const HeightMap s = m.recentered({c.x + 10 * 0.04, c.y});
  EXPECT_NEAR(s.origin().x, m.origin().x + 0.4, 1e-12);
  for (int iy = 0; iy < 200; ++iy) {
    for (int ix = 10; ix < 200; ++ix) {
      EXPECT_TRUE(same_bits(m.elevation({ix, iy}), s.elevation({ix - 10, iy})));
      EXPECT_EQ(m.steppable({ix, iy}), s.steppable({ix - 10, iy}));
    }
    for (int ix = 190; ix < 200; ++ix) {
      EXPECT_TRUE(std::isnan(s.elevation({ix, iy})));
      EXPECT_FALSE(s.observed({ix, iy}));
    }
  }

  const HeightMap far = m.recentered({c.x + 250 * 0.04, c.y});
  for (int iy = 0; iy < 200; ++iy)
    for (int ix = 0; ix < 200; ++ix) ASSERT_TRUE(std::isnan(far.elevation({ix, iy})));
}

TEST(TerrainMap, RecenterWithinHalfCell) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const HeightMap m(50, 30, 0.04, {0.0, 0.0});
  for (int i = 0; i < 200; ++i) {
    const Vec2 target{u(rng), u(rng)};
    const Vec2 g = m.recentered(target).grid_center();
    EXPECT_LE(std::abs(g.x - target.x), 0.02 + 1e-9);
    EXPECT_LE(std::abs(g.y - target.y), 0.02 + 1e-9);
  }
}

TEST(TerrainMap, RecenterAndBackKeepsSurvivingCells) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> shift(-30, 30);
  const HeightMap m = oracle::random_map(rng, 60, 0.05);
  const Vec2 c = m.grid_center();
  for (int i = 0; i < 20; ++i) {
    const int dx = shift(rng), dy = shift(rng);
    const HeightMap back = m.recentered({c.x + dx * 0.05, c.y + dy * 0.05}).recentered(c);
    for (int iy = 0; iy < 60; ++iy) {
      for (int ix = 0; ix < 60; ++ix) {
        const bool in_both = ix - dx >= 0 && ix - dx < 60 && iy - dy >= 0 && iy - dy < 60;
        if (in_both) {
          ASSERT_TRUE(same_bits(back.elevation({ix, iy}), m.elevation({ix, iy})));
          ASSERT_TRUE(same_bits(back.upper_bound({ix, iy}), m.upper_bound({ix, iy})));
        } else {
          ASSERT_TRUE(std::isnan(back.elevation({ix, iy})));
        }
      }
    }
  }
}

TEST(TerrainMap, RoundTripSmall) {
  HeightMap m(3, 3, 0.04, {-0.04, -0.04});
  m.set_sensor_z(0.55);
  for (int iy = 0; iy < 3; ++iy)
    for (int ix = 0; ix < 3; ++ix) {
      m.set_elevation({ix, iy}, 0.1 * ix + 0.01 * iy);
      m.set_observed({ix, iy}, true);
    }
  m.set_elevation({1, 1}, kUnknown);
  m.set_observed({1, 1}, false);
  std::stringstream s;
  write_map(s, m);
  EXPECT_EQ(read_map(s), m);
}

TEST(TerrainMap, RoundTripRandomIsBitExact) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5; ++i) {
    const HeightMap m = oracle::random_map(rng, 30 + i * 7, 0.03 + 0.01 * i);
    std::stringstream s;
    write_map(s, m);
    const HeightMap back = read_map(s);
    EXPECT_EQ(back, m);
    std::stringstream again;
    write_map(again, back);
    EXPECT_EQ(again.str(), s.str());
  }
}

TEST(TerrainMap, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_TRUE(same_bits(parse_double(format_double(v)), v));
  }
  EXPECT_EQ(format_double(kUnknown), "nan");
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_THROW(parse_double("1.5x"), FormatError);
}

TEST(TerrainMap, VersionGate) {
  std::istringstream s("ahm 2\nsize 1 1\nresolution 0.04\norigin 0 0\n");
  try {
    read_map(s);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST(TerrainMap, MalformedFilesRejected) {
  const char* bad[] = {
      "",
      "hello 1\n",
      "ahm 1\nsize 2 2\nresolution 0.04\n",
      "ahm 1\nsize 2 2\nresolution inf\norigin 0 0\n",
      "ahm 1\nsize 2 2\nresolution 0\norigin 0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer elevation\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer elevation\n0 0\n0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer elevation\n0 0\n0 0\nlayer elevation\n0 0\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer depth\n0 0\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer foothold\n0 2\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer observed\n0 2\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer elevation\n0 inf\n0 0\n",
      "ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nwidth 3\n",
  };
  for (const char* text : bad) {
    std::istringstream s(text);
    EXPECT_THROW(read_map(s), FormatError) << text;
  }
}

TEST(TerrainMap, ErrorsCarryLineNumber) {
  std::istringstream s("ahm 1\nsize 2 2\nresolution 0.04\norigin 0 0\nlayer elevation\n0 0\n0 x\n");
  try {
    read_map(s);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(TerrainMap, LoadMissingFile) { EXPECT_THROW(load_map("/nonexistent/x.ahm"), FormatError); }
