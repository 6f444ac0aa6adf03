#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "trajrec/error.hpp"
#include "trajrec/geo.hpp"

namespace trajrec {
namespace {

using testing::square_grid;

constexpr double kDegree = std::numbers::pi / 180.0;

// Independent haversine used as the oracle.
double reference_haversine(double lat1, double lon1, double lat2, double lon2) {
  const double dlat = (lat2 - lat1) * kDegree;
  const double dlon = (lon2 - lon1) * kDegree;
  const double h = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(lat1 * kDegree) * std::cos(lat2 * kDegree) * std::pow(std::sin(dlon / 2), 2);
  return 2 * 6'371'008.8 * std::asin(std::sqrt(h));
}

// Cell rectangles in degrees, rebuilt from the box geometry alone.
struct Rect {
  double lat_lo, lat_hi, lon_lo, lon_hi;
};

std::vector<Rect> brute_rectangles(const GridSpec& g) {
  const double per_lat = kEarthRadiusMeters * kDegree;
  const double mid = (g.southwest().latitude + g.northeast().latitude) / 2 * kDegree;
  const double per_lon = per_lat * std::cos(mid);
  std::vector<Rect> out;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      const double s = g.cell_side();
      out.push_back({g.southwest().latitude + static_cast<double>(r) * s / per_lat,
                     std::min(g.northeast().latitude, g.southwest().latitude + static_cast<double>(r + 1) * s / per_lat),
                     g.southwest().longitude + static_cast<double>(c) * s / per_lon,
                     std::min(g.northeast().longitude, g.southwest().longitude + static_cast<double>(c + 1) * s / per_lon)});
    }
  }
  return out;
}

TEST(Distance, ZeroForSamePoint) {
  const GeoPoint p{39.9, 116.4};
  EXPECT_EQ(distance(p, p), 0.0);
}

TEST(Distance, Symmetric) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-179, 179);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    EXPECT_EQ(distance(a, b), distance(b, a));
  }
}

TEST(Distance, OneDegreeLatitudeAtEquator) {
  const double d = distance({0.0, 0.0}, {1.0, 0.0});
  EXPECT_NEAR(d, 111'195.0, 100.0);
  EXPECT_NEAR(d, reference_haversine(0, 0, 1, 0), 1e-6);
}

TEST(Distance, MatchesIndependentHaversine) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(39, 41), lon(115, 117);
  for (int i = 0; i < 200; ++i) {
    const double a = lat(rng), b = lon(rng), c = lat(rng), d = lon(rng);
    EXPECT_NEAR(distance({a, b}, {c, d}), reference_haversine(a, b, c, d), 1e-6);
  }
}

TEST(Distance, TriangleInequality) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-60, 60), lon(-170, 170);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-6);
  }
}

TEST(BuildGrid, OneSquareKilometerGivesKilometerCells) {
  const std::vector<GeoPoint> pts{{39.9, 116.3}, {40.0, 116.5}, {39.95, 116.4}};
  EXPECT_DOUBLE_EQ(build_grid(pts, 0.0, 1.0, 1'000'000.0).cell_side(), 1'000.0);
}

TEST(BuildGrid, FourSquareKilometersGivesTwoKilometerCells) {
  const std::vector<GeoPoint> pts{{41.1, -8.7}, {41.2, -8.5}};
  EXPECT_DOUBLE_EQ(build_grid(pts, 0.0, 1.0, 4'000'000.0).cell_side(), 2'000.0);
}

TEST(BuildGrid, IdenticalPointsAreDegenerate) {
  const std::vector<GeoPoint> pts{{39.9, 116.3}, {39.9, 116.3}};
  try {
    build_grid(pts, 0.0, 1.0, 1e6);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("latitude"), std::string::npos);
  }
}

TEST(BuildGrid, CollapsedLongitudeIsNamed) {
  const std::vector<GeoPoint> pts{{39.9, 116.3}, {40.1, 116.3}};
  try {
    build_grid(pts, 0.0, 1.0, 1e6);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("longitude"), std::string::npos);
  }
}

TEST(BuildGrid, CornersAtPercentiles) {
  std::vector<GeoPoint> pts;
  for (int i = 0; i <= 100; ++i) pts.push_back({40.0 + i * 0.001, 116.0 + (100 - i) * 0.002});
  const GridSpec g = build_grid(pts, 0.01, 0.995, 1e6);
  EXPECT_NEAR(g.southwest().latitude, 40.001, 1e-12);
  EXPECT_NEAR(g.northeast().latitude, 40.0995, 1e-12);
  EXPECT_NEAR(g.southwest().longitude, 116.002, 1e-12);
  EXPECT_NEAR(g.northeast().longitude, 116.199, 1e-12);
  // rows/cols cover the box
  EXPECT_GE(static_cast<double>(g.rows()) * g.cell_side(), g.north_extent() - 1e-6);
  EXPECT_GE(static_cast<double>(g.cols()) * g.cell_side(), g.east_extent() - 1e-6);
  EXPECT_LT(static_cast<double>(g.rows() - 1) * g.cell_side(), g.north_extent());
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.25), 2.5);
}

TEST(Clamp, InsideUnchanged) {
  const GridSpec g = square_grid(3, 3);
  const GeoPoint p = g.cell_center(CellId{4});
  EXPECT_EQ(g.clamp(p), p);
}

TEST(Clamp, NorthOfBoxMovesLatitudeOnly) {
  const GridSpec g = square_grid(3, 3);
  const double lon = (g.southwest().longitude + g.northeast().longitude) / 2;
  const GeoPoint c = g.clamp({g.northeast().latitude + 0.5, lon});
  EXPECT_EQ(c.latitude, g.northeast().latitude);
  EXPECT_EQ(c.longitude, lon);
}

TEST(Clamp, NortheastGoesToCorner) {
  const GridSpec g = square_grid(3, 3);
  EXPECT_EQ(g.clamp({g.northeast().latitude + 1, g.northeast().longitude + 1}), g.northeast());
}

TEST(AssignCell, SouthwestCornerIsCellZero) {
  const GridSpec g = square_grid(4, 5);
  EXPECT_EQ(g.assign_cell(g.southwest()).index, 0u);
}

TEST(AssignCell, NortheastCornerIsLastCell) {
  const GridSpec g = square_grid(4, 5);
  EXPECT_EQ(g.assign_cell(g.northeast()).index, 19u);
}

TEST(AssignCell, MidpointOfTwoByTwoIsCellThree) {
  const GridSpec g = square_grid(2, 2);
  const GeoPoint mid{(g.southwest().latitude + g.northeast().latitude) / 2,
                     (g.southwest().longitude + g.northeast().longitude) / 2};
  EXPECT_EQ(g.assign_cell(mid).index, 3u);
}

TEST(AssignCell, OutsideThrows) {
  const GridSpec g = square_grid(2, 2);
  EXPECT_THROW(g.assign_cell({g.northeast().latitude + 0.01, g.southwest().longitude}), InputError);
}

TEST(AssignCell, AgreesWithRectangleScan) {
  for (const GridSpec& g : {square_grid(4, 6), square_grid(7, 3, 750.0),
                            GridSpec::from_corners({39.9, 116.3}, {39.93, 116.34}, 1'000.0)}) {
    const std::vector<Rect> rects = brute_rectangles(g);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lat(g.southwest().latitude, g.northeast().latitude);
    std::uniform_real_distribution<double> lon(g.southwest().longitude, g.northeast().longitude);
    for (int i = 0; i < 2'000; ++i) {
      const GeoPoint p{lat(rng), lon(rng)};
      std::vector<std::uint32_t> hits;
      for (std::uint32_t k = 0; k < rects.size(); ++k) {
        const Rect& r = rects[k];
        if (p.latitude >= r.lat_lo && p.latitude < r.lat_hi && p.longitude >= r.lon_lo && p.longitude < r.lon_hi) {
          hits.push_back(k);
        }
      }
      ASSERT_EQ(hits.size(), 1u);
      EXPECT_EQ(g.assign_cell(p).index, hits[0]);
    }
  }
}

TEST(AssignCell, TruncatedLastColumn) {
  // 2.5 km wide box with 1 km cells: 3 columns, the last one half width.
  const GridSpec g = GridSpec::from_corners({39.9, 116.3}, {39.9 + 1'000.0 / (kEarthRadiusMeters * kDegree), 116.3 + 0.0293}, 1'000.0);
  EXPECT_EQ(g.rows(), 1u);
  EXPECT_EQ(g.cols(), static_cast<std::size_t>(std::ceil(g.east_extent() / 1'000.0)));
  EXPECT_EQ(g.assign_cell(g.northeast()).index, g.cols() - 1);
}

TEST(CellCenter, SingleCellIsBoxCenter) {
  const GridSpec g = GridSpec::from_corners({39.9, 116.3}, {39.905, 116.306}, 2'000.0);
  ASSERT_EQ(g.cell_count(), 1u);
  const GeoPoint c = g.cell_center(CellId{0});
  EXPECT_NEAR(c.latitude, 39.9025, 1e-12);
  EXPECT_NEAR(c.longitude, 116.303, 1e-12);
}

TEST(CellCenter, FirstCellOfTwoByTwo) {
  const double s = 1'000.0;
  const GridSpec g = square_grid(2, 2, s);
  const LocalPoint local = g.to_local(g.cell_center(CellId{0}));
  EXPECT_NEAR(local.east, s / 2, 1e-6);
  EXPECT_NEAR(local.north, s / 2, 1e-6);
}

TEST(CellCenter, RoundTrip) {
  const GridSpec g = GridSpec::from_corners({39.9, 116.3}, {39.97, 116.41}, 900.0);
  for (std::uint32_t c = 0; c < g.cell_count(); ++c) {
    EXPECT_EQ(g.assign_cell(g.cell_center(CellId{c})).index, c);
  }
}

TEST(CellCenter, OutOfRangeThrows) {
  const GridSpec g = square_grid(2, 2);
  EXPECT_THROW(g.cell_center(CellId{4}), InputError);
}

TEST(CellCenter, WithinHalfDiagonalOfAssignedPoints) {
  const GridSpec g = square_grid(5, 5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lat(g.southwest().latitude, g.northeast().latitude);
  std::uniform_real_distribution<double> lon(g.southwest().longitude, g.northeast().longitude);
  for (int i = 0; i < 1'000; ++i) {
    const GeoPoint p{lat(rng), lon(rng)};
    EXPECT_LE(distance(p, g.cell_center(g.assign_cell(p))), 1'000.0 * std::sqrt(2.0) / 2 * 1.01);
  }
}

TEST(GridSpec, FromPartsRejectsWrongShape) {
  const GridSpec g = square_grid(3, 4);
  EXPECT_THROW(GridSpec::from_parts(g.southwest(), g.northeast(), g.cell_side(), 2, 4), InputError);
}

TEST(GridSpec, LocalRoundTrip) {
  const GridSpec g = square_grid(3, 4);
  const GeoPoint p{39.91, 116.31};
  const GeoPoint back = g.from_local(g.to_local(p));
  EXPECT_NEAR(back.latitude, p.latitude, 1e-12);
  EXPECT_NEAR(back.longitude, p.longitude, 1e-12);
}

}  // namespace
}  // namespace trajrec
