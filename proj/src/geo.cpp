#include "trajrec/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trajrec/error.hpp"

namespace trajrec {
namespace {

// Offsets within this fraction of a cell below an interior edge are treated
// as lying on the edge, so round-off never moves an edge point down a cell.
constexpr double kEdgeSnap = 1e-9;

constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;

double to_radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

std::size_t cells_to_cover(double extent, double side) {
  const double n = std::ceil(extent / side - kEdgeSnap);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::size_t cell_along(double offset, double side, std::size_t count) {
  const double k = std::floor(offset / side + kEdgeSnap);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), count - 1);
}

std::string describe(const GeoPoint& p) {
  return "(" + std::to_string(p.latitude) + ", " + std::to_string(p.longitude) + ")";
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) &&
         p.latitude >= -90.0 && p.latitude <= 90.0 && p.longitude >= -180.0 &&
         p.longitude <= 180.0;
}

double distance(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = to_radians(a.latitude);
  const double lat2 = to_radians(b.latitude);
  const double half_dlat = std::sin((lat2 - lat1) / 2.0);
  const double half_dlon = std::sin(to_radians(b.longitude - a.longitude) / 2.0);
  const double h = half_dlat * half_dlat +
                   std::cos(lat1) * std::cos(lat2) * half_dlon * half_dlon;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

GridSpec GridSpec::from_corners(const GeoPoint& southwest,
                                const GeoPoint& northeast, double cell_side_m) {
  if (!trajrec::is_valid(southwest) || !trajrec::is_valid(northeast)) {
    throw InputError("grid corners must be valid coordinates");
  }
  if (!(southwest.latitude < northeast.latitude)) {
    throw InputError("grid southwest corner " + describe(southwest) +
                     " is not south of northeast corner " + describe(northeast));
  }
  if (!(southwest.longitude < northeast.longitude)) {
    throw InputError("grid southwest corner " + describe(southwest) +
                     " is not west of northeast corner " + describe(northeast));
  }
  if (!std::isfinite(cell_side_m) || cell_side_m <= 0.0) {
    throw InputError("cell side must be a positive number of meters");
  }

  GridSpec grid;
  grid.southwest_ = southwest;
  grid.northeast_ = northeast;
  grid.cell_side_ = cell_side_m;
  grid.meters_per_degree_lat_ = kMetersPerDegree;
  const double midline = (southwest.latitude + northeast.latitude) / 2.0;
  grid.meters_per_degree_lon_ = kMetersPerDegree * std::cos(to_radians(midline));
  grid.north_extent_ =
      (northeast.latitude - southwest.latitude) * grid.meters_per_degree_lat_;
  grid.east_extent_ =
      (northeast.longitude - southwest.longitude) * grid.meters_per_degree_lon_;
  grid.rows_ = cells_to_cover(grid.north_extent_, cell_side_m);
  grid.cols_ = cells_to_cover(grid.east_extent_, cell_side_m);
  return grid;
}

GridSpec GridSpec::from_parts(const GeoPoint& southwest,
                              const GeoPoint& northeast, double cell_side_m,
                              std::size_t rows, std::size_t cols) {
  GridSpec grid = from_corners(southwest, northeast, cell_side_m);
  if (grid.rows_ != rows || grid.cols_ != cols) {
    throw InputError("grid shape " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " does not match its corners (expected " +
                     std::to_string(grid.rows_) + "x" + std::to_string(grid.cols_) +
                     ")");
  }
  return grid;
}

LocalPoint GridSpec::to_local(const GeoPoint& p) const {
  return {(p.longitude - southwest_.longitude) * meters_per_degree_lon_,
          (p.latitude - southwest_.latitude) * meters_per_degree_lat_};
}

GeoPoint GridSpec::from_local(const LocalPoint& p) const {
  return {southwest_.latitude + p.north / meters_per_degree_lat_,
          southwest_.longitude + p.east / meters_per_degree_lon_};
}

bool GridSpec::contains(const GeoPoint& p) const {
  return p.latitude >= southwest_.latitude && p.latitude <= northeast_.latitude &&
         p.longitude >= southwest_.longitude && p.longitude <= northeast_.longitude;
}

GeoPoint GridSpec::clamp(const GeoPoint& p) const {
  return {std::clamp(p.latitude, southwest_.latitude, northeast_.latitude),
          std::clamp(p.longitude, southwest_.longitude, northeast_.longitude)};
}

CellId GridSpec::assign_cell(const GeoPoint& p) const {
  if (!contains(p)) {
    throw InputError("point " + describe(p) + " is outside the grid");
  }
  const LocalPoint local = to_local(p);
  const std::size_t row = cell_along(local.north, cell_side_, rows_);
  const std::size_t col = cell_along(local.east, cell_side_, cols_);
  return CellId{static_cast<std::uint32_t>(row * cols_ + col)};
}

GeoPoint GridSpec::cell_center(CellId cell) const {
  if (!is_valid(cell)) {
    throw InputError("cell " + std::to_string(cell.index) + " is out of range for a grid of " +
                     std::to_string(cell_count()) + " cells");
  }
  const std::size_t row = cell.index / cols_;
  const std::size_t col = cell.index % cols_;
  const auto mid = [this](std::size_t k, double extent) {
    const double low = static_cast<double>(k) * cell_side_;
    const double high = std::min(low + cell_side_, extent);
    return (low + high) / 2.0;
  };
  return from_local({mid(col, east_extent_), mid(row, north_extent_)});
}

std::vector<GeoPoint> GridSpec::cell_centers() const {
  std::vector<GeoPoint> centers;
  centers.reserve(cell_count());
  for (std::uint32_t i = 0; i < cell_count(); ++i) {
    centers.push_back(cell_center(CellId{i}));
  }
  return centers;
}

double percentile(std::vector<double> values, double fraction) {
  if (values.empty()) throw InputError("percentile of an empty sequence");
  std::sort(values.begin(), values.end());
  const double position = fraction * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double weight = position - static_cast<double>(lower);
  return values[lower] + (values[upper] - values[lower]) * weight;
}

GridSpec build_grid(std::span<const GeoPoint> points, double lower_percentile,
                    double upper_percentile, double cell_area_m2) {
  if (!(lower_percentile >= 0.0 && lower_percentile < upper_percentile &&
        upper_percentile <= 1.0)) {
    throw InputError("percentiles must satisfy 0 <= lower < upper <= 1");
  }
  if (!std::isfinite(cell_area_m2) || cell_area_m2 <= 0.0) {
    throw InputError("cell area must be positive");
  }
  if (points.empty()) throw InputError("cannot build a grid from no points");

  std::vector<double> lats;
  std::vector<double> lons;
  lats.reserve(points.size());
  lons.reserve(points.size());
  for (const GeoPoint& p : points) {
    if (!is_valid(p)) throw InputError("invalid coordinate " + describe(p));
    lats.push_back(p.latitude);
    lons.push_back(p.longitude);
  }

  const GeoPoint southwest{percentile(lats, lower_percentile),
                           percentile(lons, lower_percentile)};
  const GeoPoint northeast{percentile(lats, upper_percentile),
                           percentile(lons, upper_percentile)};
  if (!(southwest.latitude < northeast.latitude)) {
    throw InputError("degenerate bounding box: latitude extent is zero");
  }
  if (!(southwest.longitude < northeast.longitude)) {
    throw InputError("degenerate bounding box: longitude extent is zero");
  }
  return GridSpec::from_corners(southwest, northeast, std::sqrt(cell_area_m2));
}

}  // namespace trajrec
