#ifndef TRAJREC_GEO_HPP_
#define TRAJREC_GEO_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace trajrec {

// Mean Earth radius (IUGG), used for haversine distances and the local plane.
inline constexpr double kEarthRadiusMeters = 6371008.8;

struct GeoPoint {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

// Great-circle (haversine) distance in meters.
double distance(const GeoPoint& a, const GeoPoint& b);

// Meters east / north of a grid's southwest corner.
struct LocalPoint {
  double east = 0.0;
  double north = 0.0;
};

// Row-major index of a grid cell, counted from the southwest corner.
struct CellId {
  std::uint32_t index = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

using CellSequence = std::vector<CellId>;

// A geographic box divided into square cells of `cell_side` meters.
//
// Cells are square along the local east/north axes of a tangent plane whose
// longitude scale is taken at the box's latitude midline. The last row and
// column are truncated at the box edge when the extent is not a whole number
// of cells. Cells are half-open [low, high) except along the north and east
// box boundary, which is closed.
class GridSpec {
 public:
  // Derives rows and cols from the box extent.
  static GridSpec from_corners(const GeoPoint& southwest,
                               const GeoPoint& northeast, double cell_side_m);

  // Rebuilds a serialized grid; rows/cols must agree with the corners.
  static GridSpec from_parts(const GeoPoint& southwest,
                             const GeoPoint& northeast, double cell_side_m,
                             std::size_t rows, std::size_t cols);

  const GeoPoint& southwest() const { return southwest_; }
  const GeoPoint& northeast() const { return northeast_; }
  double cell_side() const { return cell_side_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t cell_count() const { return rows_ * cols_; }

  double north_extent() const { return north_extent_; }
  double east_extent() const { return east_extent_; }

  LocalPoint to_local(const GeoPoint& p) const;
  GeoPoint from_local(const LocalPoint& p) const;

  bool contains(const GeoPoint& p) const;
  bool is_valid(CellId cell) const { return cell.index < cell_count(); }

  // Each coordinate clamped into the box independently.
  GeoPoint clamp(const GeoPoint& p) const;

  // Throws InputError when `p` lies outside the box.
  CellId assign_cell(const GeoPoint& p) const;

  // Midpoint of the (possibly truncated) cell rectangle.
  GeoPoint cell_center(CellId cell) const;

  std::vector<GeoPoint> cell_centers() const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.southwest_ == b.southwest_ && a.northeast_ == b.northeast_ &&
           a.cell_side_ == b.cell_side_ && a.rows_ == b.rows_ &&
           a.cols_ == b.cols_;
  }

 private:
  GridSpec() = default;

  GeoPoint southwest_;
  GeoPoint northeast_;
  double cell_side_ = 0.0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double meters_per_degree_lat_ = 0.0;
  double meters_per_degree_lon_ = 0.0;
  double north_extent_ = 0.0;
  double east_extent_ = 0.0;
};

// Linear-interpolated percentile of `values` (numpy's default rule).
// `fraction` is in [0, 1]. `values` need not be sorted.
double percentile(std::vector<double> values, double fraction);

// Box corners at the given latitude / longitude percentiles, square cells of
// area `cell_area_m2`. Throws InputError naming the collapsed dimension when
// the box has zero extent.
GridSpec build_grid(std::span<const GeoPoint> points, double lower_percentile,
                    double upper_percentile, double cell_area_m2);

}  // namespace trajrec

#endif  // TRAJREC_GEO_HPP_
