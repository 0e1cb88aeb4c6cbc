#pragma once

#include <vector>

#include "vascogen/geometry.hpp"
#include "vascogen/tree.hpp"

namespace vascogen {

// Uniform-grid index over segment geometry for nearest-k and
// nearest-distance queries. Results are exactly those of a linear scan:
// candidate cells are pruned only by conservative lower bounds, and exact
// ties are broken by ascending SegmentId.
//
// Rebuilt after each commit (a split moves one segment and adds two); the
// index keeps its own snapshot of the segment endpoints, so queries are
// self-contained and safe to run concurrently.
class SpatialIndex {
public:
  SpatialIndex(const Point& lo, const Point& hi, int dim);

  void rebuild(const VesselTree& tree);

  int size() const { return static_cast<int>(geometry_.size()); }

  // The min(k, size) ids with smallest point-to-segment distance, sorted by
  // (distance, id).
  std::vector<SegmentId> nearest_k(const Point& p, int k) const;

  // Distance from p to the nearest segment axis (+inf when empty).
  double nearest_distance(const Point& p) const;

private:
  struct Cand {
    double d;
    SegmentId id;
  };
  void collect(const Point& p, int k, std::vector<Cand>& out) const;
  std::size_t cell_of(int ix, int iy, int iz) const {
    return static_cast<std::size_t>((iz * ncell_[1] + iy) * ncell_[0] + ix);
  }

  int dim_;
  Point lo_, hi_;
  int ncell_[3] = {1, 1, 1};
  double cell_[3] = {0, 0, 0};
  std::vector<std::vector<SegmentId>> cells_;
  std::vector<std::pair<Point, Point>> geometry_; // id-indexed endpoint snapshot
  mutable std::vector<std::uint32_t> seen_;       // per-query dedup stamps
  mutable std::uint32_t stamp_ = 0;
};

// Reference path for the index-equivalence checks.
std::vector<SegmentId> nearest_k_linear(const VesselTree& tree, const Point& p, int k);

} // namespace vascogen
