#include "vascogen/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "vascogen/errors.hpp"

namespace vascogen {

SpatialIndex::SpatialIndex(const Point& lo, const Point& hi, int dim) : dim_(dim), lo_(lo), hi_(hi) {
  if (dim != 2 && dim != 3) throw UsageError("SpatialIndex: dim must be 2 or 3");
  if (!(hi.x > lo.x && hi.y > lo.y) || (dim == 3 && !(hi.z > lo.z)))
    throw UsageError("SpatialIndex: empty bounding box");
}

void SpatialIndex::rebuild(const VesselTree& tree) {
  const int n = tree.segment_count();
  geometry_.resize(static_cast<std::size_t>(n));
  for (SegmentId i = 0; i < n; ++i) {
    geometry_[static_cast<std::size_t>(i)] = {tree.seg(i).proximal, tree.seg(i).distal};
  }

  const int per_axis =
      std::clamp(static_cast<int>(std::ceil(std::pow(double(n), 1.0 / dim_))), 1, 64);
  ncell_[0] = ncell_[1] = per_axis;
  ncell_[2] = (dim_ == 3) ? per_axis : 1;
  cell_[0] = (hi_.x - lo_.x) / ncell_[0];
  cell_[1] = (hi_.y - lo_.y) / ncell_[1];
  cell_[2] = (dim_ == 3) ? (hi_.z - lo_.z) / ncell_[2] : 1.0;

  cells_.assign(static_cast<std::size_t>(ncell_[0]) * ncell_[1] * ncell_[2], {});
  seen_.assign(geometry_.size(), 0);
  stamp_ = 0;

  auto axis_range = [&](double a, double b, int ax) {
    const double base = (ax == 0) ? lo_.x : (ax == 1) ? lo_.y : lo_.z;
    int i0 = static_cast<int>(std::floor((std::min(a, b) - base) / cell_[ax]));
    int i1 = static_cast<int>(std::floor((std::max(a, b) - base) / cell_[ax]));
    return std::pair<int, int>{std::clamp(i0, 0, ncell_[ax] - 1), std::clamp(i1, 0, ncell_[ax] - 1)};
  };

  for (SegmentId id = 0; id < n; ++id) {
    const auto& [a, b] = geometry_[static_cast<std::size_t>(id)];
    const auto [x0, x1] = axis_range(a.x, b.x, 0);
    const auto [y0, y1] = axis_range(a.y, b.y, 1);
    auto [z0, z1] = std::pair<int, int>{0, 0};
    if (dim_ == 3) std::tie(z0, z1) = axis_range(a.z, b.z, 2);
    for (int iz = z0; iz <= z1; ++iz)
      for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix) cells_[cell_of(ix, iy, iz)].push_back(id);
  }
}

namespace {

double axis_box_dist(double p, double lo, double hi) {
  if (p < lo) return lo - p;
  if (p > hi) return p - hi;
  return 0.0;
}

} // namespace

void SpatialIndex::collect(const Point& p, int k, std::vector<Cand>& out) const {
  out.clear();
  if (geometry_.empty() || k < 1) return;

  ++stamp_;
  // max-heap of the k best distances seen so far
  std::priority_queue<double> best;

  const int cx = std::clamp(static_cast<int>(std::floor((p.x - lo_.x) / cell_[0])), 0, ncell_[0] - 1);
  const int cy = std::clamp(static_cast<int>(std::floor((p.y - lo_.y) / cell_[1])), 0, ncell_[1] - 1);
  const int cz = (dim_ == 3)
                     ? std::clamp(static_cast<int>(std::floor((p.z - lo_.z) / cell_[2])), 0, ncell_[2] - 1)
                     : 0;

  const double min_cell = (dim_ == 3) ? std::min({cell_[0], cell_[1], cell_[2]})
                                      : std::min(cell_[0], cell_[1]);
  const int max_ring = std::max({ncell_[0], ncell_[1], ncell_[2]});

  auto scan_cell = [&](int ix, int iy, int iz) {
    const double bx = lo_.x + ix * cell_[0];
    const double by = lo_.y + iy * cell_[1];
    const double bz = lo_.z + iz * cell_[2];
    double bd2 = 0.0;
    const double dx = axis_box_dist(p.x, bx, bx + cell_[0]);
    const double dy = axis_box_dist(p.y, by, by + cell_[1]);
    bd2 = dx * dx + dy * dy;
    if (dim_ == 3) {
      const double dz = axis_box_dist(p.z, bz, bz + cell_[2]);
      bd2 += dz * dz;
    }
    const double kth = (static_cast<int>(best.size()) >= k)
                           ? best.top()
                           : std::numeric_limits<double>::infinity();
    if (std::sqrt(bd2) > kth) return; // > not >=, so exact ties survive
    for (SegmentId id : cells_[cell_of(ix, iy, iz)]) {
      if (seen_[static_cast<std::size_t>(id)] == stamp_) continue;
      seen_[static_cast<std::size_t>(id)] = stamp_;
      const auto& [a, b] = geometry_[static_cast<std::size_t>(id)];
      const double d = point_segment_distance(p, a, b);
      out.push_back({d, id});
      if (static_cast<int>(best.size()) < k) {
        best.push(d);
      } else if (d < best.top()) {
        best.pop();
        best.push(d);
      }
    }
  };

  for (int ring = 0; ring <= max_ring; ++ring) {
    // Conservative lower bound on the distance to any cell in this ring: the
    // query sits somewhere inside its own cell, so a cell `ring` steps away
    // is at least (ring - 1) full cells of the smallest extent away.
    if (static_cast<int>(best.size()) >= k && ring >= 2 &&
        (ring - 1) * min_cell > best.top())
      break;

    const int zlo = (dim_ == 3) ? std::max(cz - ring, 0) : 0;
    const int zhi = (dim_ == 3) ? std::min(cz + ring, ncell_[2] - 1) : 0;
    for (int iz = zlo; iz <= zhi; ++iz) {
      const int rz = std::abs(iz - cz);
      for (int iy = std::max(cy - ring, 0); iy <= std::min(cy + ring, ncell_[1] - 1); ++iy) {
        const int ry = std::abs(iy - cy);
        const bool shell_yz = (ry == ring) || (rz == ring);
        if (shell_yz) {
          for (int ix = std::max(cx - ring, 0); ix <= std::min(cx + ring, ncell_[0] - 1); ++ix)
            scan_cell(ix, iy, iz);
        } else {
          // only the two x-extremes of the ring shell
          if (cx - ring >= 0) scan_cell(cx - ring, iy, iz);
          if (ring > 0 && cx + ring <= ncell_[0] - 1) scan_cell(cx + ring, iy, iz);
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.id < b.id;
  });
  if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
}

std::vector<SegmentId> SpatialIndex::nearest_k(const Point& p, int k) const {
  std::vector<Cand> cands;
  collect(p, k, cands);
  std::vector<SegmentId> ids;
  ids.reserve(cands.size());
  for (const auto& c : cands) ids.push_back(c.id);
  return ids;
}

double SpatialIndex::nearest_distance(const Point& p) const {
  std::vector<Cand> cands;
  collect(p, 1, cands);
  return cands.empty() ? std::numeric_limits<double>::infinity() : cands[0].d;
}

std::vector<SegmentId> nearest_k_linear(const VesselTree& tree, const Point& p, int k) {
  struct Cand {
    double d;
    SegmentId id;
  };
  std::vector<Cand> all;
  all.reserve(static_cast<std::size_t>(tree.segment_count()));
  for (SegmentId i = 0; i < tree.segment_count(); ++i) {
    all.push_back({point_segment_distance(p, tree.seg(i).proximal, tree.seg(i).distal), i});
  }
  std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.id < b.id;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  std::vector<SegmentId> ids;
  ids.reserve(all.size());
  for (const auto& c : all) ids.push_back(c.id);
  return ids;
}

} // namespace vascogen
