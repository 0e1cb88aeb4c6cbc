#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vascogen/geometry.hpp"
#include "vascogen/random.hpp"

namespace vascogen {

enum class DomainKind { disk2d, sphere3d, box, voxel_mask };

// The perfusion territory: answers containment, measure and uniform sampling.
// Read-only after construction; safe for concurrent queries.
class PerfusionDomain {
public:
  static PerfusionDomain disk(const Point& center, double radius);
  static PerfusionDomain sphere(const Point& center, double radius);
  static PerfusionDomain box(const Point& lo, const Point& hi);
  // Mask grids: occupancy runs x fastest, then y, then z (2D: nz == 1).
  static PerfusionDomain mask(int dim, int nx, int ny, int nz,
                              const Point& spacing, const Point& origin,
                              std::vector<std::uint8_t> occupancy);
  // Loads <stem>.maskmeta plus its payload (<stem>.mask, or <stem>.pgm for 2D).
  static PerfusionDomain load_mask(const std::string& maskmeta_path);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }

  // Membership is boundary-inclusive for analytic kinds. Voxel cells are
  // half-open [origin + i*spacing, origin + (i+1)*spacing): a point exactly on
  // the upper grid boundary is outside.
  bool contains(const Point& p) const;

  // Area (2D) or volume (3D). For masks, exactly set-voxel-count * voxel measure.
  double measure() const { return measure_; }

  // Uniform sample by rejection from the bounding box. Each attempt consumes
  // exactly dim draws (x, then y, then z); throws after 10,000 misses.
  Point sample_point(RandomStream& rng) const;

  // True iff every sample at arc-length increments of `step` along the
  // segment, endpoints included, is contained.
  bool segment_inside(const SegmentGeometry& seg, double step) const;
  bool segment_inside(const SegmentGeometry& seg) const {
    return segment_inside(seg, default_step());
  }

  // Sampling step: half the smallest voxel spacing for masks,
  // characteristic length / 64 for analytic kinds.
  double default_step() const;

  // measure()^(1/dim)
  double characteristic_length() const;

  Point bbox_lo() const { return lo_; }
  Point bbox_hi() const { return hi_; }
  Point bbox_center() const;

  // Mask accessors (usage error on other kinds).
  int mask_nx() const;
  int mask_ny() const;
  int mask_nz() const;
  Point mask_spacing() const;
  Point mask_origin() const;
  bool voxel_set(int ix, int iy, int iz) const;

  double analytic_radius() const { return radius_; }
  Point analytic_center() const { return center_; }

private:
  PerfusionDomain() = default;
  void finalize();

  DomainKind kind_ = DomainKind::disk2d;
  int dim_ = 2;

  Point center_;
  double radius_ = 0.0;

  Point lo_, hi_; // bounding box (also the box shape itself)

  int nx_ = 0, ny_ = 0, nz_ = 1;
  Point spacing_;
  Point origin_;
  std::vector<std::uint8_t> occ_;
  std::int64_t set_count_ = 0;

  double measure_ = 0.0;
};

} // namespace vascogen
