#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "vascogen/domain.hpp"
#include "vascogen/geometry.hpp"
#include "vascogen/params.hpp"

namespace vascogen {

using SegmentId = std::int32_t;
inline constexpr SegmentId kNoSegment = -1;

struct SegmentRecord {
  Point proximal;
  Point distal;
  SegmentId parent = kNoSegment;
  std::array<SegmentId, 2> children{kNoSegment, kNoSegment};
  double beta = 1.0;   // radius / parent radius; 1 for the root
  int n_leaves = 1;    // terminals in the subtree rooted here
  double r_star = 0.0; // reduced subtree resistance (before radius scaling)
  double radius = 0.0; // meters; 0 until realize_radii

  bool is_leaf() const { return children[0] == kNoSegment; }
  double length() const { return dist(proximal, distal); }
};

struct TreeReport {
  int terminal_count = 0;
  int segment_count = 0;
  int max_depth = 0;
  double total_volume = 0.0;
  double max_murray_residual = 0.0;        // relative, max over bifurcations
  double max_terminal_pressure_error = 0.0; // |p - p_term| / (p_perf - p_term)
  double min_clearance_margin = 0.0;        // (axis dist - ra - rb)/(ra + rb), min over non-adjacent pairs
  bool all_inside_domain = false;

  // The thresholds a freshly grown tree must meet.
  bool passes() const {
    return max_murray_residual <= 1e-6 && max_terminal_pressure_error <= 1e-6 &&
           min_clearance_margin >= 0.0 && all_inside_domain;
  }
};

// Arena-indexed strict binary tree of straight cylindrical segments.
//
// Hydrodynamic conventions:
//   segment resistance      R = (8 mu / pi) * l / r^4
//   reduced resistance      r_star(leaf)     = (8 mu / pi) * l
//                           r_star(internal) = (8 mu / pi) * l
//                               + [ beta_l^4 / r_star(l) + beta_r^4 / r_star(r) ]^-1
//   terminal flow           q_term = q_perf / terminal_count, equal at all leaves
//   sibling radius ratio    r_l / r_r = [ (q_l r_star(l)) / (q_r r_star(r)) ]^(1/4)
//   closure                 r_p^gamma = r_l^gamma + r_r^gamma
// Flows are implied by leaf counts (q = n_leaves * q_term) and never stored.
class VesselTree {
public:
  VesselTree() = default;

  // Single-segment tree; eps_len is derived from the domain measure as
  // 1e-4 * measure^(1/dim).
  static VesselTree init(const CcoParams& params, const Point& root_pos,
                         const Point& first_terminal, double domain_measure);

  const CcoParams& params() const { return params_; }
  void set_params(const CcoParams& p) {
    params_ = p;
    radii_realized_ = false;
  }

  // Rebinds the degeneracy guard eps_len = 1e-4 * measure^(1/dim); used when
  // continuing growth of a deserialized tree inside a (new) domain.
  void set_domain_measure(double measure);

  SegmentId root() const { return root_; }
  int segment_count() const { return static_cast<int>(segs_.size()); }
  int terminal_count() const { return terminal_count_; }
  double eps_len() const { return eps_len_; }
  bool radii_realized() const { return radii_realized_; }

  const SegmentRecord& seg(SegmentId id) const { return segs_[static_cast<std::size_t>(id)]; }
  SegmentRecord& seg_mut(SegmentId id) { return segs_[static_cast<std::size_t>(id)]; }

  double q_term() const { return params_.q_perf / terminal_count_; }
  // Exact at the root: n_leaves/terminal_count == 1.0.
  double flow(SegmentId id) const {
    return params_.q_perf * (static_cast<double>(seg(id).n_leaves) / terminal_count_);
  }

  // Replaces seg's span proximal->distal by proximal->bif_pos plus children
  // bif_pos->old_distal (inheriting the subtree) and bif_pos->new_terminal.
  // Both new records get locally consistent n_leaves/r_star; the caller must
  // refresh the path via update_hydrodynamics(seg). Throws on degenerate
  // geometry, leaving the tree unchanged.
  std::pair<SegmentId, SegmentId> split_segment(SegmentId seg, const Point& bif_pos,
                                                const Point& new_terminal);

  // Recomputes n_leaves, child betas and r_star bottom-up from `from` to the
  // root. Invalidates realized radii.
  void update_hydrodynamics(SegmentId from);

  // Full bottom-up recomputation of every segment (children before parents).
  void update_all();

  // r_root = (r_star(root) * q_perf / (p_perf - p_term))^(1/4),
  // then the beta cascade downward.
  void realize_radii();

  // pi * sum(l_i * r_i^2). Requires realized radii.
  double volume() const;

  // Pressure at the distal end of seg under realized radii.
  double node_pressure(SegmentId id) const;

  TreeReport validate(const PerfusionDomain& domain) const;

  // Topological/structural invariants only (used by tests and file loading).
  void check_structure() const;

private:
  friend class TreeFileCodec;
  double refresh_node(SegmentId id); // returns r_star

  CcoParams params_;
  std::vector<SegmentRecord> segs_;
  SegmentId root_ = kNoSegment;
  int terminal_count_ = 0;
  double eps_len_ = 0.0;
  bool radii_realized_ = false;
};

} // namespace vascogen
