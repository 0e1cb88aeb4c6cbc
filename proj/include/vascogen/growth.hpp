#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "vascogen/bifurcation.hpp"
#include "vascogen/domain.hpp"
#include "vascogen/spatial.hpp"
#include "vascogen/tree.hpp"

namespace vascogen {

enum class InfeasibleReason {
  none, // feasible
  outside_domain,
  intersects_tree,
  degenerate_geometry,
  solver_failed,
};

const char* to_string(InfeasibleReason r);

struct CandidateEvaluation {
  SegmentId target = kNoSegment;
  InfeasibleReason reason = InfeasibleReason::none;
  BifurcationSolution solution;
  double total_cost = std::numeric_limits<double>::infinity(); // full-tree volume after commit

  bool feasible() const { return reason == InfeasibleReason::none; }
};

struct ConstraintViolation {
  enum Kind { ok, outside_domain, clearance, aspect } kind = ok;
  SegmentId against = kNoSegment; // offending existing segment for `clearance`
};

// Aborted growth: carries whatever was built so far.
class GrowthStalledError : public Error {
public:
  GrowthStalledError(const std::string& msg, VesselTree partial)
      : Error(msg), partial_tree(std::move(partial)) {}
  VesselTree partial_tree;
};

struct GrowthOptions {
  std::optional<Point> root_position; // default: domain bounding-box center
  int threads = 1;                    // parallel candidate evaluation
  std::ostream* eval_log = nullptr;   // per-evaluation records, line-delimited
};

// eta * (measure / n)^(1/dim): the minimum distance a fresh terminal must
// keep from the existing tree.
double distance_threshold(double domain_measure, int n_terminals_current, double eta, int dim);

// One uniform draw from the domain; accepted iff its distance to the nearest
// segment axis is >= d_thresh.
std::optional<Point> sample_candidate(const PerfusionDomain& domain, const SpatialIndex& index,
                                      double d_thresh, RandomStream& rng);

// The min(n_con, segment_count) nearest segments, ascending by distance,
// exact ties by ascending id.
std::vector<SegmentId> nearest_segments(const VesselTree& tree, const SpatialIndex& index,
                                        const Point& p, int n_con);

// Checks, in order: (a) each proposed segment stays inside the domain,
// (b) against every existing segment not adjacent to the target:
// axis-to-axis distance >= (1 + margin) * (r_a + r_b), (c) each proposed
// length >= max(eps_len, 2 * its radius).
ConstraintViolation check_constraints(const VesselTree& tree, const PerfusionDomain& domain,
                                      SegmentId target,
                                      const std::array<SegmentGeometry, 3>& proposed);

// Solves the local bifurcation problem for attaching `candidate` onto
// `target`, checks the geometric constraints, and prices the connection by
// committing it on a scratch copy. Infeasibility is recorded, never thrown.
CandidateEvaluation evaluate_connection(const VesselTree& tree, const PerfusionDomain& domain,
                                        SegmentId target, const Point& candidate);

// The main loop: grows to params.k_term terminals, from scratch or
// continuing a seed tree. The returned tree has realized radii and passes
// validate(). Throws GrowthStalledError after params.discard_cap consecutive
// candidates with no feasible connection.
VesselTree grow(const CcoParams& params, const PerfusionDomain& domain,
                const std::optional<VesselTree>& seed_tree = std::nullopt,
                const GrowthOptions& options = {});

} // namespace vascogen
