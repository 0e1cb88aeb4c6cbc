#include "vascogen/growth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace vascogen {

const char* to_string(InfeasibleReason r) {
  switch (r) {
    case InfeasibleReason::none: return "ok";
    case InfeasibleReason::outside_domain: return "outside-domain";
    case InfeasibleReason::intersects_tree: return "intersects-tree";
    case InfeasibleReason::degenerate_geometry: return "degenerate-geometry";
    case InfeasibleReason::solver_failed: return "solver-failed";
  }
  return "?";
}

double distance_threshold(double domain_measure, int n_terminals_current, double eta, int dim) {
  if (!(domain_measure > 0.0) || n_terminals_current < 1 || !(eta > 0.0) || (dim != 2 && dim != 3))
    throw UsageError("distance_threshold: all inputs must be positive");
  return eta * std::pow(domain_measure / n_terminals_current, 1.0 / dim);
}

std::optional<Point> sample_candidate(const PerfusionDomain& domain, const SpatialIndex& index,
                                      double d_thresh, RandomStream& rng) {
  const Point p = domain.sample_point(rng);
  if (index.nearest_distance(p) < d_thresh) return std::nullopt;
  return p;
}

std::vector<SegmentId> nearest_segments(const VesselTree& tree, const SpatialIndex& index,
                                        const Point& p, int n_con) {
  if (tree.segment_count() == 0) throw UsageError("nearest_segments: empty tree");
  if (index.size() != tree.segment_count())
    throw UsageError("nearest_segments: index is out of date");
  return index.nearest_k(p, n_con);
}

ConstraintViolation check_constraints(const VesselTree& tree, const PerfusionDomain& domain,
                                      SegmentId target,
                                      const std::array<SegmentGeometry, 3>& proposed) {
  const double step = domain.default_step();
  for (const auto& g : proposed) {
    if (!domain.segment_inside(g, step)) return {ConstraintViolation::outside_domain, kNoSegment};
  }

  // The proposed triple touches the target's endpoints, so its topological
  // neighborhood (parent, sibling, children) is exempt from clearance.
  const auto& tg = tree.seg(target);
  SegmentId sibling = kNoSegment;
  if (tg.parent != kNoSegment) {
    const auto& par = tree.seg(tg.parent);
    sibling = (par.children[0] == target) ? par.children[1] : par.children[0];
  }
  const double margin = tree.params().clearance_margin;
  for (SegmentId i = 0; i < tree.segment_count(); ++i) {
    if (i == target || i == tg.parent || i == sibling || i == tg.children[0] ||
        i == tg.children[1])
      continue;
    const auto& s = tree.seg(i);
    for (const auto& g : proposed) {
      const double d = segment_segment_distance(g.proximal, g.distal, s.proximal, s.distal);
      if (d < (1.0 + margin) * (g.radius + s.radius)) return {ConstraintViolation::clearance, i};
    }
  }

  for (const auto& g : proposed) {
    if (g.length() < std::max(tree.eps_len(), 2.0 * g.radius))
      return {ConstraintViolation::aspect, kNoSegment};
  }
  return {ConstraintViolation::ok, kNoSegment};
}

CandidateEvaluation evaluate_connection(const VesselTree& tree, const PerfusionDomain& domain,
                                        SegmentId target, const Point& candidate) {
  CandidateEvaluation ev;
  ev.target = target;
  try {
    const CcoParams& params = tree.params();
    const SegmentRecord& tg = tree.seg(target);

    LocalBifurcationProblem prob;
    prob.x0 = tg.proximal;
    prob.x1 = tg.distal;
    prob.x2 = candidate;
    // Post-insertion flows: terminals rebalance to q_perf / (count + 1).
    const double q_new = params.q_perf / (tree.terminal_count() + 1);
    prob.f1 = tg.n_leaves * q_new;
    prob.f2 = q_new;
    // r_star is radius-free; the pressure requirement at the attach point
    // converts it with the target's current realized radius:
    //   p1 = p_term + f1 * r_star(target) / radius(target)^4.
    prob.p1 = params.p_term + prob.f1 * tg.r_star / std::pow(tg.radius, 4);
    prob.p2 = params.p_term;
    prob.p0 = (tg.parent == kNoSegment) ? params.p_perf : tree.node_pressure(tg.parent);
    prob.mu = params.mu;
    prob.gamma = params.gamma;
    prob.tol = params.tol;
    prob.max_iter = params.max_iter;
    prob.eps_len = tree.eps_len();

    const double eps = tree.eps_len();
    if (dist(prob.x0, prob.x1) < eps || dist(prob.x0, prob.x2) < eps ||
        dist(prob.x1, prob.x2) < eps) {
      ev.reason = InfeasibleReason::degenerate_geometry;
      return ev;
    }
    if (!(prob.p0 > std::max(prob.p1, prob.p2))) {
      ev.reason = InfeasibleReason::solver_failed;
      return ev;
    }

    try {
      ev.solution = optimal_bifurcation(prob);
    } catch (const DegenerateBifurcation&) {
      ev.reason = InfeasibleReason::degenerate_geometry;
      return ev;
    } catch (const Error&) {
      ev.reason = InfeasibleReason::solver_failed;
      return ev;
    }

    const std::array<SegmentGeometry, 3> proposed{
        SegmentGeometry{prob.x0, ev.solution.x_b, ev.solution.r0},
        SegmentGeometry{ev.solution.x_b, prob.x1, ev.solution.r1},
        SegmentGeometry{ev.solution.x_b, prob.x2, ev.solution.r2}};
    const ConstraintViolation v = check_constraints(tree, domain, target, proposed);
    switch (v.kind) {
      case ConstraintViolation::ok: break;
      case ConstraintViolation::outside_domain:
        ev.reason = InfeasibleReason::outside_domain;
        return ev;
      case ConstraintViolation::clearance:
        ev.reason = InfeasibleReason::intersects_tree;
        return ev;
      case ConstraintViolation::aspect:
        ev.reason = InfeasibleReason::degenerate_geometry;
        return ev;
    }

    // Price the connection by its true global objective: commit on a scratch
    // copy, refresh, and measure the full-tree volume.
    VesselTree scratch = tree;
    scratch.split_segment(target, ev.solution.x_b, candidate);
    scratch.update_hydrodynamics(target);
    scratch.realize_radii();
    ev.total_cost = scratch.volume();
  } catch (const Error&) {
    ev.reason = InfeasibleReason::solver_failed;
  }
  return ev;
}

namespace {

void evaluate_all(const VesselTree& tree, const PerfusionDomain& domain,
                  const std::vector<SegmentId>& targets, const Point& candidate, int threads,
                  std::vector<CandidateEvaluation>& evals) {
  evals.resize(targets.size());
  const int t_count = std::clamp(threads, 1, static_cast<int>(targets.size()));
  if (t_count <= 1) {
    for (std::size_t i = 0; i < targets.size(); ++i)
      evals[i] = evaluate_connection(tree, domain, targets[i], candidate);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t_count));
  for (int t = 0; t < t_count; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= targets.size()) break;
        evals[i] = evaluate_connection(tree, domain, targets[i], candidate);
      }
    });
  }
  for (auto& th : pool) th.join();
}

void log_evaluation(std::ostream* out, int step, const CandidateEvaluation& ev) {
  if (!out) return;
  char buf[160];
  if (ev.feasible()) {
    std::snprintf(buf, sizeof buf, "eval step=%d target=%d feasible=1 reason=ok cost=%.17g\n",
                  step, ev.target, ev.total_cost);
  } else {
    std::snprintf(buf, sizeof buf, "eval step=%d target=%d feasible=0 reason=%s\n", step,
                  ev.target, to_string(ev.reason));
  }
  *out << buf;
}

void log_commit(std::ostream* out, int step, const CandidateEvaluation& ev) {
  if (!out) return;
  char buf[160];
  std::snprintf(buf, sizeof buf, "commit step=%d target=%d cost=%.17g\n", step, ev.target,
                ev.total_cost);
  *out << buf;
}

Point project_root(const PerfusionDomain& domain, const Point& desired, RandomStream& rng) {
  Point best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4096; ++i) {
    const Point p = domain.sample_point(rng);
    const double d = dist(p, desired);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

} // namespace

VesselTree grow(const CcoParams& params, const PerfusionDomain& domain,
                const std::optional<VesselTree>& seed_tree, const GrowthOptions& options) {
  params.validate();
  if (params.dim != domain.dim())
    throw UsageError("params.dim does not match the domain dimension");

  const double measure = domain.measure();
  const double eps_len = 1e-4 * std::pow(measure, 1.0 / params.dim);
  RandomStream rng(params.seed);

  VesselTree tree;
  if (seed_tree) {
    tree = *seed_tree;
    tree.set_params(params);
    tree.set_domain_measure(measure);
    tree.check_structure();
    for (SegmentId i = 0; i < tree.segment_count(); ++i) {
      if (tree.seg(i).length() < eps_len)
        throw UsageError("seed tree: segment " + std::to_string(i) + " shorter than eps_len");
    }
    if (tree.terminal_count() > params.k_term)
      throw UsageError("seed tree already has more terminals than k_term");
    tree.update_all();
    tree.realize_radii();
    const TreeReport rep = tree.validate(domain);
    if (!rep.passes()) throw UsageError("seed tree does not validate against this domain");
  } else {
    Point desired = options.root_position.value_or(domain.bbox_center());
    if (desired.dim != params.dim) throw UsageError("root position dimension mismatch");
    const Point root = project_root(domain, desired, rng);

    bool placed = false;
    Point first;
    for (int i = 0; i < 1000 && !placed; ++i) {
      first = domain.sample_point(rng);
      placed = dist(root, first) >= eps_len &&
               domain.segment_inside(SegmentGeometry{root, first, 0.0});
    }
    if (!placed) throw UsageError("could not place an initial segment inside the domain");
    tree = VesselTree::init(params, root, first, measure);
    tree.update_hydrodynamics(tree.root());
    tree.realize_radii();
  }

  SpatialIndex index(domain.bbox_lo(), domain.bbox_hi(), domain.dim());
  index.rebuild(tree);

  int discards = 0;
  std::vector<CandidateEvaluation> evals;
  while (tree.terminal_count() < params.k_term) {
    const int step = tree.terminal_count();
    double d_thresh = distance_threshold(measure, tree.terminal_count(), params.eta, params.dim);
    int rejects = 0;

    for (;;) { // one insertion attempt; d_thresh only ever decreases inside it
      const auto cand = sample_candidate(domain, index, d_thresh, rng);
      if (!cand) {
        ++rejects;
        if (rejects % params.relax_every == 0) d_thresh *= params.relax_factor;
        continue;
      }
      rejects = 0;

      const auto targets = nearest_segments(tree, index, *cand, params.n_con);
      evaluate_all(tree, domain, targets, *cand, options.threads, evals);

      const CandidateEvaluation* best = nullptr;
      for (const auto& ev : evals) {
        log_evaluation(options.eval_log, step, ev);
        if (!ev.feasible()) continue;
        if (!best || ev.total_cost < best->total_cost ||
            (ev.total_cost == best->total_cost && ev.target < best->target))
          best = &ev;
      }

      if (!best) {
        ++discards;
        if (discards >= params.discard_cap)
          throw GrowthStalledError("growth stalled: " + std::to_string(discards) +
                                       " consecutive candidates had no feasible connection",
                                   tree);
        continue;
      }

      tree.split_segment(best->target, best->solution.x_b, *cand);
      tree.update_hydrodynamics(best->target);
      tree.realize_radii();
      index.rebuild(tree);
      log_commit(options.eval_log, step, *best);
      discards = 0;
      break;
    }
  }

  tree.realize_radii();
  const TreeReport rep = tree.validate(domain);
  if (!rep.passes()) throw ValidationError("grown tree fails final validation");
  return tree;
}

} // namespace vascogen
