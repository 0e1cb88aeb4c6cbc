#include "vascogen/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vascogen {

double LocalBifurcationProblem::effective_eps_len() const {
  if (eps_len > 0.0) return eps_len;
  const double d01 = dist(x0, x1);
  const double d02 = dist(x0, x2);
  const double d12 = dist(x1, x2);
  return 1e-4 * std::max({d01, d02, d12});
}

void LocalBifurcationProblem::validate() const {
  if (!x0.finite() || !x1.finite() || !x2.finite())
    throw UsageError("bifurcation problem: non-finite endpoint");
  if (!(f1 > 0.0) || !(f2 > 0.0))
    throw UsageError("bifurcation problem: flows must be > 0");
  if (!(p0 > std::max(p1, p2)))
    throw UsageError("bifurcation problem: p0 must exceed max(p1, p2)");
  if (!(mu > 0.0) || !(gamma >= 1.0) || !(tol > 0.0) || max_iter < 1)
    throw UsageError("bifurcation problem: bad solver parameters");
  const double eps = effective_eps_len();
  if (dist(x0, x1) < eps || dist(x0, x2) < eps || dist(x1, x2) < eps)
    throw UsageError("bifurcation problem: endpoints not pairwise distinct");
}

namespace {

struct Residual {
  // r_i^gamma = A_i * dp_i^(-gamma/4) with A_i = (k f_i l_i)^(gamma/4).
  double a0, a1, a2; // A_i
  double p0, p1, p2;
  double e; // gamma / 4

  double r0_pow(double pb) const { return a0 * std::pow(p0 - pb, -e); }
  double g(double pb) const {
    return r0_pow(pb) - a1 * std::pow(pb - p1, -e) - a2 * std::pow(pb - p2, -e);
  }
};

} // namespace

RadiiSolution solve_radii(const LocalBifurcationProblem& prob, const Point& x_b) {
  const double l0 = dist(prob.x0, x_b);
  const double l1 = dist(prob.x1, x_b);
  const double l2 = dist(prob.x2, x_b);
  if (!(l0 > 0.0 && l1 > 0.0 && l2 > 0.0))
    throw UsageError("solve_radii: x_b coincides with an endpoint");

  const double k = 8.0 * prob.mu / std::numbers::pi;
  const double e = prob.gamma / 4.0;
  Residual res{std::pow(k * prob.f0() * l0, e), std::pow(k * prob.f1 * l1, e),
               std::pow(k * prob.f2 * l2, e), prob.p0, prob.p1, prob.p2, e};

  double lo = std::max(prob.p1, prob.p2);
  double hi = prob.p0;
  const double width0 = hi - lo;

  // g -> -inf at the lower end and +inf at the upper end; verify the signs so
  // corrupted problem data (NaNs smuggled past validate, inverted pressures)
  // surfaces as an explicit error instead of a silent wrong root.
  {
    const double d = 1e-12 * width0;
    if (!(res.g(lo + d) < 0.0) || !(res.g(hi - d) > 0.0))
      throw UsageError("solve_radii: residual has the same sign at both bracket ends");
  }

  double mid = 0.5 * (lo + hi);
  int it = 0;
  const int cap = std::max(prob.max_iter, 100);
  for (; it < cap; ++it) {
    mid = 0.5 * (lo + hi);
    const double gm = res.g(mid);
    if (gm < 0.0)
      lo = mid;
    else
      hi = mid;
    const double gnorm = std::abs(gm) / res.r0_pow(mid);
    if ((hi - lo) <= prob.tol * width0 && gnorm <= prob.tol) break;
    if ((hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) break;
  }
  mid = 0.5 * (lo + hi);

  RadiiSolution sol;
  sol.p_b = mid;
  sol.r0 = std::pow(k * prob.f0() * l0 / (prob.p0 - mid), 0.25);
  sol.r1 = std::pow(k * prob.f1 * l1 / (mid - prob.p1), 0.25);
  sol.r2 = std::pow(k * prob.f2 * l2 / (mid - prob.p2), 0.25);
  sol.iterations = it + 1;

  const double gnorm = std::abs(res.g(mid)) / res.r0_pow(mid);
  if (!(gnorm <= 10.0 * prob.tol))
    throw UsageError("solve_radii: closure residual did not converge (corrupt problem data?)");
  return sol;
}

namespace {

double cost_at(const LocalBifurcationProblem& prob, const Point& x_b, const RadiiSolution& r) {
  return std::numbers::pi *
         (dist(prob.x0, x_b) * r.r0 * r.r0 + dist(prob.x1, x_b) * r.r1 * r.r1 +
          dist(prob.x2, x_b) * r.r2 * r.r2);
}

bool near_endpoint(const LocalBifurcationProblem& prob, const Point& p, double eps) {
  return dist(p, prob.x0) < eps || dist(p, prob.x1) < eps || dist(p, prob.x2) < eps;
}

BifurcationSolution make_solution(const LocalBifurcationProblem& prob, const Point& x_b,
                                  const RadiiSolution& r) {
  BifurcationSolution s;
  s.x_b = x_b;
  s.r0 = r.r0;
  s.r1 = r.r1;
  s.r2 = r.r2;
  s.p_b = r.p_b;
  s.cost = cost_at(prob, x_b, r);
  return s;
}

} // namespace

BifurcationSolution optimal_bifurcation(const LocalBifurcationProblem& prob) {
  prob.validate();
  const double eps = prob.effective_eps_len();

  const double f0 = prob.f0();
  Point x = (1.0 / (2.0 * f0)) * (f0 * prob.x0 + prob.f1 * prob.x1 + prob.f2 * prob.x2);
  x.dim = prob.x0.dim;
  if (near_endpoint(prob, x, eps))
    throw DegenerateBifurcation("bifurcation point collapses onto an endpoint");

  RadiiSolution r = solve_radii(prob, x);
  BifurcationSolution best = make_solution(prob, x, r);

  bool converged = false;
  int it = 0;
  for (; it < prob.max_iter; ++it) {
    const double w0 = r.r0 * r.r0, w1 = r.r1 * r.r1, w2 = r.r2 * r.r2;
    Point xn = (1.0 / (w0 + w1 + w2)) * (w0 * prob.x0 + w1 * prob.x1 + w2 * prob.x2);
    xn.dim = prob.x0.dim;
    if (near_endpoint(prob, xn, eps))
      throw DegenerateBifurcation("bifurcation point collapses onto an endpoint");

    r = solve_radii(prob, xn);
    const BifurcationSolution cand = make_solution(prob, xn, r);
    if (cand.cost < best.cost) best = cand;

    const double maxlen =
        std::max({dist(prob.x0, xn), dist(prob.x1, xn), dist(prob.x2, xn)});
    const double moved = dist(xn, x);
    x = xn;
    if (moved < prob.tol * maxlen) {
      converged = true;
      ++it;
      break;
    }
  }

  if (!converged) {
    // The barycenter map is not provably monotone in cost; fall back to a
    // coarse grid sweep and keep whichever answer is cheaper.
    BifurcationSolution bf = brute_force_bifurcation(prob, 21, 3);
    if (bf.cost < best.cost) best = bf;
  }
  best.converged = converged;
  best.iterations = it;
  return best;
}

BifurcationSolution brute_force_bifurcation(const LocalBifurcationProblem& prob,
                                            int grid_resolution, int refinement_levels) {
  prob.validate();
  if (grid_resolution < 3) throw UsageError("brute_force_bifurcation: grid_resolution must be >= 3");
  const double eps = prob.effective_eps_len();
  const int dim = prob.x0.dim;

  Point lo(std::min({prob.x0.x, prob.x1.x, prob.x2.x}),
           std::min({prob.x0.y, prob.x1.y, prob.x2.y}),
           std::min({prob.x0.z, prob.x1.z, prob.x2.z}));
  Point hi(std::max({prob.x0.x, prob.x1.x, prob.x2.x}),
           std::max({prob.x0.y, prob.x1.y, prob.x2.y}),
           std::max({prob.x0.z, prob.x1.z, prob.x2.z}));

  bool found = false;
  Point best_x;
  RadiiSolution best_r;
  double best_cost = std::numeric_limits<double>::infinity();

  const int nz = (dim == 3) ? grid_resolution : 1;
  for (int level = 0; level <= refinement_levels; ++level) {
    const Point span = hi - lo;
    for (int iz = 0; iz < nz; ++iz) {
      const double z = (dim == 3) ? lo.z + span.z * iz / (grid_resolution - 1) : 0.0;
      for (int iy = 0; iy < grid_resolution; ++iy) {
        const double y = lo.y + span.y * iy / (grid_resolution - 1);
        for (int ix = 0; ix < grid_resolution; ++ix) {
          const double x = lo.x + span.x * ix / (grid_resolution - 1);
          Point p = (dim == 3) ? Point(x, y, z) : Point(x, y);
          if (near_endpoint(prob, p, eps)) continue;
          const RadiiSolution r = solve_radii(prob, p);
          const double c = cost_at(prob, p, r);
          if (c < best_cost) {
            best_cost = c;
            best_x = p;
            best_r = r;
            found = true;
          }
        }
      }
    }
    if (!found) throw DegenerateBifurcation("brute force grid found no admissible point");
    // Recenter on the incumbent and shrink 4x for the next level.
    const Point half = (1.0 / 8.0) * (hi - lo);
    lo = best_x - half;
    hi = best_x + half;
  }

  BifurcationSolution s = make_solution(prob, best_x, best_r);
  s.converged = true;
  return s;
}

double local_cost(const BifurcationSolution& sol, const LocalBifurcationProblem& prob) {
  if (!(sol.r0 > 0.0 && sol.r1 > 0.0 && sol.r2 > 0.0))
    throw UsageError("local_cost: solution radii not set");
  return std::numbers::pi *
         (dist(prob.x0, sol.x_b) * sol.r0 * sol.r0 + dist(prob.x1, sol.x_b) * sol.r1 * sol.r1 +
          dist(prob.x2, sol.x_b) * sol.r2 * sol.r2);
}

} // namespace vascogen
