#pragma once

#include "vascogen/errors.hpp"
#include "vascogen/geometry.hpp"

namespace vascogen {

// Thrown when the optimal branching point collapses onto one of the three
// endpoints; the caller treats the candidate connection as infeasible.
class DegenerateBifurcation : public Error {
public:
  using Error::Error;
};

// The fixed-endpoint, fixed-flow sub-problem solved when attaching a new
// terminal: parent inlet x0 at pressure p0 feeds x1 (flow f1, required
// pressure p1) and x2 (flow f2, required pressure p2) through a branching
// point to be placed.
struct LocalBifurcationProblem {
  Point x0, x1, x2;
  double f1 = 0.0, f2 = 0.0; // m^3/s
  double p0 = 0.0, p1 = 0.0, p2 = 0.0; // Pa
  double mu = 3.6e-3;
  double gamma = 3.0;
  double tol = 1e-6;
  int max_iter = 100;
  double eps_len = 0.0; // 0 -> 1e-4 * max pairwise endpoint distance

  double f0() const { return f1 + f2; }
  double effective_eps_len() const;
  void validate() const; // throws UsageError
};

struct RadiiSolution {
  double r0 = 0.0, r1 = 0.0, r2 = 0.0;
  double p_b = 0.0;
  int iterations = 0;
};

struct BifurcationSolution {
  Point x_b;
  double r0 = 0.0, r1 = 0.0, r2 = 0.0;
  double p_b = 0.0;
  double cost = 0.0; // m^3, pi * sum(l_i r_i^2)
  bool converged = false;
  int iterations = 0;
};

// With x_b fixed, the four unknowns (r0, r1, r2, p_b) satisfy
//   p0 - p_b = (8 mu/pi) f0 l0 / r0^4
//   p_b - p1 = (8 mu/pi) f1 l1 / r1^4
//   p_b - p2 = (8 mu/pi) f2 l2 / r2^4
//   r0^gamma = r1^gamma + r2^gamma
// Eliminating the radii leaves g(p_b) = r0^g - r1^g - r2^g, strictly
// increasing on (max(p1,p2), p0), solved by bisection.
RadiiSolution solve_radii(const LocalBifurcationProblem& prob, const Point& x_b);

// Minimizes the local volume over x_b: start at the flow-weighted centroid
// (f0 x0 + f1 x1 + f2 x2) / (2 f0), then iterate the cross-section-weighted
// barycenter (r0^2 x0 + r1^2 x1 + r2^2 x2) / (r0^2 + r1^2 + r2^2), keeping the
// best visited point. Falls back to grid refinement when the iteration does
// not converge; `converged` reports which path produced the answer. Throws
// DegenerateBifurcation when x_b collapses within eps_len of an endpoint.
BifurcationSolution optimal_bifurcation(const LocalBifurcationProblem& prob);

// Exhaustive baseline: evaluates every grid point of the bounding box of
// {x0,x1,x2} (skipping points within eps_len of an endpoint), then recenters
// and shrinks the grid 4x around the best point for each refinement level.
BifurcationSolution brute_force_bifurcation(const LocalBifurcationProblem& prob,
                                            int grid_resolution, int refinement_levels);

// pi * (l0 r0^2 + l1 r1^2 + l2 r2^2), lengths recomputed from prob and sol.x_b.
double local_cost(const BifurcationSolution& sol, const LocalBifurcationProblem& prob);

} // namespace vascogen
