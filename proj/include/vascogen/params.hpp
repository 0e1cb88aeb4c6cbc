#pragma once

#include <cstdint>
#include <numbers>

#include "vascogen/errors.hpp"

namespace vascogen {

// Physiological and algorithmic parameters of a generation run.
// Defaults are standard human-arterial values; every field is overridable
// from the run configuration.
struct CcoParams {
  int k_term = 1;              // target number of terminals
  double q_perf = 8.33e-6;     // total perfusion flow, m^3/s
  double p_perf = 13332.0;     // root inlet pressure, Pa
  double p_term = 8000.0;      // terminal outlet pressure, Pa
  double mu = 3.6e-3;          // dynamic viscosity, Pa*s
  double gamma = 3.0;          // bifurcation exponent in r0^g = r1^g + r2^g
  int n_con = 20;              // nearest segments tried per candidate
  double eta = 1.0;            // terminal spacing scale factor
  std::uint64_t seed = 0;      // RNG seed
  double tol = 1e-6;           // solver relative tolerance
  int max_iter = 100;          // solver iteration cap
  int dim = 2;                 // 2 or 3

  // Growth-loop constants, kept configurable alongside the physiology.
  double clearance_margin = 0.01; // required slack between segment walls
  int discard_cap = 1000;         // consecutive infeasible candidates before abort
  double relax_factor = 0.9;      // d_thresh multiplier per relaxation
  int relax_every = 10;           // consecutive rejections per relaxation

  // 8*mu/pi, the coefficient of l/r^4 in the Poiseuille resistance.
  double poiseuille_coef() const { return 8.0 * mu / std::numbers::pi; }

  // Throws UsageError naming the offending field.
  void validate() const {
    if (k_term < 1) throw UsageError("k_term must be >= 1");
    if (!(q_perf > 0.0)) throw UsageError("q_perf must be > 0");
    if (!(p_perf > p_term)) throw UsageError("p_perf must be > p_term");
    if (!(mu > 0.0)) throw UsageError("mu must be > 0");
    if (!(gamma >= 1.0)) throw UsageError("gamma must be >= 1");
    if (n_con < 1) throw UsageError("n_con must be >= 1");
    if (!(eta > 0.0)) throw UsageError("eta must be > 0");
    if (!(tol > 0.0)) throw UsageError("tol must be > 0");
    if (max_iter < 1) throw UsageError("max_iter must be >= 1");
    if (dim != 2 && dim != 3) throw UsageError("dim must be 2 or 3");
    if (!(clearance_margin >= 0.0)) throw UsageError("clearance_margin must be >= 0");
    if (discard_cap < 1) throw UsageError("discard_cap must be >= 1");
    if (!(relax_factor > 0.0 && relax_factor <= 1.0))
      throw UsageError("relax_factor must be in (0, 1]");
    if (relax_every < 1) throw UsageError("relax_every must be >= 1");
  }
};

} // namespace vascogen
