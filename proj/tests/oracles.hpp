#pragma once

// Test-side reference implementations, kept independent of the library code
// paths they check: a dense linear solve of the full resistor network, a
// standalone bisection for the local closure equation, and small builders.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>
#include <vector>

#include "vascogen/tree.hpp"

namespace oracles {

// ---- dense linear algebra -------------------------------------------------

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular network matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// ---- full-network solves ----------------------------------------------------

// Node numbering: 0 = root inlet, i+1 = distal node of segment i.
inline int proximal_node(const vascogen::VesselTree& t, vascogen::SegmentId i) {
  const auto parent = t.seg(i).parent;
  return parent == vascogen::kNoSegment ? 0 : parent + 1;
}

inline double segment_resistance(const vascogen::VesselTree& t, vascogen::SegmentId i) {
  const auto& s = t.seg(i);
  return t.params().poiseuille_coef() * s.length() / std::pow(s.radius, 4);
}

// Equivalent inlet-to-terminals resistance: unit pressure at the inlet,
// ground at every terminal node, Kirchhoff solve for the interior, then
// R = 1 / (current drawn from the inlet).
inline double network_equivalent_resistance(const vascogen::VesselTree& t) {
  const int n_seg = t.segment_count();
  const int n_nodes = n_seg + 1;
  std::vector<double> fixed(n_nodes, 0.0);
  std::vector<bool> is_fixed(n_nodes, false);
  is_fixed[0] = true;
  fixed[0] = 1.0;
  for (vascogen::SegmentId i = 0; i < n_seg; ++i) {
    if (t.seg(i).is_leaf()) {
      is_fixed[i + 1] = true;
      fixed[i + 1] = 0.0;
    }
  }

  std::vector<int> unknown_of(n_nodes, -1);
  int n_unknown = 0;
  for (int v = 0; v < n_nodes; ++v)
    if (!is_fixed[v]) unknown_of[v] = n_unknown++;

  std::vector<double> pressure = fixed;
  if (n_unknown > 0) {
    std::vector<std::vector<double>> a(n_unknown, std::vector<double>(n_unknown, 0.0));
    std::vector<double> b(n_unknown, 0.0);
    for (vascogen::SegmentId i = 0; i < n_seg; ++i) {
      const int u = proximal_node(t, i);
      const int v = i + 1;
      const double g = 1.0 / segment_resistance(t, i);
      for (auto [from, to] : {std::pair{u, v}, std::pair{v, u}}) {
        if (is_fixed[from]) continue;
        const int r = unknown_of[from];
        a[r][r] += g;
        if (is_fixed[to])
          b[r] += g * fixed[to];
        else
          a[r][unknown_of[to]] -= g;
      }
    }
    const std::vector<double> x = solve_dense(std::move(a), std::move(b));
    for (int v = 0; v < n_nodes; ++v)
      if (!is_fixed[v]) pressure[v] = x[unknown_of[v]];
  }

  double inflow = 0.0;
  for (vascogen::SegmentId i = 0; i < n_seg; ++i) {
    if (proximal_node(t, i) == 0) inflow += (pressure[0] - pressure[i + 1]) / segment_resistance(t, i);
  }
  return 1.0 / inflow;
}

// Node pressures with the inlet held at p_perf and q_term drawn from every
// terminal node. Returns the pressure at each segment's distal node.
inline std::vector<double> network_node_pressures(const vascogen::VesselTree& t) {
  const int n_seg = t.segment_count();
  const int n_nodes = n_seg + 1;
  const double q_term = t.params().q_perf / t.terminal_count();

  // unknowns: every node except the inlet
  std::vector<std::vector<double>> a(n_nodes - 1, std::vector<double>(n_nodes - 1, 0.0));
  std::vector<double> b(n_nodes - 1, 0.0);
  for (vascogen::SegmentId i = 0; i < n_seg; ++i) {
    const int u = proximal_node(t, i);
    const int v = i + 1;
    const double g = 1.0 / segment_resistance(t, i);
    for (auto [from, to] : {std::pair{u, v}, std::pair{v, u}}) {
      if (from == 0) continue;
      const int r = from - 1;
      a[r][r] += g;
      if (to == 0)
        b[r] += g * t.params().p_perf;
      else
        a[r][to - 1] -= g;
    }
  }
  for (vascogen::SegmentId i = 0; i < n_seg; ++i) {
    if (t.seg(i).is_leaf()) b[i] -= q_term;
  }
  std::vector<double> x = solve_dense(std::move(a), std::move(b));
  return x; // x[i] = pressure at distal node of segment i
}

// ---- standalone closure-equation bisection ---------------------------------

// Root of r0(p)^gamma - r1(p)^gamma - r2(p)^gamma on (max(p1,p2), p0), with
// r_i^4 taken straight from the Poiseuille relations. Plain midpoint
// bisection, 200 fixed iterations.
inline double bisect_closure(double k, double gamma, double f1, double f2, double l0, double l1,
                             double l2, double p0, double p1, double p2) {
  const double f0 = f1 + f2;
  auto g = [&](double p) {
    const double r0 = std::pow(k * f0 * l0 / (p0 - p), 0.25);
    const double r1 = std::pow(k * f1 * l1 / (p - p1), 0.25);
    const double r2 = std::pow(k * f2 * l2 / (p - p2), 0.25);
    return std::pow(r0, gamma) - std::pow(r1, gamma) - std::pow(r2, gamma);
  };
  double lo = std::max(p1, p2);
  double hi = p0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- builders and misc ------------------------------------------------------

// Random topology via repeated splits in the unit square/cube; geometry is
// arbitrary but non-degenerate, which is all the hydrodynamic checks need.
inline vascogen::VesselTree random_tree(int terminals, int dim, std::uint64_t seed,
                                        vascogen::CcoParams params = {}) {
  using namespace vascogen;
  params.dim = dim;
  params.k_term = terminals;
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  auto rnd_point = [&]() {
    return dim == 2 ? Point(u01(eng), u01(eng)) : Point(u01(eng), u01(eng), u01(eng));
  };

  VesselTree t = VesselTree::init(params, dim == 2 ? Point(0.02, 0.5) : Point(0.02, 0.5, 0.5),
                                  rnd_point(), 1.0);
  t.update_hydrodynamics(t.root());
  while (t.terminal_count() < terminals) {
    const SegmentId target =
        static_cast<SegmentId>(eng() % static_cast<std::uint64_t>(t.segment_count()));
    const auto& s = t.seg(target);
    const double frac = 0.3 + 0.4 * u01(eng);
    const Point bif = lerp(s.proximal, s.distal, frac);
    const Point term = rnd_point();
    try {
      t.split_segment(target, bif, term);
    } catch (const Error&) {
      continue; // degenerate draw, try again
    }
    t.update_hydrodynamics(target);
  }
  t.realize_radii();
  return t;
}

// Unique scratch directory under the system temp root.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vascogen_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

} // namespace oracles
