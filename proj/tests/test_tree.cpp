#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vascogen/errors.hpp"
#include "vascogen/tree.hpp"

using namespace vascogen;

namespace {

// mu chosen so 8*mu/pi == 1.
CcoParams unit_coef_params() {
  CcoParams p;
  p.mu = std::numbers::pi / 8.0;
  p.q_perf = 1.0;
  p.p_perf = 1.0;
  p.p_term = 0.0;
  p.dim = 2;
  return p;
}

// Root (0,0)->(0,0.5) with two equal-length mirrored children. Identical
// leaf subtrees, so the sibling betas coincide.
VesselTree symmetric_pair(const CcoParams& base) {
  CcoParams p = base;
  p.dim = 2;
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(-0.5, 0.5), 1.0);
  t.update_hydrodynamics(t.root());
  t.split_segment(0, Point(0.0, 0.5), Point(0.5, 0.5)); // children (0,0.5)->(-0.5,0.5)|(0.5,0.5)
  t.update_hydrodynamics(0);
  return t;
}

} // namespace

TEST_CASE("init_tree base case") {
  const CcoParams p = unit_coef_params();
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(1.0, 0.0), 1.0);
  CHECK(t.seg(t.root()).r_star == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.segment_count() == 1);
  CHECK(t.terminal_count() == 1);
  CHECK(t.seg(t.root()).beta == 1.0);

  // below eps_len = 1e-4 * 1
  CHECK_THROWS_AS(VesselTree::init(p, Point(0.0, 0.0), Point(5e-5, 0.0), 1.0), UsageError);
}

TEST_CASE("split_segment counts and leaf accounting") {
  const CcoParams p = unit_coef_params();
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(1.0, 0.0), 1.0);
  auto [b, l] = t.split_segment(0, Point(0.5, 0.0), Point(0.5, 0.5));
  t.update_hydrodynamics(0);
  CHECK(t.segment_count() == 3);
  CHECK(t.terminal_count() == 2);
  CHECK(b == 1);
  CHECK(l == 2);
  CHECK(t.seg(0).n_leaves == 2);
  CHECK(t.seg(b).n_leaves == 1);
  CHECK(t.seg(l).n_leaves == 1);
  CHECK(t.seg(0).children[0] == b);
  CHECK(t.seg(0).children[1] == l);
  t.check_structure();

  // degenerate split leaves the tree unchanged
  const int before = t.segment_count();
  CHECK_THROWS_AS(t.split_segment(b, t.seg(b).proximal, Point(0.9, 0.9)), UsageError);
  CHECK(t.segment_count() == before);
  t.check_structure();

  // splitting a leaf vs an internal segment both preserve the strict-binary
  // invariant (enumerated on the 3-segment tree)
  {
    VesselTree leaf_split = t;
    leaf_split.split_segment(l, Point(0.52, 0.25), Point(0.8, 0.3));
    leaf_split.update_hydrodynamics(l);
    leaf_split.check_structure();
    CHECK(leaf_split.terminal_count() == 3);
  }
  {
    VesselTree internal_split = t;
    internal_split.split_segment(0, Point(0.25, 0.0), Point(0.3, -0.4));
    internal_split.update_hydrodynamics(0);
    internal_split.check_structure();
    CHECK(internal_split.terminal_count() == 3);
  }

  // n_leaves along the path root->target all incremented by one
  VesselTree big = oracles::random_tree(9, 2, 77);
  const SegmentId target = 5;
  std::vector<int> before_counts;
  for (SegmentId v = target; v != kNoSegment; v = big.seg(v).parent)
    before_counts.push_back(big.seg(v).n_leaves);
  const auto& s = big.seg(target);
  big.split_segment(target, lerp(s.proximal, s.distal, 0.5), Point(0.91, 0.93));
  big.update_hydrodynamics(target);
  std::size_t i = 0;
  for (SegmentId v = target; v != kNoSegment; v = big.seg(v).parent, ++i)
    CHECK(big.seg(v).n_leaves == before_counts[i] + 1);
}

TEST_CASE("symmetric bifurcation: beta == 2^(-1/gamma)") {
  CcoParams p = unit_coef_params();
  p.gamma = 3.0;
  VesselTree t = symmetric_pair(p);
  const auto& root = t.seg(t.root());
  const double bl = t.seg(root.children[0]).beta;
  const double br = t.seg(root.children[1]).beta;
  CHECK(bl == doctest::Approx(br).epsilon(1e-15));
  CHECK(bl == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-12));
  CHECK(bl == doctest::Approx(0.79370052598409979).epsilon(1e-12));

  p.gamma = 2.0;
  VesselTree t2 = symmetric_pair(p);
  CHECK(t2.seg(t2.seg(0).children[0]).beta ==
        doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
}

TEST_CASE("realize_radii: unit case, fourth-root flow scaling, beta cascade") {
  CcoParams p = unit_coef_params(); // q=1, dp=1
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(1.0, 0.0), 1.0);
  t.update_hydrodynamics(0);
  t.realize_radii();
  CHECK(t.seg(0).radius == doctest::Approx(1.0).epsilon(1e-15)); // r_star=1, q=1, dp=1

  // q_perf * 16 doubles every radius
  CcoParams p16 = p;
  p16.q_perf *= 16.0;
  VesselTree t16 = t;
  t16.set_params(p16);
  t16.update_all();
  t16.realize_radii();
  CHECK(t16.seg(0).radius == doctest::Approx(2.0 * t.seg(0).radius).epsilon(1e-14));

  // beta cascade on the symmetric pair
  CcoParams ps = unit_coef_params();
  ps.gamma = 3.0;
  VesselTree sym = symmetric_pair(ps);
  sym.realize_radii();
  const auto& root = sym.seg(sym.root());
  CHECK(sym.seg(root.children[0]).radius / root.radius ==
        doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("tree_volume") {
  CcoParams p = unit_coef_params();
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(1.0, 0.0), 1.0);
  t.update_hydrodynamics(0);
  CHECK_THROWS_AS(t.volume(), UsageError); // radii unset
  t.realize_radii();
  CHECK(t.volume() == doctest::Approx(std::numbers::pi).epsilon(1e-14)); // l=1, r=1

  // 3-segment tree: hand-sum of the three cylinder volumes from the stored
  // lengths and realized radii.
  VesselTree t3 = symmetric_pair(p);
  t3.realize_radii();
  double hand = 0.0;
  for (SegmentId i = 0; i < t3.segment_count(); ++i)
    hand += std::numbers::pi * t3.seg(i).length() * t3.seg(i).radius * t3.seg(i).radius;
  CHECK(t3.volume() == doctest::Approx(hand).epsilon(1e-15));
}

TEST_CASE("node_pressure") {
  CcoParams p = unit_coef_params(); // dp = 1, q = 1, coefficient 1
  VesselTree t = VesselTree::init(p, Point(0.0, 0.0), Point(1.0, 0.0), 1.0);
  t.update_hydrodynamics(0);
  t.realize_radii();
  // single segment: distal node sits exactly at p_term
  CHECK(t.node_pressure(0) == doctest::Approx(p.p_term).epsilon(1e-12));

  VesselTree sym = symmetric_pair(p);
  sym.realize_radii();
  const double p_int = sym.node_pressure(sym.root());
  CHECK(p_int > p.p_term);
  CHECK(p_int < p.p_perf);
  for (SegmentId i = 1; i < sym.segment_count(); ++i) {
    // terminals at p_term (absolute tolerance: p_term is 0 here, dp is 1)
    CHECK(std::abs(sym.node_pressure(i) - p.p_term) < 1e-9);
  }
}

TEST_CASE("hydrodynamic oracle: r_star(root) matches a full network solve") {
  // random 17-terminal trees (33 segments)
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    VesselTree t = oracles::random_tree(17, 2, seed);
    const double r_eq_oracle = oracles::network_equivalent_resistance(t);
    const double r_eq_tree = t.seg(t.root()).r_star / std::pow(t.seg(t.root()).radius, 4);
    CHECK(std::abs(r_eq_tree - r_eq_oracle) / r_eq_oracle < 1e-9);

    // terminal pressures from the independent solve all equal p_term
    const auto pressures = oracles::network_node_pressures(t);
    const double dp = t.params().p_perf - t.params().p_term;
    for (SegmentId i = 0; i < t.segment_count(); ++i) {
      if (!t.seg(i).is_leaf()) continue;
      CHECK(std::abs(pressures[static_cast<std::size_t>(i)] - t.params().p_term) / dp < 1e-6);
    }
  }
}

TEST_CASE("incremental path update equals full recomputation") {
  VesselTree t = oracles::random_tree(20, 3, 5);
  VesselTree full = t;
  full.update_all();
  for (SegmentId i = 0; i < t.segment_count(); ++i) {
    CHECK(t.seg(i).r_star == doctest::Approx(full.seg(i).r_star).epsilon(1e-12));
    CHECK(t.seg(i).beta == doctest::Approx(full.seg(i).beta).epsilon(1e-12));
    CHECK(t.seg(i).n_leaves == full.seg(i).n_leaves);
  }
}

TEST_CASE("validate: report fields and fault injection") {
  CcoParams p; // default physiology
  p.dim = 2;
  VesselTree t = oracles::random_tree(12, 2, 42, p);
  const auto domain = PerfusionDomain::box(Point(-0.5, -0.5), Point(1.5, 1.5));
  const TreeReport rep = t.validate(domain);
  CHECK(rep.terminal_count == 12);
  CHECK(rep.segment_count == 23);
  CHECK(rep.max_murray_residual <= 1e-6); // construction guarantees closure
  CHECK(rep.max_terminal_pressure_error <= 1e-6);
  CHECK(rep.all_inside_domain);
  CHECK(rep.max_depth >= 2);

  // hand-corrupt one beta: murray residual flagged above tolerance
  VesselTree bad = t;
  SegmentId child = kNoSegment;
  for (SegmentId i = 0; i < bad.segment_count(); ++i)
    if (bad.seg(i).parent != kNoSegment) child = i;
  bad.seg_mut(child).beta *= 1.01;
  bad.realize_radii();
  const TreeReport bad_rep = bad.validate(domain);
  CHECK(bad_rep.max_murray_residual > 1e-6);

  // shrink the domain: containment flag drops
  const auto tiny = PerfusionDomain::box(Point(0.4, 0.4), Point(0.6, 0.6));
  CHECK_FALSE(t.validate(tiny).all_inside_domain);
}

TEST_CASE("flow conservation and radius monotonicity") {
  VesselTree t = oracles::random_tree(25, 2, 9);
  for (SegmentId i = 0; i < t.segment_count(); ++i) {
    const auto& s = t.seg(i);
    if (!s.is_leaf()) {
      CHECK(s.n_leaves == t.seg(s.children[0]).n_leaves + t.seg(s.children[1]).n_leaves);
      // gamma >= 1 keeps children no wider than the parent
      CHECK(t.seg(s.children[0]).radius <= s.radius);
      CHECK(t.seg(s.children[1]).radius <= s.radius);
    }
    CHECK(s.beta > 0.0);
    CHECK(s.beta <= 1.0);
  }
  CHECK(t.seg(t.root()).n_leaves == t.terminal_count());
}
