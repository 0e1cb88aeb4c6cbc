#include "vascogen/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vascogen/errors.hpp"

namespace vascogen {

VesselTree VesselTree::init(const CcoParams& params, const Point& root_pos,
                            const Point& first_terminal, double domain_measure) {
  params.validate();
  if (!(domain_measure > 0.0)) throw UsageError("domain measure must be > 0");
  if (root_pos.dim != params.dim || first_terminal.dim != params.dim)
    throw UsageError("tree points must match params.dim");

  VesselTree t;
  t.params_ = params;
  t.set_domain_measure(domain_measure);

  const double len = dist(root_pos, first_terminal);
  if (!(len >= t.eps_len_))
    throw UsageError("root segment shorter than eps_len");

  SegmentRecord rec;
  rec.proximal = root_pos;
  rec.distal = first_terminal;
  rec.parent = kNoSegment;
  rec.beta = 1.0;
  rec.n_leaves = 1;
  rec.r_star = params.poiseuille_coef() * len;
  t.segs_.push_back(rec);
  t.root_ = 0;
  t.terminal_count_ = 1;
  return t;
}

void VesselTree::set_domain_measure(double measure) {
  if (!(measure > 0.0)) throw UsageError("domain measure must be > 0");
  eps_len_ = 1e-4 * std::pow(measure, 1.0 / params_.dim);
}

std::pair<SegmentId, SegmentId> VesselTree::split_segment(SegmentId id, const Point& bif_pos,
                                                          const Point& new_terminal) {
  if (id < 0 || id >= segment_count()) throw UsageError("split_segment: no such segment");
  SegmentRecord& s = segs_[static_cast<std::size_t>(id)];

  const double l_prox = dist(s.proximal, bif_pos);
  const double l_cont = dist(bif_pos, s.distal);
  const double l_leaf = dist(bif_pos, new_terminal);
  if (!(l_prox >= eps_len_ && l_cont >= eps_len_ && l_leaf >= eps_len_))
    throw UsageError("split_segment: degenerate geometry (segment below eps_len)");

  const SegmentId b = static_cast<SegmentId>(segs_.size());
  const SegmentId l = b + 1;

  SegmentRecord cont = s; // inherits the old subtree
  cont.proximal = bif_pos;
  cont.parent = id;
  cont.radius = 0.0;
  // Children keep their betas: the sibling pair under `cont` is the same pair
  // that sat under `s`, so only the shortened length enters r_star here.
  const double coef = params_.poiseuille_coef();
  if (cont.is_leaf()) {
    cont.r_star = coef * l_cont;
  } else {
    const SegmentRecord& cl = segs_[static_cast<std::size_t>(cont.children[0])];
    const SegmentRecord& cr = segs_[static_cast<std::size_t>(cont.children[1])];
    cont.r_star = coef * l_cont + 1.0 / (std::pow(cl.beta, 4) / cl.r_star +
                                         std::pow(cr.beta, 4) / cr.r_star);
  }

  SegmentRecord leaf;
  leaf.proximal = bif_pos;
  leaf.distal = new_terminal;
  leaf.parent = id;
  leaf.n_leaves = 1;
  leaf.r_star = coef * l_leaf;

  segs_.push_back(cont);
  segs_.push_back(leaf);
  for (SegmentId c : segs_[static_cast<std::size_t>(b)].children) {
    if (c != kNoSegment) segs_[static_cast<std::size_t>(c)].parent = b;
  }
  SegmentRecord& s2 = segs_[static_cast<std::size_t>(id)]; // reference may have moved
  s2.distal = bif_pos;
  s2.children = {b, l};
  ++terminal_count_;
  radii_realized_ = false;
  return {b, l};
}

double VesselTree::refresh_node(SegmentId id) {
  SegmentRecord& s = segs_[static_cast<std::size_t>(id)];
  const double coef = params_.poiseuille_coef();
  if (s.is_leaf()) {
    s.n_leaves = 1;
    s.r_star = coef * s.length();
    return s.r_star;
  }
  SegmentRecord& l = segs_[static_cast<std::size_t>(s.children[0])];
  SegmentRecord& r = segs_[static_cast<std::size_t>(s.children[1])];
  s.n_leaves = l.n_leaves + r.n_leaves;
  // q_l / q_r reduces to the integer leaf-count ratio; q_term cancels.
  const double ratio = std::pow((static_cast<double>(l.n_leaves) * l.r_star) /
                                    (static_cast<double>(r.n_leaves) * r.r_star),
                                0.25);
  const double g = params_.gamma;
  l.beta = std::pow(1.0 + std::pow(ratio, -g), -1.0 / g);
  r.beta = std::pow(1.0 + std::pow(ratio, g), -1.0 / g);
  s.r_star = coef * s.length() +
             1.0 / (std::pow(l.beta, 4) / l.r_star + std::pow(r.beta, 4) / r.r_star);
  return s.r_star;
}

void VesselTree::update_hydrodynamics(SegmentId from) {
  if (from < 0 || from >= segment_count()) throw UsageError("update_hydrodynamics: no such segment");
  for (SegmentId v = from; v != kNoSegment; v = segs_[static_cast<std::size_t>(v)].parent) {
    refresh_node(v);
  }
  segs_[static_cast<std::size_t>(root_)].beta = 1.0;
  radii_realized_ = false;
}

void VesselTree::update_all() {
  // Children before parents: depth-first post-order from the root.
  std::vector<SegmentId> order;
  order.reserve(segs_.size());
  std::vector<SegmentId> stack{root_};
  while (!stack.empty()) {
    SegmentId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (SegmentId c : segs_[static_cast<std::size_t>(v)].children) {
      if (c != kNoSegment) stack.push_back(c);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) refresh_node(*it);
  segs_[static_cast<std::size_t>(root_)].beta = 1.0;
  radii_realized_ = false;
}

void VesselTree::realize_radii() {
  SegmentRecord& rt = segs_[static_cast<std::size_t>(root_)];
  const double dp = params_.p_perf - params_.p_term;
  rt.radius = std::pow(rt.r_star * params_.q_perf / dp, 0.25);
  std::vector<SegmentId> stack{root_};
  while (!stack.empty()) {
    SegmentId v = stack.back();
    stack.pop_back();
    SegmentRecord& s = segs_[static_cast<std::size_t>(v)];
    if (v != root_) s.radius = s.beta * segs_[static_cast<std::size_t>(s.parent)].radius;
    for (SegmentId c : s.children) {
      if (c != kNoSegment) stack.push_back(c);
    }
  }
  radii_realized_ = true;
}

double VesselTree::volume() const {
  if (!radii_realized_) throw UsageError("tree_volume: radii not realized");
  double v = 0.0;
  for (const auto& s : segs_) v += s.length() * s.radius * s.radius;
  return std::numbers::pi * v;
}

double VesselTree::node_pressure(SegmentId id) const {
  if (!radii_realized_) throw UsageError("node_pressure: radii not realized");
  const double coef = params_.poiseuille_coef();
  double p = params_.p_perf;
  for (SegmentId v = id; v != kNoSegment; v = seg(v).parent) {
    const SegmentRecord& s = seg(v);
    const double q = flow(v);
    p -= coef * q * s.length() / std::pow(s.radius, 4);
  }
  return p;
}

void VesselTree::check_structure() const {
  if (segs_.empty() || root_ == kNoSegment) throw UsageError("tree is empty");
  int leaves = 0;
  for (SegmentId i = 0; i < segment_count(); ++i) {
    const SegmentRecord& s = seg(i);
    const bool c0 = s.children[0] != kNoSegment;
    const bool c1 = s.children[1] != kNoSegment;
    if (c0 != c1) throw UsageError("segment " + std::to_string(i) + " has exactly one child");
    if (!c0) ++leaves;
    for (SegmentId c : s.children) {
      if (c != kNoSegment && seg(c).parent != i)
        throw UsageError("segment " + std::to_string(c) + " has inconsistent parent link");
    }
    if ((i == root_) != (s.parent == kNoSegment))
      throw UsageError("segment " + std::to_string(i) + " has inconsistent root/parent state");
  }
  if (leaves != terminal_count_) throw UsageError("terminal count does not match leaf count");
  if (segment_count() != 2 * terminal_count_ - 1)
    throw UsageError("segment count is not 2*terminals - 1");
  for (SegmentId i = 0; i < segment_count(); ++i) {
    const SegmentRecord& s = seg(i);
    if (!s.is_leaf()) {
      const int sum = seg(s.children[0]).n_leaves + seg(s.children[1]).n_leaves;
      if (s.n_leaves != sum)
        throw UsageError("segment " + std::to_string(i) + " has inconsistent n_leaves");
    }
  }
}

namespace {

// Segments are adjacent iff they share an endpoint node: parent/child pairs
// and sibling pairs.
bool topologically_adjacent(const VesselTree& t, SegmentId a, SegmentId b) {
  const auto& sa = t.seg(a);
  const auto& sb = t.seg(b);
  if (sa.parent == b || sb.parent == a) return true;
  return sa.parent != kNoSegment && sa.parent == sb.parent;
}

} // namespace

TreeReport VesselTree::validate(const PerfusionDomain& domain) const {
  if (!radii_realized_) throw UsageError("validate: radii not realized");
  if (domain.dim() != params_.dim) throw UsageError("validate: domain/tree dimension mismatch");
  check_structure();

  TreeReport rep;
  rep.terminal_count = terminal_count_;
  rep.segment_count = segment_count();
  rep.total_volume = volume();

  const double g = params_.gamma;
  double murray = 0.0;
  for (SegmentId i = 0; i < segment_count(); ++i) {
    const SegmentRecord& s = seg(i);
    if (s.is_leaf()) continue;
    const double rp = std::pow(s.radius, g);
    const double rl = std::pow(seg(s.children[0]).radius, g);
    const double rr = std::pow(seg(s.children[1]).radius, g);
    murray = std::max(murray, std::abs(rp - rl - rr) / rp);
  }
  rep.max_murray_residual = murray;

  const double dp = params_.p_perf - params_.p_term;
  double perr = 0.0;
  int depth = 0;
  for (SegmentId i = 0; i < segment_count(); ++i) {
    if (!seg(i).is_leaf()) continue;
    perr = std::max(perr, std::abs(node_pressure(i) - params_.p_term) / dp);
    int d = 0;
    for (SegmentId v = i; v != kNoSegment; v = seg(v).parent) ++d;
    depth = std::max(depth, d);
  }
  rep.max_terminal_pressure_error = perr;
  rep.max_depth = depth;

  double margin = std::numeric_limits<double>::infinity();
  for (SegmentId a = 0; a < segment_count(); ++a) {
    for (SegmentId b = a + 1; b < segment_count(); ++b) {
      if (topologically_adjacent(*this, a, b)) continue;
      const auto& sa = seg(a);
      const auto& sb = seg(b);
      const double d = segment_segment_distance(sa.proximal, sa.distal, sb.proximal, sb.distal);
      margin = std::min(margin, (d - sa.radius - sb.radius) / (sa.radius + sb.radius));
    }
  }
  rep.min_clearance_margin = margin;

  bool inside = true;
  const double step = domain.default_step();
  for (const auto& s : segs_) {
    if (!domain.segment_inside(SegmentGeometry{s.proximal, s.distal, s.radius}, step)) {
      inside = false;
      break;
    }
  }
  rep.all_inside_domain = inside;
  return rep;
}

} // namespace vascogen
