#include "vascogen/tree_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "vascogen/errors.hpp"

namespace vascogen {

namespace {

constexpr const char* kHeader = "id,parent,px,py,pz,dx,dy,dz,radius,flow,beta";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool rel_close(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tol * scale;
}

} // namespace

std::string serialize_tree(const VesselTree& tree) {
  if (!tree.radii_realized()) throw UsageError("write_tree: radii not realized");
  tree.check_structure();

  const int n = tree.segment_count();
  std::vector<SegmentId> order;   // BFS order: parents precede children
  std::vector<SegmentId> file_id(static_cast<std::size_t>(n), kNoSegment);
  order.reserve(static_cast<std::size_t>(n));
  order.push_back(tree.root());
  file_id[static_cast<std::size_t>(tree.root())] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (SegmentId c : tree.seg(order[head]).children) {
      if (c == kNoSegment) continue;
      file_id[static_cast<std::size_t>(c)] = static_cast<SegmentId>(order.size());
      order.push_back(c);
    }
  }

  std::string out(kHeader);
  out.push_back('\n');
  for (std::size_t row = 0; row < order.size(); ++row) {
    const SegmentRecord& s = tree.seg(order[row]);
    const SegmentId parent = s.parent == kNoSegment
                                 ? kNoSegment
                                 : file_id[static_cast<std::size_t>(s.parent)];
    out += std::to_string(row);
    out.push_back(',');
    out += std::to_string(parent);
    for (double v : {s.proximal.x, s.proximal.y, s.proximal.z, s.distal.x, s.distal.y, s.distal.z,
                     s.radius, tree.flow(order[row]), s.beta}) {
      out.push_back(',');
      out += fmt17(v);
    }
    out.push_back('\n');
  }
  return out;
}

void write_tree(const VesselTree& tree, const std::string& path) {
  const std::string data = serialize_tree(tree);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

// Rebuilds a VesselTree from parsed rows; friend of VesselTree.
class TreeFileCodec {
public:
  struct Row {
    SegmentId id, parent;
    Point proximal, distal;
    double radius, flow, beta;
  };

  static VesselTree build(const std::vector<Row>& rows, int dim) {
    VesselTree t;
    t.params_ = CcoParams{};
    t.params_.dim = dim;
    t.segs_.resize(rows.size());
    for (const Row& r : rows) {
      SegmentRecord& s = t.segs_[static_cast<std::size_t>(r.id)];
      s.proximal = r.proximal;
      s.distal = r.distal;
      s.parent = r.parent;
      s.radius = r.radius;
      s.beta = r.beta;
      if (r.parent != kNoSegment) {
        SegmentRecord& p = t.segs_[static_cast<std::size_t>(r.parent)];
        if (p.children[0] == kNoSegment)
          p.children[0] = r.id;
        else if (p.children[1] == kNoSegment)
          p.children[1] = r.id;
        else
          throw UsageError("tree file: segment " + std::to_string(r.parent) +
                           " has more than two children");
      }
    }
    t.root_ = 0;
    int terminals = 0;
    for (const auto& s : t.segs_)
      if (s.is_leaf()) ++terminals;
    t.terminal_count_ = terminals;
    // Recompute n_leaves and r_star bottom-up; stored betas drive the
    // parallel-combination term so the recomputation is gamma-free.
    const double coef = t.params_.poiseuille_coef();
    for (auto it = t.segs_.rbegin(); it != t.segs_.rend(); ++it) {
      if (it->is_leaf()) {
        it->n_leaves = 1;
        it->r_star = coef * it->length();
      } else {
        const SegmentRecord& l = t.segs_[static_cast<std::size_t>(it->children[0])];
        const SegmentRecord& r = t.segs_[static_cast<std::size_t>(it->children[1])];
        it->n_leaves = l.n_leaves + r.n_leaves;
        it->r_star = coef * it->length() + 1.0 / (std::pow(l.beta, 4) / l.r_star +
                                                  std::pow(r.beta, 4) / r.r_star);
      }
    }
    t.params_.q_perf = rows[0].flow; // root flow is the total perfusion
    t.radii_realized_ = true;
    return t;
  }
};

VesselTree parse_tree(const std::string& text, int dim_hint) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw UsageError("tree file: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw UsageError("tree file: bad header (expected '" + std::string(kHeader) + "')");

  std::vector<TreeFileCodec::Row> rows;
  int lineno = 1;
  bool any_z = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> f;
    f.reserve(11);
    const char* p = line.c_str();
    for (int i = 0; i < 11; ++i) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p || errno == ERANGE || !std::isfinite(v))
        throw UsageError("tree file line " + std::to_string(lineno) + ": malformed field " +
                         std::to_string(i + 1));
      f.push_back(v);
      p = end;
      if (i < 10) {
        if (*p != ',')
          throw UsageError("tree file line " + std::to_string(lineno) + ": expected 11 fields");
        ++p;
      }
    }
    if (*p != '\0')
      throw UsageError("tree file line " + std::to_string(lineno) + ": trailing characters");

    TreeFileCodec::Row r;
    r.id = static_cast<SegmentId>(f[0]);
    r.parent = static_cast<SegmentId>(f[1]);
    if (static_cast<double>(r.id) != f[0] || static_cast<double>(r.parent) != f[1])
      throw UsageError("tree file line " + std::to_string(lineno) + ": non-integer id/parent");
    r.proximal = Point(f[2], f[3], f[4]);
    r.distal = Point(f[5], f[6], f[7]);
    r.radius = f[8];
    r.flow = f[9];
    r.beta = f[10];
    any_z = any_z || f[4] != 0.0 || f[7] != 0.0;
    rows.push_back(r);
  }
  if (rows.empty()) throw UsageError("tree file: no segments");

  const int dim = dim_hint != 0 ? dim_hint : (any_z ? 3 : 2);
  if (dim == 2 && any_z) throw UsageError("tree file: nonzero z coordinates in a 2D tree");

  // Structural checks: dense ids, one root in row 0, parents precede children.
  const int n = static_cast<int>(rows.size());
  for (int i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (r.id != i) throw UsageError("tree file: ids must be dense and ascending (row " +
                                    std::to_string(i) + ")");
    if (i == 0) {
      if (r.parent != kNoSegment) throw UsageError("tree file: row 0 must be the root (parent -1)");
    } else {
      if (r.parent == kNoSegment) throw UsageError("tree file: multiple roots (row " +
                                                   std::to_string(i) + ")");
      if (r.parent < 0 || r.parent >= i)
        throw UsageError("tree file: parent of segment " + std::to_string(i) +
                         " does not precede it (dangling parent?)");
    }
    if (!(r.radius > 0.0)) throw UsageError("tree file: segment " + std::to_string(i) +
                                            " has non-positive radius");
    if (!(r.beta > 0.0 && r.beta <= 1.0))
      throw UsageError("tree file: segment " + std::to_string(i) + " has beta outside (0,1]");
    if (!(r.flow > 0.0)) throw UsageError("tree file: segment " + std::to_string(i) +
                                          " has non-positive flow");
    for (Point* pt : {&rows[static_cast<std::size_t>(i)].proximal,
                      &rows[static_cast<std::size_t>(i)].distal})
      pt->dim = dim;
    if (!(dist(r.proximal, r.distal) > 0.0))
      throw UsageError("tree file: segment " + std::to_string(i) + " has zero length");
  }
  if (rows[0].beta != 1.0) throw UsageError("tree file: root beta must be 1");

  VesselTree tree = TreeFileCodec::build(rows, dim);
  tree.check_structure();

  // Geometric coherence: a child's proximal point is its parent's distal.
  for (SegmentId i = 1; i < tree.segment_count(); ++i) {
    const auto& s = tree.seg(i);
    const auto& p = tree.seg(s.parent);
    if (s.proximal.x != p.distal.x || s.proximal.y != p.distal.y || s.proximal.z != p.distal.z)
      throw UsageError("tree file: segment " + std::to_string(i) +
                       " does not start at its parent's distal point");
  }

  // Consistency of the stored hydrodynamic fields (1e-9 relative).
  const double q_root = rows[0].flow;
  const int terminals = tree.terminal_count();
  for (SegmentId i = 0; i < tree.segment_count(); ++i) {
    const auto& s = tree.seg(i);
    const double implied = q_root * (static_cast<double>(s.n_leaves) / terminals);
    if (!rel_close(rows[static_cast<std::size_t>(i)].flow, implied, 1e-9))
      throw UsageError("tree file: flow of segment " + std::to_string(i) +
                       " is inconsistent with the leaf-count split");
    if (s.parent != kNoSegment) {
      const auto& p = tree.seg(s.parent);
      if (!rel_close(s.radius, s.beta * p.radius, 1e-9))
        throw UsageError("tree file: radius of segment " + std::to_string(i) +
                         " is inconsistent with beta * parent radius");
    }
    if (!s.is_leaf()) {
      const auto& l = tree.seg(s.children[0]);
      const auto& r = tree.seg(s.children[1]);
      const double ratio = std::pow((static_cast<double>(l.n_leaves) * l.r_star) /
                                        (static_cast<double>(r.n_leaves) * r.r_star),
                                    0.25);
      if (!rel_close(l.beta / r.beta, ratio, 1e-9))
        throw UsageError("tree file: betas under segment " + std::to_string(i) +
                         " are inconsistent with the resistance ratio rule");
    }
  }
  return tree;
}

VesselTree read_tree(const std::string& path, int dim_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tree file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tree(buf.str(), dim_hint);
}

} // namespace vascogen
