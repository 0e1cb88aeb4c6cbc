#include "vascogen/svg.hpp"

#include <cstdio>
#include <fstream>

#include "vascogen/errors.hpp"

namespace vascogen {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string render_svg(const VesselTree& tree, const PerfusionDomain& domain) {
  if (tree.params().dim != 2 || domain.dim() != 2)
    throw UsageError("export_svg: only 2D trees can be rendered");
  if (!tree.radii_realized()) throw UsageError("export_svg: radii not realized");

  const Point lo = domain.bbox_lo();
  const Point hi = domain.bbox_hi();
  const double pad = 0.05 * std::max(hi.x - lo.x, hi.y - lo.y);
  // SVG y grows downward; mirror within the padded box so the rendering
  // keeps the mathematical orientation.
  const auto fy = [&](double y) { return (lo.y + hi.y) - y; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + num(lo.x - pad) + " " +
       num(lo.y - pad) + " " + num(hi.x - lo.x + 2 * pad) + " " + num(hi.y - lo.y + 2 * pad) +
       "\">\n";

  switch (domain.kind()) {
    case DomainKind::disk2d: {
      const Point c = domain.analytic_center();
      s += "<circle cx=\"" + num(c.x) + "\" cy=\"" + num(fy(c.y)) + "\" r=\"" +
           num(domain.analytic_radius()) +
           "\" fill=\"#f2f2f2\" stroke=\"#999999\" stroke-width=\"" +
           num(0.004 * std::max(hi.x - lo.x, hi.y - lo.y)) + "\"/>\n";
      break;
    }
    case DomainKind::box: {
      s += "<rect x=\"" + num(lo.x) + "\" y=\"" + num(fy(hi.y)) + "\" width=\"" +
           num(hi.x - lo.x) + "\" height=\"" + num(hi.y - lo.y) +
           "\" fill=\"#f2f2f2\" stroke=\"#999999\" stroke-width=\"" +
           num(0.004 * std::max(hi.x - lo.x, hi.y - lo.y)) + "\"/>\n";
      break;
    }
    case DomainKind::voxel_mask: {
      // One rect per run of set voxels along x.
      const Point sp = domain.mask_spacing();
      const Point og = domain.mask_origin();
      s += "<g fill=\"#f2f2f2\">\n";
      for (int iy = 0; iy < domain.mask_ny(); ++iy) {
        int run = -1;
        for (int ix = 0; ix <= domain.mask_nx(); ++ix) {
          const bool set = ix < domain.mask_nx() && domain.voxel_set(ix, iy, 0);
          if (set && run < 0) run = ix;
          if (!set && run >= 0) {
            const double x = og.x + run * sp.x;
            const double y = og.y + (iy + 1) * sp.y; // top edge after mirroring
            s += "<rect x=\"" + num(x) + "\" y=\"" + num(fy(y)) + "\" width=\"" +
                 num((ix - run) * sp.x) + "\" height=\"" + num(sp.y) + "\"/>\n";
            run = -1;
          }
        }
      }
      s += "</g>\n";
      break;
    }
    case DomainKind::sphere3d:
      throw UsageError("export_svg: only 2D trees can be rendered");
  }

  for (SegmentId i = 0; i < tree.segment_count(); ++i) {
    const SegmentRecord& seg = tree.seg(i);
    s += "<line x1=\"" + num(seg.proximal.x) + "\" y1=\"" + num(fy(seg.proximal.y)) +
         "\" x2=\"" + num(seg.distal.x) + "\" y2=\"" + num(fy(seg.distal.y)) +
         "\" stroke=\"#a01818\" stroke-linecap=\"round\" stroke-width=\"" +
         num(2.0 * seg.radius) + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void export_svg(const VesselTree& tree, const PerfusionDomain& domain, const std::string& path) {
  const std::string data = render_svg(tree, domain);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

} // namespace vascogen
