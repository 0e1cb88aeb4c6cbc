#pragma once

#include <string>

#include "vascogen/domain.hpp"
#include "vascogen/tree.hpp"

namespace vascogen {

// Renders a 2D tree: one <line> per segment with stroke-width = 2 * radius in
// user units, over a domain outline (circle/rect for analytic kinds, row-run
// rectangles for masks). The viewBox is the domain bounding box with 5%
// padding. Throws UsageError for 3D trees or unrealized radii.
std::string render_svg(const VesselTree& tree, const PerfusionDomain& domain);
void export_svg(const VesselTree& tree, const PerfusionDomain& domain, const std::string& path);

} // namespace vascogen
