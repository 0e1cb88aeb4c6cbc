#pragma once

#include <string>

#include "vascogen/tree.hpp"

namespace vascogen {

// Tree CSV: header `id,parent,px,py,pz,dx,dy,dz,radius,flow,beta`, one row
// per segment in breadth-first order (so parents precede children and ids are
// dense), pz/dz written as 0 for 2D, reals printed with 17 significant digits,
// LF line endings. Identical trees produce byte-identical files.

// Requires realized radii.
std::string serialize_tree(const VesselTree& tree);
void write_tree(const VesselTree& tree, const std::string& path);

// Reconstructs the tree and cross-checks the stored fields against values
// recomputed from geometry and topology (1e-9 relative): flows against the
// leaf-count split of the root flow, each radius against beta * parent
// radius, and each sibling beta pair against the reduced-resistance ratio
// rule. Malformed or inconsistent files raise UsageError; unreadable paths
// raise IoError. dim_hint forces the point dimension (0 infers it from the
// z columns).
VesselTree parse_tree(const std::string& text, int dim_hint = 0);
VesselTree read_tree(const std::string& path, int dim_hint = 0);

} // namespace vascogen
