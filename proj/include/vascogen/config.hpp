#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vascogen/domain.hpp"
#include "vascogen/params.hpp"

namespace vascogen {

// A parsed and validated run configuration. The on-disk format is flat
// `key = value` lines, `#` comments, strings quoted, numbers in SI units;
// unknown keys are errors. The full key list is documented in the README.
struct RunConfig {
  CcoParams params;

  std::string domain_kind; // disk2d | sphere3d | box | mask
  Point domain_center;     // disk/sphere (defaults to the origin)
  double domain_radius = 0.0;
  Point box_lo, box_hi;
  std::string mask_path; // .maskmeta

  std::optional<Point> root_position;

  std::string out_tree = "tree.csv";
  std::string out_svg;        // empty -> derived from out_tree
  std::string seed_tree_path; // optional
  std::string eval_log_path;  // optional

  PerfusionDomain make_domain() const;
  std::string svg_path() const; // out_svg, or out_tree with a .svg extension
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides = {});

} // namespace vascogen
