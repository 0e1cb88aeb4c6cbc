#include "vascogen/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>

#include "vascogen/config.hpp"
#include "vascogen/growth.hpp"
#include "vascogen/svg.hpp"
#include "vascogen/tree_io.hpp"

namespace vascogen {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e)) return exit_io_error;
  if (dynamic_cast<const ValidationError*>(&e)) return exit_validation_failure;
  return exit_input_error;
}

std::string partial_path_for(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".partial.csv");
  return p.string();
}

} // namespace

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config_file(args.config_path, args.overrides);
    const PerfusionDomain domain = cfg.make_domain();

    const std::string tree_path = args.out_path.empty() ? cfg.out_tree : args.out_path;
    const std::string log_path = args.log_path.empty() ? cfg.eval_log_path : args.log_path;

    std::optional<VesselTree> seed;
    if (!cfg.seed_tree_path.empty()) seed = read_tree(cfg.seed_tree_path, cfg.params.dim);

    std::ofstream log_stream;
    GrowthOptions opts;
    opts.root_position = cfg.root_position;
    opts.threads = args.threads;
    if (!log_path.empty()) {
      log_stream.open(log_path, std::ios::binary);
      if (!log_stream) throw IoError("cannot open for writing: " + log_path);
      opts.eval_log = &log_stream;
    }

    const auto t0 = std::chrono::steady_clock::now();
    VesselTree tree;
    try {
      tree = grow(cfg.params, domain, seed, opts);
    } catch (GrowthStalledError& e) {
      const std::string partial = partial_path_for(tree_path);
      e.partial_tree.realize_radii();
      write_tree(e.partial_tree, partial);
      err << "error: " << e.what() << "\npartial tree written to " << partial << "\n";
      return exit_growth_stalled;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_tree(tree, tree_path);
    if (args.svg && cfg.params.dim == 2) {
      std::string svg = cfg.out_svg;
      if (svg.empty()) {
        std::filesystem::path p(tree_path);
        p.replace_extension(".svg");
        svg = p.string();
      }
      export_svg(tree, domain, svg);
    }

    char wall_buf[32];
    std::snprintf(wall_buf, sizeof wall_buf, "%.3f", wall);
    out << "terminals=" << tree.terminal_count() << " segments=" << tree.segment_count()
        << " volume=" << fmt17(tree.volume()) << " m^3 wall=" << wall_buf << "s\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e);
  }
}

int cmd_validate(const std::string& tree_path, const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  try {
    const RunConfig cfg = parse_config_file(config_path);
    const PerfusionDomain domain = cfg.make_domain();

    VesselTree tree = read_tree(tree_path, cfg.params.dim);
    tree.set_params(cfg.params);
    tree.set_domain_measure(domain.measure());
    tree.update_all();
    tree.realize_radii();
    const TreeReport rep = tree.validate(domain);

    out << "terminal_count = " << rep.terminal_count << "\n";
    out << "segment_count = " << rep.segment_count << "\n";
    out << "max_depth = " << rep.max_depth << "\n";
    out << "total_volume = " << fmt17(rep.total_volume) << "\n";
    out << "max_murray_residual = " << fmt17(rep.max_murray_residual) << "\n";
    out << "max_terminal_pressure_error = " << fmt17(rep.max_terminal_pressure_error) << "\n";
    out << "min_clearance_margin = " << fmt17(rep.min_clearance_margin) << "\n";
    out << "all_inside_domain = " << (rep.all_inside_domain ? "true" : "false") << "\n";
    return rep.passes() ? exit_ok : exit_validation_failure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e);
  }
}

int cmd_stats(const std::string& tree_path, std::ostream& out, std::ostream& err) {
  try {
    const VesselTree tree = read_tree(tree_path);

    double r_min = std::numeric_limits<double>::infinity();
    double r_max = 0.0;
    for (SegmentId i = 0; i < tree.segment_count(); ++i) {
      r_min = std::min(r_min, tree.seg(i).radius);
      r_max = std::max(r_max, tree.seg(i).radius);
    }

    int max_depth = 0;
    for (SegmentId i = 0; i < tree.segment_count(); ++i) {
      if (!tree.seg(i).is_leaf()) continue;
      int d = 0;
      for (SegmentId v = i; v != kNoSegment; v = tree.seg(v).parent) ++d;
      max_depth = std::max(max_depth, d);
    }

    // Mean over all (parent, child) direction angles at bifurcations.
    double angle_sum = 0.0;
    int angle_count = 0;
    for (SegmentId i = 0; i < tree.segment_count(); ++i) {
      const SegmentRecord& s = tree.seg(i);
      if (s.is_leaf()) continue;
      const Point dp = s.distal - s.proximal;
      for (SegmentId c : s.children) {
        const Point dc = tree.seg(c).distal - tree.seg(c).proximal;
        const double cosang =
            std::clamp(dot(dp, dc) / (norm(dp) * norm(dc)), -1.0, 1.0);
        angle_sum += std::acos(cosang) * 180.0 / std::numbers::pi;
        ++angle_count;
      }
    }

    out << "terminals = " << tree.terminal_count() << "\n";
    out << "segments = " << tree.segment_count() << "\n";
    out << "volume = " << fmt17(tree.volume()) << "\n";
    out << "radius_min = " << fmt17(r_min) << "\n";
    out << "radius_max = " << fmt17(r_max) << "\n";
    out << "max_depth = " << max_depth << "\n";
    if (angle_count == 0)
      out << "mean_bifurcation_angle_deg = n/a\n";
    else
      out << "mean_bifurcation_angle_deg = " << fmt17(angle_sum / angle_count) << "\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e);
  }
}

} // namespace vascogen
