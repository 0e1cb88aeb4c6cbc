#include "vascogen/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vascogen/errors.hpp"

namespace vascogen {

namespace {

struct RawValue {
  std::string text;
  bool quoted = false;
  bool from_override = false;
};

using RawMap = std::map<std::string, RawValue>;

bool valid_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

void parse_line(const std::string& line, int lineno, RawMap& out) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
  };
  skip_ws();
  if (i >= line.size() || line[i] == '#') return;

  std::string key;
  while (i < line.size() && valid_key_char(line[i])) key.push_back(line[i++]);
  if (key.empty())
    throw UsageError("config line " + std::to_string(lineno) + ": expected a key");
  skip_ws();
  if (i >= line.size() || line[i] != '=')
    throw UsageError("config line " + std::to_string(lineno) + ": expected '=' after key '" +
                     key + "'");
  ++i;
  skip_ws();

  RawValue v;
  if (i < line.size() && line[i] == '"') {
    ++i;
    const std::size_t close = line.find('"', i);
    if (close == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": unterminated string for key '" +
                       key + "'");
    v.text = line.substr(i, close - i);
    v.quoted = true;
    i = close + 1;
  } else {
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#' &&
           line[i] != '\r')
      v.text.push_back(line[i++]);
    if (v.text.empty())
      throw UsageError("config line " + std::to_string(lineno) + ": missing value for key '" +
                       key + "'");
  }
  skip_ws();
  if (i < line.size() && line[i] != '#')
    throw UsageError("config line " + std::to_string(lineno) + ": trailing characters after value of '" +
                     key + "'");
  if (out.count(key))
    throw UsageError("config: duplicate key '" + key + "'");
  out[key] = std::move(v);
}

class Extractor {
public:
  explicit Extractor(RawMap raw) : raw_(std::move(raw)) {}

  bool has(const std::string& key) {
    const bool present = raw_.count(key) > 0;
    if (present) touched_.insert(key);
    return present;
  }

  double number(const std::string& key) {
    const RawValue& v = fetch(key);
    if (v.quoted) throw UsageError("config key '" + key + "': expected a number, got a string");
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.text.c_str(), &end);
    if (end != v.text.c_str() + v.text.size() || errno == ERANGE)
      throw UsageError("config key '" + key + "': '" + v.text + "' is not a number");
    return d;
  }

  long long integer(const std::string& key) {
    const RawValue& v = fetch(key);
    if (v.quoted) throw UsageError("config key '" + key + "': expected an integer, got a string");
    errno = 0;
    char* end = nullptr;
    const long long n = std::strtoll(v.text.c_str(), &end, 10);
    if (end != v.text.c_str() + v.text.size() || errno == ERANGE)
      throw UsageError("config key '" + key + "': '" + v.text + "' is not an integer");
    return n;
  }

  std::uint64_t uinteger(const std::string& key) {
    const RawValue& v = fetch(key);
    if (v.quoted) throw UsageError("config key '" + key + "': expected an integer, got a string");
    errno = 0;
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v.text.c_str(), &end, 10);
    if (end != v.text.c_str() + v.text.size() || errno == ERANGE || v.text.front() == '-')
      throw UsageError("config key '" + key + "': '" + v.text + "' is not an unsigned integer");
    return n;
  }

  std::string string(const std::string& key) {
    const RawValue& v = fetch(key);
    if (!v.quoted && !v.from_override)
      throw UsageError("config key '" + key + "': expected a quoted string");
    return v.text;
  }

  // Every key set in the file/overrides must have been consumed.
  void reject_unknown() const {
    for (const auto& [key, value] : raw_) {
      if (!touched_.count(key)) throw UsageError("config: unknown key '" + key + "'");
    }
  }

private:
  const RawValue& fetch(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) throw UsageError("config: missing required key '" + key + "'");
    touched_.insert(key);
    return it->second;
  }

  RawMap raw_;
  std::set<std::string> touched_;
};

void require_file_exists(const std::string& key, const std::string& path) {
  if (!std::filesystem::exists(path))
    throw UsageError("config key '" + key + "': file does not exist: " + path);
}

} // namespace

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  RawMap raw;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) parse_line(line, ++lineno, raw);
  }
  for (const auto& [key, value] : overrides) {
    if (key.empty() || !std::all_of(key.begin(), key.end(), valid_key_char))
      throw UsageError("override: bad key '" + key + "'");
    raw[key] = RawValue{value, false, true};
  }

  Extractor x(std::move(raw));
  RunConfig cfg;

  cfg.domain_kind = x.string("domain.kind");
  int dim = 0;
  if (cfg.domain_kind == "disk2d") {
    dim = 2;
    cfg.domain_radius = x.number("domain.radius");
    cfg.domain_center = Point(x.has("domain.center.x") ? x.number("domain.center.x") : 0.0,
                              x.has("domain.center.y") ? x.number("domain.center.y") : 0.0);
  } else if (cfg.domain_kind == "sphere3d") {
    dim = 3;
    cfg.domain_radius = x.number("domain.radius");
    cfg.domain_center = Point(x.has("domain.center.x") ? x.number("domain.center.x") : 0.0,
                              x.has("domain.center.y") ? x.number("domain.center.y") : 0.0,
                              x.has("domain.center.z") ? x.number("domain.center.z") : 0.0);
  } else if (cfg.domain_kind == "box") {
    // 3D iff a z extent is given.
    const bool has_z = x.has("domain.lo.z") || x.has("domain.hi.z");
    dim = has_z ? 3 : 2;
    if (dim == 2) {
      cfg.box_lo = Point(x.number("domain.lo.x"), x.number("domain.lo.y"));
      cfg.box_hi = Point(x.number("domain.hi.x"), x.number("domain.hi.y"));
    } else {
      cfg.box_lo = Point(x.number("domain.lo.x"), x.number("domain.lo.y"), x.number("domain.lo.z"));
      cfg.box_hi = Point(x.number("domain.hi.x"), x.number("domain.hi.y"), x.number("domain.hi.z"));
    }
  } else if (cfg.domain_kind == "mask") {
    cfg.mask_path = x.string("domain.mask");
    require_file_exists("domain.mask", cfg.mask_path);
    // Dimension comes from the maskmeta header.
    dim = PerfusionDomain::load_mask(cfg.mask_path).dim();
  } else {
    throw UsageError("config key 'domain.kind': unknown kind '" + cfg.domain_kind + "'");
  }
  cfg.params.dim = dim;

  cfg.params.k_term = static_cast<int>(x.integer("k_term"));
  if (x.has("q_perf")) cfg.params.q_perf = x.number("q_perf");
  if (x.has("p_perf")) cfg.params.p_perf = x.number("p_perf");
  if (x.has("p_term")) cfg.params.p_term = x.number("p_term");
  if (x.has("mu")) cfg.params.mu = x.number("mu");
  if (x.has("gamma")) cfg.params.gamma = x.number("gamma");
  if (x.has("n_con")) cfg.params.n_con = static_cast<int>(x.integer("n_con"));
  if (x.has("eta")) cfg.params.eta = x.number("eta");
  if (x.has("seed")) cfg.params.seed = x.uinteger("seed");
  if (x.has("tol")) cfg.params.tol = x.number("tol");
  if (x.has("max_iter")) cfg.params.max_iter = static_cast<int>(x.integer("max_iter"));
  if (x.has("clearance_margin")) cfg.params.clearance_margin = x.number("clearance_margin");
  if (x.has("discard_cap")) cfg.params.discard_cap = static_cast<int>(x.integer("discard_cap"));
  if (x.has("relax_factor")) cfg.params.relax_factor = x.number("relax_factor");
  if (x.has("relax_every")) cfg.params.relax_every = static_cast<int>(x.integer("relax_every"));

  if (x.has("root.x") || x.has("root.y") || x.has("root.z")) {
    Point r(x.number("root.x"), x.number("root.y"),
            dim == 3 ? x.number("root.z") : 0.0);
    r.dim = dim;
    cfg.root_position = r;
  }

  if (x.has("output.tree")) cfg.out_tree = x.string("output.tree");
  if (x.has("output.svg")) cfg.out_svg = x.string("output.svg");
  if (x.has("seed_tree")) {
    cfg.seed_tree_path = x.string("seed_tree");
    require_file_exists("seed_tree", cfg.seed_tree_path);
  }
  if (x.has("eval_log")) cfg.eval_log_path = x.string("eval_log");

  x.reject_unknown();

  try {
    cfg.params.validate();
  } catch (const UsageError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  cfg.make_domain(); // surfaces domain invariant violations at parse time
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

PerfusionDomain RunConfig::make_domain() const {
  if (domain_kind == "disk2d") return PerfusionDomain::disk(domain_center, domain_radius);
  if (domain_kind == "sphere3d") return PerfusionDomain::sphere(domain_center, domain_radius);
  if (domain_kind == "box") return PerfusionDomain::box(box_lo, box_hi);
  if (domain_kind == "mask") return PerfusionDomain::load_mask(mask_path);
  throw UsageError("config key 'domain.kind': unknown kind '" + domain_kind + "'");
}

std::string RunConfig::svg_path() const {
  if (!out_svg.empty()) return out_svg;
  std::filesystem::path p(out_tree);
  p.replace_extension(".svg");
  return p.string();
}

} // namespace vascogen
