#include "vascogen/domain.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "vascogen/errors.hpp"

namespace vascogen {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

} // namespace

PerfusionDomain PerfusionDomain::disk(const Point& center, double radius) {
  require(center.dim == 2, "disk2d center must be a 2D point");
  require(radius > 0.0 && std::isfinite(radius), "disk2d radius must be > 0");
  PerfusionDomain d;
  d.kind_ = DomainKind::disk2d;
  d.dim_ = 2;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = Point(center.x - radius, center.y - radius);
  d.hi_ = Point(center.x + radius, center.y + radius);
  d.measure_ = std::numbers::pi * radius * radius;
  d.finalize();
  return d;
}

PerfusionDomain PerfusionDomain::sphere(const Point& center, double radius) {
  require(center.dim == 3, "sphere3d center must be a 3D point");
  require(radius > 0.0 && std::isfinite(radius), "sphere3d radius must be > 0");
  PerfusionDomain d;
  d.kind_ = DomainKind::sphere3d;
  d.dim_ = 3;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = Point(center.x - radius, center.y - radius, center.z - radius);
  d.hi_ = Point(center.x + radius, center.y + radius, center.z + radius);
  d.measure_ = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  d.finalize();
  return d;
}

PerfusionDomain PerfusionDomain::box(const Point& lo, const Point& hi) {
  require(lo.dim == hi.dim, "box corners must share a dimension");
  require(lo.x < hi.x && lo.y < hi.y, "box extents must be positive");
  if (lo.dim == 3) require(lo.z < hi.z, "box extents must be positive");
  PerfusionDomain d;
  d.kind_ = DomainKind::box;
  d.dim_ = lo.dim;
  d.lo_ = lo;
  d.hi_ = hi;
  d.measure_ = (hi.x - lo.x) * (hi.y - lo.y);
  if (d.dim_ == 3) d.measure_ *= (hi.z - lo.z);
  d.finalize();
  return d;
}

PerfusionDomain PerfusionDomain::mask(int dim, int nx, int ny, int nz,
                                      const Point& spacing, const Point& origin,
                                      std::vector<std::uint8_t> occupancy) {
  require(dim == 2 || dim == 3, "mask dim must be 2 or 3");
  require(nx > 0 && ny > 0, "mask grid dimensions must be positive");
  if (dim == 2) {
    require(nz == 1, "2D mask must have nz == 1");
  } else {
    require(nz > 0, "mask grid dimensions must be positive");
  }
  require(spacing.x > 0.0 && spacing.y > 0.0, "mask spacing must be > 0");
  if (dim == 3) require(spacing.z > 0.0, "mask spacing must be > 0");
  const std::size_t expected =
      static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  require(occupancy.size() == expected, "mask occupancy size does not match grid");

  PerfusionDomain d;
  d.kind_ = DomainKind::voxel_mask;
  d.dim_ = dim;
  d.nx_ = nx;
  d.ny_ = ny;
  d.nz_ = nz;
  d.spacing_ = spacing;
  d.origin_ = origin;
  d.occ_ = std::move(occupancy);
  d.set_count_ = 0;
  for (auto v : d.occ_)
    if (v) ++d.set_count_;
  require(d.set_count_ > 0, "mask is empty (no voxel set)");

  const double voxel = (dim == 2) ? spacing.x * spacing.y : spacing.x * spacing.y * spacing.z;
  d.measure_ = static_cast<double>(d.set_count_) * voxel;

  d.lo_ = origin;
  d.lo_.dim = dim;
  d.hi_ = Point(origin.x + nx * spacing.x, origin.y + ny * spacing.y,
                dim == 3 ? origin.z + nz * spacing.z : 0.0);
  d.hi_.dim = dim;
  d.finalize();
  return d;
}

void PerfusionDomain::finalize() {
  lo_.dim = dim_;
  hi_.dim = dim_;
  center_.dim = dim_;
  if (!(measure_ > 0.0)) throw UsageError("domain measure must be > 0");
}

bool PerfusionDomain::contains(const Point& p) const {
  if (p.dim != dim_)
    throw UsageError("dimension mismatch: " + std::to_string(p.dim) +
                     "D point queried against " + std::to_string(dim_) + "D domain");
  switch (kind_) {
    case DomainKind::disk2d:
    case DomainKind::sphere3d:
      return norm2(p - center_) <= radius_ * radius_;
    case DomainKind::box:
      if (p.x < lo_.x || p.x > hi_.x || p.y < lo_.y || p.y > hi_.y) return false;
      if (dim_ == 3 && (p.z < lo_.z || p.z > hi_.z)) return false;
      return true;
    case DomainKind::voxel_mask: {
      const auto ix = static_cast<std::int64_t>(std::floor((p.x - origin_.x) / spacing_.x));
      const auto iy = static_cast<std::int64_t>(std::floor((p.y - origin_.y) / spacing_.y));
      std::int64_t iz = 0;
      if (dim_ == 3) iz = static_cast<std::int64_t>(std::floor((p.z - origin_.z) / spacing_.z));
      if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_ || iz < 0 || iz >= nz_) return false;
      return occ_[static_cast<std::size_t>((iz * ny_ + iy) * nx_ + ix)] != 0;
    }
  }
  return false;
}

Point PerfusionDomain::sample_point(RandomStream& rng) const {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Point p;
    p.dim = dim_;
    p.x = rng.uniform(lo_.x, hi_.x);
    p.y = rng.uniform(lo_.y, hi_.y);
    p.z = (dim_ == 3) ? rng.uniform(lo_.z, hi_.z) : 0.0;
    if (contains(p)) return p;
  }
  throw UsageError("degenerate domain: 10,000 consecutive sampling misses");
}

bool PerfusionDomain::segment_inside(const SegmentGeometry& seg, double step) const {
  if (!(step > 0.0)) throw UsageError("segment_inside step must be > 0");
  const double len = seg.length();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    if (!contains(lerp(seg.proximal, seg.distal, static_cast<double>(i) / n))) return false;
  }
  return true;
}

double PerfusionDomain::default_step() const {
  if (kind_ == DomainKind::voxel_mask) {
    double s = std::min(spacing_.x, spacing_.y);
    if (dim_ == 3) s = std::min(s, spacing_.z);
    return 0.5 * s;
  }
  return characteristic_length() / 64.0;
}

double PerfusionDomain::characteristic_length() const {
  return std::pow(measure_, 1.0 / dim_);
}

Point PerfusionDomain::bbox_center() const {
  Point c = 0.5 * (lo_ + hi_);
  c.dim = dim_;
  return c;
}

int PerfusionDomain::mask_nx() const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  return nx_;
}
int PerfusionDomain::mask_ny() const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  return ny_;
}
int PerfusionDomain::mask_nz() const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  return nz_;
}
Point PerfusionDomain::mask_spacing() const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  return spacing_;
}
Point PerfusionDomain::mask_origin() const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  return origin_;
}
bool PerfusionDomain::voxel_set(int ix, int iy, int iz) const {
  require(kind_ == DomainKind::voxel_mask, "not a mask domain");
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_ || iz < 0 || iz >= nz_) return false;
  return occ_[static_cast<std::size_t>((static_cast<std::int64_t>(iz) * ny_ + iy) * nx_ + ix)] != 0;
}

namespace {

std::vector<std::uint8_t> read_raw_mask(const std::string& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mask payload: " + path);
  std::vector<std::uint8_t> data(expected);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected)
    throw UsageError("mask payload truncated: " + path);
  return data;
}

// Binary PGM (P5), maxval <= 255. Row r of the raster maps to grid row y = r.
std::vector<std::uint8_t> read_pgm(const std::string& path, int nx, int ny) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PGM: " + path);
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    for (;;) {
      int c = in.get();
      if (c == EOF) throw UsageError("truncated PGM header: " + path);
      if (c == '#') {
        while (c != EOF && c != '\n') c = in.get();
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
  };
  if (next_token() != "P5") throw UsageError("not a binary PGM (P5): " + path);
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w != nx || h != ny)
    throw UsageError("PGM size " + std::to_string(w) + "x" + std::to_string(h) +
                     " does not match maskmeta grid");
  if (maxval < 1 || maxval > 255) throw UsageError("PGM maxval must be in [1,255]: " + path);
  // The single whitespace after maxval was already consumed by next_token.
  const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> data(expected);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected)
    throw UsageError("PGM payload truncated: " + path);
  return data;
}

} // namespace

PerfusionDomain PerfusionDomain::load_mask(const std::string& maskmeta_path) {
  std::ifstream in(maskmeta_path);
  if (!in) throw IoError("cannot open maskmeta: " + maskmeta_path);
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed maskmeta " + maskmeta_path + ": " + e.what());
  }

  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!meta.contains(key))
      throw UsageError(std::string("maskmeta missing key '") + key + "': " + maskmeta_path);
    return meta.at(key);
  };

  const int dim = need("dim").get<int>();
  if (dim != 2 && dim != 3) throw UsageError("maskmeta dim must be 2 or 3");
  const int nx = need("nx").get<int>();
  const int ny = need("ny").get<int>();
  const int nz = (dim == 3) ? need("nz").get<int>() : 1;

  const auto& sp = need("spacing");
  const auto& og = need("origin");
  if (!sp.is_array() || sp.size() != static_cast<std::size_t>(dim))
    throw UsageError("maskmeta spacing must be an array of length dim");
  if (!og.is_array() || og.size() != static_cast<std::size_t>(dim))
    throw UsageError("maskmeta origin must be an array of length dim");

  Point spacing(sp[0].get<double>(), sp[1].get<double>(),
                dim == 3 ? sp[2].get<double>() : 0.0);
  Point origin(og[0].get<double>(), og[1].get<double>(),
               dim == 3 ? og[2].get<double>() : 0.0);
  origin.dim = dim;

  const std::filesystem::path metap(maskmeta_path);
  const std::size_t n =
      static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);

  std::filesystem::path raw = metap;
  raw.replace_extension(".mask");
  std::vector<std::uint8_t> occ;
  if (std::filesystem::exists(raw)) {
    occ = read_raw_mask(raw.string(), n);
  } else if (dim == 2) {
    std::filesystem::path pgm = metap;
    pgm.replace_extension(".pgm");
    if (!std::filesystem::exists(pgm))
      throw IoError("no mask payload next to " + maskmeta_path + " (tried .mask and .pgm)");
    occ = read_pgm(pgm.string(), nx, ny);
  } else {
    throw IoError("no mask payload next to " + maskmeta_path + " (tried .mask)");
  }

  return mask(dim, nx, ny, nz, spacing, origin, std::move(occ));
}

} // namespace vascogen
