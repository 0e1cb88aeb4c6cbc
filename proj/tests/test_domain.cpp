#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vascogen/domain.hpp"
#include "vascogen/errors.hpp"

using namespace vascogen;

namespace {

PerfusionDomain unit_disk() { return PerfusionDomain::disk(Point(0.0, 0.0), 1.0); }

// 8x8 2D "C" shape: a ring with the right side opened, so a chord between the
// arm tips crosses the void in the middle.
PerfusionDomain c_mask() {
  const int n = 8;
  std::vector<std::uint8_t> occ(n * n, 0);
  auto set = [&](int x, int y) { occ[y * n + x] = 1; };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const bool ring = (x < 2) || (y < 2) || (y >= n - 2);
      if (ring) set(x, y);
    }
  return PerfusionDomain::mask(2, n, n, 1, Point(0.125, 0.125), Point(0.0, 0.0), occ);
}

} // namespace

TEST_CASE("contains: analytic kinds") {
  const auto disk = unit_disk();
  CHECK(disk.contains(Point(0.0, 0.0)));
  CHECK_FALSE(disk.contains(Point(2.0, 0.0)));
  CHECK(disk.contains(Point(1.0, 0.0))); // boundary-inclusive
  CHECK_THROWS_AS(disk.contains(Point(0.0, 0.0, 0.0)), UsageError);

  const auto sphere = PerfusionDomain::sphere(Point(0.0, 0.0, 0.0), 1.0);
  CHECK(sphere.contains(Point(0.0, 0.0, 0.0)));
  CHECK_FALSE(sphere.contains(Point(0.9, 0.9, 0.9)));

  const auto bx = PerfusionDomain::box(Point(0.0, 0.0), Point(2.0, 1.0));
  CHECK(bx.contains(Point(1.5, 0.5)));
  CHECK_FALSE(bx.contains(Point(2.1, 0.5)));
}

TEST_CASE("contains: single-voxel mask and half-open cells") {
  std::vector<std::uint8_t> one{1};
  const auto m = PerfusionDomain::mask(3, 1, 1, 1, Point(0.1, 0.1, 0.1), Point(0.0, 0.0, 0.0), one);
  CHECK(m.contains(Point(0.05, 0.05, 0.05)));
  CHECK(m.contains(Point(0.0, 0.0, 0.0)));         // lower edge inside
  CHECK_FALSE(m.contains(Point(0.1, 0.05, 0.05))); // upper edge outside
  CHECK_FALSE(m.contains(Point(-0.01, 0.05, 0.05)));
}

TEST_CASE("measure") {
  CHECK(unit_disk().measure() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(PerfusionDomain::sphere(Point(0, 0, 0), 1.0).measure() ==
        doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));

  // 100 set voxels, spacing 0.1 per axis: exactly 100 * 0.001.
  std::vector<std::uint8_t> occ(5 * 5 * 5, 0);
  for (int i = 0; i < 100; ++i) occ[i] = 1;
  const auto m = PerfusionDomain::mask(3, 5, 5, 5, Point(0.1, 0.1, 0.1), Point(0, 0, 0), occ);
  CHECK(m.measure() == 100.0 * (0.1 * 0.1 * 0.1)); // exactly count * voxel volume
  CHECK(m.measure() == doctest::Approx(0.1).epsilon(1e-15));

  // empty mask rejected at load time
  std::vector<std::uint8_t> empty(8, 0);
  CHECK_THROWS_AS(PerfusionDomain::mask(3, 2, 2, 2, Point(1, 1, 1), Point(0, 0, 0), empty),
                  UsageError);
  CHECK_THROWS_AS(PerfusionDomain::mask(2, 2, 2, 1, Point(0.0, 1.0), Point(0, 0), {1, 1, 1, 1}),
                  UsageError); // zero spacing
}

TEST_CASE("sample_point: containment, determinism, uniformity") {
  const auto disk = unit_disk();
  RandomStream rng(7);
  for (int i = 0; i < 100; ++i) {
    const Point p = disk.sample_point(rng);
    CHECK(norm(p) <= 1.0);
    CHECK(p.dim == 2);
  }

  RandomStream a(42), b(42);
  const auto disk2 = unit_disk();
  for (int i = 0; i < 10; ++i) {
    const Point pa = disk.sample_point(a);
    const Point pb = disk2.sample_point(b);
    CHECK(pa.x == pb.x);
    CHECK(pa.y == pb.y);
  }

  // Monte-Carlo check against the uniform-distribution expectation: the mean
  // of 10,000 samples lands within 0.05 of the center per axis.
  RandomStream mc(12345);
  double sx = 0.0, sy = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Point p = disk.sample_point(mc);
    sx += p.x;
    sy += p.y;
  }
  CHECK(std::abs(sx / n) < 0.05);
  CHECK(std::abs(sy / n) < 0.05);
}

TEST_CASE("segment_inside") {
  const auto disk = unit_disk();
  CHECK(disk.segment_inside(SegmentGeometry{Point(-0.5, 0.0), Point(0.5, 0.0)}, 0.1));
  CHECK_FALSE(disk.segment_inside(SegmentGeometry{Point(0.0, 0.0), Point(2.0, 0.0)}, 0.1));
  CHECK_THROWS_AS(disk.segment_inside(SegmentGeometry{Point(0, 0), Point(1, 0)}, 0.0), UsageError);

  // C-shaped mask: both endpoints inside, the straight chord crosses the void.
  const auto c = c_mask();
  const Point top_arm(0.9, 0.95);
  const Point bottom_arm(0.9, 0.05);
  REQUIRE(c.contains(top_arm));
  REQUIRE(c.contains(bottom_arm));
  const Point midpoint = lerp(top_arm, bottom_arm, 0.5);
  REQUIRE_FALSE(c.contains(midpoint));
  CHECK_FALSE(c.segment_inside(SegmentGeometry{top_arm, bottom_arm}, 0.01));
}

TEST_CASE("sampling self-consistency: samples admit zero-extent probes") {
  const auto c = c_mask();
  RandomStream rng(3);
  const double step = c.default_step();
  for (int i = 0; i < 1000; ++i) {
    const Point p = c.sample_point(rng);
    CHECK(c.contains(p));
    CHECK(c.segment_inside(SegmentGeometry{p, p}, step));
  }
}

TEST_CASE("contains is pure") {
  const auto c = c_mask();
  const Point p(0.3, 0.3);
  const bool first = c.contains(p);
  for (int i = 0; i < 50; ++i) CHECK(c.contains(p) == first);
}

TEST_CASE("mask file round trip: maskmeta + raw payload") {
  oracles::TempDir dir("mask");
  const std::string meta = dir.file("dom.maskmeta");
  const std::string raw = dir.file("dom.mask");
  oracles::spit(meta,
                "{\"dim\": 3, \"nx\": 2, \"ny\": 2, \"nz\": 1,"
                " \"spacing\": [0.5, 0.5, 0.25], \"origin\": [0.0, 0.0, 0.0]}");
  oracles::spit(raw, std::string("\x01\x00\x00\x01", 4));

  const auto m = PerfusionDomain::load_mask(meta);
  CHECK(m.dim() == 3);
  CHECK(m.measure() == doctest::Approx(2 * 0.5 * 0.5 * 0.25).epsilon(1e-15));
  CHECK(m.contains(Point(0.25, 0.25, 0.1)));
  CHECK_FALSE(m.contains(Point(0.75, 0.25, 0.1)));
}

TEST_CASE("mask file: PGM payload for 2D") {
  oracles::TempDir dir("pgm");
  const std::string meta = dir.file("dom.maskmeta");
  oracles::spit(meta,
                "{\"dim\": 2, \"nx\": 3, \"ny\": 2,"
                " \"spacing\": [1.0, 1.0], \"origin\": [0.0, 0.0]}");
  std::string pgm = "P5\n# comment\n3 2\n255\n";
  pgm += std::string("\xff\x00\xff\x00\xff\x00", 6);
  oracles::spit(dir.file("dom.pgm"), pgm);

  const auto m = PerfusionDomain::load_mask(meta);
  CHECK(m.contains(Point(0.5, 0.5))); // row 0 -> y in [0,1)
  CHECK_FALSE(m.contains(Point(1.5, 0.5)));
  CHECK(m.contains(Point(1.5, 1.5)));
  CHECK(m.measure() == 3.0);
}

TEST_CASE("mask file errors") {
  oracles::TempDir dir("maskerr");
  const std::string meta = dir.file("bad.maskmeta");
  oracles::spit(meta, "{\"dim\": 2, \"nx\": 2, \"ny\": 2, \"spacing\": [1,1], \"origin\": [0,0]}");
  CHECK_THROWS_AS(PerfusionDomain::load_mask(meta), IoError); // no payload

  oracles::spit(dir.file("bad.mask"), "\x01"); // truncated (needs 4 bytes)
  CHECK_THROWS_AS(PerfusionDomain::load_mask(meta), UsageError);

  oracles::spit(meta, "{\"nx\": 2}");
  CHECK_THROWS_AS(PerfusionDomain::load_mask(meta), UsageError);

  CHECK_THROWS_AS(PerfusionDomain::load_mask(dir.file("absent.maskmeta")), IoError);
}
