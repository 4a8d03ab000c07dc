#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cauchyfem/mesh.hpp"
#include "doctest.h"

using namespace cauchyfem;

namespace {

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
  return std::any_of(msgs.begin(), msgs.end(), [&](const std::string& m) {
    return m.find(needle) != std::string::npos;
  });
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cauchyfem_mesh_" + name);
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit square coarse counts and geometry") {
  const Mesh m = build_unit_square(0.5, {Side::Top});
  CHECK(m.vertices.size() == 9);
  CHECK(m.triangles.size() == 8);
  CHECK(m.boundary.size() == 8);
  CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.h_max == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("unit square partition orders nodes along the boundary chains") {
  const Mesh m = build_unit_square(0.5, {Side::Top});
  const BoundaryPartition part(m);

  // Top row of the 3x3 grid is 6,7,8; the chain starts at its smallest end.
  CHECK(part.nodes(Region::S) == std::vector<int>{6, 7, 8});
  CHECK(part.nodes(Region::B) == std::vector<int>{6, 3, 0, 1, 2, 5, 8});
  CHECK(part.interface_nodes() == std::vector<int>{6, 8});
  CHECK(part.length(Region::S) == doctest::Approx(1.0));
  CHECK(part.length(Region::B) == doctest::Approx(3.0));
  CHECK(part.is_interface(6));
  CHECK(part.is_interface(8));
  CHECK(!part.is_interface(7));
  CHECK(part.local_index(Region::S, 7) == 1);
  CHECK(part.local_index(Region::S, 0) == -1);
  CHECK(part.local_index(Region::B, 0) == 2);
  CHECK(part.node_count(Region::S) == 3);
  CHECK(part.node_count(Region::B) == 7);
}

TEST_CASE("unit square S as two sides") {
  const Mesh m = build_unit_square(0.5, {Side::Top, Side::Left});
  const BoundaryPartition part(m);
  CHECK(part.node_count(Region::S) == 5);
  CHECK(part.node_count(Region::B) == 5);
  CHECK(part.interface_nodes() == std::vector<int>{0, 8});
  CHECK(part.length(Region::S) == doctest::Approx(2.0));
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("unit square rejects degenerate side sets") {
  CHECK_THROWS_AS(build_unit_square(0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      build_unit_square(0.5, {Side::Bottom, Side::Right, Side::Top, Side::Left}),
      std::invalid_argument);
  CHECK_THROWS_AS(build_unit_square(0.0, {Side::Top}), std::invalid_argument);
  CHECK_THROWS_AS(build_unit_square(1.5, {Side::Top}), std::invalid_argument);
}

TEST_CASE("parabola domain matches the hand-computed polygon") {
  // h = 0.25, depth = 0.5: 8 columns, 2 layers. Polygon area is the
  // trapezoid sum of 0.5*(1-x^2) sampled at x = -1,-0.75,...,1:
  // 0.25 * 2 * (0.109375 + 0.296875 + 0.421875 + 0.484375) = 0.65625.
  const Mesh m = build_parabola_domain(0.25, 0.5);
  CHECK(m.vertices.size() == 23);
  CHECK(m.triangles.size() == 28);
  CHECK(m.boundary.size() == 16);
  CHECK(mesh_area(m) == doctest::Approx(0.65625).epsilon(1e-14));
  CHECK(validate_mesh(m).empty());

  const BoundaryPartition part(m);
  CHECK(part.node_count(Region::S) == 9);
  CHECK(part.node_count(Region::B) == 9);
  CHECK(part.interface_nodes().size() == 2);

  // Both chains run left to right; S sits on y = 0, B on the parabola.
  const auto& sn = part.nodes(Region::S);
  const auto& bn = part.nodes(Region::B);
  CHECK(m.vertices[sn.front()].x == doctest::Approx(-1.0));
  CHECK(m.vertices[sn.back()].x == doctest::Approx(1.0));
  CHECK(sn.front() == bn.front());
  CHECK(sn.back() == bn.back());
  for (size_t i = 0; i + 1 < sn.size(); ++i) {
    CHECK(m.vertices[sn[i]].x < m.vertices[sn[i + 1]].x);
    CHECK(m.vertices[sn[i]].y == doctest::Approx(0.0));
  }
  for (size_t i = 0; i + 1 < bn.size(); ++i) {
    CHECK(m.vertices[bn[i]].x < m.vertices[bn[i + 1]].x);
  }
  const Vec2 mid = m.vertices[bn[4]];
  CHECK(mid.x == doctest::Approx(0.0));
  CHECK(mid.y == doctest::Approx(-0.5));
}

TEST_CASE("parabola column count is forced even") {
  // h = 0.3 gives 2/h = 6.67 -> 7, rounded up to 8 columns.
  const Mesh m = build_parabola_domain(0.3, 0.5);
  const BoundaryPartition part(m);
  CHECK(part.node_count(Region::S) % 2 == 1);  // even edge count, odd node count
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("parabola rejects bad parameters") {
  CHECK_THROWS_AS(build_parabola_domain(0.25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_parabola_domain(0.25, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_parabola_domain(0.0, 0.5), std::invalid_argument);
}

TEST_CASE("save and load round trip is exact") {
  const Mesh m = build_parabola_domain(0.25, 0.5);
  const auto path = temp_file("roundtrip.txt");
  save_mesh(m, path.string());
  const Mesh r = load_mesh(path.string());
  std::filesystem::remove(path);

  REQUIRE(r.vertices.size() == m.vertices.size());
  REQUIRE(r.triangles.size() == m.triangles.size());
  REQUIRE(r.boundary.size() == m.boundary.size());
  for (size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(r.vertices[i].x == m.vertices[i].x);
    CHECK(r.vertices[i].y == m.vertices[i].y);
  }
  for (size_t i = 0; i < m.triangles.size(); ++i) CHECK(r.triangles[i] == m.triangles[i]);
  for (size_t i = 0; i < m.boundary.size(); ++i) {
    CHECK(r.boundary[i].a == m.boundary[i].a);
    CHECK(r.boundary[i].b == m.boundary[i].b);
    CHECK(r.boundary[i].region == m.boundary[i].region);
  }
  CHECK(r.h_max == doctest::Approx(m.h_max).epsilon(1e-15));
  CHECK(validate_mesh(r).empty());
}

TEST_CASE("load rejects malformed files") {
  const auto path = temp_file("bad.txt");
  auto write_and_expect = [&](const std::string& text, const std::string& needle) {
    std::ofstream out(path);
    out << text;
    out.close();
    CHECK_THROWS_WITH_AS(load_mesh(path.string()),
                         doctest::Contains(doctest::String(needle.c_str())),
                         std::runtime_error);
  };

  write_and_expect("vertices 1\n0 0 0\nWRONG 0\nboundary 0\n", "header");
  write_and_expect("vertices 1\n0 0 0\ntriangles 0\nboundary x\n", "bad integer");
  write_and_expect("vertices 1\n1 0 0\ntriangles 0\nboundary 0\n", "out of order");
  write_and_expect("vertices 1\n0 0 zz\ntriangles 0\nboundary 0\n", "bad number");
  write_and_expect(
      "vertices 3\n0 0 0\n1 1 0\n2 0 1\ntriangles 1\n0 1 5\nboundary 0\n",
      "out of range");
  write_and_expect(
      "vertices 3\n0 0 0\n1 1 0\n2 0 1\ntriangles 1\n0 1 2\nboundary 1\n0 1 Q\n",
      "tag must be S or B");
  write_and_expect(
      "vertices 3\n0 0 0\n1 1 0\n2 0 1\ntriangles 1\n0 1 2\nboundary 0\nextra\n",
      "trailing");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.txt"), std::runtime_error);
}

TEST_CASE("validator reports each corruption class") {
  const Mesh good = build_unit_square(0.5, {Side::Top});

  Mesh flipped = good;
  std::swap(flipped.triangles[0][0], flipped.triangles[0][1]);
  CHECK(any_contains(validate_mesh(flipped), "non-positive orientation"));

  Mesh degenerate = good;
  degenerate.triangles[0][1] = degenerate.triangles[0][0];
  CHECK(any_contains(validate_mesh(degenerate), "repeated vertex"));

  Mesh untagged = good;
  untagged.boundary.pop_back();
  CHECK(any_contains(validate_mesh(untagged), "untagged"));

  Mesh doubled = good;
  doubled.boundary.push_back(doubled.boundary.front());
  CHECK(any_contains(validate_mesh(doubled), "listed more than once"));

  Mesh interior_tag = good;
  interior_tag.boundary.push_back({0, 4, Region::B});  // diagonal, on two triangles
  CHECK(any_contains(validate_mesh(interior_tag), "not on exactly one triangle"));

  Mesh one_region = good;
  for (auto& e : one_region.boundary) e.region = Region::S;
  CHECK(any_contains(validate_mesh(one_region), "region B has no edges"));

  // Both regions present but sharing no vertex: two far-apart triangles.
  Mesh split;
  split.vertices = {{0, 0}, {1, 0}, {0, 1}, {5, 0}, {6, 0}, {5, 1}};
  split.triangles = {{0, 1, 2}, {3, 4, 5}};
  split.boundary = {{0, 1, Region::S}, {1, 2, Region::S}, {2, 0, Region::S},
                    {3, 4, Region::B}, {4, 5, Region::B}, {5, 3, Region::B}};
  split.h_max = std::sqrt(2.0);
  CHECK(any_contains(validate_mesh(split), "interface between S and B is empty"));

  Mesh bad_index = good;
  bad_index.triangles[0][2] = 99;
  CHECK(any_contains(validate_mesh(bad_index), "out of range"));
}

TEST_CASE("finer meshes stay valid and areas converge") {
  for (double h : {0.2, 0.1}) {
    const Mesh sq = build_unit_square(h, {Side::Top});
    CHECK(validate_mesh(sq).empty());
    CHECK(mesh_area(sq) == doctest::Approx(1.0).epsilon(1e-13));

    const Mesh pb = build_parabola_domain(h, 0.5);
    CHECK(validate_mesh(pb).empty());
    // Exact smooth area is 2/3; the polygon sits inside the parabola.
    CHECK(mesh_area(pb) < 2.0 / 3.0);
    CHECK(mesh_area(pb) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  }
  const double a1 = mesh_area(build_parabola_domain(0.1, 0.5));
  const double a2 = mesh_area(build_parabola_domain(0.05, 0.5));
  CHECK(std::abs(2.0 / 3.0 - a2) < std::abs(2.0 / 3.0 - a1));
}

}  // TEST_SUITE
