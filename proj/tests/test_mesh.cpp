#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "chdyn/mesh.hpp"
#include "dense_oracle.hpp"

using namespace chdyn;

namespace {

void check_generated(const Mesh2D &mesh, double radius) {
  CHECK_NOTHROW(validate(mesh));
  for (const auto &e : mesh.boundary_edges) {
    const auto &p = mesh.nodes[e[0]];
    CHECK(std::abs(std::hypot(p.x, p.y) - radius) <= 1e-12 * radius);
  }
  const double h = mesh_size(mesh);
  CHECK(h / min_edge_length(mesh) <= 3.0);
  // Inscribed polygon: area and perimeter below the disk's.
  const double disk = std::numbers::pi * radius * radius;
  const double rel_h = h / radius;
  CHECK(total_area(mesh) <= disk);
  CHECK(total_area(mesh) >= disk * (1.0 - rel_h * rel_h));
  CHECK(boundary_length(mesh) < 2.0 * std::numbers::pi * radius);
}

} // namespace

TEST_CASE("smallest disk mesh is a four-sector fan") {
  const Mesh2D mesh = generate_disk_mesh(5, 1.0);
  REQUIRE(mesh.num_nodes() == 5);
  CHECK(mesh.triangles.size() == 4);
  CHECK(mesh.boundary_edges.size() == 4);
  CHECK(mesh.nodes[0] == Point2{0.0, 0.0});
  for (int i = 0; i < 4; ++i) {
    const double theta = i * std::numbers::pi / 2.0;
    CHECK(mesh.nodes[1 + i].x == doctest::Approx(std::cos(theta)).epsilon(1e-15));
    CHECK(std::abs(mesh.nodes[1 + i].x - std::cos(theta)) < 1e-15);
    CHECK(std::abs(mesh.nodes[1 + i].y - std::sin(theta)) < 1e-15);
  }
  CHECK(mesh_size(mesh) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  check_generated(mesh, 1.0);
}

TEST_CASE("generated meshes satisfy every invariant across sizes and radii") {
  for (std::size_t target : {4u, 6u, 10u, 20u, 40u, 80u, 160u, 320u, 640u, 1280u}) {
    for (double radius : {1.0, 10.0}) {
      CAPTURE(target);
      CAPTURE(radius);
      const Mesh2D mesh = generate_disk_mesh(target, radius);
      const double n = static_cast<double>(mesh.num_nodes());
      CHECK(n >= 0.85 * target);
      CHECK(n <= 1.15 * target);
      check_generated(mesh, radius);
    }
  }
}

TEST_CASE("target 20 gives 17 to 23 nodes") {
  const Mesh2D mesh = generate_disk_mesh(20, 1.0);
  CHECK(mesh.num_nodes() >= 17);
  CHECK(mesh.num_nodes() <= 23);
}

TEST_CASE("evolution-sized mesh on radius 10") {
  const Mesh2D mesh = generate_disk_mesh(640, 10.0);
  CHECK(mesh.num_nodes() == 640);
  REQUIRE(mesh.radius.has_value());
  CHECK(*mesh.radius == 10.0);
  check_generated(mesh, 10.0);
}

TEST_CASE("quadrupling the node target roughly halves the mesh size") {
  for (std::size_t target : {40u, 80u, 160u, 320u}) {
    CAPTURE(target);
    const double ratio =
        mesh_size(generate_disk_mesh(4 * target, 1.0)) / mesh_size(generate_disk_mesh(target, 1.0));
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
  }
}

TEST_CASE("generation rejects tiny targets and bad radii") {
  CHECK_THROWS_AS(generate_disk_mesh(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_disk_mesh(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_disk_mesh(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_disk_mesh(10, -1.0), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  CHECK(generate_disk_mesh(320, 1.0) == generate_disk_mesh(320, 1.0));
}

TEST_CASE("refinement ladder is 2^i * 10") {
  CHECK(refinement_nodes(1) == 20);
  CHECK(refinement_nodes(5) == 320);
  CHECK(refinement_nodes(8) == 2560);
  CHECK_THROWS(refinement_nodes(-1));
}

TEST_CASE("mesh size of the unit triangle is the hypotenuse") {
  CHECK(mesh_size(oracle::unit_triangle(true)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("export/import round trip reproduces generated meshes exactly") {
  for (std::size_t target : {5u, 20u, 333u}) {
    const Mesh2D mesh = generate_disk_mesh(target, 2.5);
    const Mesh2D back = import_mesh(export_mesh(mesh));
    CHECK(back == mesh);
    CHECK_NOTHROW(validate(back));
  }
}

TEST_CASE("import accepts comments and a mesh without radius") {
  const char *text = "# minimal mesh\n"
                     "MESH v1\n"
                     "NODES 3\n"
                     "0 0\n"
                     "1 0   # right corner\n"
                     "0 1\n"
                     "\n"
                     "TRIANGLES 1\n"
                     "0 1 2\n"
                     "BOUNDARY_EDGES 3\n"
                     "0 1\n1 2\n2 0\n";
  const Mesh2D mesh = import_mesh(text);
  CHECK(mesh.num_nodes() == 3);
  CHECK_FALSE(mesh.radius.has_value());
  CHECK(mesh == oracle::unit_triangle(true));
}

namespace {

std::size_t parse_error_line(const std::string &text, std::string &message) {
  try {
    import_mesh(text);
  } catch (const MeshParseError &e) {
    message = e.what();
    return e.line();
  }
  FAIL("expected a parse error");
  return 0;
}

} // namespace

TEST_CASE("import reports errors with line numbers") {
  std::string msg;

  SUBCASE("short NODES section") {
    const std::string text = "MESH v1\nNODES 3\n0 0\n1 0\nTRIANGLES 1\n0 1 2\n"
                             "BOUNDARY_EDGES 3\n0 1\n1 2\n2 0\n";
    CHECK(parse_error_line(text, msg) == 5);
    CHECK(msg.find("NODES") != std::string::npos);
  }
  SUBCASE("bad header") {
    CHECK(parse_error_line("MESH v2\n", msg) == 1);
  }
  SUBCASE("index out of range") {
    const std::string text = "MESH v1\nNODES 3\n0 0\n1 0\n0 1\nTRIANGLES 1\n0 1 7\n"
                             "BOUNDARY_EDGES 3\n0 1\n1 2\n2 0\n";
    CHECK(parse_error_line(text, msg) == 7);
    CHECK(msg.find("out of range") != std::string::npos);
  }
  SUBCASE("zero-area triangle") {
    const std::string text = "MESH v1\nNODES 3\n0 0\n1 0\n2 0\nTRIANGLES 1\n0 1 2\n"
                             "BOUNDARY_EDGES 3\n0 1\n1 2\n2 0\n";
    CHECK(parse_error_line(text, msg) == 7);
  }
  SUBCASE("open boundary cycle") {
    const std::string text = "MESH v1\nNODES 3\n0 0\n1 0\n0 1\nTRIANGLES 1\n0 1 2\n"
                             "BOUNDARY_EDGES 2\n0 1\n1 2\n";
    CHECK(parse_error_line(text, msg) == 8);
  }
  SUBCASE("boundary node off the declared circle") {
    const std::string text = "MESH v1\nRADIUS 2\nNODES 3\n0 0\n1 0\n0 1\nTRIANGLES 1\n0 1 2\n"
                             "BOUNDARY_EDGES 3\n0 1\n1 2\n2 0\n";
    CHECK(parse_error_line(text, msg) == 9);
    CHECK(msg.find("circle") != std::string::npos);
  }
  SUBCASE("trailing garbage") {
    const std::string text = "MESH v1\nNODES 3\n0 0\n1 0\n0 1\nTRIANGLES 1\n0 1 2\n"
                             "BOUNDARY_EDGES 3\n0 1\n1 2\n2 0\n5 5\n";
    CHECK(parse_error_line(text, msg) == 12);
  }
}

TEST_CASE("validation catches clockwise triangles and interior holes") {
  Mesh2D cw = oracle::unit_triangle(true);
  cw.triangles = {{0, 2, 1}};
  CHECK_THROWS_AS(validate(cw), MeshError);

  Mesh2D square = oracle::unit_square();
  CHECK_NOTHROW(validate(square));
  square.boundary_edges.pop_back();
  CHECK_THROWS_AS(validate(square), MeshError);

  Mesh2D reversed = oracle::unit_square();
  for (auto &e : reversed.boundary_edges)
    std::swap(e[0], e[1]);
  CHECK_THROWS_AS(validate(reversed), MeshError);
}

TEST_CASE("boundary nodes follow the cycle") {
  const Mesh2D mesh = generate_disk_mesh(40, 1.0);
  const auto nodes = boundary_nodes(mesh);
  CHECK(nodes.size() == mesh.boundary_edges.size());
  CHECK(std::set<std::size_t>(nodes.begin(), nodes.end()).size() == nodes.size());
}
