#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chdyn {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

using Triangle = std::array<std::size_t, 3>;
using Segment = std::array<std::size_t, 2>;

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised by import_mesh; the message carries "line N: ...".
class MeshParseError : public MeshError {
public:
  MeshParseError(std::size_t line, const std::string &what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Triangulated polygonal approximation of a disk. Triangles are counterclockwise,
// boundary_edges trace the boundary polygon counterclockwise as one closed cycle.
// When radius is set every boundary node lies on the circle of that radius.
struct Mesh2D {
  std::vector<Point2> nodes;
  std::vector<Triangle> triangles;
  std::vector<Segment> boundary_edges;
  std::optional<double> radius;

  std::size_t num_nodes() const { return nodes.size(); }

  friend bool operator==(const Mesh2D &, const Mesh2D &) = default;
};

double signed_area(const Mesh2D &mesh, const Triangle &tri);
double edge_length(const Mesh2D &mesh, std::size_t a, std::size_t b);

// Checks every structural and geometric invariant; throws MeshError on the first
// violation.
void validate(const Mesh2D &mesh);

// Concentric-ring mesher. Ring j (j = 1..m) sits at radius j*R/m; ring sizes grow
// linearly with j and are rounded so the total node count equals target_nodes.
Mesh2D generate_disk_mesh(std::size_t target_nodes, double radius);

// Node target used by the refinement ladder: 2^i * 10.
std::size_t refinement_nodes(int level);

double mesh_size(const Mesh2D &mesh);
double min_edge_length(const Mesh2D &mesh);
double total_area(const Mesh2D &mesh);
double boundary_length(const Mesh2D &mesh);

// Boundary nodes in cycle order.
std::vector<std::size_t> boundary_nodes(const Mesh2D &mesh);

std::string export_mesh(const Mesh2D &mesh);
Mesh2D import_mesh(std::string_view text);

} // namespace chdyn
