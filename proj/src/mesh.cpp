#include "chdyn/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace chdyn {

MeshParseError::MeshParseError(std::size_t line, const std::string &what)
    : MeshError("line " + std::to_string(line) + ": " + what), line_(line) {}

double signed_area(const Mesh2D &mesh, const Triangle &tri) {
  const Point2 &a = mesh.nodes[tri[0]];
  const Point2 &b = mesh.nodes[tri[1]];
  const Point2 &c = mesh.nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double edge_length(const Mesh2D &mesh, std::size_t a, std::size_t b) {
  return std::hypot(mesh.nodes[a].x - mesh.nodes[b].x, mesh.nodes[a].y - mesh.nodes[b].y);
}

double mesh_size(const Mesh2D &mesh) {
  double h = 0.0;
  for (const auto &t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, edge_length(mesh, t[e], t[(e + 1) % 3]));
  return h;
}

double min_edge_length(const Mesh2D &mesh) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto &t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::min(h, edge_length(mesh, t[e], t[(e + 1) % 3]));
  return h;
}

double total_area(const Mesh2D &mesh) {
  double area = 0.0;
  for (const auto &t : mesh.triangles)
    area += signed_area(mesh, t);
  return area;
}

double boundary_length(const Mesh2D &mesh) {
  double len = 0.0;
  for (const auto &e : mesh.boundary_edges)
    len += edge_length(mesh, e[0], e[1]);
  return len;
}

std::size_t refinement_nodes(int level) {
  if (level < 0 || level > 20)
    throw std::invalid_argument("refinement level out of range: " + std::to_string(level));
  return std::size_t{10} << level;
}

namespace {

std::pair<std::size_t, std::size_t> undirected(std::size_t a, std::size_t b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

void check_indices(const Mesh2D &mesh) {
  const std::size_t n = mesh.nodes.size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (std::size_t v : mesh.triangles[t])
      if (v >= n)
        throw MeshError("triangle " + std::to_string(t) + " references node " +
                        std::to_string(v) + " out of range");
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    for (std::size_t v : mesh.boundary_edges[e])
      if (v >= n)
        throw MeshError("boundary edge " + std::to_string(e) + " references node " +
                        std::to_string(v) + " out of range");
}

void check_areas(const Mesh2D &mesh) {
  const double h = mesh_size(mesh);
  const double min_area = 1e-14 * h * h;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = signed_area(mesh, mesh.triangles[t]);
    if (!(area >= min_area))
      throw MeshError("triangle " + std::to_string(t) + " has degenerate or negative area " +
                      std::to_string(area));
  }
}

void check_topology(const Mesh2D &mesh) {
  if (mesh.triangles.empty())
    throw MeshError("mesh has no triangles");
  if (mesh.boundary_edges.size() < 3)
    throw MeshError("boundary cycle needs at least 3 edges");

  // Directed half-edges seen in counterclockwise triangles.
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  std::map<std::pair<std::size_t, std::size_t>, int> uses;
  for (const auto &t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const std::size_t a = t[e], b = t[(e + 1) % 3];
      if (a == b)
        throw MeshError("triangle repeats node " + std::to_string(a));
      if (++directed[{a, b}] > 1)
        throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") traversed twice in the same direction");
      ++uses[undirected(a, b)];
    }

  std::map<std::pair<std::size_t, std::size_t>, bool> on_boundary;
  for (const auto &e : mesh.boundary_edges) {
    const auto key = undirected(e[0], e[1]);
    if (on_boundary.contains(key))
      throw MeshError("duplicate boundary edge (" + std::to_string(e[0]) + "," +
                      std::to_string(e[1]) + ")");
    on_boundary[key] = true;
    const auto it = uses.find(key);
    if (it == uses.end() || it->second != 1)
      throw MeshError("boundary edge (" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
                      ") is not a face of exactly one triangle");
    if (!directed.contains({e[0], e[1]}))
      throw MeshError("boundary edge (" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
                      ") is not oriented counterclockwise");
  }
  for (const auto &[edge, count] : uses) {
    if (count > 2)
      throw MeshError("edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") shared by more than two triangles");
    if (count == 1 && !on_boundary.contains(edge))
      throw MeshError("edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") lies on the hull but is not a boundary edge");
  }

  // Single closed cycle: every boundary node has exactly one successor, and
  // walking successors from the first edge visits every edge once.
  std::map<std::size_t, std::size_t> next;
  for (const auto &e : mesh.boundary_edges)
    if (!next.emplace(e[0], e[1]).second)
      throw MeshError("boundary node " + std::to_string(e[0]) + " starts two boundary edges");
  std::size_t steps = 0;
  std::size_t cur = mesh.boundary_edges.front()[0];
  do {
    const auto it = next.find(cur);
    if (it == next.end())
      throw MeshError("boundary cycle is open at node " + std::to_string(cur));
    cur = it->second;
    ++steps;
  } while (cur != mesh.boundary_edges.front()[0] && steps <= mesh.boundary_edges.size());
  if (steps != mesh.boundary_edges.size())
    throw MeshError("boundary edges do not form a single closed cycle");
}

void check_circle(const Mesh2D &mesh) {
  if (!mesh.radius)
    return;
  const double r = *mesh.radius;
  if (!(r > 0.0) || !std::isfinite(r))
    throw MeshError("radius must be positive and finite");
  for (const auto &e : mesh.boundary_edges) {
    const Point2 &p = mesh.nodes[e[0]];
    if (std::abs(std::hypot(p.x, p.y) - r) > 1e-12 * r)
      throw MeshError("boundary node " + std::to_string(e[0]) + " is off the circle");
  }
}

} // namespace

void validate(const Mesh2D &mesh) {
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (!std::isfinite(mesh.nodes[i].x) || !std::isfinite(mesh.nodes[i].y))
      throw MeshError("node " + std::to_string(i) + " has non-finite coordinates");
  check_indices(mesh);
  check_areas(mesh);
  check_topology(mesh);
  check_circle(mesh);
}

std::vector<std::size_t> boundary_nodes(const Mesh2D &mesh) {
  std::vector<std::size_t> out;
  out.reserve(mesh.boundary_edges.size());
  for (const auto &e : mesh.boundary_edges)
    out.push_back(e[0]);
  return out;
}

namespace {

// Ring sizes proportional to ring index, summing exactly to `total`
// (largest-remainder rounding).
std::vector<std::size_t> ring_sizes(std::size_t total, std::size_t rings) {
  const double scale = static_cast<double>(total) / (0.5 * rings * (rings + 1));
  std::vector<std::size_t> sizes(rings);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < rings; ++j) {
    const double ideal = scale * static_cast<double>(j + 1);
    sizes[j] = static_cast<std::size_t>(std::floor(ideal));
    assigned += sizes[j];
    remainders.emplace_back(ideal - std::floor(ideal), j);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned)
    ++sizes[remainders[r % rings].second];
  return sizes;
}

void push_ccw(Mesh2D &mesh, std::size_t a, std::size_t b, std::size_t c) {
  Triangle t{a, b, c};
  if (signed_area(mesh, t) < 0.0)
    std::swap(t[1], t[2]);
  mesh.triangles.push_back(t);
}

} // namespace

Mesh2D generate_disk_mesh(std::size_t target_nodes, double radius) {
  if (target_nodes < 4)
    throw std::invalid_argument("target_nodes must be at least 4, got " +
                                std::to_string(target_nodes));
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("radius must be positive and finite");

  const std::size_t ring_nodes = target_nodes - 1;
  // Node spacing ~ R/m along rings of circumference 2*pi*j*R/m.
  auto rings = static_cast<std::size_t>(
      std::max(1.0, std::round(std::sqrt(static_cast<double>(ring_nodes) / std::numbers::pi))));
  while (rings > 1 && static_cast<double>(ring_nodes) / (0.5 * rings * (rings + 1)) < 3.0)
    --rings;
  const auto sizes = ring_sizes(ring_nodes, rings);

  Mesh2D mesh;
  mesh.radius = radius;
  mesh.nodes.push_back({0.0, 0.0});

  std::vector<std::size_t> ring_start;
  for (std::size_t j = 0; j < rings; ++j) {
    ring_start.push_back(mesh.nodes.size());
    const double r = (j + 1 == rings) ? radius : radius * static_cast<double>(j + 1) / rings;
    const std::size_t n = sizes[j];
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
      mesh.nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }
  // Snap the outer ring onto the circle: cos/sin rounding can leave |x| a few ulps off.
  for (std::size_t i = 0; i < sizes.back(); ++i) {
    Point2 &p = mesh.nodes[ring_start.back() + i];
    const double norm = std::hypot(p.x, p.y);
    p.x *= radius / norm;
    p.y *= radius / norm;
  }

  for (std::size_t i = 0; i < sizes[0]; ++i)
    push_ccw(mesh, 0, ring_start[0] + i, ring_start[0] + (i + 1) % sizes[0]);

  // Zip neighbouring rings together, always advancing along the ring whose
  // next node has the smaller polar angle.
  for (std::size_t j = 1; j < rings; ++j) {
    const std::size_t p = sizes[j - 1], q = sizes[j];
    const std::size_t a0 = ring_start[j - 1], b0 = ring_start[j];
    std::size_t i = 0, k = 0;
    while (i < p || k < q) {
      const double next_inner = static_cast<double>(i + 1) / p;
      const double next_outer = static_cast<double>(k + 1) / q;
      const bool advance_inner = (k == q) || (i < p && next_inner < next_outer);
      if (advance_inner) {
        push_ccw(mesh, a0 + i, a0 + (i + 1) % p, b0 + k % q);
        ++i;
      } else {
        push_ccw(mesh, b0 + k, b0 + (k + 1) % q, a0 + i % p);
        ++k;
      }
    }
  }

  const std::size_t outer = ring_start.back(), q = sizes.back();
  for (std::size_t k = 0; k < q; ++k)
    mesh.boundary_edges.push_back({outer + k, outer + (k + 1) % q});

  validate(mesh);
  return mesh;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

void append_double(std::string &out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t pos = 0;
    while (pos < raw.size()) {
      while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos])))
        ++pos;
      std::size_t end = pos;
      while (end < raw.size() && !std::isspace(static_cast<unsigned char>(raw[end])))
        ++end;
      if (end > pos)
        line.tokens.push_back(raw.substr(pos, end - pos));
      pos = end;
    }
    if (!line.tokens.empty())
      lines.push_back(std::move(line));
  }
  return lines;
}

template <class T> bool parse_number(std::string_view tok, T &out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

class Reader {
public:
  explicit Reader(std::string_view text) : lines_(tokenize(text)) {}

  bool done() const { return pos_ >= lines_.size(); }
  std::size_t last_line() const { return lines_.empty() ? 1 : lines_.back().number; }

  const Line &peek() const { return lines_[pos_]; }
  const Line &take() { return lines_[pos_++]; }

  std::size_t header(std::string_view keyword) {
    if (done())
      throw MeshParseError(last_line(), "expected section " + std::string(keyword) +
                                            ", found end of file");
    const Line &line = take();
    std::size_t count = 0;
    if (line.tokens.size() != 2 || line.tokens[0] != keyword || !parse_number(line.tokens[1], count))
      throw MeshParseError(line.number, "expected '" + std::string(keyword) + " <count>'");
    return count;
  }

  const Line &entry(std::string_view section, std::size_t expected, std::size_t index,
                    std::size_t arity) {
    if (done() || std::isalpha(static_cast<unsigned char>(peek().tokens[0][0]))) {
      const std::size_t at = done() ? last_line() : peek().number;
      throw MeshParseError(at, std::string(section) + " section declares " +
                                   std::to_string(expected) + " entries but lists " +
                                   std::to_string(index));
    }
    const Line &line = take();
    if (line.tokens.size() != arity)
      throw MeshParseError(line.number, std::string(section) + " entry expects " +
                                            std::to_string(arity) + " values");
    return line;
  }

private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

} // namespace

std::string export_mesh(const Mesh2D &mesh) {
  std::string out = "MESH v1\n";
  if (mesh.radius) {
    out += "RADIUS ";
    append_double(out, *mesh.radius);
    out += '\n';
  }
  out += "NODES " + std::to_string(mesh.nodes.size()) + '\n';
  for (const auto &p : mesh.nodes) {
    append_double(out, p.x);
    out += ' ';
    append_double(out, p.y);
    out += '\n';
  }
  out += "TRIANGLES " + std::to_string(mesh.triangles.size()) + '\n';
  for (const auto &t : mesh.triangles)
    out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
  out += "BOUNDARY_EDGES " + std::to_string(mesh.boundary_edges.size()) + '\n';
  for (const auto &e : mesh.boundary_edges)
    out += std::to_string(e[0]) + ' ' + std::to_string(e[1]) + '\n';
  return out;
}

Mesh2D import_mesh(std::string_view text) {
  Reader in(text);
  if (in.done())
    throw MeshParseError(1, "empty mesh file");
  {
    const Line &magic = in.take();
    if (magic.tokens.size() != 2 || magic.tokens[0] != "MESH" || magic.tokens[1] != "v1")
      throw MeshParseError(magic.number, "expected header 'MESH v1'");
  }

  Mesh2D mesh;
  if (!in.done() && in.peek().tokens[0] == "RADIUS") {
    const Line &line = in.take();
    double r = 0.0;
    if (line.tokens.size() != 2 || !parse_number(line.tokens[1], r) || !(r > 0.0))
      throw MeshParseError(line.number, "expected 'RADIUS <positive real>'");
    mesh.radius = r;
  }

  const std::size_t n = in.header("NODES");
  mesh.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Line &line = in.entry("NODES", n, i, 2);
    Point2 p;
    if (!parse_number(line.tokens[0], p.x) || !parse_number(line.tokens[1], p.y) ||
        !std::isfinite(p.x) || !std::isfinite(p.y))
      throw MeshParseError(line.number, "malformed node coordinates");
    mesh.nodes.push_back(p);
  }

  const auto read_indices = [&](std::string_view section, std::size_t count, auto &target,
                                std::vector<std::size_t> &line_numbers) {
    constexpr std::size_t arity = std::tuple_size_v<typename std::decay_t<decltype(target)>::value_type>;
    for (std::size_t i = 0; i < count; ++i) {
      const Line &line = in.entry(section, count, i, arity);
      typename std::decay_t<decltype(target)>::value_type item{};
      for (std::size_t c = 0; c < arity; ++c) {
        if (!parse_number(line.tokens[c], item[c]))
          throw MeshParseError(line.number, "malformed index in " + std::string(section));
        if (item[c] >= n)
          throw MeshParseError(line.number, "index " + std::to_string(item[c]) +
                                                " out of range in " + std::string(section));
      }
      target.push_back(item);
      line_numbers.push_back(line.number);
    }
  };

  std::vector<std::size_t> triangle_lines, edge_lines;
  const std::size_t t = in.header("TRIANGLES");
  read_indices("TRIANGLES", t, mesh.triangles, triangle_lines);
  const std::size_t boundary_header_line = in.done() ? in.last_line() : in.peek().number;
  const std::size_t b = in.header("BOUNDARY_EDGES");
  read_indices("BOUNDARY_EDGES", b, mesh.boundary_edges, edge_lines);
  if (!in.done())
    throw MeshParseError(in.peek().number, "unexpected content after BOUNDARY_EDGES section");

  const double h = mesh_size(mesh);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
    if (!(signed_area(mesh, mesh.triangles[i]) >= 1e-14 * h * h))
      throw MeshParseError(triangle_lines[i], "triangle has zero or negative area");

  try {
    validate(mesh);
  } catch (const MeshParseError &) {
    throw;
  } catch (const MeshError &e) {
    throw MeshParseError(boundary_header_line, e.what());
  }
  return mesh;
}

} // namespace chdyn
