#include "chdyn/assembly.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace chdyn {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(std::size_t n, const Triplets &triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void bulk_mass(const Mesh2D &mesh, Triplets &out) {
  for (const auto &t : mesh.triangles) {
    const double scale = signed_area(mesh, t) / 12.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        out.emplace_back(t[a], t[b], (a == b ? 2.0 : 1.0) * scale);
  }
}

void surface_mass(const Mesh2D &mesh, Triplets &out) {
  for (const auto &e : mesh.boundary_edges) {
    const double scale = edge_length(mesh, e[0], e[1]) / 6.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        out.emplace_back(e[a], e[b], (a == b ? 2.0 : 1.0) * scale);
  }
}

void bulk_stiffness(const Mesh2D &mesh, Triplets &out) {
  for (const auto &t : mesh.triangles) {
    const double area = signed_area(mesh, t);
    // Gradient of the barycentric coordinate of vertex a is (gy[a], gx[a]) / (2 area)
    // up to sign; only products enter.
    double gy[3], gx[3];
    for (int a = 0; a < 3; ++a) {
      const Point2 &p = mesh.nodes[t[(a + 1) % 3]];
      const Point2 &q = mesh.nodes[t[(a + 2) % 3]];
      gy[a] = p.y - q.y;
      gx[a] = q.x - p.x;
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        out.emplace_back(t[a], t[b], (gy[a] * gy[b] + gx[a] * gx[b]) / (4.0 * area));
  }
}

void surface_stiffness(const Mesh2D &mesh, Triplets &out) {
  for (const auto &e : mesh.boundary_edges) {
    const double inv_len = 1.0 / edge_length(mesh, e[0], e[1]);
    out.emplace_back(e[0], e[0], inv_len);
    out.emplace_back(e[0], e[1], -inv_len);
    out.emplace_back(e[1], e[0], -inv_len);
    out.emplace_back(e[1], e[1], inv_len);
  }
}

template <class Fill> SparseMatrix assemble(const Mesh2D &mesh, Fill fill) {
  Triplets triplets;
  fill(mesh, triplets);
  return from_triplets(mesh.num_nodes(), triplets);
}

void check_size(const SparseMatrix &m, const NodalVector &v, const char *what) {
  if (m.cols() != v.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(m.cols()) + " vs " + std::to_string(v.size()) +
                                ")");
}

} // namespace

CoupledOperators assemble_operators(const Mesh2D &mesh) {
  return {assemble(mesh, bulk_mass), assemble(mesh, surface_mass), assemble(mesh, bulk_stiffness),
          assemble(mesh, surface_stiffness)};
}

SparseMatrix assemble_mass(const Mesh2D &mesh) {
  return assemble(mesh, [](const Mesh2D &m, Triplets &out) {
    bulk_mass(m, out);
    surface_mass(m, out);
  });
}

SparseMatrix assemble_stiffness(const Mesh2D &mesh) {
  return assemble(mesh, [](const Mesh2D &m, Triplets &out) {
    bulk_stiffness(m, out);
    surface_stiffness(m, out);
  });
}

NodalVector nodal_interpolate(const ScalarField &f, const Mesh2D &mesh, double t) {
  NodalVector v(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const double value = f(mesh.nodes[i].x, mesh.nodes[i].y, t);
    if (!std::isfinite(value))
      throw std::domain_error("non-finite field value at node " + std::to_string(i));
    v[static_cast<Eigen::Index>(i)] = value;
  }
  return v;
}

NodalVector boundary_interpolate(const ScalarField &f, const Mesh2D &mesh, double t) {
  NodalVector v = NodalVector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (const auto &e : mesh.boundary_edges) {
    const std::size_t i = e[0];
    const double value = f(mesh.nodes[i].x, mesh.nodes[i].y, t);
    if (!std::isfinite(value))
      throw std::domain_error("non-finite surface value at node " + std::to_string(i));
    v[static_cast<Eigen::Index>(i)] = value;
  }
  return v;
}

NodalVector load_vector(const SparseMatrix &mass, const NodalVector &f_nodes) {
  check_size(mass, f_nodes, "load_vector");
  return mass * f_nodes;
}

NodalVector coupled_load_vector(const CoupledOperators &ops, const NodalVector &bulk_nodes,
                                const NodalVector &surface_nodes) {
  check_size(ops.mass_bulk, bulk_nodes, "coupled_load_vector");
  check_size(ops.mass_surface, surface_nodes, "coupled_load_vector");
  return ops.mass_bulk * bulk_nodes + ops.mass_surface * surface_nodes;
}

NodalVector nonlinearity_vector(const SparseMatrix &mass, const ScalarMap &F,
                                const NodalVector &u_nodes) {
  check_size(mass, u_nodes, "nonlinearity_vector");
  NodalVector values(u_nodes.size());
  for (Eigen::Index i = 0; i < u_nodes.size(); ++i) {
    values[i] = F(u_nodes[i]);
    if (!std::isfinite(values[i]))
      throw std::domain_error("non-finite nonlinearity at node " + std::to_string(i));
  }
  return mass * values;
}

std::string dump_coordinate(const SparseMatrix &matrix) {
  std::string out;
  char buf[64];
  for (Eigen::Index row = 0; row < matrix.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(matrix, row); it; ++it) {
      out += std::to_string(it.row()) + ' ' + std::to_string(it.col()) + ' ';
      const auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
      out.append(buf, res.ptr);
      out += '\n';
    }
  return out;
}

} // namespace chdyn
