#pragma once

// Dense reference routines for cross-checking the sparse code paths. Written
// against std::vector only so they share nothing with the implementation.

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chdyn/mesh.hpp"
#include "chdyn/types.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t n) { return Dense(n, std::vector<double>(n, 0.0)); }

inline Dense to_dense(const chdyn::SparseMatrix &m) {
  Dense d = zeros(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (chdyn::SparseMatrix::InnerIterator it(m, r); it; ++it)
      d[it.row()][it.col()] += it.value();
  return d;
}

template <class SparseT> Dense to_dense_any(const SparseT &m) {
  Dense d = zeros(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (typename SparseT::InnerIterator it(m, k); it; ++it)
      d[it.row()][it.col()] += it.value();
  return d;
}

inline std::vector<double> matvec(const Dense &a, const std::vector<double> &x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      y[i] += a[i][j] * x[j];
  return y;
}

// Gaussian elimination with partial pivoting; returns (solution, determinant).
inline std::pair<std::vector<double>, double> solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c]))
        p = r;
    if (a[p][c] == 0.0)
      return {{}, 0.0};
    if (p != c) {
      std::swap(a[p], a[c]);
      std::swap(b[p], b[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k)
        a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k)
      s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return {x, det};
}

inline double determinant(const Dense &a) {
  return solve(a, std::vector<double>(a.size(), 0.0)).second;
}

// Rank by Gaussian elimination with a relative pivot threshold.
inline std::size_t rank(Dense a, double tol = 1e-10) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto &row : a)
    for (double v : row)
      scale = std::max(scale, std::abs(v));
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < n; ++c) {
    std::size_t p = r;
    for (std::size_t i = r + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[p][c]))
        p = i;
    if (std::abs(a[p][c]) <= tol * scale)
      continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < n; ++i) {
      const double f = a[i][c] / a[r][c];
      for (std::size_t k = c; k < n; ++k)
        a[i][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

// Cholesky succeeds with positive pivots iff the matrix is SPD.
inline bool is_spd(Dense a) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k)
      d -= a[j][k] * a[j][k];
    if (!(d > 0.0))
      return false;
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k)
        s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  return true;
}

// Brute-force P1 element matrices: basis coefficients from a 3x3 solve,
// integrals from the edge-midpoint rule (exact for quadratics) and the
// 3-point Gauss rule on segments.
struct P1Basis {
  std::array<std::array<double, 3>, 3> coef; // phi_a(x,y) = c0 + c1 x + c2 y
  double area;
};

inline P1Basis p1_basis(const chdyn::Point2 &p0, const chdyn::Point2 &p1,
                        const chdyn::Point2 &p2) {
  P1Basis b{};
  const chdyn::Point2 pts[3] = {p0, p1, p2};
  Dense vander = zeros(3);
  for (int r = 0; r < 3; ++r)
    vander[r] = {1.0, pts[r].x, pts[r].y};
  for (int a = 0; a < 3; ++a) {
    std::vector<double> rhs(3, 0.0);
    rhs[a] = 1.0;
    const auto x = solve(vander, rhs).first;
    b.coef[a] = {x[0], x[1], x[2]};
  }
  b.area = 0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
  return b;
}

inline void add_bulk(const chdyn::Mesh2D &mesh, Dense &mass, Dense &stiff) {
  for (const auto &t : mesh.triangles) {
    const auto &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
    const P1Basis basis = p1_basis(a, b, c);
    const chdyn::Point2 mids[3] = {{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)},
                                   {0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
                                   {0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}};
    const auto phi = [&](int i, const chdyn::Point2 &p) {
      return basis.coef[i][0] + basis.coef[i][1] * p.x + basis.coef[i][2] * p.y;
    };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (const auto &p : mids)
          m += phi(i, p) * phi(j, p) * basis.area / 3.0;
        mass[t[i]][t[j]] += m;
        stiff[t[i]][t[j]] += basis.area * (basis.coef[i][1] * basis.coef[j][1] +
                                           basis.coef[i][2] * basis.coef[j][2]);
      }
  }
}

inline void add_surface(const chdyn::Mesh2D &mesh, Dense &mass, Dense &stiff) {
  const double gauss_x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gauss_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (const auto &e : mesh.boundary_edges) {
    const auto &a = mesh.nodes[e[0]], &b = mesh.nodes[e[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    for (int q = 0; q < 3; ++q) {
      const double s = 0.5 * (gauss_x[q] + 1.0); // arclength fraction from a
      const double phi[2] = {1.0 - s, s};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          mass[e[i]][e[j]] += 0.5 * len * gauss_w[q] * phi[i] * phi[j];
    }
    // Tangential derivatives of the two hat functions: -1/len and +1/len.
    const double dphi[2] = {-1.0 / len, 1.0 / len};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        stiff[e[i]][e[j]] += len * dphi[i] * dphi[j];
  }
}

inline std::pair<Dense, Dense> brute_force_operators(const chdyn::Mesh2D &mesh) {
  Dense mass = zeros(mesh.num_nodes()), stiff = zeros(mesh.num_nodes());
  add_bulk(mesh, mass, stiff);
  add_surface(mesh, mass, stiff);
  return {mass, stiff};
}

inline double max_abs_diff(const Dense &a, const Dense &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

inline chdyn::Mesh2D unit_square() {
  chdyn::Mesh2D m;
  m.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return m;
}

inline chdyn::Mesh2D unit_triangle(bool with_boundary) {
  chdyn::Mesh2D m;
  m.nodes = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  if (with_boundary)
    m.boundary_edges = {{0, 1}, {1, 2}, {2, 0}};
  return m;
}

// Hand-computed operators on the unit square split along the (0,0)-(1,1) diagonal.
inline Dense unit_square_mass() {
  const double s = 1.0 / 24.0;
  return {{20 * s, 5 * s, 2 * s, 5 * s},
          {5 * s, 18 * s, 5 * s, 0.0},
          {2 * s, 5 * s, 20 * s, 5 * s},
          {5 * s, 0.0, 5 * s, 18 * s}};
}

inline Dense unit_square_stiffness() {
  return {{3.0, -1.5, 0.0, -1.5}, {-1.5, 3.0, -1.5, 0.0}, {0.0, -1.5, 3.0, -1.5},
          {-1.5, 0.0, -1.5, 3.0}};
}

} // namespace oracle
