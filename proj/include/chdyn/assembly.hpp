#pragma once

#include <string>

#include "chdyn/mesh.hpp"
#include "chdyn/types.hpp"

namespace chdyn {

// P1 element matrices of the bulk triangle and the boundary segment, kept
// apart so bulk and surface data can be weighted separately.
struct CoupledOperators {
  SparseMatrix mass_bulk;
  SparseMatrix mass_surface;
  SparseMatrix stiffness_bulk;
  SparseMatrix stiffness_surface;

  SparseMatrix mass() const { return mass_bulk + mass_surface; }
  SparseMatrix stiffness() const { return stiffness_bulk + stiffness_surface; }
};

CoupledOperators assemble_operators(const Mesh2D &mesh);

// m_h(phi_i, phi_j): bulk P1 mass plus segment mass over boundary edges.
SparseMatrix assemble_mass(const Mesh2D &mesh);

// a_h(phi_i, phi_j): bulk Dirichlet form plus the tangential-gradient form on
// boundary edges, (1/L)[[1,-1],[-1,1]] per edge.
SparseMatrix assemble_stiffness(const Mesh2D &mesh);

NodalVector nodal_interpolate(const ScalarField &f, const Mesh2D &mesh, double t);

// Interpolates f at boundary nodes only; interior entries are zero. Used for
// surface data that is only defined on the circle.
NodalVector boundary_interpolate(const ScalarField &f, const Mesh2D &mesh, double t);

// b = M f_nodes, i.e. b_i = m_h(I_h f, phi_i).
NodalVector load_vector(const SparseMatrix &mass, const NodalVector &f_nodes);

// b_i = (I_h f_bulk, phi_i)_{Omega_h} + (I_h f_surf, phi_i)_{Gamma_h}.
NodalVector coupled_load_vector(const CoupledOperators &ops, const NodalVector &bulk_nodes,
                                const NodalVector &surface_nodes);

// M * F(u_nodes), the nonlinearity interpolated nodally before integration.
NodalVector nonlinearity_vector(const SparseMatrix &mass, const ScalarMap &F,
                                const NodalVector &u_nodes);

// "i j value" lines sorted by (i, j).
std::string dump_coordinate(const SparseMatrix &matrix);

} // namespace chdyn
