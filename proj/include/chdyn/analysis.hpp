#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chdyn/types.hpp"

namespace chdyn {

struct Discretization;
struct ProblemSpec;
struct Trajectory;

// sqrt(e^T M e): the L2(Omega_h) x L2(Gamma_h) norm of a nodal function.
double l2_norm(const SparseMatrix &mass, const NodalVector &e);

// sqrt(e^T (A + M) e).
double h1_norm(const SparseMatrix &mass, const SparseMatrix &stiffness, const NodalVector &e);

struct ErrorReport {
  double h = 0.0;
  double tau = 0.0;
  std::size_t nodes = 0;
  double err_L2 = 0.0;
  double err_H1 = 0.0;
  double err_w_L2 = 0.0;
  double err_w_H1 = 0.0;
};

// Errors of the final state against the nodal interpolant of the exact solution.
ErrorReport final_error(const Trajectory &trajectory, const ProblemSpec &problem,
                        const Discretization &disc);

// order_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}); nullopt where an error is zero.
std::vector<std::optional<double>> eoc(std::span<const double> errors, std::span<const double> hs);

double total_mass(const SparseMatrix &mass, const NodalVector &u);

// Discrete Ginzburg-Landau energy 1/2 u^T A u + 1^T M W(u).
double gl_energy(const SparseMatrix &stiffness, const SparseMatrix &mass, const ScalarMap &W,
                 const NodalVector &u);

} // namespace chdyn
