#include "chdyn/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chdyn/integrator.hpp"
#include "chdyn/problems.hpp"

namespace chdyn {

namespace {

double quadratic_form(const SparseMatrix &m, const NodalVector &e, const char *what) {
  if (m.cols() != e.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  const double q = e.dot(m * e);
  // Roundoff can push an exact zero slightly negative.
  const double slack = 1e-13 * std::max(1.0, e.squaredNorm());
  if (q < -slack)
    throw std::domain_error(std::string(what) + ": negative quadratic form " + std::to_string(q));
  return std::max(q, 0.0);
}

} // namespace

double l2_norm(const SparseMatrix &mass, const NodalVector &e) {
  return std::sqrt(quadratic_form(mass, e, "l2_norm"));
}

double h1_norm(const SparseMatrix &mass, const SparseMatrix &stiffness, const NodalVector &e) {
  return std::sqrt(quadratic_form(mass, e, "h1_norm") + quadratic_form(stiffness, e, "h1_norm"));
}

ErrorReport final_error(const Trajectory &trajectory, const ProblemSpec &problem,
                        const Discretization &disc) {
  if (!problem.has_exact())
    throw std::invalid_argument("final_error: problem '" + problem.name +
                                "' has no exact solution");
  if (trajectory.u_history.empty())
    throw std::invalid_argument("final_error: empty trajectory");
  const double T = trajectory.final_time();
  const NodalVector eu = trajectory.final_u() - nodal_interpolate(*problem.exact_u, disc.mesh, T);
  const NodalVector ew = trajectory.final_w() - nodal_interpolate(*problem.exact_w, disc.mesh, T);
  ErrorReport report;
  report.h = mesh_size(disc.mesh);
  report.tau = trajectory.tau;
  report.nodes = disc.mesh.num_nodes();
  report.err_L2 = l2_norm(disc.mass, eu);
  report.err_H1 = h1_norm(disc.mass, disc.stiffness, eu);
  report.err_w_L2 = l2_norm(disc.mass, ew);
  report.err_w_H1 = h1_norm(disc.mass, disc.stiffness, ew);
  return report;
}

std::vector<std::optional<double>> eoc(std::span<const double> errors,
                                       std::span<const double> hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need two or more errors and matching mesh sizes");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errors[i] >= 0.0))
      throw std::invalid_argument("eoc: mesh sizes must be positive and errors nonnegative");
    if (i > 0 && !(hs[i] < hs[i - 1]))
      throw std::invalid_argument("eoc: mesh sizes must be strictly decreasing");
  }
  std::vector<std::optional<double>> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] == 0.0 || errors[i + 1] == 0.0)
      orders.emplace_back(std::nullopt);
    else
      orders.emplace_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  }
  return orders;
}

double total_mass(const SparseMatrix &mass, const NodalVector &u) {
  if (mass.cols() != u.size())
    throw std::invalid_argument("total_mass: dimension mismatch");
  return (mass * u).sum();
}

double gl_energy(const SparseMatrix &stiffness, const SparseMatrix &mass, const ScalarMap &W,
                 const NodalVector &u) {
  NodalVector potential(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    potential[i] = W(u[i]);
  return 0.5 * u.dot(stiffness * u) + (mass * potential).sum();
}

} // namespace chdyn
