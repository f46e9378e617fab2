#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "chdyn/assembly.hpp"
#include "chdyn/mesh.hpp"
#include "chdyn/problems.hpp"
#include "chdyn/saddle_solver.hpp"

namespace chdyn {

constexpr int kMaxBdfOrder = 6;

// delta(xi) = sum_{l=1}^k (1/l)(1 - xi)^l, coefficients delta_0..delta_k.
std::vector<double> bdf_coefficients(int k);

// gamma(xi) = (1 - (1 - xi)^k) / xi, coefficients gamma_0..gamma_{k-1}.
std::vector<double> extrapolation_coefficients(int k);

struct BDFScheme {
  int k = 0;
  std::vector<double> delta;
  std::vector<double> gamma;

  static BDFScheme of_order(int k);
};

struct StepResult {
  NodalVector u;
  NodalVector w;
};

// u_history holds exactly k vectors, newest first (u^{n-1}, ..., u^{n-k}).
// The step size is recovered from the operator: 1/tau = (delta0/tau) / delta0.
StepResult step_linear(const BDFScheme &scheme, const StepMatrix &K, const SparseMatrix &mass,
                       std::span<const NodalVector> u_history, const NodalVector &b1,
                       const NodalVector &b2);

// Linearly implicit step: F is evaluated at sum_j gamma_j u^{n-j-1} and moved to
// the right-hand side, so K is reused unchanged.
StepResult step_nonlinear(const BDFScheme &scheme, const StepMatrix &K, const SparseMatrix &mass,
                          std::span<const NodalVector> u_history, const NodalVector &b1,
                          const NodalVector &b2, const ScalarMap &F);

// Mesh plus everything assembled on it.
struct Discretization {
  Mesh2D mesh;
  CoupledOperators ops;
  SparseMatrix mass;
  SparseMatrix stiffness;

  explicit Discretization(Mesh2D m);

  Eigen::Index size() const { return mass.rows(); }
};

// b1(t), b2(t) for the problem's bulk and surface forcings.
std::pair<NodalVector, NodalVector> forcing_vectors(const ProblemSpec &problem,
                                                    const Discretization &disc, double t);

enum class StartMode { exact, bootstrap };

// Number of backward Euler substeps per coarse step used by bootstrap starts.
std::size_t bootstrap_substeps(double tau, int k);

// k pairs (u^j, w^j), j = 0..k-1.
std::vector<StepResult> starting_values(const ProblemSpec &problem, const Discretization &disc,
                                        double tau, int k, StartMode mode);

struct RunOptions {
  // Store u, w every `store_every` steps (0: only first and last step).
  std::size_t store_every = 1;
  // Additional times at which states are stored.
  std::vector<double> store_times;
};

struct Trajectory {
  double tau = 0.0;
  std::vector<double> times;  // t^0 .. t^N
  std::vector<double> mass;   // 1^T M u^n
  std::vector<double> energy; // 1/2 u^T A u + 1^T M W(u)
  std::vector<std::size_t> stored_steps;
  std::vector<NodalVector> u_history;
  std::vector<NodalVector> w_history;

  std::size_t num_steps() const { return times.empty() ? 0 : times.size() - 1; }
  const NodalVector &final_u() const { return u_history.back(); }
  const NodalVector &final_w() const { return w_history.back(); }
  double final_time() const { return times.back(); }
};

Trajectory run(const ProblemSpec &problem, const Discretization &disc, double tau, double T,
               const BDFScheme &scheme, StartMode start_mode, const RunOptions &options = {});

} // namespace chdyn
