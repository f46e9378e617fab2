#include "chdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "chdyn/analysis.hpp"

namespace chdyn {

namespace {

struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction operator+(const Fraction &o) const {
    Fraction r{num * o.den + o.num * den, den * o.den};
    const long long g = std::gcd(r.num, r.den);
    return {r.num / g, r.den / g};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

long long binomial(int n, int r) {
  long long c = 1;
  for (int i = 1; i <= r; ++i)
    c = c * (n - r + i) / i;
  return c;
}

void check_order(int k) {
  if (k < 1 || k > kMaxBdfOrder)
    throw std::invalid_argument("BDF order must lie in [1, " + std::to_string(kMaxBdfOrder) +
                                "], got " + std::to_string(k));
}

} // namespace

std::vector<double> bdf_coefficients(int k) {
  check_order(k);
  // (1/l)(1 - xi)^l contributes (1/l) C(l, j) (-1)^j to xi^j.
  std::vector<Fraction> coeff(static_cast<std::size_t>(k) + 1);
  for (int l = 1; l <= k; ++l)
    for (int j = 0; j <= l; ++j) {
      const long long sign = (j % 2 == 0) ? 1 : -1;
      coeff[j] = coeff[j] + Fraction{sign * binomial(l, j), l};
    }
  std::vector<double> delta;
  for (const auto &c : coeff)
    delta.push_back(c.value());
  return delta;
}

std::vector<double> extrapolation_coefficients(int k) {
  check_order(k);
  // (1 - (1 - xi)^k) / xi = sum_{l=0}^{k-1} (-1)^l C(k, l+1) xi^l.
  std::vector<double> gamma;
  for (int l = 0; l < k; ++l)
    gamma.push_back(static_cast<double>((l % 2 == 0 ? 1 : -1) * binomial(k, l + 1)));
  return gamma;
}

BDFScheme BDFScheme::of_order(int k) {
  return {k, bdf_coefficients(k), extrapolation_coefficients(k)};
}

namespace {

void check_history(const BDFScheme &scheme, std::span<const NodalVector> u_history,
                   Eigen::Index n) {
  if (u_history.size() != static_cast<std::size_t>(scheme.k))
    throw std::invalid_argument("BDF step needs exactly " + std::to_string(scheme.k) +
                                " history vectors, got " + std::to_string(u_history.size()));
  for (const auto &u : u_history)
    if (u.size() != n)
      throw std::invalid_argument("BDF step: history vector has wrong dimension");
}

StepResult solve_step(const BDFScheme &scheme, const StepMatrix &K, const SparseMatrix &mass,
                      std::span<const NodalVector> u_history, const NodalVector &b1,
                      const NodalVector &b2) {
  const Eigen::Index n = K.block_size();
  check_history(scheme, u_history, n);
  if (b1.size() != n || b2.size() != n)
    throw std::invalid_argument("BDF step: forcing vector has wrong dimension");

  NodalVector past = NodalVector::Zero(n);
  for (int j = 1; j <= scheme.k; ++j)
    past += scheme.delta[j] * u_history[j - 1];
  const double inv_tau = K.delta0_over_tau() / scheme.delta[0];

  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = b1 - inv_tau * (mass * past);
  rhs.tail(n) = b2;
  const Eigen::VectorXd x = K.solve(rhs);
  return {x.head(n), x.tail(n)};
}

} // namespace

StepResult step_linear(const BDFScheme &scheme, const StepMatrix &K, const SparseMatrix &mass,
                       std::span<const NodalVector> u_history, const NodalVector &b1,
                       const NodalVector &b2) {
  return solve_step(scheme, K, mass, u_history, b1, b2);
}

StepResult step_nonlinear(const BDFScheme &scheme, const StepMatrix &K, const SparseMatrix &mass,
                          std::span<const NodalVector> u_history, const NodalVector &b1,
                          const NodalVector &b2, const ScalarMap &F) {
  check_history(scheme, u_history, K.block_size());
  NodalVector extrapolated = NodalVector::Zero(K.block_size());
  for (int j = 0; j < scheme.k; ++j)
    extrapolated += scheme.gamma[j] * u_history[j];
  const NodalVector rhs2 = b2 + nonlinearity_vector(mass, F, extrapolated);
  return solve_step(scheme, K, mass, u_history, b1, rhs2);
}

Discretization::Discretization(Mesh2D m)
    : mesh(std::move(m)), ops(assemble_operators(mesh)), mass(ops.mass()),
      stiffness(ops.stiffness()) {}

std::pair<NodalVector, NodalVector> forcing_vectors(const ProblemSpec &problem,
                                                    const Discretization &disc, double t) {
  if (problem.zero_forcing) {
    NodalVector zero = NodalVector::Zero(disc.size());
    return {zero, zero};
  }
  const Mesh2D &mesh = disc.mesh;
  return {coupled_load_vector(disc.ops, nodal_interpolate(problem.f1_bulk, mesh, t),
                              boundary_interpolate(problem.f1_surf, mesh, t)),
          coupled_load_vector(disc.ops, nodal_interpolate(problem.f2_bulk, mesh, t),
                              boundary_interpolate(problem.f2_surf, mesh, t))};
}

std::size_t bootstrap_substeps(double tau, int k) {
  check_order(k);
  const double m = std::ceil(std::pow(tau, -static_cast<double>(k - 1) / k));
  return static_cast<std::size_t>(std::clamp(m, 1.0, 1000.0));
}

std::vector<StepResult> starting_values(const ProblemSpec &problem, const Discretization &disc,
                                        double tau, int k, StartMode mode) {
  check_order(k);
  if (!(tau > 0.0))
    throw std::invalid_argument("starting_values: tau must be positive");
  std::vector<StepResult> starts;

  if (mode == StartMode::exact) {
    if (!problem.has_exact())
      throw std::invalid_argument("exact starting values requested but problem '" + problem.name +
                                  "' has no exact solution");
    for (int j = 0; j < k; ++j)
      starts.push_back({nodal_interpolate(*problem.exact_u, disc.mesh, j * tau),
                        nodal_interpolate(*problem.exact_w, disc.mesh, j * tau)});
    return starts;
  }

  // w^0 from the algebraic equation M w = A u + b2 + F-term.
  const bool nonlinear = problem.kind == ProblemKind::nonlinear;
  const NodalVector u0 = problem.initial_data(disc.mesh);
  NodalVector rhs = disc.stiffness * u0 + forcing_vectors(problem, disc, 0.0).second;
  if (nonlinear)
    rhs += nonlinearity_vector(disc.mass, problem.F, u0);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass_solver(disc.mass);
  if (mass_solver.info() != Eigen::Success)
    throw std::runtime_error("mass matrix factorization failed");
  starts.push_back({u0, mass_solver.solve(rhs)});
  if (k == 1)
    return starts;

  const std::size_t substeps = bootstrap_substeps(tau, k);
  const double fine = tau / static_cast<double>(substeps);
  const BDFScheme euler = BDFScheme::of_order(1);
  const StepMatrix K(disc.mass, disc.stiffness, euler.delta[0] / fine);
  StepResult state = starts.front();
  for (int j = 1; j < k; ++j) {
    for (std::size_t s = 1; s <= substeps; ++s) {
      const double t = (j - 1) * tau + static_cast<double>(s) * fine;
      const auto [b1, b2] = forcing_vectors(problem, disc, t);
      const std::span<const NodalVector> history(&state.u, 1);
      try {
        state = nonlinear ? step_nonlinear(euler, K, disc.mass, history, b1, b2, problem.F)
                          : step_linear(euler, K, disc.mass, history, b1, b2);
      } catch (const std::domain_error &e) {
        throw std::runtime_error("starting step " + std::to_string(j) + ", substep " +
                                 std::to_string(s) + ": " + e.what());
      }
    }
    starts.push_back(state);
  }
  return starts;
}

Trajectory run(const ProblemSpec &problem, const Discretization &disc, double tau, double T,
               const BDFScheme &scheme, StartMode start_mode, const RunOptions &options) {
  if (!(tau > 0.0) || !(T > 0.0))
    throw std::invalid_argument("run: tau and T must be positive");
  const double ratio = std::round(T / tau);
  if (std::abs(ratio * tau - T) > 1e-12 * std::max(1.0, T))
    throw std::invalid_argument("run: tau does not divide T");
  const auto steps = static_cast<std::size_t>(ratio);
  if (steps + 1 < static_cast<std::size_t>(scheme.k))
    throw std::invalid_argument("run: fewer steps than starting values");

  const bool nonlinear = problem.kind == ProblemKind::nonlinear;
  const StepMatrix K(disc.mass, disc.stiffness, scheme.delta[0] / tau);

  Trajectory traj;
  traj.tau = tau;
  const auto should_store = [&](std::size_t n) {
    if (n == 0 || n == steps)
      return true;
    if (options.store_every > 0 && n % options.store_every == 0)
      return true;
    const double t = static_cast<double>(n) * tau;
    return std::any_of(options.store_times.begin(), options.store_times.end(),
                       [&](double s) { return std::abs(s - t) < 0.5 * tau; });
  };
  const auto record = [&](std::size_t n, const StepResult &state) {
    if (!state.u.allFinite() || !state.w.allFinite())
      throw std::runtime_error("non-finite solution at step " + std::to_string(n));
    traj.times.push_back(static_cast<double>(n) * tau);
    traj.mass.push_back(total_mass(disc.mass, state.u));
    traj.energy.push_back(gl_energy(disc.stiffness, disc.mass, problem.potential, state.u));
    if (should_store(n)) {
      traj.stored_steps.push_back(n);
      traj.u_history.push_back(state.u);
      traj.w_history.push_back(state.w);
    }
  };

  const auto starts = starting_values(problem, disc, tau, scheme.k, start_mode);
  std::deque<NodalVector> history; // newest first
  for (std::size_t n = 0; n < starts.size() && n <= steps; ++n) {
    record(n, starts[n]);
    history.push_front(starts[n].u);
  }

  std::vector<NodalVector> window(static_cast<std::size_t>(scheme.k));
  for (std::size_t n = starts.size(); n <= steps; ++n) {
    const auto [b1, b2] = forcing_vectors(problem, disc, static_cast<double>(n) * tau);
    std::copy_n(history.begin(), scheme.k, window.begin());
    StepResult next;
    try {
      next = nonlinear ? step_nonlinear(scheme, K, disc.mass, window, b1, b2, problem.F)
                       : step_linear(scheme, K, disc.mass, window, b1, b2);
    } catch (const std::domain_error &e) {
      throw std::runtime_error("step " + std::to_string(n) + ": " + e.what());
    }
    record(n, next);
    history.push_front(next.u);
    history.pop_back();
  }
  return traj;
}

} // namespace chdyn
