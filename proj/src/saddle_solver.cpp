#include "chdyn/saddle_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chdyn {

StepMatrix::StepMatrix(const SparseMatrix &mass, const SparseMatrix &stiffness,
                       double delta0_over_tau)
    : n_(mass.rows()), scale_(delta0_over_tau) {
  if (mass.rows() != mass.cols() || stiffness.rows() != stiffness.cols() ||
      mass.rows() != stiffness.rows())
    throw std::invalid_argument("step matrix: M and A must be square and of equal size");
  if (!(delta0_over_tau > 0.0) || !std::isfinite(delta0_over_tau))
    throw std::invalid_argument("step matrix: delta0/tau must be positive");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * static_cast<std::size_t>(mass.nonZeros() + stiffness.nonZeros()));
  for (Eigen::Index row = 0; row < n_; ++row) {
    for (SparseMatrix::InnerIterator it(mass, row); it; ++it) {
      triplets.emplace_back(row, it.col(), scale_ * it.value());
      triplets.emplace_back(n_ + row, n_ + it.col(), it.value());
    }
    for (SparseMatrix::InnerIterator it(stiffness, row); it; ++it) {
      triplets.emplace_back(row, n_ + it.col(), it.value());
      triplets.emplace_back(n_ + row, it.col(), -it.value());
    }
  }
  matrix_ = std::make_unique<Eigen::SparseMatrix<double>>(2 * n_, 2 * n_);
  matrix_->setFromTriplets(triplets.begin(), triplets.end());
  matrix_->makeCompressed();

  lu_ = std::make_unique<Factorization>();
  lu_->analyzePattern(*matrix_);
  lu_->factorize(*matrix_);
  ++factorizations_;
  if (lu_->info() != Eigen::Success)
    throw std::runtime_error("step matrix factorization failed: " + lu_->lastErrorMessage());
}

Eigen::VectorXd StepMatrix::solve(const Eigen::VectorXd &rhs) const {
  if (rhs.size() != 2 * n_)
    throw std::invalid_argument("step solve: rhs has length " + std::to_string(rhs.size()) +
                                ", expected " + std::to_string(2 * n_));
  if (!rhs.allFinite())
    throw std::domain_error("step solve: non-finite right-hand side");
  Eigen::VectorXd x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success)
    throw std::runtime_error("step solve failed");
  return x;
}

double StepMatrix::determinant() const { return lu_->determinant(); }
double StepMatrix::sign_determinant() const { return lu_->signDeterminant(); }
double StepMatrix::log_abs_determinant() const { return lu_->logAbsDeterminant(); }

StepMatrix build_step_matrix(const SparseMatrix &mass, const SparseMatrix &stiffness,
                             double delta0_over_tau) {
  return StepMatrix(mass, stiffness, delta0_over_tau);
}

} // namespace chdyn
