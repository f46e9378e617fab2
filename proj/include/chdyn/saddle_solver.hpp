#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "chdyn/types.hpp"

namespace chdyn {

// The constant BDF step operator
//
//   K = [ (delta0/tau) M   A ]
//       [      -A         M ]
//
// in blocked (u first, w second) ordering, factorized once at construction.
// Immutable afterwards; concurrent solve() calls are safe.
class StepMatrix {
public:
  StepMatrix(const SparseMatrix &mass, const SparseMatrix &stiffness, double delta0_over_tau);

  StepMatrix(StepMatrix &&) noexcept = default;
  StepMatrix &operator=(StepMatrix &&) noexcept = default;

  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const;

  Eigen::Index block_size() const { return n_; }
  double delta0_over_tau() const { return scale_; }
  const Eigen::SparseMatrix<double> &matrix() const { return *matrix_; }

  double determinant() const;
  double sign_determinant() const;
  double log_abs_determinant() const;

  // Number of numeric factorizations performed for this operator.
  std::size_t factorization_count() const { return factorizations_; }

private:
  using Factorization = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

  Eigen::Index n_ = 0;
  double scale_ = 0.0;
  std::unique_ptr<Eigen::SparseMatrix<double>> matrix_;
  std::unique_ptr<Factorization> lu_;
  std::size_t factorizations_ = 0;
};

StepMatrix build_step_matrix(const SparseMatrix &mass, const SparseMatrix &stiffness,
                             double delta0_over_tau);

} // namespace chdyn
