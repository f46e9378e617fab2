#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace chdyn {

// Symmetric FE operators are stored row-compressed.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// One value per mesh node.
using NodalVector = Eigen::VectorXd;

// f(x, y, t); evaluation must be re-entrant.
using ScalarField = std::function<double(double, double, double)>;

// Pointwise nonlinearity or potential, u -> F(u).
using ScalarMap = std::function<double(double)>;

} // namespace chdyn
