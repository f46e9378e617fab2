#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chdyn/mesh.hpp"
#include "chdyn/types.hpp"

namespace chdyn {

enum class ProblemKind { linear, nonlinear };

// One Cahn-Hilliard instance with dynamic Cahn-Hilliard boundary conditions:
//
//   u_t = Lap w + f1                      in the bulk
//   w   = -Lap u + f2 + F(u)              in the bulk
//   u_t = LapG w - d_n w + f1_surf        on the boundary
//   w   = -LapG u + d_n u + f2_surf + F(u) on the boundary
struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::linear;

  ScalarField f1_bulk;
  ScalarField f2_bulk;
  ScalarField f1_surf;
  ScalarField f2_surf;
  bool zero_forcing = false;

  // Zero map for linear problems. `potential` is an antiderivative of F used by
  // the energy diagnostic.
  ScalarMap F;
  ScalarMap potential;

  ScalarField u0;
  // When set, initial data is drawn per node as +-1 instead of interpolating u0.
  std::optional<std::uint64_t> random_seed;

  std::optional<ScalarField> exact_u;
  std::optional<ScalarField> exact_w;

  bool has_exact() const { return exact_u.has_value() && exact_w.has_value(); }
  NodalVector initial_data(const Mesh2D &mesh) const;
};

ProblemSpec manufactured_linear();
ProblemSpec manufactured_nonlinear();
// W(u) = strength (u^2 - 1)^2.
constexpr double kDefaultEvolutionStrength = 2.5;

ProblemSpec evolution_problem(double strength, std::uint64_t seed = 20190901);

// Linear problem with zero forcing and the given initial data.
ProblemSpec homogeneous_linear(ScalarField u0);

// Looks up "linear", "nonlinear" or "evolution" (default strength).
ProblemSpec problem_by_name(const std::string &name, std::uint64_t seed);

// Values exactly +-1, reproducible for a given seed.
NodalVector random_sign_vector(std::size_t n, std::uint64_t seed);

// Max absolute strong-form residual of the exact solution against the stored
// forcings, using finite differences. Points strictly inside the circle of
// `radius` are checked against the bulk equations, points on it against the
// boundary equations.
double verify_manufactured(const ProblemSpec &spec, std::span<const Point2> sample_points,
                           std::span<const double> times, double radius = 1.0);

} // namespace chdyn
