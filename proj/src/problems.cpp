#include "chdyn/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "chdyn/assembly.hpp"

namespace chdyn {

namespace {

double exact_xy(double x, double y, double t) { return std::exp(-t) * x * y; }

double cubic(double u) { return u * u * u - u; }

double zero_field(double, double, double) { return 0.0; }

ProblemSpec manufactured_base() {
  ProblemSpec spec;
  spec.exact_u = exact_xy;
  spec.exact_w = exact_xy;
  spec.u0 = exact_xy;
  // Lap(xy) = 0 in the bulk; on the unit circle LapG(xy) = -4xy and d_n(xy) = 2xy.
  spec.f1_bulk = [](double x, double y, double t) { return -exact_xy(x, y, t); };
  spec.f1_surf = [](double x, double y, double t) { return 5.0 * exact_xy(x, y, t); };
  return spec;
}

} // namespace

NodalVector ProblemSpec::initial_data(const Mesh2D &mesh) const {
  if (random_seed)
    return random_sign_vector(mesh.num_nodes(), *random_seed);
  return nodal_interpolate(u0, mesh, 0.0);
}

ProblemSpec manufactured_linear() {
  ProblemSpec spec = manufactured_base();
  spec.name = "linear";
  spec.kind = ProblemKind::linear;
  spec.f2_bulk = exact_xy;
  spec.f2_surf = [](double x, double y, double t) { return -5.0 * exact_xy(x, y, t); };
  spec.F = [](double) { return 0.0; };
  spec.potential = [](double) { return 0.0; };
  return spec;
}

ProblemSpec manufactured_nonlinear() {
  ProblemSpec spec = manufactured_base();
  spec.name = "nonlinear";
  spec.kind = ProblemKind::nonlinear;
  spec.f2_bulk = [](double x, double y, double t) {
    const double u = exact_xy(x, y, t);
    return u - cubic(u);
  };
  spec.f2_surf = [](double x, double y, double t) {
    const double u = exact_xy(x, y, t);
    return -5.0 * u - cubic(u);
  };
  spec.F = cubic;
  spec.potential = [](double u) { return 0.25 * (u * u - 1.0) * (u * u - 1.0); };
  return spec;
}

ProblemSpec evolution_problem(double strength, std::uint64_t seed) {
  if (!(strength > 0.0) || !std::isfinite(strength))
    throw std::invalid_argument("potential strength must be positive");
  ProblemSpec spec;
  spec.name = "evolution";
  spec.kind = ProblemKind::nonlinear;
  spec.f1_bulk = spec.f2_bulk = spec.f1_surf = spec.f2_surf = zero_field;
  spec.zero_forcing = true;
  // W(u) = s (u^2 - 1)^2, F = W'.
  spec.F = [strength](double u) { return 4.0 * strength * u * (u * u - 1.0); };
  spec.potential = [strength](double u) { return strength * (u * u - 1.0) * (u * u - 1.0); };
  spec.u0 = zero_field;
  spec.random_seed = seed;
  return spec;
}

ProblemSpec homogeneous_linear(ScalarField u0) {
  ProblemSpec spec;
  spec.name = "homogeneous";
  spec.kind = ProblemKind::linear;
  spec.f1_bulk = spec.f2_bulk = spec.f1_surf = spec.f2_surf = zero_field;
  spec.zero_forcing = true;
  spec.F = [](double) { return 0.0; };
  spec.potential = [](double) { return 0.0; };
  spec.u0 = std::move(u0);
  return spec;
}

ProblemSpec problem_by_name(const std::string &name, std::uint64_t seed) {
  if (name == "linear")
    return manufactured_linear();
  if (name == "nonlinear")
    return manufactured_nonlinear();
  if (name == "evolution")
    return evolution_problem(kDefaultEvolutionStrength, seed);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

NodalVector random_sign_vector(std::size_t n, std::uint64_t seed) {
  // mt19937_64 output is fully specified by the standard; distributions are not.
  std::mt19937_64 gen(seed);
  NodalVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = (gen() >> 63) ? 1.0 : -1.0;
  return v;
}

namespace {

constexpr double kFirstStep = 1e-5;
constexpr double kSecondStep = 1e-3;

template <class G> double first_derivative(G g, double s) {
  return (g(s + kFirstStep) - g(s - kFirstStep)) / (2.0 * kFirstStep);
}

// Fourth-order five-point stencil.
template <class G> double second_derivative(G g, double s) {
  const double h = kSecondStep;
  return (-g(s + 2 * h) + 16.0 * g(s + h) - 30.0 * g(s) + 16.0 * g(s - h) - g(s - 2 * h)) /
         (12.0 * h * h);
}

double laplacian(const ScalarField &f, double x, double y, double t) {
  return second_derivative([&](double s) { return f(s, y, t); }, x) +
         second_derivative([&](double s) { return f(x, s, t); }, y);
}

double time_derivative(const ScalarField &f, double x, double y, double t) {
  return first_derivative([&](double s) { return f(x, y, s); }, t);
}

double surface_laplacian(const ScalarField &f, double theta, double radius, double t) {
  const auto g = [&](double s) { return f(radius * std::cos(s), radius * std::sin(s), t); };
  return second_derivative(g, theta) / (radius * radius);
}

double normal_derivative(const ScalarField &f, double theta, double radius, double t) {
  const double c = std::cos(theta), s = std::sin(theta);
  return first_derivative([&](double r) { return f(r * c, r * s, t); }, radius);
}

} // namespace

double verify_manufactured(const ProblemSpec &spec, std::span<const Point2> sample_points,
                           std::span<const double> times, double radius) {
  if (!spec.has_exact())
    throw std::invalid_argument("verify_manufactured: problem '" + spec.name +
                                "' has no exact solution");
  const ScalarField &u = *spec.exact_u;
  const ScalarField &w = *spec.exact_w;
  double worst = 0.0;
  for (const double t : times) {
    for (const Point2 &p : sample_points) {
      const double r = std::hypot(p.x, p.y);
      const double uval = u(p.x, p.y, t);
      const double wval = w(p.x, p.y, t);
      if (std::abs(r - radius) <= 1e-9 * radius) {
        const double theta = std::atan2(p.y, p.x);
        const double r1 = time_derivative(u, p.x, p.y, t) - surface_laplacian(w, theta, radius, t) +
                          normal_derivative(w, theta, radius, t) - spec.f1_surf(p.x, p.y, t);
        const double r2 = wval + surface_laplacian(u, theta, radius, t) -
                          normal_derivative(u, theta, radius, t) - spec.f2_surf(p.x, p.y, t) -
                          spec.F(uval);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
      } else if (r < radius) {
        const double r1 = time_derivative(u, p.x, p.y, t) - laplacian(w, p.x, p.y, t) -
                          spec.f1_bulk(p.x, p.y, t);
        const double r2 =
            wval + laplacian(u, p.x, p.y, t) - spec.f2_bulk(p.x, p.y, t) - spec.F(uval);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
      } else {
        throw std::invalid_argument("verify_manufactured: sample point outside the disk");
      }
    }
  }
  return worst;
}

} // namespace chdyn
