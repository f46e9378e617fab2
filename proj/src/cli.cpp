#include "chdyn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "chdyn/analysis.hpp"
#include "chdyn/integrator.hpp"
#include "chdyn/mesh.hpp"
#include "chdyn/problems.hpp"

namespace chdyn {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

std::string fmt_eoc(const std::optional<double> &v) { return v ? fmt(*v) : "NA"; }

struct ConvergenceConfig {
  std::string problem = "linear";
  int k = 3;
  std::vector<int> refinements = {1, 2, 3, 4, 5};
  std::vector<double> taus = {0.025, 0.0125, 0.005, 0.0025};
  double T = 1.0;
  double radius = 1.0;
  std::uint64_t seed = 20190901;
  std::string start_mode = "exact";
  std::string out;
};

struct EvolveConfig {
  std::string problem = "evolution";
  int k = 3;
  std::size_t nodes = 640;
  std::vector<double> taus = {0.00125};
  double T = 3.0;
  double radius = 10.0;
  std::uint64_t seed = 20190901;
  double strength = kDefaultEvolutionStrength;
  std::string start_mode = "bootstrap";
  std::vector<double> snapshots = {0.0, 0.5, 1.0, 2.0, 3.0};
  std::string out = "evolve_out";
  bool vtk = false;
};

struct MeshConfig {
  std::size_t nodes = 20;
  double radius = 1.0;
  std::string out;
  bool validate = false;
};

StartMode parse_start_mode(const std::string &s) {
  return s == "exact" ? StartMode::exact : StartMode::bootstrap;
}

std::size_t checked_steps(double tau, double T) {
  const double ratio = std::round(T / tau);
  if (std::abs(ratio * tau - T) > 1e-12 * std::max(1.0, T))
    throw UsageError("tau = " + fmt(tau) + " does not divide T = " + fmt(T));
  return static_cast<std::size_t>(ratio);
}

// Writes `content` to `path`, removing the file if anything goes wrong.
void write_file(const fs::path &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) {
    std::error_code ec;
    fs::remove(path, ec);
    throw std::runtime_error("failed writing " + path.string());
  }
}

// Runs job(j) for j in [0, count) on a small thread pool. Exceptions are rethrown
// in job order so failures are reported deterministically.
template <class Job> void parallel_for(std::size_t count, Job job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j = next++; j < count; j = next++) {
      try {
        job(j);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

void cmd_convergence(ConvergenceConfig cfg, std::ostream &out) {
  if (cfg.problem != "linear" && cfg.problem != "nonlinear")
    throw UsageError("convergence needs --problem linear or nonlinear");
  std::sort(cfg.refinements.begin(), cfg.refinements.end());
  cfg.refinements.erase(std::unique(cfg.refinements.begin(), cfg.refinements.end()),
                        cfg.refinements.end());
  std::sort(cfg.taus.begin(), cfg.taus.end(), std::greater<>());
  cfg.taus.erase(std::unique(cfg.taus.begin(), cfg.taus.end()), cfg.taus.end());
  for (double tau : cfg.taus) {
    if (!(tau > 0.0))
      throw UsageError("--tau must be positive");
    if (checked_steps(tau, cfg.T) + 1 < static_cast<std::size_t>(cfg.k))
      throw UsageError("fewer time steps than BDF starting values");
  }

  const ProblemSpec problem = problem_by_name(cfg.problem, cfg.seed);
  const BDFScheme scheme = BDFScheme::of_order(cfg.k);
  const StartMode mode = parse_start_mode(cfg.start_mode);

  std::vector<std::unique_ptr<Discretization>> discs(cfg.refinements.size());
  parallel_for(discs.size(), [&](std::size_t j) {
    discs[j] = std::make_unique<Discretization>(
        generate_disk_mesh(refinement_nodes(cfg.refinements[j]), cfg.radius));
  });

  const std::size_t nr = cfg.refinements.size();
  std::vector<ErrorReport> reports(cfg.taus.size() * nr);
  parallel_for(reports.size(), [&](std::size_t j) {
    const std::size_t t = j / nr, r = j % nr;
    RunOptions opts;
    opts.store_every = 0;
    const Trajectory traj = run(problem, *discs[r], cfg.taus[t], cfg.T, scheme, mode, opts);
    reports[j] = final_error(traj, problem, *discs[r]);
  });

  std::string csv = "i,nodes,h,tau,err_L2,err_H1,eoc_L2,eoc_H1\n";
  for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
    std::vector<double> hs, l2, h1;
    for (std::size_t r = 0; r < nr; ++r) {
      const ErrorReport &e = reports[t * nr + r];
      hs.push_back(e.h);
      l2.push_back(e.err_L2);
      h1.push_back(e.err_H1);
    }
    std::vector<std::optional<double>> eoc_l2(1), eoc_h1(1);
    if (nr >= 2) {
      const auto a = eoc(l2, hs), b = eoc(h1, hs);
      eoc_l2.insert(eoc_l2.end(), a.begin(), a.end());
      eoc_h1.insert(eoc_h1.end(), b.begin(), b.end());
    }
    for (std::size_t r = 0; r < nr; ++r) {
      const ErrorReport &e = reports[t * nr + r];
      csv += std::to_string(cfg.refinements[r]) + ',' + std::to_string(e.nodes) + ',' + fmt(e.h) +
             ',' + fmt(e.tau) + ',' + fmt(e.err_L2) + ',' + fmt(e.err_H1) + ',' +
             fmt_eoc(eoc_l2[r]) + ',' + fmt_eoc(eoc_h1[r]) + '\n';
    }
  }

  if (cfg.out.empty()) {
    out << csv;
  } else {
    write_file(cfg.out, csv);
    out << "wrote " << reports.size() << " rows to " << cfg.out << '\n';
  }
}

std::string snapshot_csv(const Mesh2D &mesh, const NodalVector &u, const NodalVector &w) {
  std::string s = "node,x,y,u,w\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    s += std::to_string(i) + ',' + fmt(mesh.nodes[i].x) + ',' + fmt(mesh.nodes[i].y) + ',' +
         fmt(u[e]) + ',' + fmt(w[e]) + '\n';
  }
  return s;
}

std::string snapshot_vtk(const Mesh2D &mesh, const NodalVector &u, const NodalVector &w,
                         double t) {
  std::string s = "# vtk DataFile Version 3.0\nu, w at t = " + fmt(t) +
                  "\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS " +
                  std::to_string(mesh.num_nodes()) + " double\n";
  for (const Point2 &p : mesh.nodes)
    s += fmt(p.x) + ' ' + fmt(p.y) + " 0\n";
  const std::size_t nt = mesh.triangles.size();
  s += "CELLS " + std::to_string(nt) + ' ' + std::to_string(4 * nt) + '\n';
  for (const Triangle &tri : mesh.triangles)
    s += "3 " + std::to_string(tri[0]) + ' ' + std::to_string(tri[1]) + ' ' +
         std::to_string(tri[2]) + '\n';
  s += "CELL_TYPES " + std::to_string(nt) + '\n';
  for (std::size_t i = 0; i < nt; ++i)
    s += "5\n";
  s += "POINT_DATA " + std::to_string(mesh.num_nodes()) + '\n';
  for (const auto &[name, v] : {std::pair{"u", &u}, std::pair{"w", &w}}) {
    s += std::string("SCALARS ") + name + " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < v->size(); ++i)
      s += fmt((*v)[i]) + '\n';
  }
  return s;
}

void cmd_evolve(EvolveConfig cfg, std::ostream &out) {
  if (cfg.problem != "evolution")
    throw UsageError("evolve needs --problem evolution");
  if (cfg.start_mode != "bootstrap")
    throw UsageError("the evolution problem has no exact solution; use --start-mode bootstrap");
  if (cfg.taus.size() != 1)
    throw UsageError("evolve takes exactly one --tau");
  if (cfg.nodes < 4)
    throw UsageError("--nodes must be at least 4");
  const double tau = cfg.taus.front();
  if (!(tau > 0.0))
    throw UsageError("--tau must be positive");
  const std::size_t steps = checked_steps(tau, cfg.T);
  if (steps + 1 < static_cast<std::size_t>(cfg.k))
    throw UsageError("fewer time steps than BDF starting values");
  std::sort(cfg.snapshots.begin(), cfg.snapshots.end());
  cfg.snapshots.erase(std::unique(cfg.snapshots.begin(), cfg.snapshots.end()),
                      cfg.snapshots.end());
  std::vector<std::size_t> snapshot_steps;
  for (double s : cfg.snapshots) {
    const double n = std::round(s / tau);
    if (s < 0.0 || s > cfg.T * (1 + 1e-12) || std::abs(n * tau - s) > 1e-9 * std::max(1.0, s))
      throw UsageError("snapshot time " + fmt(s) + " is not a time step in [0, T]");
    snapshot_steps.push_back(static_cast<std::size_t>(n));
  }

  const ProblemSpec problem = evolution_problem(cfg.strength, cfg.seed);
  const Discretization disc(generate_disk_mesh(cfg.nodes, cfg.radius));
  RunOptions opts;
  opts.store_every = 0;
  opts.store_times = cfg.snapshots;
  const Trajectory traj =
      run(problem, disc, tau, cfg.T, BDFScheme::of_order(cfg.k), StartMode::bootstrap, opts);

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  std::vector<fs::path> written;
  try {
    const auto emit = [&](const fs::path &p, const std::string &content) {
      written.push_back(p);
      write_file(p, content);
    };
    for (std::size_t j = 0; j < snapshot_steps.size(); ++j) {
      const auto it = std::find(traj.stored_steps.begin(), traj.stored_steps.end(),
                                snapshot_steps[j]);
      const auto idx = static_cast<std::size_t>(it - traj.stored_steps.begin());
      const std::string stem = "snapshot_t" + fmt(cfg.snapshots[j]);
      emit(dir / (stem + ".csv"),
           snapshot_csv(disc.mesh, traj.u_history[idx], traj.w_history[idx]));
      if (cfg.vtk)
        emit(dir / (stem + ".vtk"), snapshot_vtk(disc.mesh, traj.u_history[idx],
                                                 traj.w_history[idx], cfg.snapshots[j]));
    }
    std::string diag = "t,mass,energy\n";
    for (std::size_t n = 0; n < traj.times.size(); ++n)
      diag += fmt(traj.times[n]) + ',' + fmt(traj.mass[n]) + ',' + fmt(traj.energy[n]) + '\n';
    emit(dir / "diagnostics.csv", diag);
  } catch (...) {
    std::error_code ec;
    for (const auto &p : written)
      fs::remove(p, ec);
    throw;
  }
  out << "evolved " << steps << " steps on " << disc.mesh.num_nodes() << " nodes; energy "
      << fmt(traj.energy.front()) << " -> " << fmt(traj.energy.back()) << "; wrote "
      << written.size() << " files to " << dir.string() << '\n';
}

void cmd_mesh(const MeshConfig &cfg, std::ostream &out) {
  if (cfg.nodes < 4)
    throw UsageError("--nodes must be at least 4, got " + std::to_string(cfg.nodes));
  if (!(cfg.radius > 0.0))
    throw UsageError("--radius must be positive");
  const Mesh2D mesh = generate_disk_mesh(cfg.nodes, cfg.radius);
  const std::string text = export_mesh(mesh);
  if (cfg.validate) {
    const Mesh2D back = import_mesh(text);
    if (!(back == mesh))
      throw std::runtime_error("mesh did not survive export and re-import");
  }
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  write_file(cfg.out, text);
  if (cfg.validate) {
    std::ifstream f(cfg.out, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      import_mesh(ss.str());
    } catch (...) {
      std::error_code ec;
      fs::remove(cfg.out, ec);
      throw;
    }
  }
  out << "wrote mesh with " << mesh.num_nodes() << " nodes, " << mesh.triangles.size()
      << " triangles, h = " << fmt(mesh_size(mesh)) << " to " << cfg.out << '\n';
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Cahn-Hilliard with dynamic boundary conditions on a disk", "chdyn"};
  app.require_subcommand(1);

  ConvergenceConfig conv;
  auto *c = app.add_subcommand("convergence", "spatial convergence sweep against the manufactured solution");
  c->add_option("--problem", conv.problem, "linear or nonlinear")->capture_default_str();
  c->add_option("--k", conv.k, "BDF order")->check(CLI::Range(1, 3))->capture_default_str();
  c->add_option("--refinements", conv.refinements, "levels i, mesh target 2^i * 10")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  c->add_option("--tau", conv.taus, "step size (repeatable)")->capture_default_str();
  c->add_option("--T", conv.T, "final time")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--radius", conv.radius, "disk radius")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--seed", conv.seed, "random seed")->capture_default_str();
  c->add_option("--start-mode", conv.start_mode, "starting values")
      ->check(CLI::IsMember({"exact", "bootstrap"}))
      ->capture_default_str();
  c->add_option("--out", conv.out, "CSV path (default: stdout)");

  EvolveConfig evo;
  auto *e = app.add_subcommand("evolve", "phase separation from random +-1 data");
  e->add_option("--problem", evo.problem, "evolution")->capture_default_str();
  e->add_option("--k", evo.k, "BDF order")->check(CLI::Range(1, 3))->capture_default_str();
  e->add_option("--nodes", evo.nodes, "mesh node target")->capture_default_str();
  e->add_option("--tau", evo.taus, "step size")->capture_default_str();
  e->add_option("--T", evo.T, "final time")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--radius", evo.radius, "disk radius")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--seed", evo.seed, "random seed")->capture_default_str();
  e->add_option("--strength", evo.strength, "s in W(u) = s (u^2 - 1)^2")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e->add_option("--start-mode", evo.start_mode, "starting values")
      ->check(CLI::IsMember({"exact", "bootstrap"}))
      ->capture_default_str();
  e->add_option("--snapshots", evo.snapshots, "snapshot times")->capture_default_str();
  e->add_option("--out", evo.out, "output directory")->capture_default_str();
  e->add_flag("--vtk", evo.vtk, "also write VTK legacy snapshots");

  MeshConfig mesh;
  auto *m = app.add_subcommand("mesh", "generate and export a disk mesh");
  m->add_option("--nodes", mesh.nodes, "node target")->capture_default_str();
  m->add_option("--radius", mesh.radius, "disk radius")->capture_default_str();
  m->add_option("--out", mesh.out, "mesh path (default: stdout)");
  m->add_flag("--validate", mesh.validate, "re-import and check the exported mesh");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed())
      cmd_convergence(conv, out);
    else if (e->parsed())
      cmd_evolve(evo, out);
    else
      cmd_mesh(mesh, out);
  } catch (const UsageError &ue) {
    err << "usage error: " << ue.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

} // namespace chdyn
