// phi4lab: driver for the torus Phi^4 laboratory. Subcommands cover
// simulation, harmonic-analysis verification, Wick/covariance checks, solver
// diagnostics, and the M-doubling convergence studies.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "phi4/besov.hpp"
#include "phi4/gaussian.hpp"
#include "phi4/io.hpp"
#include "phi4/plane.hpp"
#include "phi4/solver.hpp"
#include "phi4/verify.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "phi4lab 0.1.0";

struct Cli {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int realizations = 1;
  int trials = 100;
  int samples = 10000;
  int seeds = 5;
  std::string kinds = "all";
  std::string m_list = "2,4,8";
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config file not found: " + path);
  json j;
  is >> j;
  return j;
}

double num(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

void write_manifest(const std::string& out, const std::string& command,
                    const json& resolved, std::uint64_t seed, int realizations) {
  json m;
  m["command"] = command;
  m["config"] = resolved;
  m["root_seed"] = seed;
  m["realization_count"] = realizations;
  m["version"] = kVersion;
  phi4::io::write_text(out + "/manifest.json", m.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_m_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int cmd_simulate(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  phi4::SolverConfig sc;
  const double M = num(cfg, "M", 4.0);
  const int N = static_cast<int>(num(cfg, "N", 128));
  sc.dt = num(cfg, "dt", 1e-3);
  sc.T = num(cfg, "T", 2.0);
  sc.a = num(cfg, "a", 1.0);
  sc.p_diag = static_cast<int>(num(cfg, "p", 6));
  sc.window_steps = static_cast<int>(num(cfg, "window_steps", 64));
  sc.store_every = static_cast<int>(num(cfg, "store_every", 0));
  json resolved = {{"M", M},   {"N", N},
                   {"dt", sc.dt}, {"T", sc.T},
                   {"a", sc.a},   {"p", sc.p_diag},
                   {"window_steps", sc.window_steps},
                   {"store_every", sc.store_every}};
  for (const auto& w : phi4::config_warnings(sc))
    std::cerr << "warning: " << w << "\n";
  write_manifest(cli.out_dir, "simulate", resolved, cli.seed, cli.realizations);
  fs::create_directories(cli.out_dir + "/snapshots");

  phi4::TorusGrid grid = phi4::TorusGrid::make(M, N);
  json report;
  report["config"] = resolved;
  report["runs"] = json::array();
  for (int r = 0; r < cli.realizations; ++r) {
    phi4::NoiseStream stream{cli.seed, static_cast<std::uint64_t>(r)};
    phi4::StreamingStackSource src(stream, grid, sc.dt);
    phi4::Trajectory traj = phi4::solve_global(src, sc);
    std::vector<std::string> rows;
    for (const auto& d : traj.diagnostics)
      rows.push_back(std::to_string(r) + "," + fmt(d.t) + "," + fmt(d.lp_norm) +
                     "," + fmt(d.energy_residual) + "," +
                     std::to_string(d.picard_iters) + "," + fmt(d.resub_error));
    phi4::io::append_csv(cli.out_dir + "/metrics.csv",
                         "realization,t,lp_norm,energy_residual,picard_iters,"
                         "resub_error",
                         rows);
    for (size_t s = 0; s < traj.stored_steps.size(); ++s) {
      std::string tag = "r" + std::to_string(r) + "_step" +
                        std::to_string(traj.stored_steps[s]);
      phi4::io::write_snapshot(cli.out_dir + "/snapshots/y_" + tag + ".bin",
                               traj.Y[s]);
      phi4::io::write_snapshot(cli.out_dir + "/snapshots/x_" + tag + ".bin",
                               traj.X[s]);
    }
    auto ap = phi4::apriori_check(traj, sc.p_diag);
    report["runs"].push_back({{"realization", r},
                              {"sup_norm", ap.sup_norm},
                              {"bound_offset", ap.bound_offset},
                              {"steps", traj.times.size() - 1}});
  }
  phi4::io::write_text(cli.out_dir + "/report.json", report.dump(2) + "\n");
  return 0;
}

int cmd_verify_besov(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const double M = num(cfg, "M", 4.0);
  const int N = static_cast<int>(num(cfg, "N", 64));
  phi4::PartitionConfig pc;
  pc.theta = num(cfg, "theta", 2.0);
  pc.delta = num(cfg, "delta", 0.4);
  pc.k_max = static_cast<int>(num(cfg, "k_max", 3));
  json resolved = {{"M", M},       {"N", N},          {"theta", pc.theta},
                   {"delta", pc.delta}, {"k_max", pc.k_max},
                   {"trials", cli.trials}, {"kinds", cli.kinds}};
  write_manifest(cli.out_dir, "verify-besov", resolved, cli.seed, 1);

  phi4::TorusGrid grid = phi4::TorusGrid::make(M, N);
  phi4::DyadicPartition part = phi4::build_partition(grid, pc);
  std::vector<phi4::InequalityKind> kinds;
  if (cli.kinds == "all") {
    kinds = phi4::all_inequalities();
  } else {
    std::stringstream ss(cli.kinds);
    std::string tok;
    while (std::getline(ss, tok, ',')) kinds.push_back(phi4::parse_inequality(tok));
  }
  phi4::VerifyConfig vc;
  vc.trials = cli.trials;
  vc.seed = cli.seed;
  json report = json::array();
  bool ok = true;
  for (auto kind : kinds) {
    auto rep = phi4::verify_inequality(kind, grid, part, vc);
    json entry = {{"kind", rep.kind},
                  {"trials", rep.trials},
                  {"max_ratio", rep.max_ratio},
                  {"witness_seed", rep.witness_seed}};
    if (kind == phi4::InequalityKind::Interpolation &&
        rep.max_ratio > 1.0 + 1e-9) {
      entry["failed"] = true;
      ok = false;
    }
    if (!std::isfinite(rep.max_ratio)) {
      entry["failed"] = true;
      ok = false;
    }
    report.push_back(entry);
  }
  phi4::io::write_text(cli.out_dir + "/report.json", report.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_verify_wick(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const double M = num(cfg, "M", 4.0);
  const int N = static_cast<int>(num(cfg, "N", 64));
  const double t = num(cfg, "t", 0.5);
  json resolved = {{"M", M}, {"N", N}, {"t", t}, {"samples", cli.samples}};
  write_manifest(cli.out_dir, "verify-wick", resolved, cli.seed, cli.samples);

  phi4::TorusGrid grid = phi4::TorusGrid::make(M, N);
  // 10 fixed probe points spread over the cell
  std::vector<std::pair<int, int>> pts;
  for (int k = 0; k < 10; ++k)
    pts.push_back({(k * 37) % N, (k * 53 + 11) % N});
  std::vector<double> s2(10, 0.0), s2sq(10, 0.0), s3(10, 0.0), s3sq(10, 0.0);
  const double c = phi4::grid_wick_variance(grid, t);
  for (int r = 0; r < cli.samples; ++r) {
    phi4::NoiseStream stream{cli.seed, static_cast<std::uint64_t>(r)};
    phi4::RealField z = phi4::sample_field_direct(stream, grid, t);
    phi4::RealField zero(grid);
    auto w = phi4::wick_powers(z, zero, c, c);
    for (int k = 0; k < 10; ++k) {
      double v2 = w[1].at(pts[k].first, pts[k].second);
      double v3 = w[2].at(pts[k].first, pts[k].second);
      s2[k] += v2;
      s2sq[k] += v2 * v2;
      s3[k] += v3;
      s3sq[k] += v3 * v3;
    }
  }
  json report = json::array();
  bool ok = true;
  for (int k = 0; k < 10; ++k) {
    const double n = cli.samples;
    double m2 = s2[k] / n, m3 = s3[k] / n;
    double se2 = std::sqrt((s2sq[k] / n - m2 * m2) / n);
    double se3 = std::sqrt((s3sq[k] / n - m3 * m3) / n);
    bool pass = std::fabs(m2) <= 3 * se2 && std::fabs(m3) <= 3 * se3;
    ok = ok && pass;
    report.push_back({{"point", {pts[k].first, pts[k].second}},
                      {"mean_z2", m2},
                      {"se_z2", se2},
                      {"mean_z3", m3},
                      {"se_z3", se3},
                      {"pass", pass}});
  }
  phi4::io::write_text(cli.out_dir + "/report.json", report.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_verify_solver(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  phi4::SolverConfig sc;
  const double M = num(cfg, "M", 4.0);
  const int N = static_cast<int>(num(cfg, "N", 64));
  sc.dt = num(cfg, "dt", 1e-3);
  sc.T = num(cfg, "T", 0.25);
  sc.a = num(cfg, "a", 1.0);
  sc.p_diag = static_cast<int>(num(cfg, "p", 6));
  json resolved = {{"M", M},   {"N", N},        {"dt", sc.dt},
                   {"T", sc.T}, {"a", sc.a},    {"p", sc.p_diag},
                   {"seeds", cli.seeds}};
  write_manifest(cli.out_dir, "verify-solver", resolved, cli.seed, cli.seeds);

  phi4::TorusGrid grid = phi4::TorusGrid::make(M, N);
  json report = json::array();
  bool ok = true;
  for (int s = 0; s < cli.seeds; ++s) {
    phi4::NoiseStream stream{cli.seed, static_cast<std::uint64_t>(s)};
    auto run = [&](double dt) {
      phi4::SolverConfig c = sc;
      c.dt = dt;
      phi4::StreamingStackSource src(stream, grid, dt);
      return phi4::solve_global(src, c);
    };
    phi4::Trajectory coarse = run(sc.dt);
    phi4::Trajectory fine = run(sc.dt / 2.0);
    double rc = 0.0, rf = 0.0, resub = 0.0;
    for (const auto& d : coarse.diagnostics) {
      rc = std::max(rc, std::fabs(d.energy_residual));
      resub = std::max(resub, d.resub_error);
    }
    for (const auto& d : fine.diagnostics) rf = std::max(rf, std::fabs(d.energy_residual));
    bool pass = resub <= 1e-12 && rf <= 0.55 * rc;
    ok = ok && pass;
    report.push_back({{"seed", s},
                      {"max_residual_dt", rc},
                      {"max_residual_half_dt", rf},
                      {"resub_error", resub},
                      {"pass", pass}});
  }
  phi4::io::write_text(cli.out_dir + "/report.json", report.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_converge(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  phi4::StackStudyConfig stc;
  stc.M_list = parse_m_list(cli.m_list);
  stc.points_per_unit = static_cast<int>(num(cfg, "points_per_unit", 16));
  stc.sigma = num(cfg, "sigma", 3.0);
  stc.p = num(cfg, "p", 6.0);
  phi4::SolutionStudyConfig soc;
  soc.M_list = stc.M_list;
  soc.points_per_unit = stc.points_per_unit;
  soc.solver.dt = num(cfg, "dt", 5e-3);
  soc.solver.T = num(cfg, "T", 1.0);
  soc.solver.a = num(cfg, "a", 1.0);
  soc.sigma_prime = stc.sigma;
  soc.p = stc.p;
  json resolved = {{"M_list", stc.M_list},
                   {"points_per_unit", stc.points_per_unit},
                   {"sigma", stc.sigma},
                   {"p", stc.p},
                   {"dt", soc.solver.dt},
                   {"T", soc.solver.T},
                   {"a", soc.solver.a},
                   {"seeds", cli.seeds}};
  write_manifest(cli.out_dir, "converge", resolved, cli.seed, cli.seeds);

  json report;
  report["stack"] = json::array();
  report["solution"] = json::array();
  int stack_decreasing = 0, solution_decreasing = 0;
  for (int s = 0; s < cli.seeds; ++s) {
    phi4::NoiseStream stream{cli.seed, static_cast<std::uint64_t>(s)};
    auto rows = phi4::stack_convergence_study(stream, stc);
    std::vector<std::string> csv;
    bool dec = true;
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      csv.push_back(std::to_string(r.n) + "," + fmt(r.M) + "," + fmt(r.D) +
                    "," + fmt(r.fit_exponent));
      if (i % stc.M_list.size() != 0 && !(rows[i].D < rows[i - 1].D)) dec = false;
    }
    phi4::io::append_csv(cli.out_dir + "/decay.csv", "n,M,D,fit_exponent", csv);
    stack_decreasing += dec ? 1 : 0;
    report["stack"].push_back({{"seed", s}, {"decreasing", dec}});

    auto sol = phi4::solution_convergence_study(stream, soc);
    std::vector<std::string> scsv;
    for (const auto& r : sol.rows)
      scsv.push_back(fmt(r.M) + "," + fmt(r.D) + "," + fmt(r.sup_norm));
    phi4::io::append_csv(cli.out_dir + "/solution.csv", "M,D,sup_norm", scsv);
    solution_decreasing += sol.decreasing ? 1 : 0;
    report["solution"].push_back({{"seed", s},
                                  {"decreasing", sol.decreasing},
                                  {"common_C", sol.common_C}});
  }
  const int need = cli.seeds - cli.seeds / 5;  // >= 4/5 of seeds
  bool ok = stack_decreasing >= need && solution_decreasing >= need;
  report["stack_decreasing_seeds"] = stack_decreasing;
  report["solution_decreasing_seeds"] = solution_decreasing;
  phi4::io::write_text(cli.out_dir + "/report.json", report.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torus Phi^4 pseudospectral laboratory"};
  app.require_subcommand(1);
  Cli cli;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "JSON config file");
    sub->add_option("--seed", cli.seed, "root seed");
    sub->add_option("--out", cli.out_dir, "output directory");
  };
  auto* sim = app.add_subcommand("simulate", "run the remainder-equation solver");
  add_common(sim);
  sim->add_option("--realizations", cli.realizations, "independent noise runs");
  auto* vb = app.add_subcommand("verify-besov", "inequality verifier suite");
  add_common(vb);
  vb->add_option("--kinds", cli.kinds, "comma list or 'all'");
  vb->add_option("--trials", cli.trials, "trials per inequality");
  auto* vw = app.add_subcommand("verify-wick", "Wick centering checks");
  add_common(vw);
  vw->add_option("--samples", cli.samples, "Monte Carlo realizations");
  auto* vs = app.add_subcommand("verify-solver", "energy/resubstitution checks");
  add_common(vs);
  vs->add_option("--seeds", cli.seeds, "number of noise seeds");
  auto* cv = app.add_subcommand("converge", "M-doubling convergence studies");
  add_common(cv);
  cv->add_option("--m-list", cli.m_list, "comma-separated doubling M list");
  cv->add_option("--seeds", cli.seeds, "number of common-noise seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::filesystem::create_directories(cli.out_dir);
    if (sim->parsed()) return cmd_simulate(cli);
    if (vb->parsed()) return cmd_verify_besov(cli);
    if (vw->parsed()) return cmd_verify_wick(cli);
    if (vs->parsed()) return cmd_verify_solver(cli);
    if (cv->parsed()) return cmd_converge(cli);
  } catch (const phi4::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const phi4::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
