#include "phi4/plane.hpp"

#include <algorithm>
#include <cmath>

namespace phi4 {

int max_block_index(const TorusGrid& grid) {
  const double nyquist =
      3.14159265358979323846 * grid.points_per_side / grid.side_length;
  int k = 0;
  while (std::ldexp(8.0 / 3.0, k + 1) <= nyquist) ++k;
  return k;
}

RealField periodize_initial(const RealField& X0, double M,
                            const PeriodizationConfig& config) {
  const TorusGrid& ref = X0.grid;
  if (M > ref.side_length + 1e-12)
    throw IncommensurateGrids("target torus larger than the reference");
  const double h = ref.spacing;
  const int nt = static_cast<int>(std::lround(M / h));
  if (std::fabs(nt * h - M) > 1e-9 * M || nt < 8 || nt % 2 != 0 ||
      (ref.points_per_side - nt) % 2 != 0)
    throw IncommensurateGrids("spacing does not divide the target period");
  RealField out(TorusGrid::make(M, nt));
  const int off = (ref.points_per_side - nt) / 2;
  for (int i = 0; i < ref.points_per_side; ++i) {
    for (int j = 0; j < ref.points_per_side; ++j) {
      double x1 = ref.coord(i), x2 = ref.coord(j);
      double r = std::sqrt(x1 * x1 + x2 * x2) / M;
      double w = gevrey_step(r, config.bump_inner, config.bump_outer, config.theta);
      if (w == 0.0) continue;
      int it = ((i - off) % nt + nt) % nt;
      int jt = ((j - off) % nt + nt) % nt;
      out.at(it, jt) += w * X0.at(i, j);
    }
  }
  return out;
}

RealField restrict_center(const RealField& big, const TorusGrid& small) {
  if (std::fabs(big.grid.spacing - small.spacing) > 1e-12)
    throw GridMismatch("restriction needs a shared spacing");
  const int off = (big.grid.points_per_side - small.points_per_side) / 2;
  if (off < 0) throw GridMismatch("restriction target larger than source");
  RealField out(small);
  for (int i = 0; i < small.points_per_side; ++i)
    for (int j = 0; j < small.points_per_side; ++j)
      out.at(i, j) = big.at(i + off, j + off);
  return out;
}

namespace {

void check_nesting(const std::vector<double>& M_list, int ppu) {
  if (M_list.empty()) throw NestingViolation("empty M list");
  for (size_t i = 0; i < M_list.size(); ++i) {
    double M = M_list[i];
    double n = M * ppu;
    if (std::fabs(n - std::lround(n)) > 1e-9 || std::lround(n) % 2 != 0 ||
        n < 8)
      throw NestingViolation("grid size M * points_per_unit must be even");
    if (i > 0 && std::fabs(M - 2.0 * M_list[i - 1]) > 1e-12)
      throw NestingViolation("M list must double at each step");
  }
}

TorusGrid grid_for(double M, int ppu) {
  return TorusGrid::make(M, static_cast<int>(std::lround(M * ppu)));
}

DyadicPartition partition_for(const TorusGrid& g, double theta, double delta) {
  PartitionConfig pc;
  pc.theta = theta;
  pc.delta = delta;
  pc.k_max = max_block_index(g);
  return build_partition(g, pc);
}

void fill_fit_exponents(std::vector<DecayRow>& rows, size_t stride) {
  // slope of log D against log M over consecutive entries of the same n
  for (size_t base = 0; base + stride <= rows.size(); base += stride) {
    for (size_t i = 1; i < stride; ++i) {
      DecayRow& a = rows[base + i - 1];
      DecayRow& b = rows[base + i];
      double e = (a.D > 0 && b.D > 0)
                     ? std::log(b.D / a.D) / std::log(b.M / a.M)
                     : 0.0;
      b.fit_exponent = e;
      if (i == 1) a.fit_exponent = e;
    }
  }
}

}  // namespace

std::vector<DecayRow> stack_convergence_study(const NoiseStream& seed,
                                              const StackStudyConfig& cfg) {
  check_nesting(cfg.M_list, cfg.points_per_unit);
  NoiseStream stream = seed;
  stream.coupled = true;
  const size_t nm = cfg.M_list.size();
  // D[n-1][mi]
  std::vector<std::vector<double>> D(3, std::vector<double>(nm, 0.0));
  for (size_t mi = 0; mi < nm; ++mi) {
    double M = cfg.M_list[mi];
    TorusGrid gs = grid_for(M, cfg.points_per_unit);
    TorusGrid gb = grid_for(2.0 * M, cfg.points_per_unit);
    DyadicPartition part = partition_for(gs, cfg.theta, cfg.delta);
    for (double t : cfg.times) {
      RealField zero_s(gs), zero_b(gb);
      RealField zs = sample_field_direct(stream, gs, t);
      RealField zb = sample_field_direct(stream, gb, t);
      double cs = grid_wick_variance(gs, t);
      double cb = grid_wick_variance(gb, t);
      auto ws = wick_powers(zs, zero_s, cs, cs);
      auto wb = wick_powers(zb, zero_b, cb, cb);
      for (int n = 1; n <= 3; ++n) {
        RealField diff = restrict_center(wb[n - 1], gs);
        for (size_t i = 0; i < diff.values.size(); ++i)
          diff.values[i] = ws[n - 1].values[i] - diff.values[i];
        BesovParams bp;
        bp.alpha = -cfg.alpha;
        bp.p = cfg.p / n;
        bp.q = inf_exponent();
        bp.weight = WeightSpec::polynomial(cfg.sigma);
        double norm = besov_norm(diff, part, bp);
        double val = std::pow(t, (n - 1) * cfg.alpha_prime) * norm;
        D[n - 1][mi] = std::max(D[n - 1][mi], val);
      }
    }
  }
  std::vector<DecayRow> rows;
  for (int n = 1; n <= 3; ++n)
    for (size_t mi = 0; mi < nm; ++mi)
      rows.push_back({n, cfg.M_list[mi], D[n - 1][mi], 0.0});
  fill_fit_exponents(rows, nm);
  return rows;
}

SolutionStudyResult solution_convergence_study(const NoiseStream& seed,
                                               const SolutionStudyConfig& cfg) {
  check_nesting(cfg.M_list, cfg.points_per_unit);
  NoiseStream stream = seed;
  stream.coupled = true;
  std::vector<double> all_M = cfg.M_list;
  all_M.push_back(2.0 * cfg.M_list.back());

  struct Run {
    TorusGrid grid;
    std::vector<RealField> Y;
    std::vector<int> steps;
    double sup_norm = 0.0;
  };
  std::vector<Run> runs;
  const int total_steps =
      static_cast<int>(std::lround(cfg.solver.T / cfg.solver.dt));
  SolverConfig sc = cfg.solver;
  sc.store_every = std::max(1, total_steps / cfg.compare_count);
  sc.p_diag = static_cast<int>(cfg.p);
  for (double M : all_M) {
    TorusGrid g = grid_for(M, cfg.points_per_unit);
    StreamingStackSource src(stream, g, sc.dt);
    Trajectory traj = solve_global(src, sc);
    Run run;
    run.grid = g;
    run.Y = traj.Y;
    run.steps = traj.stored_steps;
    run.sup_norm = apriori_check(traj, sc.p_diag).sup_norm;
    runs.push_back(std::move(run));
  }

  SolutionStudyResult res;
  res.decreasing = true;
  for (size_t mi = 0; mi < cfg.M_list.size(); ++mi) {
    const Run& a = runs[mi];
    const Run& b = runs[mi + 1];
    DyadicPartition part = partition_for(a.grid, cfg.theta, cfg.delta);
    BesovParams bp;
    bp.alpha = cfg.beta;
    bp.p = cfg.p / 9.0;
    bp.q = inf_exponent();
    bp.weight = WeightSpec::polynomial(cfg.sigma_prime);
    double D = 0.0;
    for (size_t s = 0; s < a.steps.size(); ++s) {
      if (s >= b.steps.size() || a.steps[s] != b.steps[s])
        throw Error("solution study: stored steps differ between runs");
      RealField diff = restrict_center(b.Y[s], a.grid);
      const int n = a.grid.points_per_side;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double x1 = a.grid.coord(i), x2 = a.grid.coord(j);
          double r = std::sqrt(x1 * x1 + x2 * x2) / cfg.M_list[mi];
          double w = gevrey_step(r, 0.25, 1.0 / 3.0, cfg.theta);
          diff.at(i, j) = w * (a.Y[s].at(i, j) - diff.at(i, j));
        }
      D = std::max(D, besov_norm(diff, part, bp));
    }
    res.rows.push_back({cfg.M_list[mi], D, a.sup_norm});
    if (mi > 0 && !(D < res.rows[mi - 1].D)) res.decreasing = false;
  }
  res.common_C = 0.0;
  for (const Run& r : runs) res.common_C = std::max(res.common_C, r.sup_norm);
  return res;
}

}  // namespace phi4
