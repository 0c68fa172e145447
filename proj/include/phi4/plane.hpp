#pragma once

#include <vector>

#include "phi4/besov.hpp"
#include "phi4/gaussian.hpp"
#include "phi4/solver.hpp"

namespace phi4 {

struct PeriodizationConfig {
  double bump_inner = 0.25;      // plateau radius, in units of M
  double bump_outer = 1.0 / 3.0; // support radius, in units of M
  double theta = 2.0;            // Gevrey index of the radial cutoff
};

// X_M = sum_{z in M Z^2} (phi_M X0)(. - z); agrees with X0 on the plateau.
RealField periodize_initial(const RealField& X0, double M,
                            const PeriodizationConfig& config = {});

// Restriction of a field on a double-size torus (same spacing) to the
// centered common cell.
RealField restrict_center(const RealField& big, const TorusGrid& small);

struct DecayRow {
  int n = 0;             // Wick power
  double M = 0.0;
  double D = 0.0;        // sup_t t^{(n-1) alpha'} ||Z_M^{:n:} - Z_{2M}^{:n:}||
  double fit_exponent = 0.0;
};

struct StackStudyConfig {
  std::vector<double> M_list{2.0, 4.0, 8.0};
  int points_per_unit = 16;  // shared refinement: N = M * points_per_unit
  // dense enough that the sup over the window is sampled stably (the n = 1
  // norm is sup-like in space and noisy when the window is sparse)
  std::vector<double> times{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double alpha = 0.3, alpha_prime = 0.11, sigma = 3.0, p = 6.0;
  double theta = 2.0, delta = 0.4;  // partition parameters
};

// Per-seed decay table; rows ordered n-major then M ascending.
std::vector<DecayRow> stack_convergence_study(const NoiseStream& seed,
                                              const StackStudyConfig& config);

struct SolutionRow {
  double M = 0.0;
  double D = 0.0;         // sup over compared nodes of the weighted Besov diff
  double sup_norm = 0.0;  // sup_t ||Y_t||_p for this run
};

struct SolutionStudyConfig {
  std::vector<double> M_list{2.0, 4.0, 8.0};
  int points_per_unit = 16;
  SolverConfig solver;       // dt, T, a, p_diag shared across M
  int compare_count = 8;     // trajectory nodes entering the sup
  // sigma' must exceed 2 * 9/p for the weight to stay integrable at the p/9
  // quasi-norm; the difference is windowed to the plateau B(0, M/4..M/3)
  // before the norm so the periodization boundary layer is not counted.
  double beta = 1.5, sigma_prime = 9.0, p = 6.0;
  double theta = 2.0, delta = 0.4;
};

struct SolutionStudyResult {
  std::vector<SolutionRow> rows;
  bool decreasing = false;  // D strictly decreasing along M_list
  double common_C = 0.0;    // max sup_norm across all runs (uniform bound)
};

SolutionStudyResult solution_convergence_study(const NoiseStream& seed,
                                               const SolutionStudyConfig& config);

// Largest k with 2^k * 8/3 under the Nyquist frequency of the grid.
int max_block_index(const TorusGrid& grid);

}  // namespace phi4
