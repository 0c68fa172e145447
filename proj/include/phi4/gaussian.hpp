#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "phi4/grid.hpp"

namespace phi4 {

struct NoiseStream {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;
  // When set, the driving white noise is drawn per physical lattice point
  // (keys are the integer coordinates x/h), so realizations on tori with a
  // shared spacing are restrictions of one another and their difference is
  // a boundary effect. Off by default: the per-mode path is a bit cheaper.
  bool coupled = false;
};

struct WickStack {
  TorusGrid grid;
  std::vector<double> times;
  std::vector<RealField> Z, Z2, Z3, V;
  std::vector<double> c_grid;
};

struct CovarianceQuery {
  double t1 = 0.0, t2 = 0.0;
  std::array<double, 2> x{0.0, 0.0};
  double M = 0.0;  // <= 0 means the plane (M = infinity)
};

// c(t) = log(1/t)/(8 pi), 0 < t <= 1
double renorm_constant_exact(double t);

// c_M(t) = int_t^1 int_cell K_M(r,x)^2 dx dr, evaluated through the spectral
// theta-function representation.
double renorm_constant_torus(double t, double M);

// Pointwise variance of the zero-initial discretized Z at time t.
double grid_wick_variance(const TorusGrid& grid, double t);

struct HeatSample {
  std::vector<RealField> Z;  // zero-initial Gaussian part
  std::vector<RealField> V;  // e^{t Delta} X0 (empty fields when X0 absent)
};

// Exact per-mode OU recursion at the given increasing times (starting at 0).
// base_step > 0 subdivides every interval on the global lattice j*base_step so
// trajectories with refined output times share the same noise increments.
HeatSample sample_heat_solution(const NoiseStream& stream, const TorusGrid& grid,
                                const std::vector<double>& times,
                                const RealField* X0 = nullptr,
                                double base_step = 0.0);

// Single-time sample of Z(t) in its exact marginal law (cheaper than a path).
RealField sample_field_direct(const NoiseStream& stream, const TorusGrid& grid,
                              double t);

// Z1 = W + V;  Z2 = (W^2 - c + kappa) + 2WV + V^2;
// Z3 = (W^3 - 3cW + 3 kappa W) + 3(W^2 - c + kappa)V + 3WV^2 + V^3,
// with kappa = c - c_exact_t.
std::array<RealField, 3> wick_powers(const RealField& Z, const RealField& V,
                                     double c, double c_exact_t);

WickStack build_wick_stack(const NoiseStream& stream, const TorusGrid& grid,
                           const std::vector<double>& times,
                           const RealField* X0 = nullptr, double base_step = 0.0);

double covariance_exact(const CovarianceQuery& q);

struct CovEstimate {
  std::array<double, 2> lag{0.0, 0.0};
  double mean = 0.0;
  double std_error = 0.0;
};
std::vector<CovEstimate> empirical_covariance(
    const std::vector<NoiseStream>& streams, const TorusGrid& grid, double t,
    const std::vector<std::array<double, 2>>& lags);

struct KernelMixedResult {
  double value = 0.0;
  bool in_regime = true;  // |x1|,|x2| <= M/8
};
KernelMixedResult kernel_mixed(double t, const std::array<double, 2>& x1,
                               const std::array<double, 2>& x2, double M);

class OUPathImpl;

// Incremental spectral OU path (the solver's streaming noise source).
class OUPath {
 public:
  OUPath(const NoiseStream& stream, const TorusGrid& grid, double base_step);
  ~OUPath();
  void advance(double dt);  // multiples of base_step when base_step > 0
  double time() const;
  const SpectralField& spectrum() const;

 private:
  std::unique_ptr<OUPathImpl> impl_;
};

namespace rng {
// Counter-based Gaussian pair derived from a key sequence (splitmix64 chain +
// Box-Muller); same keys always give the same pair.
std::array<double, 2> normal_pair(std::uint64_t k0, std::uint64_t k1,
                                  std::uint64_t k2, std::uint64_t k3,
                                  std::uint64_t k4);
}

}  // namespace phi4
