#pragma once

#include <vector>

#include "phi4/grid.hpp"

namespace phi4 {

struct PartitionConfig {
  double theta = 2.0;   // Gevrey index, > 1
  double delta = 0.4;   // weight exponent, theta < 1/delta
  int k_max = 4;        // largest dyadic block the grid resolves
};

// {chi_tilde, chi_k} sampled on the grid frequencies. chi_tilde is supported
// in B(0,4/3); chi_k in 2^k * (B(0,8/3) \ B(0,3/4)); they sum to 1 on every
// resolved frequency.
struct DyadicPartition {
  TorusGrid grid;
  PartitionConfig config;
  std::vector<double> chi_tilde;              // N*N, spectral index order
  std::vector<std::vector<double>> chi_k;     // k = 0..k_max
};

struct WeightSpec {
  enum class Kind { Exponential, Polynomial, Flat };
  Kind kind = Kind::Flat;
  double mu = 0.0;     // Exponential: exp(-mu*|x|_*^delta)
  double delta = 0.4;
  double sigma = 0.0;  // Polynomial: |x|_*^{-sigma}

  static WeightSpec flat() { return {}; }
  static WeightSpec exponential(double mu, double delta) {
    return {Kind::Exponential, mu, delta, 0.0};
  }
  static WeightSpec polynomial(double sigma) {
    return {Kind::Polynomial, 0.0, 0.4, sigma};
  }
};

struct BesovParams {
  double alpha = 0.0;
  double p = 2.0;  // infinity() for sup
  double q = 2.0;
  WeightSpec weight;
};

constexpr double inf_exponent() { return 1e300; }  // stands in for p or q = infinity
bool is_inf(double p);

// phi(r+x)*phi(r-x) with phi(x) = exp(-x^{-kappa}) 1_{x>0}, kappa = 1/(theta-1),
// sampled uniformly on [-2r, 2r].
std::vector<double> gevrey_bump_1d(double theta, double radius, int samples);

// Radial Gevrey step used by the partition: 1 for r <= lo, 0 for r >= hi.
double gevrey_step(double r, double lo, double hi, double theta);

DyadicPartition build_partition(const TorusGrid& grid, const PartitionConfig& config);

// k = -1 selects chi_tilde.
RealField lp_block(const RealField& f, const DyadicPartition& partition, int k);

// Weight values w(x) on the grid (corner convention cell).
std::vector<double> weight_values(const TorusGrid& grid, const WeightSpec& w);

double weighted_lp_norm(const RealField& f, double p, const WeightSpec& weight);

double besov_norm(const RealField& f, const DyadicPartition& partition,
                  const BesovParams& params);

// Alias-free pointwise product via zero-padded transforms (3/2 rule).
RealField dealiased_product(const RealField& f, const RealField& g);

RealField paraproduct_less(const RealField& f, const RealField& g,
                           const DyadicPartition& partition);  // f < g
RealField resonant(const RealField& f, const RealField& g,
                   const DyadicPartition& partition);

RealField heat_propagate(const RealField& f, double t);
SpectralField heat_propagate(const SpectralField& F, double t);

// First partial derivative along axis (0 or 1), spectral.
RealField spectral_derivative(const RealField& f, int axis);

namespace detail {
// Padding plumbing shared with the solver's nonlinearity pipeline.
std::vector<std::complex<double>> pad_spectrum(const SpectralField& F, int np);
SpectralField extract_band(const std::vector<std::complex<double>>& big, int np,
                           const TorusGrid& grid);
int padded_size(int n, int factor_num, int factor_den);
}  // namespace detail

}  // namespace phi4
