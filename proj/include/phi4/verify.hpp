#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phi4/besov.hpp"

namespace phi4 {

enum class InequalityKind {
  Bernstein,       // block derivative/integrability gain
  Embedding,       // B^{alpha}_{r} -> B^{alpha + d(1/r - 1/p)}_{p}
  Derivative,      // one derivative costs one unit of regularity
  Interpolation,   // Hoelder interpolation, constant exactly 1
  HeatSmoothing,   // ||e^{tD}f||_{beta} <= C t^{-(beta-alpha)/2} ||f||_{alpha}
  TimeRegularity,  // ||(1-e^{tD})f||_{alpha} <= C t^{(beta-alpha)/2} ||f||_{beta}
  Multiplicative1, // product bound, both exponents positive
  Multiplicative2, // product bound, alpha < 0 < beta, alpha + beta > 0
  Duality,         // pairing bound, alpha in [0,1)
  Gradient,        // ||f||_{L^{4/3}} <= C ||f||^{1/2}_{L^1} ||grad f||^{1/2}_{L^1}
};

InequalityKind parse_inequality(const std::string& name);  // UnknownInequality
std::string inequality_name(InequalityKind kind);
std::vector<InequalityKind> all_inequalities();

struct VerifyConfig {
  int trials = 100;
  std::uint64_t seed = 2026;
  double band_fraction = 1.0 / 3.0;  // spectrum coverage of trial fields
  WeightSpec weight;                 // weight scale for weighted variants
};

struct VerifyReport {
  std::string kind;
  int trials = 0;
  double max_ratio = 0.0;
  std::uint64_t witness_seed = 0;  // trial seed attaining max_ratio
};

// Max over random band-limited trials of (left side)/(right side with C = 1).
VerifyReport verify_inequality(InequalityKind kind, const TorusGrid& grid,
                               const DyadicPartition& partition,
                               const VerifyConfig& config);

// Random mean-zero band-limited field; trial streams derive from (seed, trial).
RealField random_band_limited(const TorusGrid& grid, double band_fraction,
                              std::uint64_t seed, std::uint64_t trial);

struct DecayFit {
  double c = 0.0;        // stretched-exponential rate
  double C = 0.0;        // prefactor
  double residual = 0.0; // relative rms residual of the log-scale fit
};

// Fit log|bump_hat| = log C - c |zeta|^{1/theta}; bump is assumed sampled
// uniformly on [-2,2] (unit support radius; rescaling only rescales c).
DecayFit fourier_decay_check(const std::vector<double>& bump, double theta);

}  // namespace phi4
