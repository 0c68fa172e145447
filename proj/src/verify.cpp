#include "phi4/verify.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "phi4/fft.hpp"
#include "phi4/gaussian.hpp"

namespace phi4 {

namespace {
constexpr std::uint64_t kVerifySalt = 0x7665726966790001ull;

struct Named {
  InequalityKind kind;
  const char* name;
};
constexpr Named kNames[] = {
    {InequalityKind::Bernstein, "bernstein"},
    {InequalityKind::Embedding, "embedding"},
    {InequalityKind::Derivative, "derivative"},
    {InequalityKind::Interpolation, "interpolation"},
    {InequalityKind::HeatSmoothing, "heat_smoothing"},
    {InequalityKind::TimeRegularity, "time_regularity"},
    {InequalityKind::Multiplicative1, "multiplicative1"},
    {InequalityKind::Multiplicative2, "multiplicative2"},
    {InequalityKind::Duality, "duality"},
    {InequalityKind::Gradient, "gradient"},
};
}  // namespace

InequalityKind parse_inequality(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.kind;
  throw UnknownInequality("unknown inequality kind: " + name);
}

std::string inequality_name(InequalityKind kind) {
  for (const auto& n : kNames)
    if (kind == n.kind) return n.name;
  throw UnknownInequality("unnamed inequality kind");
}

std::vector<InequalityKind> all_inequalities() {
  std::vector<InequalityKind> out;
  for (const auto& n : kNames) out.push_back(n.kind);
  return out;
}

RealField random_band_limited(const TorusGrid& grid, double band_fraction,
                              std::uint64_t seed, std::uint64_t trial) {
  const int n = grid.points_per_side;
  const int kcut = std::max(1, static_cast<int>(band_fraction * (n / 2)) - 1);
  SpectralField F(grid);
  for (int i = 0; i < n; ++i) {
    int k1 = grid.wave_index(i);
    for (int j = 0; j < n; ++j) {
      int k2 = grid.wave_index(j);
      if (k1 * k1 + k2 * k2 > kcut * kcut) continue;
      if (k1 == 0 && k2 == 0) continue;  // mean zero
      // canonical representative of the (k, -k) pair
      if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
      auto g = rng::normal_pair(kVerifySalt, seed, trial,
                                static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(j));
      std::complex<double> c(g[0], g[1]);
      F.at_wave(k1, k2) = c;
      F.at_wave(-k1, -k2) = std::conj(c);
    }
  }
  return inverse_transform(F);
}

namespace {

double uniform01(std::uint64_t seed, std::uint64_t trial, std::uint64_t salt) {
  auto g = rng::normal_pair(kVerifySalt + 1, seed, trial, salt, 0);
  // fold a Gaussian into (0,1) via its absolute fractional part; adequate for
  // picking trial times
  double u = std::fabs(g[0]) - std::floor(std::fabs(g[0]));
  return std::clamp(u, 1e-6, 1.0 - 1e-6);
}

BesovParams bp(double alpha, double p, double q, const WeightSpec& w) {
  BesovParams out;
  out.alpha = alpha;
  out.p = p;
  out.q = q;
  out.weight = w;
  return out;
}

double l1_grad_norm(const RealField& f, const WeightSpec& w) {
  return weighted_lp_norm(spectral_derivative(f, 0), 1.0, w) +
         weighted_lp_norm(spectral_derivative(f, 1), 1.0, w);
}

// One trial: returns left/right with the convention 0/0 -> skip (negative).
double trial_ratio(InequalityKind kind, const TorusGrid& grid,
                   const DyadicPartition& part, const VerifyConfig& cfg,
                   std::uint64_t trial) {
  const WeightSpec flat = WeightSpec::flat();
  const WeightSpec& w = cfg.weight;
  RealField f = random_band_limited(grid, cfg.band_fraction, cfg.seed, trial);
  double L = 0.0, R = 0.0;
  switch (kind) {
    case InequalityKind::Bernstein: {
      // ||d_x block_k f||_inf <= lambda^{1 + 2(1/2)} ||block_k f||_2, lambda = 2^k
      int k = static_cast<int>(trial % (part.config.k_max + 1));
      RealField blk = lp_block(f, part, k);
      double lam = std::ldexp(1.0, k);
      L = weighted_lp_norm(spectral_derivative(blk, 0), inf_exponent(), flat);
      R = lam * lam * weighted_lp_norm(blk, 2.0, flat);
      break;
    }
    case InequalityKind::Embedding: {
      // B^{1/2}_{2} -> B^{1/2 - 2(1/2)}_{inf}
      L = besov_norm(f, part, bp(-0.5, inf_exponent(), 2.0, w));
      R = besov_norm(f, part, bp(0.5, 2.0, 2.0, w));
      break;
    }
    case InequalityKind::Derivative: {
      L = besov_norm(spectral_derivative(f, trial % 2 ? 1 : 0), part,
                     bp(-0.5, 2.0, 2.0, w));
      R = besov_norm(f, part, bp(0.5, 2.0, 2.0, w));
      break;
    }
    case InequalityKind::Interpolation: {
      // gamma = (1-nu) alpha + nu beta, 1/p = (1-nu)/p1 + nu/p2, same for q
      const double nu = 0.5, a = -0.5, b = 0.5;
      const double p1 = 2.0, p2 = 4.0, q1 = 2.0, q2 = 4.0;
      const double g = (1 - nu) * a + nu * b;
      const double p = 1.0 / ((1 - nu) / p1 + nu / p2);
      const double q = 1.0 / ((1 - nu) / q1 + nu / q2);
      L = besov_norm(f, part, bp(g, p, q, w));
      R = std::pow(besov_norm(f, part, bp(a, p1, q1, w)), 1 - nu) *
          std::pow(besov_norm(f, part, bp(b, p2, q2, w)), nu);
      break;
    }
    case InequalityKind::HeatSmoothing: {
      double t = uniform01(cfg.seed, trial, 10);
      L = besov_norm(heat_propagate(f, t), part, bp(0.5, 2.0, 2.0, w));
      R = std::pow(t, -0.5) * besov_norm(f, part, bp(-0.5, 2.0, 2.0, w));
      break;
    }
    case InequalityKind::TimeRegularity: {
      double t = uniform01(cfg.seed, trial, 11);
      RealField g = heat_propagate(f, t);
      for (size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = f.values[i] - g.values[i];
      L = besov_norm(g, part, bp(-0.5, 2.0, 2.0, w));
      R = std::pow(t, 0.5) * besov_norm(f, part, bp(0.5, 2.0, 2.0, w));
      break;
    }
    case InequalityKind::Multiplicative1: {
      RealField g = random_band_limited(grid, cfg.band_fraction, cfg.seed + 1,
                                        trial);
      L = besov_norm(dealiased_product(f, g), part, bp(0.5, 2.0, 2.0, w));
      R = besov_norm(f, part, bp(0.5, 2.0, 2.0, w)) *
          besov_norm(g, part, bp(0.5, inf_exponent(), 2.0, w));
      break;
    }
    case InequalityKind::Multiplicative2: {
      RealField g = random_band_limited(grid, cfg.band_fraction, cfg.seed + 1,
                                        trial);
      L = besov_norm(dealiased_product(f, g), part, bp(-0.3, 2.0, 2.0, w));
      R = besov_norm(f, part, bp(-0.3, 2.0, 2.0, w)) *
          besov_norm(g, part, bp(0.5, inf_exponent(), 2.0, w));
      break;
    }
    case InequalityKind::Duality: {
      RealField g = random_band_limited(grid, cfg.band_fraction, cfg.seed + 1,
                                        trial);
      auto wv = weight_values(grid, w);
      double pair = 0.0;
      const double h2 = grid.spacing * grid.spacing;
      for (size_t i = 0; i < f.values.size(); ++i)
        pair += f.values[i] * g.values[i] * wv[i] * h2;
      L = std::fabs(pair);
      R = besov_norm(f, part, bp(0.5, 2.0, 2.0, w)) *
          besov_norm(g, part, bp(-0.5, 2.0, 2.0, w));
      break;
    }
    case InequalityKind::Gradient: {
      L = weighted_lp_norm(f, 4.0 / 3.0, w);
      R = std::sqrt(weighted_lp_norm(f, 1.0, w)) * std::sqrt(l1_grad_norm(f, w));
      break;
    }
  }
  if (R == 0.0) return -1.0;  // degenerate, skipped
  return L / R;
}

}  // namespace

VerifyReport verify_inequality(InequalityKind kind, const TorusGrid& grid,
                               const DyadicPartition& partition,
                               const VerifyConfig& config) {
  VerifyReport rep;
  rep.kind = inequality_name(kind);
  rep.trials = config.trials;
  for (int t = 0; t < config.trials; ++t) {
    double r = trial_ratio(kind, grid, partition, config,
                           static_cast<std::uint64_t>(t));
    if (r < 0.0) continue;
    if (r > rep.max_ratio) {
      rep.max_ratio = r;
      rep.witness_seed = static_cast<std::uint64_t>(t);
    }
  }
  return rep;
}

DecayFit fourier_decay_check(const std::vector<double>& bump, double theta) {
  if (theta <= 1.0) throw ThetaOutOfRange("theta must exceed 1");
  const int n = static_cast<int>(bump.size());
  if (n < 16) throw FitFailed("too few samples");
  const double dx = 4.0 / n;  // domain [-2, 2]
  std::vector<std::complex<double>> in(n), out(n);
  for (int i = 0; i < n; ++i) in[i] = bump[i];
  fft::forward_1d(n, in.data(), out.data());
  // |bump_hat(zeta_k)|, zeta_k = 2 pi k / 4; phases irrelevant for magnitudes
  std::vector<double> zeta, mag;
  double peak = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    double m = std::abs(out[k]) * dx;
    zeta.push_back(2.0 * 3.14159265358979323846 * k / 4.0);
    mag.push_back(m);
    peak = std::max(peak, std::max(m, std::abs(out[0]) * dx));
  }
  // keep the band above the round-off floor
  const double floor_cut = peak * 1e-13;
  std::vector<double> xs, ys;
  double lo = peak;
  for (size_t i = 0; i < mag.size(); ++i) {
    if (mag[i] <= floor_cut) break;
    xs.push_back(std::pow(zeta[i], 1.0 / theta));
    ys.push_back(std::log(mag[i]));
    lo = std::min(lo, mag[i]);
  }
  if (xs.size() < 8 || peak / lo < 1e6)
    throw FitFailed("dynamic range below 6 decades");
  // The bound is an upper envelope: |bump_hat| oscillates through near-zeros,
  // so fit bin-wise maxima of log|bump_hat| rather than every sample.
  {
    const int bins = 64;
    const double x_lo = xs.front(), x_hi = xs.back();
    std::vector<double> bx(bins), by(bins, -1e300);
    for (size_t i = 0; i < xs.size(); ++i) {
      int b = std::min(bins - 1, static_cast<int>((xs[i] - x_lo) /
                                                  (x_hi - x_lo) * bins));
      if (ys[i] > by[b]) {
        by[b] = ys[i];
        bx[b] = xs[i];
      }
    }
    xs.clear();
    ys.clear();
    for (int b = 0; b < bins; ++b)
      if (by[b] > -1e300) {
        xs.push_back(bx[b]);
        ys.push_back(by[b]);
      }
  }
  double c0, c1, cov00, cov01, cov11, sumsq;
  gsl_fit_linear(xs.data(), 1, ys.data(), 1, xs.size(), &c0, &c1, &cov00,
                 &cov01, &cov11, &sumsq);
  DecayFit fit;
  fit.c = -c1;
  fit.C = std::exp(c0);
  double ss_tot = 0.0, mean = 0.0;
  for (double y : ys) mean += y;
  mean /= ys.size();
  for (double y : ys) ss_tot += (y - mean) * (y - mean);
  fit.residual = std::sqrt(sumsq / ss_tot);
  return fit;
}

}  // namespace phi4
