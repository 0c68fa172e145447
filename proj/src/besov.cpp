#include "phi4/besov.hpp"

#include <algorithm>
#include <cmath>

#include "phi4/fft.hpp"
#include "phi4/kernels.hpp"

namespace phi4 {

namespace {
constexpr double kPi = 3.14159265358979323846;

double gevrey_phi(double x, double kappa) {
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x, -kappa));
}
}  // namespace

bool is_inf(double p) { return p >= inf_exponent(); }

std::vector<double> gevrey_bump_1d(double theta, double radius, int samples) {
  if (theta <= 1.0) throw ThetaOutOfRange("theta must exceed 1");
  if (radius <= 0.0) throw Error("radius must be positive");
  const double kappa = 1.0 / (theta - 1.0);
  std::vector<double> out(samples);
  for (int i = 0; i < samples; ++i) {
    double x = -2.0 * radius + 4.0 * radius * i / (samples - 1);
    out[i] = gevrey_phi(radius + x, kappa) * gevrey_phi(radius - x, kappa);
  }
  return out;
}

double gevrey_step(double r, double lo, double hi, double theta) {
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  const double kappa = 1.0 / (theta - 1.0);
  const double s = (r - lo) / (hi - lo);
  const double a = gevrey_phi(1.0 - s, kappa);
  const double b = gevrey_phi(s, kappa);
  return a / (a + b);
}

// Radial profile: Theta = 1 on [0, r_lo], 0 beyond r_hi, with the transition
// width taken as 1/8 of the annulus gap 4/3 - 3/4. chi(r) = Theta(r/2)-Theta(r)
// telescopes, so the partition identity is exact on resolved frequencies.
namespace {
constexpr double kStepLo = 1.0;
constexpr double kStepHi = 1.0 + (4.0 / 3.0 - 3.0 / 4.0) / 8.0;
}  // namespace

DyadicPartition build_partition(const TorusGrid& grid, const PartitionConfig& config) {
  if (config.theta <= 1.0 || config.theta >= 1.0 / config.delta)
    throw ThetaOutOfRange("need 1 < theta < 1/delta");
  if (config.k_max < 1) throw Error("k_max must be >= 1");
  const double nyquist = kPi * grid.points_per_side / grid.side_length;
  if (std::ldexp(8.0 / 3.0, config.k_max) > nyquist * (1.0 + 1e-12))
    throw GridTooCoarse("block k_max does not fit under the Nyquist frequency");

  DyadicPartition part;
  part.grid = grid;
  part.config = config;
  const auto mags = wavenumber_magnitudes(grid);
  const size_t n2 = mags.size();
  part.chi_k.assign(config.k_max + 1, std::vector<double>(n2, 0.0));
  part.chi_tilde.assign(n2, 0.0);
  for (size_t idx = 0; idx < n2; ++idx) {
    const double r = mags[idx];
    double sum = 0.0;
    for (int k = 0; k <= config.k_max; ++k) {
      double rk = std::ldexp(r, -k);
      double v = gevrey_step(rk / 2.0, kStepLo, kStepHi, config.theta) -
                 gevrey_step(rk, kStepLo, kStepHi, config.theta);
      part.chi_k[k][idx] = v;
      sum += v;
    }
    if (r < 4.0 / 3.0) part.chi_tilde[idx] = std::clamp(1.0 - sum, 0.0, 1.0);
  }
  return part;
}

RealField lp_block(const RealField& f, const DyadicPartition& partition, int k) {
  if (k < -1 || k > partition.config.k_max)
    throw BlockIndexOutOfRange("block index " + std::to_string(k));
  if (!(f.grid == partition.grid)) throw GridMismatch("field/partition grids differ");
  SpectralField F = forward_transform(f);
  double parent = 0.0;
  for (const auto& c : F.coeffs) parent = std::max(parent, std::abs(c));
  const auto& chi = (k == -1) ? partition.chi_tilde : partition.chi_k[k];
  kernels::scale_spectrum(F.coeffs.data(), chi.data(), F.coeffs.size());
  // a block at the round-off floor of the parent spectrum is numerically zero
  // (and its noise need not be Hermitian to working precision)
  double mx = 0.0;
  for (const auto& c : F.coeffs) mx = std::max(mx, std::abs(c));
  if (mx <= 1e-14 * parent) return RealField(f.grid);
  return inverse_transform(F);
}

std::vector<double> weight_values(const TorusGrid& grid, const WeightSpec& w) {
  const int n = grid.points_per_side;
  std::vector<double> out(static_cast<size_t>(n) * n, 1.0);
  if (w.kind == WeightSpec::Kind::Flat) return out;
  for (int i = 0; i < n; ++i) {
    double x = grid.coord(i);
    for (int j = 0; j < n; ++j) {
      double y = grid.coord(j);
      double star = std::sqrt(1.0 + x * x + y * y);
      out[i * n + j] = (w.kind == WeightSpec::Kind::Exponential)
                           ? std::exp(-w.mu * std::pow(star, w.delta))
                           : std::pow(star, -w.sigma);
    }
  }
  return out;
}

double weighted_lp_norm(const RealField& f, double p, const WeightSpec& weight) {
  const auto w = weight_values(f.grid, weight);
  const size_t n2 = f.values.size();
  if (is_inf(p)) {
    double m = 0.0;
    for (size_t i = 0; i < n2; ++i) m = std::max(m, std::fabs(f.values[i]) * w[i]);
    return m;
  }
  const double h2 = f.grid.spacing * f.grid.spacing;
  double s = kernels::weighted_power_sum(f.values.data(), w.data(), p, n2);
  return std::pow(s * h2, 1.0 / p);
}

double besov_norm(const RealField& f, const DyadicPartition& partition,
                  const BesovParams& params) {
  double acc = 0.0, mx = 0.0;
  for (int k = -1; k <= partition.config.k_max; ++k) {
    double term = std::pow(2.0, params.alpha * k) *
                  weighted_lp_norm(lp_block(f, partition, k), params.p, params.weight);
    if (is_inf(params.q))
      mx = std::max(mx, term);
    else
      acc += std::pow(term, params.q);
  }
  return is_inf(params.q) ? mx : std::pow(acc, 1.0 / params.q);
}

namespace detail {

// Zero-pad continuum coefficients onto an np-point grid (FFT index order),
// with the corner phase folded in so padded samples live on the same cell.
std::vector<std::complex<double>> pad_spectrum(const SpectralField& F, int np) {
  const int n = F.grid.points_per_side;
  std::vector<std::complex<double>> big(static_cast<size_t>(np) * np, 0.0);
  auto put = [&](int k1, int k2, std::complex<double> v) {
    int m1 = (k1 % np + np) % np, m2 = (k2 % np + np) % np;
    double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
    big[static_cast<size_t>(m1) * np + m2] += sign * v;
  };
  for (int i = 0; i < n; ++i) {
    int k1 = F.grid.wave_index(i);
    for (int j = 0; j < n; ++j) {
      int k2 = F.grid.wave_index(j);
      std::complex<double> v = F.coeffs[i * n + j];
      bool ny1 = (k1 == -n / 2), ny2 = (k2 == -n / 2);
      if (!ny1 && !ny2) {
        put(k1, k2, v);
      } else if (ny1 && !ny2) {
        put(-n / 2, k2, 0.5 * v);
        put(n / 2, k2, 0.5 * v);
      } else if (!ny1 && ny2) {
        put(k1, -n / 2, 0.5 * v);
        put(k1, n / 2, 0.5 * v);
      } else {
        put(-n / 2, -n / 2, 0.25 * v);
        put(-n / 2, n / 2, 0.25 * v);
        put(n / 2, -n / 2, 0.25 * v);
        put(n / 2, n / 2, 0.25 * v);
      }
    }
  }
  return big;
}

SpectralField extract_band(const std::vector<std::complex<double>>& big, int np,
                           const TorusGrid& grid) {
  const int n = grid.points_per_side;
  SpectralField out(grid);
  auto get = [&](int k1, int k2) {
    int m1 = (k1 % np + np) % np, m2 = (k2 % np + np) % np;
    double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
    return sign * big[static_cast<size_t>(m1) * np + m2];
  };
  for (int i = 0; i < n; ++i) {
    int k1 = grid.wave_index(i);
    for (int j = 0; j < n; ++j) {
      int k2 = grid.wave_index(j);
      bool ny1 = (k1 == -n / 2), ny2 = (k2 == -n / 2);
      std::complex<double> v;
      if (!ny1 && !ny2) {
        v = get(k1, k2);
      } else if (ny1 && !ny2) {
        v = get(-n / 2, k2) + get(n / 2, k2);
      } else if (!ny1 && ny2) {
        v = get(k1, -n / 2) + get(k1, n / 2);
      } else {
        v = get(-n / 2, -n / 2) + get(-n / 2, n / 2) + get(n / 2, -n / 2) +
            get(n / 2, n / 2);
      }
      out.coeffs[i * n + j] = v;
    }
  }
  return out;
}

int padded_size(int n, int factor_num, int factor_den) {
  int np = (n * factor_num + factor_den - 1) / factor_den;
  if (np % 2 != 0) ++np;
  return np;
}

}  // namespace detail

RealField dealiased_product(const RealField& f, const RealField& g) {
  if (!(f.grid == g.grid)) throw GridMismatch("product grids differ");
  const int n = f.grid.points_per_side;
  const int np = detail::padded_size(n, 3, 2);
  auto bf = detail::pad_spectrum(forward_transform(f), np);
  auto bg = detail::pad_spectrum(forward_transform(g), np);
  std::vector<std::complex<double>> sf(bf.size()), sg(bg.size());
  fft::backward(np, bf.data(), sf.data());
  fft::backward(np, bg.data(), sg.data());
  for (size_t i = 0; i < sf.size(); ++i)
    sf[i] = sf[i].real() * sg[i].real();
  std::vector<std::complex<double>> prod(sf.size());
  fft::forward(np, sf.data(), prod.data());
  const double scale = 1.0 / (static_cast<double>(np) * np);
  for (auto& c : prod) c *= scale;
  return inverse_transform(detail::extract_band(prod, np, f.grid));
}

RealField paraproduct_less(const RealField& f, const RealField& g,
                           const DyadicPartition& partition) {
  const int kmax = partition.config.k_max;
  std::vector<RealField> bg(kmax + 2);
  for (int k = -1; k <= kmax; ++k) bg[k + 1] = lp_block(g, partition, k);
  RealField low = lp_block(f, partition, -1);  // running S_{k-1} f
  RealField out(f.grid);
  for (int k = 1; k <= kmax; ++k) {
    if (k >= 2) {
      RealField blk = lp_block(f, partition, k - 2);
      for (size_t i = 0; i < low.values.size(); ++i) low.values[i] += blk.values[i];
    }
    RealField term = dealiased_product(low, bg[k + 1]);
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += term.values[i];
  }
  return out;
}

RealField resonant(const RealField& f, const RealField& g,
                   const DyadicPartition& partition) {
  const int kmax = partition.config.k_max;
  std::vector<RealField> bf(kmax + 2), bg(kmax + 2);
  for (int k = -1; k <= kmax; ++k) {
    bf[k + 1] = lp_block(f, partition, k);
    bg[k + 1] = lp_block(g, partition, k);
  }
  RealField out(f.grid);
  for (int k = -1; k <= kmax; ++k) {
    RealField nb(f.grid);
    for (int j = std::max(-1, k - 1); j <= std::min(kmax, k + 1); ++j)
      for (size_t i = 0; i < nb.values.size(); ++i)
        nb.values[i] += bf[j + 1].values[i];
    RealField term = dealiased_product(nb, bg[k + 1]);
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += term.values[i];
  }
  return out;
}

SpectralField heat_propagate(const SpectralField& F, double t) {
  if (t < 0.0) throw NegativeTime("heat flow needs t >= 0");
  SpectralField out = F;
  const auto mags = wavenumber_magnitudes(F.grid);
  std::vector<double> mult(mags.size());
  for (size_t i = 0; i < mags.size(); ++i) mult[i] = std::exp(-t * mags[i] * mags[i]);
  kernels::scale_spectrum(out.coeffs.data(), mult.data(), out.coeffs.size());
  return out;
}

RealField heat_propagate(const RealField& f, double t) {
  return inverse_transform(heat_propagate(forward_transform(f), t));
}

RealField spectral_derivative(const RealField& f, int axis) {
  SpectralField F = forward_transform(f);
  const int n = F.grid.points_per_side;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int m = (axis == 0) ? i : j;
      // Nyquist derivative is zeroed to keep the result real.
      double k = (m == n / 2) ? 0.0 : F.grid.freq(m);
      F.coeffs[i * n + j] *= std::complex<double>(0.0, k);
    }
  return inverse_transform(F);
}

}  // namespace phi4
