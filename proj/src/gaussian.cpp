#include "phi4/gaussian.hpp"

#include <cmath>
#include <cstdlib>

#include "phi4/quadrature.hpp"

namespace phi4 {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace rng {
namespace {
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::array<double, 2> normal_pair(std::uint64_t k0, std::uint64_t k1,
                                  std::uint64_t k2, std::uint64_t k3,
                                  std::uint64_t k4) {
  std::uint64_t h = splitmix(k0);
  h = splitmix(h ^ k1);
  h = splitmix(h ^ k2);
  h = splitmix(h ^ k3);
  h = splitmix(h ^ k4);
  std::uint64_t h2 = splitmix(h);
  // u1 in (0,1], u2 in [0,1)
  double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1p-53;
  double u2 = static_cast<double>(h2 >> 11) * 0x1p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}
}  // namespace rng

double renorm_constant_exact(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw TimeOutOfRange("need 0 < t <= 1");
  return std::log(1.0 / t) / (8.0 * kPi);
}

namespace {
// 1D theta sum: sum_n exp(-2 r (2 pi n / M)^2)
double theta_sum(double r, double M) {
  const double a = 8.0 * kPi * kPi * r / (M * M);
  double s = 1.0;
  for (int n = 1;; ++n) {
    double term = std::exp(-a * n * n);
    s += 2.0 * term;
    if (term < 1e-18) break;
  }
  return s;
}
}  // namespace

double renorm_constant_torus(double t, double M) {
  if (!(t > 0.0 && t <= 1.0)) throw TimeOutOfRange("need 0 < t <= 1");
  if (M < 1.0) throw Error("need M >= 1");
  if (t == 1.0) return 0.0;
  auto integrand = [M](double r) {
    double s = theta_sum(r, M);
    return s * s / (M * M);
  };
  return quad::integrate(integrand, t, 1.0, 1e-10);
}

double grid_wick_variance(const TorusGrid& grid, double t) {
  if (t < 0.0) throw NegativeTime("variance needs t >= 0");
  if (t == 0.0) return 0.0;
  const double m2 = grid.side_length * grid.side_length;
  const auto mags = wavenumber_magnitudes(grid);
  double s = 0.0;
  for (double m : mags) {
    double lam = m * m;
    s += (lam == 0.0) ? t : -std::expm1(-2.0 * lam * t) / (2.0 * lam);
  }
  return s / m2;
}

// ---------------------------------------------------------------------------
// Spectral OU path with counter-based noise. In the default mode each
// canonical mode draws one Gaussian keyed by its physical frequency (scaled
// by 2^20, exact for dyadic M); in coupled mode the unit Gaussians come from
// the white-noise block transform below.
namespace {

struct ModeTables {
  std::vector<double> lambda;
  std::vector<int> partner;            // storage index of -k
  std::vector<std::uint8_t> kind;      // 0 self-conjugate, 1 canonical, 2 mirror
  std::vector<std::uint64_t> key1, key2;
};

std::int64_t freq_key(int wave, double M) {
  return std::llround(std::ldexp(static_cast<double>(wave) / M, 20));
}

ModeTables build_mode_tables(const TorusGrid& grid) {
  const int n = grid.points_per_side;
  ModeTables tb;
  const size_t n2 = static_cast<size_t>(n) * n;
  tb.lambda.resize(n2);
  tb.partner.resize(n2);
  tb.kind.resize(n2);
  tb.key1.resize(n2);
  tb.key2.resize(n2);
  for (int i = 0; i < n; ++i) {
    int k1 = grid.wave_index(i);
    for (int j = 0; j < n; ++j) {
      int k2 = grid.wave_index(j);
      size_t idx = static_cast<size_t>(i) * n + j;
      double z1 = grid.freq(i), z2 = grid.freq(j);
      tb.lambda[idx] = z1 * z1 + z2 * z2;
      int ri = (n - i) % n, rj = (n - j) % n;
      tb.partner[idx] = ri * n + rj;
      // Nyquist components pair with themselves, so they are ignored when
      // deciding which member of a +/-k pair generates the noise.
      int c1 = (k1 == -n / 2) ? 0 : k1;
      int c2 = (k2 == -n / 2) ? 0 : k2;
      if (c1 == 0 && c2 == 0) {
        tb.kind[idx] = 0;
        tb.key1[idx] = static_cast<std::uint64_t>(freq_key(k1, grid.side_length));
        tb.key2[idx] = static_cast<std::uint64_t>(freq_key(k2, grid.side_length));
      } else if (c1 > 0 || (c1 == 0 && c2 > 0)) {
        tb.kind[idx] = 1;
        tb.key1[idx] = static_cast<std::uint64_t>(freq_key(k1, grid.side_length));
        tb.key2[idx] = static_cast<std::uint64_t>(freq_key(k2, grid.side_length));
      } else {
        tb.kind[idx] = 2;
      }
    }
  }
  return tb;
}

constexpr std::uint64_t kPurposePath = 0x706174680A0A0A0AULL;
constexpr std::uint64_t kPurposeDirect = 0x6469726563740B0BULL;
constexpr std::uint64_t kPurposePathWhite = 0x70617468574E0001ULL;
constexpr std::uint64_t kPurposeDirectWhite = 0x646972574E460002ULL;

/// Coupled mode: one slot of space-time white noise is realized pointwise on
// the physical lattice (draws keyed by the integer coordinates x/h), and each
// torus reads the centered block covering its own cell. Restricting the
// 2M-cell noise to the M-cell is then literal, so fields on nested tori are
// pathwise coupled and their difference is governed by the boundary, exactly
// as in the periodized-kernel covariance picture. The DFT of a unit white
// block gives Hermitian unit Gaussians per mode after scaling by N.
SpectralField coupled_gaussians(const TorusGrid& grid, const NoiseStream& stream,
                                std::uint64_t purpose, std::uint64_t slot_key) {
  const int n = grid.points_per_side;
  const std::uint64_t mix0 = stream.root_seed ^ purpose;
  RealField w(grid);
  for (int i = 0; i < n; ++i) {
    auto ix = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(std::llround(grid.coord(i) / grid.spacing)));
    for (int j = 0; j < n; j += 2) {
      auto jx = static_cast<std::uint64_t>(
          static_cast<std::int64_t>(std::llround(grid.coord(j) / grid.spacing)));
      auto g = rng::normal_pair(mix0, stream.stream_id, slot_key, ix, jx);
      w.at(i, j) = g[0];
      if (j + 1 < n) w.at(i, j + 1) = g[1];
    }
  }
  SpectralField G = forward_transform(w);
  for (auto& c : G.coeffs) c *= static_cast<double>(n);
  return G;
}

}  // namespace

class OUPathImpl {
 public:
  OUPathImpl(const NoiseStream& stream, const TorusGrid& grid, double base_step)
      : stream_(stream), grid_(grid), base_step_(base_step),
        state_(grid), tables_(build_mode_tables(grid)) {}

  void step_once(double dt, std::uint64_t step_key) {
    const double m2 = grid_.side_length * grid_.side_length;
    const size_t n2 = state_.coeffs.size();
    if (stream_.coupled) {
      auto G = coupled_gaussians(grid_, stream_, kPurposePathWhite, step_key);
      for (size_t idx = 0; idx < n2; ++idx) {
        double lam = tables_.lambda[idx];
        double decay = std::exp(-lam * dt);
        double var = (lam == 0.0)
                         ? dt / m2
                         : -std::expm1(-2.0 * lam * dt) / (2.0 * lam * m2);
        state_.coeffs[idx] = decay * state_.coeffs[idx] +
                             std::sqrt(var) * G.coeffs[idx];
      }
      return;
    }
    std::uint64_t mix0 = stream_.root_seed ^ kPurposePath;
    for (size_t idx = 0; idx < n2; ++idx) {
      if (tables_.kind[idx] == 2) continue;
      double lam = tables_.lambda[idx];
      double decay = std::exp(-lam * dt);
      double var = (lam == 0.0) ? dt / m2
                                : -std::expm1(-2.0 * lam * dt) / (2.0 * lam * m2);
      auto g = rng::normal_pair(mix0, stream_.stream_id, step_key,
                                tables_.key1[idx], tables_.key2[idx]);
      std::complex<double> eta =
          (tables_.kind[idx] == 0)
              ? std::complex<double>(g[0] * std::sqrt(var), 0.0)
              : std::sqrt(var / 2.0) * std::complex<double>(g[0], g[1]);
      state_.coeffs[idx] = decay * state_.coeffs[idx] + eta;
    }
    for (size_t idx = 0; idx < n2; ++idx)
      if (tables_.kind[idx] == 2)
        state_.coeffs[idx] = std::conj(state_.coeffs[tables_.partner[idx]]);
  }

  void advance(double dt) {
    if (dt < 0.0) throw NegativeTime("cannot advance backwards");
    if (dt == 0.0) return;
    if (base_step_ <= 0.0) {
      step_once(dt, static_cast<std::uint64_t>(counter_++));
      time_ += dt;
      return;
    }
    long j0 = std::lround(time_ / base_step_);
    long j1 = std::lround((time_ + dt) / base_step_);
    if (std::fabs(j0 * base_step_ - time_) > 1e-9 * std::max(1.0, time_) ||
        std::fabs(j1 * base_step_ - (time_ + dt)) > 1e-9)
      throw Error("advance not aligned with the base step lattice");
    for (long j = j0; j < j1; ++j)
      step_once(base_step_, static_cast<std::uint64_t>(j));
    time_ = j1 * base_step_;
  }

  double time() const { return time_; }
  const SpectralField& spectrum() const { return state_; }

 private:
  NoiseStream stream_;
  TorusGrid grid_;
  double base_step_;
  double time_ = 0.0;
  long counter_ = 0;
  SpectralField state_;
  ModeTables tables_;
};

OUPath::OUPath(const NoiseStream& stream, const TorusGrid& grid, double base_step)
    : impl_(new OUPathImpl(stream, grid, base_step)) {}
OUPath::~OUPath() = default;
void OUPath::advance(double dt) { impl_->advance(dt); }
double OUPath::time() const { return impl_->time(); }
const SpectralField& OUPath::spectrum() const { return impl_->spectrum(); }

HeatSample sample_heat_solution(const NoiseStream& stream, const TorusGrid& grid,
                                const std::vector<double>& times,
                                const RealField* X0, double base_step) {
  for (size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] > times[i]))
      throw NonIncreasingTimes("times must be strictly increasing");
  if (!times.empty() && times.front() < 0.0)
    throw NonIncreasingTimes("times must start at or after 0");

  OUPathImpl path(stream, grid, base_step);
  SpectralField X0hat;
  if (X0) {
    if (!(X0->grid == grid)) throw GridMismatch("X0 grid differs");
    X0hat = forward_transform(*X0);
  }
  const auto mags = wavenumber_magnitudes(grid);

  HeatSample out;
  for (double t : times) {
    path.advance(t - path.time());
    out.Z.push_back(inverse_transform(path.spectrum()));
    if (X0) {
      SpectralField v = X0hat;
      for (size_t i = 0; i < v.coeffs.size(); ++i)
        v.coeffs[i] *= std::exp(-t * mags[i] * mags[i]);
      out.V.push_back(inverse_transform(v));
    } else {
      out.V.push_back(RealField(grid));
    }
  }
  return out;
}

RealField sample_field_direct(const NoiseStream& stream, const TorusGrid& grid,
                              double t) {
  if (t < 0.0) throw NegativeTime("sample time must be >= 0");
  SpectralField state(grid);
  const auto tables = build_mode_tables(grid);
  const double m2 = grid.side_length * grid.side_length;
  const std::uint64_t tkey = static_cast<std::uint64_t>(std::llround(t * 0x1p30));
  if (stream.coupled) {
    auto G = coupled_gaussians(grid, stream, kPurposeDirectWhite, tkey);
    for (size_t idx = 0; idx < state.coeffs.size(); ++idx) {
      double lam = tables.lambda[idx];
      double var = (lam == 0.0) ? t / m2
                                : -std::expm1(-2.0 * lam * t) / (2.0 * lam * m2);
      state.coeffs[idx] = std::sqrt(var) * G.coeffs[idx];
    }
    return inverse_transform(state);
  }
  std::uint64_t mix0 = stream.root_seed ^ kPurposeDirect;
  for (size_t idx = 0; idx < state.coeffs.size(); ++idx) {
    if (tables.kind[idx] == 2) continue;
    double lam = tables.lambda[idx];
    double var = (lam == 0.0) ? t / m2
                              : -std::expm1(-2.0 * lam * t) / (2.0 * lam * m2);
    auto g = rng::normal_pair(mix0, stream.stream_id, tkey, tables.key1[idx],
                              tables.key2[idx]);
    state.coeffs[idx] = (tables.kind[idx] == 0)
                            ? std::complex<double>(g[0] * std::sqrt(var), 0.0)
                            : std::sqrt(var / 2.0) * std::complex<double>(g[0], g[1]);
  }
  for (size_t idx = 0; idx < state.coeffs.size(); ++idx)
    if (tables.kind[idx] == 2)
      state.coeffs[idx] = std::conj(state.coeffs[tables.partner[idx]]);
  return inverse_transform(state);
}

std::array<RealField, 3> wick_powers(const RealField& Z, const RealField& V,
                                     double c, double c_exact_t) {
  if (!(Z.grid == V.grid)) throw GridMismatch("Z and V grids differ");
  if (c < 0.0) throw Error("variance c must be nonnegative");
  const double kappa = c - c_exact_t;
  RealField z1(Z.grid), z2(Z.grid), z3(Z.grid);
  for (size_t i = 0; i < Z.values.size(); ++i) {
    const double w = Z.values[i], v = V.values[i];
    z1.values[i] = w + v;
    const double h2 = w * w - c + kappa;  // Hermite part of the square
    z2.values[i] = h2 + 2.0 * w * v + v * v;
    z3.values[i] = (w * w * w - 3.0 * c * w + 3.0 * kappa * w) + 3.0 * h2 * v +
                   3.0 * w * v * v + v * v * v;
  }
  return {std::move(z1), std::move(z2), std::move(z3)};
}

WickStack build_wick_stack(const NoiseStream& stream, const TorusGrid& grid,
                           const std::vector<double>& times,
                           const RealField* X0, double base_step) {
  HeatSample hs = sample_heat_solution(stream, grid, times, X0, base_step);
  WickStack st;
  st.grid = grid;
  st.times = times;
  for (size_t i = 0; i < times.size(); ++i) {
    double c = grid_wick_variance(grid, times[i]);
    auto zz = wick_powers(hs.Z[i], hs.V[i], c, c);
    st.Z.push_back(std::move(zz[0]));
    st.Z2.push_back(std::move(zz[1]));
    st.Z3.push_back(std::move(zz[2]));
    st.V.push_back(std::move(hs.V[i]));
    st.c_grid.push_back(c);
  }
  return st;
}

namespace {
double torus_distance(const std::array<double, 2>& x, double M) {
  if (M <= 0.0) return std::hypot(x[0], x[1]);
  auto wrap = [M](double v) {
    v = std::fmod(v, M);
    if (v > M / 2.0) v -= M;
    if (v < -M / 2.0) v += M;
    return v;
  };
  return std::hypot(wrap(x[0]), wrap(x[1]));
}
}  // namespace

double covariance_exact(const CovarianceQuery& q) {
  if (q.t1 < 0.0 || q.t2 < 0.0) throw NegativeTime("covariance times must be >= 0");
  const double lo = std::fabs(q.t1 - q.t2), hi = q.t1 + q.t2;
  if (hi <= lo) return 0.0;
  const bool plane = q.M <= 0.0;
  if (lo == 0.0 && torus_distance(q.x, plane ? 0.0 : q.M) == 0.0)
    throw DivergentKernel("equal times at a lattice point");

  int R = 0;
  if (!plane) R = static_cast<int>(std::ceil(std::sqrt(180.0 * hi) / q.M)) + 1;
  auto integrand = [&](double ell) {
    double s = 0.0;
    for (int a = -R; a <= R; ++a)
      for (int b = -R; b <= R; ++b) {
        double dx = q.x[0] - a * q.M, dy = q.x[1] - b * q.M;
        if (plane && (a != 0 || b != 0)) continue;
        s += std::exp(-(dx * dx + dy * dy) / (4.0 * ell));
      }
    return s / ell;
  };
  return quad::integrate(integrand, lo, hi, 1e-10) / (8.0 * kPi);
}

std::vector<CovEstimate> empirical_covariance(
    const std::vector<NoiseStream>& streams, const TorusGrid& grid, double t,
    const std::vector<std::array<double, 2>>& lags) {
  if (streams.size() < 100) throw TooFewRealizations("need >= 100 realizations");
  const int n = grid.points_per_side;
  std::vector<std::vector<double>> per_real(lags.size());
  for (const auto& s : streams) {
    RealField f = sample_field_direct(s, grid, t);
    for (size_t li = 0; li < lags.size(); ++li) {
      int di = static_cast<int>(std::lround(lags[li][0] / grid.spacing));
      int dj = static_cast<int>(std::lround(lags[li][1] / grid.spacing));
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += f.at(i, j) * f.at(((i + di) % n + n) % n, ((j + dj) % n + n) % n);
      per_real[li].push_back(acc / (n * n));
    }
  }
  std::vector<CovEstimate> out;
  const double R = static_cast<double>(streams.size());
  for (size_t li = 0; li < lags.size(); ++li) {
    double mean = 0.0;
    for (double v : per_real[li]) mean += v;
    mean /= R;
    double var = 0.0;
    for (double v : per_real[li]) var += (v - mean) * (v - mean);
    var /= (R - 1.0);
    out.push_back({lags[li], mean, std::sqrt(var / R)});
  }
  return out;
}

namespace {
// One spatial dimension of int_cell K(s,a-z) K(s,b-z) dz.
double cell_factor_1d(double a, double b, double s, double M) {
  const double c = 0.5 * (a + b);
  const double d = a - b;
  const double root = std::sqrt(2.0 * s);
  double window = std::erf((M / 2.0 - c) / root) - std::erf((-M / 2.0 - c) / root);
  return (1.0 / (4.0 * kPi * s)) * std::exp(-d * d / (8.0 * s)) *
         std::sqrt(kPi * s / 2.0) * window;
}
}  // namespace

KernelMixedResult kernel_mixed(double t, const std::array<double, 2>& x1,
                               const std::array<double, 2>& x2, double M) {
  if (t < 0.0) throw NegativeTime("kernel time must be >= 0");
  KernelMixedResult res;
  res.in_regime = std::hypot(x1[0], x1[1]) <= M / 8.0 &&
                  std::hypot(x2[0], x2[1]) <= M / 8.0;
  if (t == 0.0) return res;
  const double a1 = x1[0] - x2[0], a2 = x1[1] - x2[1];
  const int R = static_cast<int>(std::ceil(std::sqrt(360.0 * t) / M)) + 1;
  auto integrand = [&](double r) {
    const double s = t - r;
    if (s <= 0.0) return 0.0;
    double sum = 0.0;
    for (int ya = -R; ya <= R; ++ya)
      for (int yb = -R; yb <= R; ++yb) {
        double term = cell_factor_1d(a1, -ya * M, s, M) *
                      cell_factor_1d(a2, -yb * M, s, M);
        sum += term;
      }
    return sum;
  };
  res.value = quad::integrate(integrand, 0.0, t, 1e-9);
  return res;
}

}  // namespace phi4
