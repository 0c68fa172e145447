#include "phi4/grid.hpp"

#include <cmath>
#include <cstdlib>

#include "phi4/fft.hpp"

namespace phi4 {

TorusGrid TorusGrid::make(double side_length, int points_per_side) {
  if (side_length <= 0.0) throw Error("side_length must be positive");
  if (points_per_side < 8 || points_per_side % 2 != 0)
    throw Error("points_per_side must be even and >= 8");
  TorusGrid g;
  g.side_length = side_length;
  g.points_per_side = points_per_side;
  g.spacing = side_length / points_per_side;
  return g;
}

// Corner convention: x_i = i*h - M/2, so the continuum coefficient
//   f_hat(k) = (1/M^2) int f e^{-i zeta.x}
// picks up a phase (-1)^{k1+k2} relative to the plain DFT.
SpectralField forward_transform(const RealField& f) {
  const int n = f.grid.points_per_side;
  SpectralField out(f.grid);
  std::vector<std::complex<double>> buf(f.values.begin(), f.values.end());
  fft::forward(n, buf.data(), out.coeffs.data());
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      out.coeffs[i * n + j] *= sign * scale;
    }
  return out;
}

RealField inverse_transform(const SpectralField& F) {
  const int n = F.grid.points_per_side;
  // Hermitian symmetry check: coeff(-k) == conj(coeff(k)).
  double max_mag = 0.0;
  for (const auto& c : F.coeffs) max_mag = std::max(max_mag, std::abs(c));
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int ri = (n - i) % n, rj = (n - j) % n;
      worst = std::max(worst, std::abs(F.coeffs[i * n + j] -
                                       std::conj(F.coeffs[ri * n + rj])));
    }
  if (max_mag > 0.0 && worst > 1e-10 * max_mag)
    throw NonHermitianInput("spectral field violates Hermitian symmetry");

  std::vector<std::complex<double>> buf(F.coeffs.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      buf[i * n + j] = sign * F.coeffs[i * n + j];
    }
  std::vector<std::complex<double>> out(buf.size());
  fft::backward(n, buf.data(), out.data());
  RealField g(F.grid);
  for (int idx = 0; idx < n * n; ++idx) g.values[idx] = out[idx].real();
  return g;
}

std::vector<double> wavenumber_magnitudes(const TorusGrid& grid) {
  const int n = grid.points_per_side;
  std::vector<double> mags(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    double ki = grid.freq(i);
    for (int j = 0; j < n; ++j) {
      double kj = grid.freq(j);
      mags[i * n + j] = std::sqrt(ki * ki + kj * kj);
    }
  }
  return mags;
}

}  // namespace phi4
