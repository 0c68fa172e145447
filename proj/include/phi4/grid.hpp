#pragma once

#include <complex>
#include <vector>

#include "phi4/errors.hpp"

namespace phi4 {

// Square M-periodic torus, N points per side, corner convention:
// array point (i,j) sits at x = (i*h - M/2, j*h - M/2).
struct TorusGrid {
  double side_length = 0.0;  // M
  int points_per_side = 0;   // N (even, >= 8)
  double spacing = 0.0;      // h = M/N, stored once

  static TorusGrid make(double side_length, int points_per_side);

  int size() const { return points_per_side * points_per_side; }

  // storage index m in [0,N) -> integer wavevector component in [-N/2, N/2)
  int wave_index(int m) const {
    return m < points_per_side / 2 ? m : m - points_per_side;
  }
  // angular frequency component 2*pi*k/M for storage index m
  double freq(int m) const {
    return 2.0 * 3.14159265358979323846 * wave_index(m) / side_length;
  }
  double coord(int i) const { return i * spacing - side_length / 2.0; }

  bool operator==(const TorusGrid& o) const {
    return side_length == o.side_length && points_per_side == o.points_per_side;
  }
};

struct RealField {
  TorusGrid grid;
  std::vector<double> values;  // row-major N*N

  RealField() = default;
  explicit RealField(const TorusGrid& g) : grid(g), values(g.size(), 0.0) {}

  double& at(int i, int j) { return values[i * grid.points_per_side + j]; }
  double at(int i, int j) const { return values[i * grid.points_per_side + j]; }
};

struct SpectralField {
  TorusGrid grid;
  std::vector<std::complex<double>> coeffs;  // row-major N*N, FFT index order

  SpectralField() = default;
  explicit SpectralField(const TorusGrid& g) : grid(g), coeffs(g.size()) {}

  std::complex<double>& at(int m1, int m2) {
    return coeffs[m1 * grid.points_per_side + m2];
  }
  std::complex<double> at(int m1, int m2) const {
    return coeffs[m1 * grid.points_per_side + m2];
  }
  // coefficient of integer wavevector (k1,k2), |ki| <= N/2
  std::complex<double>& at_wave(int k1, int k2) {
    const int n = grid.points_per_side;
    return at((k1 % n + n) % n, (k2 % n + n) % n);
  }
};

// Continuum-normalized transforms: coefficients approximate
// (1/M^2) \int f(x) e^{-i zeta.x} dx, so inverse is a plain Fourier series.
SpectralField forward_transform(const RealField& f);
RealField inverse_transform(const SpectralField& F);  // throws NonHermitianInput

// |zeta| = (2*pi/M)|k| per spectral storage index, row-major
std::vector<double> wavenumber_magnitudes(const TorusGrid& grid);

}  // namespace phi4
