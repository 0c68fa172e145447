#include "phi4/kernels.hpp"

#include <atomic>
#include <cmath>

namespace phi4::kernels {
namespace {
std::atomic<bool> g_parallel{true};
}

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

void multiply_serial(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void multiply_omp(const double* a, const double* b, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) out[i] = a[i] * b[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  g_parallel.load() ? multiply_omp(a, b, out, n) : multiply_serial(a, b, out, n);
}

void scale_spectrum_serial(std::complex<double>* c, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) c[i] *= m[i];
}

void scale_spectrum_omp(std::complex<double>* c, const double* m, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) c[i] *= m[i];
}

void scale_spectrum(std::complex<double>* c, const double* m, std::size_t n) {
  g_parallel.load() ? scale_spectrum_omp(c, m, n) : scale_spectrum_serial(c, m, n);
}

void psi_pointwise_serial(const double* y, const double* z1, const double* z2,
                          const double* z3, double a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y[i];
    out[i] = -yi * yi * yi - 3.0 * yi * yi * z1[i] - 3.0 * yi * z2[i] - z3[i] +
             a * (yi + z1[i]);
  }
}

void psi_pointwise_omp(const double* y, const double* z1, const double* z2,
                       const double* z3, double a, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double yi = y[i];
    out[i] = -yi * yi * yi - 3.0 * yi * yi * z1[i] - 3.0 * yi * z2[i] - z3[i] +
             a * (yi + z1[i]);
  }
}

void psi_pointwise(const double* y, const double* z1, const double* z2,
                   const double* z3, double a, double* out, std::size_t n) {
  g_parallel.load() ? psi_pointwise_omp(y, z1, z2, z3, a, out, n)
                    : psi_pointwise_serial(y, z1, z2, z3, a, out, n);
}

void cubic_terms_serial(const double* y, const double* z1, const double* z2,
                        double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y[i];
    out[i] = -yi * yi * yi - 3.0 * yi * yi * z1[i] - 3.0 * yi * z2[i];
  }
}

void cubic_terms_omp(const double* y, const double* z1, const double* z2,
                     double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double yi = y[i];
    out[i] = -yi * yi * yi - 3.0 * yi * yi * z1[i] - 3.0 * yi * z2[i];
  }
}

void cubic_terms(const double* y, const double* z1, const double* z2,
                 double* out, std::size_t n) {
  g_parallel.load() ? cubic_terms_omp(y, z1, z2, out, n)
                    : cubic_terms_serial(y, z1, z2, out, n);
}

namespace {
inline double powterm(double f, double p) {
  if (p == 1.0) return std::fabs(f);
  if (p == 2.0) return f * f;
  return std::pow(std::fabs(f), p);
}
}  // namespace

double weighted_power_sum_serial(const double* f, const double* w, double p, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += powterm(f[i], p) * (w ? w[i] : 1.0);
  return s;
}

double weighted_power_sum_omp(const double* f, const double* w, double p, std::size_t n) {
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (long i = 0; i < static_cast<long>(n); ++i)
    s += powterm(f[i], p) * (w ? w[i] : 1.0);
  return s;
}

double weighted_power_sum(const double* f, const double* w, double p, std::size_t n) {
  return g_parallel.load() ? weighted_power_sum_omp(f, w, p, n)
                           : weighted_power_sum_serial(f, w, p, n);
}

}  // namespace phi4::kernels
