#pragma once

#include <complex>
#include <cstddef>

// Hot pointwise loops, each in a serial reference version and an OpenMP
// version. Everything above these calls through the dispatch functions; the
// serial versions exist so tests (and the benchmark) can compare.
namespace phi4::kernels {

void set_parallel(bool on);
bool parallel_enabled();

// out[i] = a[i] * b[i]
void multiply_serial(const double* a, const double* b, double* out, std::size_t n);
void multiply_omp(const double* a, const double* b, double* out, std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);

// c[i] *= m[i]  (diagonal spectral multiplier)
void scale_spectrum_serial(std::complex<double>* c, const double* m, std::size_t n);
void scale_spectrum_omp(std::complex<double>* c, const double* m, std::size_t n);
void scale_spectrum(std::complex<double>* c, const double* m, std::size_t n);

// out = -y^3 - 3 y^2 z1 - 3 y z2 - z3 + a (y + z1), pointwise (no dealiasing
// here; callers doing spectral work evaluate this on the padded grid)
void psi_pointwise_serial(const double* y, const double* z1, const double* z2,
                          const double* z3, double a, double* out, std::size_t n);
void psi_pointwise_omp(const double* y, const double* z1, const double* z2,
                       const double* z3, double a, double* out, std::size_t n);
void psi_pointwise(const double* y, const double* z1, const double* z2,
                   const double* z3, double a, double* out, std::size_t n);

// out = -y^3 - 3 y^2 z1 - 3 y z2 (the part of psi needing dealiasing)
void cubic_terms_serial(const double* y, const double* z1, const double* z2,
                        double* out, std::size_t n);
void cubic_terms_omp(const double* y, const double* z1, const double* z2,
                     double* out, std::size_t n);
void cubic_terms(const double* y, const double* z1, const double* z2,
                 double* out, std::size_t n);

// sum_i |f[i]|^p w[i]   (w may be null for weight 1)
double weighted_power_sum_serial(const double* f, const double* w, double p, std::size_t n);
double weighted_power_sum_omp(const double* f, const double* w, double p, std::size_t n);
double weighted_power_sum(const double* f, const double* w, double p, std::size_t n);

}  // namespace phi4::kernels
