// Timing comparison: serial reference kernels vs the OpenMP versions.
#include <chrono>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "phi4/kernels.hpp"

namespace {

using clk = std::chrono::steady_clock;

template <class F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clk::now();
    body();
    best = std::min(best, std::chrono::duration<double>(clk::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 1 << 22;  // ~4M doubles, well past cache
  if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);
  const int reps = 7;

  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  std::vector<double> a(n), b(n), c(n), d(n), out(n), w(n);
  std::vector<std::complex<double>> spec(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = nd(gen);
    b[i] = nd(gen);
    c[i] = nd(gen);
    d[i] = nd(gen);
    w[i] = 1.0 + 0.5 * std::abs(nd(gen));
    spec[i] = {nd(gen), nd(gen)};
  }
  volatile double sink = 0.0;

  std::printf("n = %zu, best of %d runs, times in ms\n", n, reps);
  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial", "omp", "speedup");

  auto row = [&](const char* name, double ts, double tp) {
    std::printf("%-22s %10.3f %10.3f %7.2fx\n", name, 1e3 * ts, 1e3 * tp,
                ts / tp);
  };

  using namespace phi4::kernels;
  row("multiply",
      time_best_of(reps, [&] { multiply_serial(a.data(), b.data(), out.data(), n); }),
      time_best_of(reps, [&] { multiply_omp(a.data(), b.data(), out.data(), n); }));
  row("scale_spectrum",
      time_best_of(reps, [&] { scale_spectrum_serial(spec.data(), w.data(), n); }),
      time_best_of(reps, [&] { scale_spectrum_omp(spec.data(), w.data(), n); }));
  row("psi_pointwise",
      time_best_of(reps, [&] {
        psi_pointwise_serial(a.data(), b.data(), c.data(), d.data(), 1.0,
                             out.data(), n);
      }),
      time_best_of(reps, [&] {
        psi_pointwise_omp(a.data(), b.data(), c.data(), d.data(), 1.0,
                          out.data(), n);
      }));
  row("cubic_terms",
      time_best_of(reps, [&] {
        cubic_terms_serial(a.data(), b.data(), c.data(), out.data(), n);
      }),
      time_best_of(reps, [&] {
        cubic_terms_omp(a.data(), b.data(), c.data(), out.data(), n);
      }));
  row("weighted_power_sum p=6",
      time_best_of(reps, [&] {
        sink = weighted_power_sum_serial(a.data(), w.data(), 6.0, n);
      }),
      time_best_of(reps, [&] {
        sink = weighted_power_sum_omp(a.data(), w.data(), 6.0, n);
      }));
  (void)sink;
  return 0;
}
