#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "phi4/kernels.hpp"

using namespace phi4;

namespace {
// cheap deterministic filler
std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  std::uint64_t s = seed * 0x9E3779B97F4A7C15ULL + 1;
  for (auto& x : v) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    x = static_cast<double>(static_cast<std::int64_t>(s)) / 9.2e18;
  }
  return v;
}
}  // namespace

TEST_CASE("serial and OpenMP kernels agree bitwise on pointwise ops") {
  const std::size_t n = 64 * 64 + 17;  // non-multiple of any block size
  auto a = noise(n, 1), b = noise(n, 2), c = noise(n, 3), d = noise(n, 4);
  std::vector<double> out_s(n), out_p(n);

  kernels::multiply_serial(a.data(), b.data(), out_s.data(), n);
  kernels::multiply_omp(a.data(), b.data(), out_p.data(), n);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(out_s[i] == out_p[i]);

  kernels::psi_pointwise_serial(a.data(), b.data(), c.data(), d.data(), 0.7,
                                out_s.data(), n);
  kernels::psi_pointwise_omp(a.data(), b.data(), c.data(), d.data(), 0.7,
                             out_p.data(), n);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(out_s[i] == out_p[i]);

  kernels::cubic_terms_serial(a.data(), b.data(), c.data(), out_s.data(), n);
  kernels::cubic_terms_omp(a.data(), b.data(), c.data(), out_p.data(), n);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(out_s[i] == out_p[i]);

  std::vector<std::complex<double>> cs(n), cp(n);
  for (std::size_t i = 0; i < n; ++i) cs[i] = cp[i] = {a[i], b[i]};
  kernels::scale_spectrum_serial(cs.data(), c.data(), n);
  kernels::scale_spectrum_omp(cp.data(), c.data(), n);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(cs[i] == cp[i]);
}

TEST_CASE("weighted power sum matches serial reference to tolerance") {
  // reductions may reassociate, so compare to relative tolerance
  const std::size_t n = 128 * 128;
  auto f = noise(n, 9), w = noise(n, 10);
  for (auto& x : w) x = std::fabs(x);
  for (double p : {1.0, 2.0, 6.0, 2.0 / 3.0}) {
    double s = kernels::weighted_power_sum_serial(f.data(), w.data(), p, n);
    double o = kernels::weighted_power_sum_omp(f.data(), w.data(), p, n);
    REQUIRE(std::fabs(s - o) <= 1e-12 * std::fabs(s));
    double s1 = kernels::weighted_power_sum_serial(f.data(), nullptr, p, n);
    double o1 = kernels::weighted_power_sum_omp(f.data(), nullptr, p, n);
    REQUIRE(std::fabs(s1 - o1) <= 1e-12 * std::fabs(s1));
  }
}

TEST_CASE("kernel values are what the formulas say") {
  double y = 0.5, z1 = -0.25, z2 = 2.0, z3 = 1.5, a = 1.25;
  double out = 0.0;
  kernels::psi_pointwise_serial(&y, &z1, &z2, &z3, a, &out, 1);
  double want = -y * y * y - 3 * y * y * z1 - 3 * y * z2 - z3 + a * (y + z1);
  CHECK(out == doctest::Approx(want).epsilon(1e-15));
  kernels::cubic_terms_serial(&y, &z1, &z2, &out, 1);
  CHECK(out == doctest::Approx(-y * y * y - 3 * y * y * z1 - 3 * y * z2)
                   .epsilon(1e-15));
}

TEST_CASE("dispatch honors the parallel switch") {
  const std::size_t n = 1024;
  auto a = noise(n, 5), b = noise(n, 6);
  std::vector<double> out1(n), out2(n);
  kernels::set_parallel(false);
  CHECK(!kernels::parallel_enabled());
  kernels::multiply(a.data(), b.data(), out1.data(), n);
  kernels::set_parallel(true);
  CHECK(kernels::parallel_enabled());
  kernels::multiply(a.data(), b.data(), out2.data(), n);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(out1[i] == out2[i]);
}
