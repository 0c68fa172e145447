#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phi4/plane.hpp"
#include "phi4/verify.hpp"

using namespace phi4;

namespace {
constexpr double kPi = 3.14159265358979323846;

RealField gaussian_blob(const TorusGrid& g, double width) {
  RealField f(g);
  for (int i = 0; i < g.points_per_side; ++i)
    for (int j = 0; j < g.points_per_side; ++j) {
      double x = g.coord(i), y = g.coord(j);
      f.at(i, j) = std::exp(-(x * x + y * y) / (2.0 * width * width));
    }
  return f;
}
}  // namespace

TEST_CASE("max block index tracks the Nyquist frequency") {
  CHECK(max_block_index(TorusGrid::make(2.0 * kPi, 64)) == 3);   // nyq 32
  CHECK(max_block_index(TorusGrid::make(2.0 * kPi, 128)) == 4);  // nyq 64
  CHECK(max_block_index(TorusGrid::make(4.0, 64)) == 4);         // nyq 16 pi
}

TEST_CASE("periodization: plateau agreement and compact support") {
  TorusGrid ref = TorusGrid::make(16.0, 256);
  const double M = 4.0;
  // X0 supported in B(0, M/4): cutoff-free region, single lattice term
  RealField x0(ref);
  for (int i = 0; i < ref.points_per_side; ++i)
    for (int j = 0; j < ref.points_per_side; ++j) {
      double x = ref.coord(i), y = ref.coord(j);
      double r = std::sqrt(x * x + y * y);
      x0.at(i, j) = (r < M / 4) ? std::cos(kPi * r * 2.0 / M) + 1.0 : 0.0;
    }
  RealField xm = periodize_initial(x0, M);
  REQUIRE(xm.grid.side_length == M);
  const int off = (ref.points_per_side - xm.grid.points_per_side) / 2;
  for (int i = 0; i < xm.grid.points_per_side; ++i)
    for (int j = 0; j < xm.grid.points_per_side; ++j)
      REQUIRE(xm.at(i, j) ==
              doctest::Approx(x0.at(i + off, j + off)).epsilon(1e-12));

  // constant input: periodized bump, exactly 1 at the origin
  RealField one(ref);
  for (auto& v : one.values) v = 1.0;
  RealField pm = periodize_initial(one, M);
  int c = pm.grid.points_per_side / 2;
  CHECK(pm.at(c, c) == doctest::Approx(1.0).epsilon(1e-12));
  double mx = 0.0;
  for (double v : pm.values) {
    REQUIRE(v >= -1e-12);
    mx = std::max(mx, v);
  }
  CHECK(mx <= 1.0 + 1e-12);
}

TEST_CASE("periodization rejects incommensurate targets") {
  TorusGrid ref = TorusGrid::make(16.0, 256);
  RealField x0(ref);
  CHECK_THROWS_AS(periodize_initial(x0, 32.0), IncommensurateGrids);
  CHECK_THROWS_AS(periodize_initial(x0, 3.1), IncommensurateGrids);
}

TEST_CASE("periodized norms stay within 2x of the reference norm") {
  TorusGrid ref = TorusGrid::make(32.0, 256);  // 8 points per unit
  RealField x0 = gaussian_blob(ref, 1.0);
  BesovParams bp;
  bp.alpha = 0.5;
  bp.p = 2.0;
  bp.q = inf_exponent();
  bp.weight = WeightSpec::polynomial(3.0);
  PartitionConfig pc;
  pc.k_max = max_block_index(ref);
  double ref_norm = besov_norm(x0, build_partition(ref, pc), bp);
  for (double M : {4.0, 8.0, 16.0}) {
    RealField xm = periodize_initial(x0, M);
    PartitionConfig pm;
    pm.k_max = max_block_index(xm.grid);
    double nm = besov_norm(xm, build_partition(xm.grid, pm), bp);
    INFO("M = ", M, " norm ", nm, " ref ", ref_norm);
    REQUIRE(nm <= 2.0 * ref_norm);
    REQUIRE(nm >= 0.5 * ref_norm);
  }
}

TEST_CASE("center restriction extracts the shared cell") {
  TorusGrid big = TorusGrid::make(8.0, 64), small = TorusGrid::make(4.0, 32);
  RealField f(big);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) f.at(i, j) = big.coord(i) + 100.0 * big.coord(j);
  RealField r = restrict_center(f, small);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      REQUIRE(r.at(i, j) ==
              doctest::Approx(small.coord(i) + 100.0 * small.coord(j))
                  .epsilon(1e-13));
  CHECK_THROWS_AS(restrict_center(f, TorusGrid::make(4.0, 16)), GridMismatch);
}

TEST_CASE("same seed and grid give a zero difference") {
  NoiseStream st{5, 1};
  st.coupled = true;
  TorusGrid g = TorusGrid::make(4.0, 32);
  RealField a = sample_field_direct(st, g, 0.3);
  RealField b = sample_field_direct(st, g, 0.3);
  for (size_t i = 0; i < a.values.size(); ++i)
    REQUIRE(a.values[i] == b.values[i]);
}

TEST_CASE("study configs are validated") {
  StackStudyConfig cfg;
  cfg.M_list = {2.0, 4.0, 6.0};  // not doubling
  NoiseStream st{1, 0};
  CHECK_THROWS_AS(stack_convergence_study(st, cfg), NestingViolation);
  cfg.M_list = {};
  CHECK_THROWS_AS(stack_convergence_study(st, cfg), NestingViolation);
  cfg.M_list = {2.0, 4.0};
  cfg.points_per_unit = 3;  // odd grid sizes
  CHECK_THROWS_AS(stack_convergence_study(st, cfg), NestingViolation);
}

TEST_CASE("wick stack differences decay along doubling tori") {
  StackStudyConfig cfg;
  cfg.M_list = {2.0, 4.0, 8.0};
  cfg.points_per_unit = 16;
  NoiseStream st{42, 0};
  auto rows = stack_convergence_study(st, cfg);
  REQUIRE(rows.size() == 9);
  for (int n = 1; n <= 3; ++n) {
    const DecayRow* prev = nullptr;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      REQUIRE(r.D > 0.0);
      if (prev) {
        INFO("n = ", n, " M = ", r.M);
        REQUIRE(r.D < prev->D);
        REQUIRE(r.fit_exponent < 0.0);
      }
      prev = &r;
    }
  }
}

TEST_CASE("solution differences decay along doubling tori") {
  SolutionStudyConfig cfg;
  cfg.M_list = {2.0, 4.0, 8.0};
  cfg.points_per_unit = 16;
  cfg.solver.dt = 5e-3;
  cfg.solver.T = 0.5;
  NoiseStream st{42, 0};
  auto res = solution_convergence_study(st, cfg);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.decreasing);
  for (size_t i = 1; i < res.rows.size(); ++i)
    REQUIRE(res.rows[i].D < res.rows[i - 1].D);
  CHECK(res.common_C > 0.0);
  for (const auto& r : res.rows) REQUIRE(r.sup_norm <= res.common_C + 1e-15);
}
