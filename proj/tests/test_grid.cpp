#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>

#include "phi4/grid.hpp"
#include "phi4/io.hpp"
#include "phi4/verify.hpp"

using namespace phi4;

namespace {
constexpr double kPi = 3.14159265358979323846;

RealField random_field(const TorusGrid& g, std::uint64_t trial) {
  // full-band random field (band_fraction close to 1 keeps all modes)
  return random_band_limited(g, 0.49, 7, trial);
}
}  // namespace

TEST_CASE("grid construction validates shape") {
  CHECK_THROWS_AS(TorusGrid::make(-1.0, 16), Error);
  CHECK_THROWS_AS(TorusGrid::make(2.0, 6), Error);
  CHECK_THROWS_AS(TorusGrid::make(2.0, 15), Error);
  TorusGrid g = TorusGrid::make(2.0, 16);
  CHECK(g.spacing == 2.0 / 16);
  CHECK(g.spacing * g.points_per_side == g.side_length);
  CHECK(g.coord(8) == 0.0);  // origin at index N/2
}

TEST_CASE("wavenumber magnitudes") {
  TorusGrid g = TorusGrid::make(2.0 * kPi, 16);
  auto mags = wavenumber_magnitudes(g);
  CHECK(mags[0] == 0.0);                       // k = (0,0)
  CHECK(mags[1] == doctest::Approx(1.0));      // k = (0,1), 2pi/M = 1
  TorusGrid g1 = TorusGrid::make(1.0, 16);
  auto m1 = wavenumber_magnitudes(g1);
  CHECK(m1[3 * 16 + 4] == doctest::Approx(10.0 * kPi));  // |k| = 5
}

TEST_CASE("forward transform of elementary fields") {
  TorusGrid g = TorusGrid::make(2.0, 32);
  RealField one(g);
  for (auto& v : one.values) v = 1.0;
  SpectralField F = forward_transform(one);
  CHECK(std::abs(F.at_wave(0, 0) - 1.0) < 1e-14);
  double off = 0.0;
  for (size_t i = 1; i < F.coeffs.size(); ++i)
    off = std::max(off, std::abs(F.coeffs[i]));
  CHECK(F.at_wave(0, 0).real() == doctest::Approx(1.0));
  CHECK(off < 1e-14);

  RealField c(g);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      c.at(i, j) = std::cos(2.0 * kPi * g.coord(i) / g.side_length);
  SpectralField C = forward_transform(c);
  CHECK(std::abs(C.at_wave(1, 0) - 0.5) < 1e-14);
  CHECK(std::abs(C.at_wave(-1, 0) - 0.5) < 1e-14);
  C.at_wave(1, 0) = 0.0;
  C.at_wave(-1, 0) = 0.0;
  double rest = 0.0;
  for (const auto& z : C.coeffs) rest = std::max(rest, std::abs(z));
  CHECK(rest < 1e-14);
}

TEST_CASE("round trip, linearity, Parseval on random fields") {
  TorusGrid g = TorusGrid::make(3.0, 64);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    RealField f = random_field(g, trial);
    double scale = 0.0;
    for (double v : f.values) scale = std::max(scale, std::fabs(v));
    RealField back = inverse_transform(forward_transform(f));
    double err = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
      err = std::max(err, std::fabs(back.values[i] - f.values[i]));
    REQUIRE(err <= 1e-12 * scale);
  }
  // linearity
  RealField f = random_field(g, 1000), h = random_field(g, 1001);
  RealField combo(g);
  for (size_t i = 0; i < f.values.size(); ++i)
    combo.values[i] = 0.7 * f.values[i] - 1.3 * h.values[i];
  SpectralField Fc = forward_transform(combo);
  SpectralField Ff = forward_transform(f), Fh = forward_transform(h);
  double lerr = 0.0;
  for (size_t i = 0; i < Fc.coeffs.size(); ++i)
    lerr = std::max(lerr, std::abs(Fc.coeffs[i] - 0.7 * Ff.coeffs[i] +
                                   1.3 * Fh.coeffs[i]));
  CHECK(lerr < 1e-12);
  // Parseval: sum |f|^2 h^2 = M^2 sum |f_hat|^2
  double phys = 0.0, spec = 0.0;
  for (double v : f.values) phys += v * v;
  phys *= g.spacing * g.spacing;
  for (const auto& z : Ff.coeffs) spec += std::norm(z);
  spec *= g.side_length * g.side_length;
  CHECK(phys == doctest::Approx(spec).epsilon(1e-10));
}

TEST_CASE("inverse transform rejects non-Hermitian input") {
  TorusGrid g = TorusGrid::make(2.0, 16);
  SpectralField F(g);
  F.at_wave(1, 2) = {1.0, 1.0};  // no conjugate partner
  CHECK_THROWS_AS(inverse_transform(F), NonHermitianInput);
  SpectralField ok(g);
  ok.at_wave(1, 2) = {1.0, 1.0};
  ok.at_wave(-1, -2) = {1.0, -1.0};
  CHECK_NOTHROW(inverse_transform(ok));
}

TEST_CASE("snapshot format round trip is bit exact") {
  TorusGrid g = TorusGrid::make(2.5, 16);
  RealField f = random_field(g, 3);
  std::string path = "test_snapshot.bin";
  io::write_snapshot(path, f);
  // check header bytes
  std::string raw = io::read_text(path);
  REQUIRE(raw.size() == 8 + 4 + 8 + 16 * 16 * 8);
  CHECK(raw.substr(0, 8) == "PHI4FLD1");
  CHECK(static_cast<unsigned char>(raw[8]) == 16);  // LE u32 N
  CHECK(static_cast<unsigned char>(raw[9]) == 0);
  RealField back = io::read_snapshot(path);
  CHECK(back.grid.points_per_side == 16);
  CHECK(back.grid.side_length == 2.5);
  for (size_t i = 0; i < f.values.size(); ++i)
    REQUIRE(back.values[i] == f.values[i]);
  std::remove(path.c_str());
}

TEST_CASE("csv append writes header only once") {
  std::string path = "test_append.csv";
  std::remove(path.c_str());
  io::append_csv(path, "a,b", {"1,2"});
  io::append_csv(path, "a,b", {"3,4"});
  CHECK(io::read_text(path) == "a,b\n1,2\n3,4\n");
  std::remove(path.c_str());
}
