#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "rqfi/error.hpp"
#include "rqfi/psf.hpp"
#include "rqfi/quadrature.hpp"

using namespace rqfi;

namespace {

PsfModel sampled_gaussian(double x_r, double half, int n) {
  std::vector<double> x(n), a(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -half + 2 * half * i / (n - 1);
    a[i] = std::pow(2 * M_PI * x_r * x_r, -0.25) * std::exp(-x[i] * x[i] / (4 * x_r * x_r));
  }
  return normalize_psf(PsfModel::sampled(x, a, x_r));
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre(8);
  double acc = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], 14);
  CHECK(acc == doctest::Approx(2.0 / 15).epsilon(1e-14));
  CompositeRule c(-1, 2, 64);
  CHECK(c.integrate([](double x) { return std::exp(x); }) == doctest::Approx(std::exp(2) - std::exp(-1)).epsilon(1e-14));
}

TEST_CASE("gaussian closed forms at s = 1") {
  const auto fn = gaussian_functionals(1.0);
  CHECK(fn.delta == doctest::Approx(0.882496902584595).epsilon(1e-14));
  CHECK(fn.gamma == doctest::Approx(-0.220624225646149).epsilon(1e-14));
  CHECK(fn.beta == doctest::Approx(0.165468169234612).epsilon(1e-14));
  CHECK(fn.dk2 == 0.25);
  CHECK(fn.eps_plus_sq == doctest::Approx(0.0586751885179914).epsilon(1e-12));
  CHECK(fn.eps_minus_sq == doctest::Approx(0.00122335345853381).epsilon(1e-10));
}

TEST_CASE("gaussian limits") {
  const auto zero = gaussian_functionals(0.0);
  CHECK(zero.delta == 1.0);
  CHECK(zero.gamma == 0.0);
  CHECK(zero.beta == 0.25);
  CHECK(zero.eps_plus_sq == 0.0);
  CHECK(zero.eps_minus_sq == 0.0);
  CHECK(zero.gamma_sq_over_one_minus_delta == 0.5);

  CHECK(std::abs(gaussian_functionals(2.0).beta) < 1e-15);
  const auto far = gaussian_functionals(10.0);
  CHECK(far.delta == doctest::Approx(3.72665317207867e-6).epsilon(1e-13));
  CHECK(far.eps_plus_sq == doctest::Approx(0.250022359832233).epsilon(1e-13));
  CHECK(far.eps_minus_sq == doctest::Approx(0.249977639994168).epsilon(1e-13));

  // eps_-^2 ~ s^4 / 768 near zero, with no cancellation blow-up
  for (double s : {1e-3, 1e-2, 3e-2}) {
    const auto fn = gaussian_functionals(s);
    CHECK(fn.eps_minus_sq >= 0.0);
    CHECK(fn.eps_minus_sq == doctest::Approx(std::pow(s, 4) / 768).epsilon(2e-2));
  }
}

TEST_CASE("physical units scale with the Rayleigh length") {
  const auto psf = PsfModel::gaussian(2.5);
  const auto a = functionals(psf, 2.5);
  const auto b = gaussian_functionals(1.0);
  CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-15));
  CHECK(a.gamma * 2.5 == doctest::Approx(b.gamma).epsilon(1e-15));
  CHECK(a.beta * 6.25 == doctest::Approx(b.beta).epsilon(1e-15));
  CHECK(momentum_variance(psf) == doctest::Approx(0.04));
  CHECK(overlap_delta(psf, 2.5) == doctest::Approx(b.delta));
}

TEST_CASE("gaussian closed forms agree with quadrature") {
  const auto psf = PsfModel::gaussian(1.0);
  for (double s = 0.0; s <= 10.0; s += 0.25) {
    const auto c = gaussian_functionals(s);
    const auto q = functionals_by_quadrature(psf, s);
    CHECK(std::abs(c.delta - q.delta) < 1e-9);
    CHECK(std::abs(c.gamma - q.gamma) < 1e-9);
    CHECK(std::abs(c.beta - q.beta) < 1e-9);
    CHECK(std::abs(c.dk2 - q.dk2) < 1e-9);
  }
}

TEST_CASE("sampled gaussian reproduces closed forms") {
  const auto psf = sampled_gaussian(1.0, 12.0, 2401);
  CHECK(psf.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
  for (double s : {0.25, 1.0, 3.0}) {
    const auto c = gaussian_functionals(s);
    const auto q = functionals(psf, s);
    CHECK(q.delta == doctest::Approx(c.delta).epsilon(1e-6));
    CHECK(q.beta == doctest::Approx(c.beta).epsilon(1e-5));
    CHECK(q.dk2 == doctest::Approx(c.dk2).epsilon(1e-6));
    CHECK(q.eps_plus_sq == doctest::Approx(c.eps_plus_sq).epsilon(1e-4));
  }
}

TEST_CASE("rms width sets the Rayleigh length of a sampled PSF") {
  const auto psf = sampled_gaussian(0.0 + 1.7, 25.0, 2001);
  const auto raw = PsfModel::sampled(psf.sample_x(), psf.sample_amplitude());
  CHECK(raw.rayleigh_length() == doctest::Approx(1.7).epsilon(1e-6));
}

TEST_CASE("psf input validation") {
  CHECK_THROWS_AS(PsfModel::sampled({0, 1, 2}, {1, 1, 1}), Error);
  std::vector<double> x(16), a(16, 1.0);
  for (int i = 0; i < 16; ++i) x[i] = i * i;
  CHECK_THROWS_AS(PsfModel::sampled(x, a), Error);
  auto psf = PsfModel::gaussian(1.0);
  psf.set_quadrature({3.0, 512});
  try {
    functionals_by_quadrature(psf, 4.0);
    FAIL("expected QuadratureDomainTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureDomainTooSmall);
  }
}

TEST_CASE("psf csv loader") {
  const std::string path = "rqfi_test_psf.csv";
  {
    std::ofstream out(path);
    out << "x,amplitude\n";
    for (int i = 0; i <= 800; ++i) {
      const double x = -10 + 0.025 * i;
      out << x << ',' << 3.0 * std::exp(-x * x / 4) << '\n';
    }
  }
  const auto psf = load_psf_csv(path, 1.0);
  CHECK(psf.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(functionals(psf, 1.0).delta == doctest::Approx(0.882496902584595).epsilon(1e-6));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_psf_csv("does/not/exist.csv"), Error);
}
