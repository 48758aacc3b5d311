#include <doctest.h>

#include <cmath>

#include "rqfi/beamsplitter.hpp"
#include "rqfi/error.hpp"

using namespace rqfi;

TEST_CASE("eta outside (0, 1/2] is rejected") {
  for (double eta : {0.0, -0.1, 0.51, 0.7}) {
    try {
      ImagingSystem(eta, PsfModel::gaussian(1.0));
      FAIL("expected EtaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EtaOutOfRange);
      CHECK(std::string(e.what()).find("1/2") != std::string::npos);
    }
  }
  CHECK_NOTHROW(ImagingSystem(0.5, PsfModel::gaussian(1.0)));
}

TEST_CASE("f functions at s = 1, eta = 0.4") {
  ImagingSystem sys(0.4, PsfModel::gaussian(1.0));
  const auto [fp, fm] = f_functions(sys, 1.0);
  CHECK(fp == doctest::Approx(0.163357425561099).epsilon(1e-12));
  CHECK(fm == doctest::Approx(0.435898436694418).epsilon(1e-12));
  const auto fn = functionals(sys.psf(), 1.0);
  CHECK(loss_rate_term(0.4, fn, Branch::Plus) == doctest::Approx(0.041872894817243 / 0.4).epsilon(1e-12));
}

TEST_CASE("angle-derivative identity matches loss_rate_term") {
  for (double eta : {0.05, 0.1, 0.4, 0.5}) {
    ImagingSystem sys(eta, PsfModel::gaussian(1.3));
    for (double s : {0.05, 0.3, 1.0, 2.5, 6.0}) {
      const auto fn = functionals(sys.psf(), s);
      const auto [dp, dm] = dtheta_ds(sys, fn);
      CHECK(4 * dp * dp == doctest::Approx(eta * loss_rate_term(eta, fn, Branch::Plus)).epsilon(1e-10));
      CHECK(4 * dm * dm == doctest::Approx(eta * loss_rate_term(eta, fn, Branch::Minus)).epsilon(1e-10));

      // numeric derivative of the angles
      const double h = 1e-6;
      const auto a1 = bs_angles(transmissivities(sys, functionals(sys.psf(), s + h)));
      const auto a0 = bs_angles(transmissivities(sys, functionals(sys.psf(), s - h)));
      CHECK((a1.first - a0.first) / (2 * h) == doctest::Approx(dp).epsilon(1e-6));
      CHECK((a1.second - a0.second) / (2 * h) == doctest::Approx(dm).epsilon(1e-6));

      const auto p = bs_parameters(sys, s);
      CHECK(p.dtheta_plus_ds == doctest::Approx(dp).epsilon(1e-12));
      CHECK(p.dtheta_minus_ds == doctest::Approx(dm).epsilon(1e-12));
      const double l2 = 1.3 * 1.3;
      CHECK(p.f_plus == doctest::Approx(l2 * (fn.eps_plus_sq + 4 * dp * dp / eta)).epsilon(1e-10));
      CHECK(p.f_minus == doctest::Approx(l2 * (fn.eps_minus_sq + 4 * dm * dm / eta)).epsilon(1e-10));
    }
  }
}

TEST_CASE("bound limits") {
  ImagingSystem half(0.5, PsfModel::gaussian(1.0));
  CHECK(qfi_upper_bound(half, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(qfi_upper_bound(half, 1e-3, 1.0) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(qfi_upper_bound(half, 10.0, 1.0) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(qfi_upper_bound(half, 1.0, 0.0) == 0.0);

  ImagingSystem sys(0.4, PsfModel::gaussian(1.0));
  const auto [fp, fm] = f_functions(sys, 0.0);
  CHECK(fp == 0.0);
  CHECK(fm == doctest::Approx(0.5 / (1.0)).epsilon(1e-15));
  const auto far = f_functions(sys, 10.0);
  CHECK(std::max(far.first, far.second) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK_THROWS_AS(qfi_upper_bound(sys, 1.0, -1.0), Error);
}

TEST_CASE("bound is linear in N and depends on s / x_R only") {
  for (double eta : {0.1, 0.4, 0.5}) {
    ImagingSystem a(eta, PsfModel::gaussian(1.0));
    ImagingSystem b(eta, PsfModel::gaussian(3.0));
    for (double u : {0.01, 0.2, 0.9, 3.0, 8.0}) {
      const double na = qfi_upper_bound(a, u, 1.0) / (2 * eta);
      const double nb = 9.0 * qfi_upper_bound(b, 3.0 * u, 7.0) / (2 * eta * 7.0);
      CHECK(na == doctest::Approx(nb).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate angles") {
  ImagingSystem half(0.5, PsfModel::gaussian(1.0));
  const auto fn = functionals(half.psf(), 0.0);
  CHECK_THROWS_AS(dtheta_ds(half, fn), Error);
  const auto p = bs_parameters(half, 0.0);
  CHECK(p.eta_plus == 1.0);
  CHECK(p.eta_minus == 0.0);
  CHECK(std::isfinite(p.omega_minus));
}
