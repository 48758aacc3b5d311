#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "rqfi/psf.hpp"

namespace rqfi {

/// Symmetric (a+) or antisymmetric (a-) image mode.
enum class Branch { Plus, Minus };

/// Attenuation eta in (0, 1/2] and a PSF; the two-beam-splitter picture only holds for eta <= 1/2.
class ImagingSystem {
 public:
  ImagingSystem(double eta, PsfModel psf);

  double eta() const { return eta_; }
  const PsfModel& psf() const { return psf_; }
  double rayleigh_length() const { return psf_.rayleigh_length(); }

 private:
  double eta_;
  PsfModel psf_;
};

/// (1 +/- delta) * eta, with the minus branch taken from 1 - delta directly.
template <typename Scalar>
std::pair<Scalar, Scalar> transmissivities(Scalar eta, const OverlapFunctionals<Scalar>& fn) {
  return {(Scalar(1) + fn.delta) * eta, eta * fn.one_minus_delta};
}

/// gamma^2 / ((1 +/- delta)(1 - (1 +/- delta) eta)), i.e. 4 (dtheta/ds)^2 / eta.
///
/// Finite at s = 0: the plus branch vanishes unless eta = 1/2, where it tends to
/// lim gamma^2/(1-delta) / (2 eta); the minus branch tends to lim gamma^2/(1-delta).
template <typename Scalar>
Scalar loss_rate_term(Scalar eta, const OverlapFunctionals<Scalar>& fn, Branch branch) {
  if (branch == Branch::Minus)
    return fn.gamma_sq_over_one_minus_delta / (Scalar(1) - eta * fn.one_minus_delta);
  const Scalar one_plus = Scalar(1) + fn.delta;
  const Scalar slack = Scalar(1) - Scalar(2) * eta;  // 1 - (1+delta) eta = slack + eta (1 - delta)
  if (slack == Scalar(0)) return fn.gamma_sq_over_one_minus_delta / (one_plus * eta);
  return fn.gamma * fn.gamma / (one_plus * (slack + eta * fn.one_minus_delta));
}

/// f_+/- in units of the Rayleigh length: x_R^2 [eps^2 + loss_rate_term].
template <typename Scalar>
std::pair<Scalar, Scalar> f_functions(Scalar eta, const OverlapFunctionals<Scalar>& fn, Scalar rayleigh_length) {
  const Scalar l2 = rayleigh_length * rayleigh_length;
  return {l2 * (fn.eps_plus_sq + loss_rate_term(eta, fn, Branch::Plus)),
          l2 * (fn.eps_minus_sq + loss_rate_term(eta, fn, Branch::Minus))};
}

/// Quantum Fisher information ceiling for 2N mean source photons: 2 eta N max{...}.
template <typename Scalar>
Scalar qfi_upper_bound(Scalar eta, const OverlapFunctionals<Scalar>& fn, Scalar photons_per_source) {
  using std::max;
  const Scalar plus = fn.eps_plus_sq + loss_rate_term(eta, fn, Branch::Plus);
  const Scalar minus = fn.eps_minus_sq + loss_rate_term(eta, fn, Branch::Minus);
  return Scalar(2) * eta * photons_per_source * max(plus, minus);
}

struct BsParameters {
  double s = 0.0;
  double eta_plus = 0.0;
  double eta_minus = 0.0;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  double dtheta_plus_ds = 0.0;
  double dtheta_minus_ds = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;
};

std::pair<double, double> transmissivities(const ImagingSystem& system, const OverlapFunctionals<double>& fn);

/// arccos(sqrt(eta_pm)) for each branch.
std::pair<double, double> bs_angles(std::pair<double, double> eta_pm);

/// dtheta_pm/ds = -/+ eta gamma / (2 sqrt(eta_pm (1 - eta_pm))), by the chain rule.
/// Throws DegenerateAngle when either transmissivity is 0 or 1.
std::pair<double, double> dtheta_ds(const ImagingSystem& system, const OverlapFunctionals<double>& fn);

/// omega_pm = sqrt((dtheta_pm/ds)^2 + eps_pm^2 / (4 (1 +/- delta))).
std::pair<double, double> effective_frequencies(const ImagingSystem& system, const OverlapFunctionals<double>& fn);

std::pair<double, double> f_functions(const ImagingSystem& system, double s);

/// Upper bound on the QFI for sources emitting `photons_per_source` mean photons each.
double qfi_upper_bound(const ImagingSystem& system, double s, double photons_per_source);

/// All beam-splitter quantities at one separation. Angle derivatives use the
/// squared-rate identity so the s -> 0 limit stays finite.
BsParameters bs_parameters(const ImagingSystem& system, double s);

}  // namespace rqfi
