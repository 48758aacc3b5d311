#include "rqfi/beamsplitter.hpp"

#include <cmath>
#include <sstream>

#include "rqfi/error.hpp"

namespace rqfi {

ImagingSystem::ImagingSystem(double eta, PsfModel psf) : eta_(eta), psf_(std::move(psf)) {
  if (!(eta > 0.0) || !(eta <= 0.5)) {
    std::ostringstream msg;
    msg << "eta = " << eta << " outside (0, 1/2]; the beam-splitter model needs eta <= 1/2";
    throw Error(ErrorCode::EtaOutOfRange, msg.str());
  }
}

std::pair<double, double> transmissivities(const ImagingSystem& system, const OverlapFunctionals<double>& fn) {
  if (!(fn.delta > 0.0) || fn.delta > 1.0)
    throw Error(ErrorCode::InvalidArgument, "overlap delta must lie in (0, 1]");
  return transmissivities(system.eta(), fn);
}

std::pair<double, double> bs_angles(std::pair<double, double> eta_pm) {
  auto angle = [](double t) {
    if (!(t >= 0.0) || t > 1.0) throw Error(ErrorCode::InvalidArgument, "transmissivity outside [0, 1]");
    return std::acos(std::sqrt(t));
  };
  return {angle(eta_pm.first), angle(eta_pm.second)};
}

std::pair<double, double> dtheta_ds(const ImagingSystem& system, const OverlapFunctionals<double>& fn) {
  const double eta = system.eta();
  const auto [tp, tm] = transmissivities(system, fn);
  const double comp_plus = (1.0 - 2.0 * eta) + eta * fn.one_minus_delta;  // 1 - eta_plus
  const double comp_minus = 1.0 - tm;
  if (tp <= 0.0 || comp_plus <= 0.0 || tm <= 0.0 || comp_minus <= 0.0)
    throw Error(ErrorCode::DegenerateAngle, "a transmissivity is 0 or 1; the angle derivative is singular");
  return {-eta * fn.gamma / (2.0 * std::sqrt(tp * comp_plus)), eta * fn.gamma / (2.0 * std::sqrt(tm * comp_minus))};
}

std::pair<double, double> effective_frequencies(const ImagingSystem& system, const OverlapFunctionals<double>& fn) {
  const double eta = system.eta();
  const double rate_plus = eta * loss_rate_term(eta, fn, Branch::Plus) / 4.0;
  const double rate_minus = eta * loss_rate_term(eta, fn, Branch::Minus) / 4.0;
  const double dist_plus = fn.eps_plus_sq / (4.0 * (1.0 + fn.delta));
  // eps_-^2 / (1 - delta) is 0/0 at s = 0; eps_-^2 vanishes faster, so the limit is 0.
  const double dist_minus = fn.one_minus_delta > 0.0 ? fn.eps_minus_sq / (4.0 * fn.one_minus_delta) : 0.0;
  return {std::sqrt(rate_plus + dist_plus), std::sqrt(rate_minus + dist_minus)};
}

std::pair<double, double> f_functions(const ImagingSystem& system, double s) {
  return f_functions(system.eta(), functionals(system.psf(), s), system.rayleigh_length());
}

double qfi_upper_bound(const ImagingSystem& system, double s, double photons_per_source) {
  if (!(photons_per_source >= 0.0)) throw Error(ErrorCode::InvalidArgument, "photon number must be >= 0");
  return qfi_upper_bound(system.eta(), functionals(system.psf(), s), photons_per_source);
}

BsParameters bs_parameters(const ImagingSystem& system, double s) {
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  BsParameters p;
  p.s = s;
  std::tie(p.eta_plus, p.eta_minus) = transmissivities(system, fn);
  std::tie(p.theta_plus, p.theta_minus) = bs_angles({p.eta_plus, p.eta_minus});
  const double sign = fn.gamma > 0.0 ? 1.0 : (fn.gamma < 0.0 ? -1.0 : 0.0);
  p.dtheta_plus_ds = -sign * 0.5 * std::sqrt(eta * loss_rate_term(eta, fn, Branch::Plus));
  p.dtheta_minus_ds = sign * 0.5 * std::sqrt(eta * loss_rate_term(eta, fn, Branch::Minus));
  std::tie(p.omega_plus, p.omega_minus) = effective_frequencies(system, fn);
  std::tie(p.f_plus, p.f_minus) = f_functions(eta, fn, system.rayleigh_length());
  return p;
}

}  // namespace rqfi
