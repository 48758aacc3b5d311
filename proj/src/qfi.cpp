#include "rqfi/qfi.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rqfi/error.hpp"

namespace rqfi {

std::string_view to_string(TmsvVariant variant) {
  return variant == TmsvVariant::AsPrinted ? "as_printed" : "squared_derivative";
}

TmsvVariant parse_tmsv_variant(std::string_view name) {
  if (name == "as_printed") return TmsvVariant::AsPrinted;
  if (name == "squared_derivative") return TmsvVariant::SquaredDerivative;
  throw Error(ErrorCode::InvalidArgument, "unknown TMSV variant '" + std::string(name) + "'");
}

double qfi_number_diagonal(const SourceSpec& source, const ImagingSystem& system, double s) {
  double n_plus = 0.0, n_minus = 0.0;
  if (const auto* th = std::get_if<Thermal>(&source)) {
    n_plus = n_minus = th->N;
  } else if (const auto* f = std::get_if<FockPM>(&source)) {
    n_plus = f->n_plus;
    n_minus = f->n_minus;
  } else {
    throw Error(ErrorCode::UnsupportedState, family_name(source) + " is not number-diagonal at the image");
  }
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  return log_derivative_moment(source, system, s) + eta * n_plus * fn.eps_plus_sq + eta * n_minus * fn.eps_minus_sq;
}

double qfi_thermal(double N, const ImagingSystem& system, double s) {
  validate(Thermal{N});
  return qfi_thermal(system.eta(), functionals(system.psf(), s), N);
}

double qfi_thermal_two_term(double N, const ImagingSystem& system, double s) {
  return qfi_number_diagonal(Thermal{N}, system, s);
}

double qfi_thermal_semiclassical_normalized(const ImagingSystem& system, double s) {
  const auto fn = functionals(system.psf(), s);
  const double l2 = system.rayleigh_length() * system.rayleigh_length();
  return l2 * (fn.dk2 - fn.gamma * fn.gamma / (2.0 * (1.0 + fn.delta)) - 0.5 * fn.gamma_sq_over_one_minus_delta);
}

double qfi_fock(int n_plus, int n_minus, const ImagingSystem& system, double s) {
  validate(FockPM{n_plus, n_minus});
  return qfi_fock(system.eta(), functionals(system.psf(), s), double(n_plus), double(n_minus));
}

double qfi_tmsv(double xi, const ImagingSystem& system, double s, TmsvVariant variant) {
  validate(Tmsv{xi});
  const double cm1 = std::cosh(2 * xi) - 1.0;
  if (cm1 == 0.0) return 0.0;
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  const double moment = log_derivative_moment(Tmsv{xi}, system, s);
  const double distortion =
      eta * cm1 * (fn.dk2 - fn.gamma * fn.gamma / (2.0 * (1.0 + fn.delta)) - 0.5 * fn.gamma_sq_over_one_minus_delta);
  const auto p = tmsv_image_params(xi, system, s);
  auto squeeze = [&](double T, double dr) {
    const double coef = 2.0 * (2 * T + 1) * (2 * T + 1) / (2 * T * T + 2 * T + 1);
    return coef * (variant == TmsvVariant::AsPrinted ? dr : dr * dr);
  };
  return moment + distortion + squeeze(p.T_plus, p.dr_plus_ds) + squeeze(p.T_minus, p.dr_minus_ds);
}

double qfi_corr_thermal(double N, double w, const ImagingSystem& system, double s) {
  validate(CorrThermal{N, w});
  return qfi_corr_thermal(system.eta(), functionals(system.psf(), s), N, w);
}

double cramer_rao(double qfi) {
  if (qfi == 0.0) return std::numeric_limits<double>::infinity();
  if (!(qfi > 0.0)) throw Error(ErrorCode::ZeroInformation, "Fisher information must be positive");
  return 1.0 / std::sqrt(qfi);
}

double qfi(const SourceSpec& source, const ImagingSystem& system, double s, TmsvVariant variant) {
  if (const auto* th = std::get_if<Thermal>(&source)) return qfi_thermal(th->N, system, s);
  if (const auto* f = std::get_if<FockPM>(&source)) return qfi_fock(f->n_plus, f->n_minus, system, s);
  if (const auto* t = std::get_if<Tmsv>(&source)) return qfi_tmsv(t->xi, system, s, variant);
  const auto& ct = std::get<CorrThermal>(source);
  return qfi_corr_thermal(ct.N, ct.w, system, s);
}

QfiReport qfi_report(const SourceSpec& source, const ImagingSystem& system, double s, TmsvVariant variant) {
  QfiReport r;
  r.s = s;
  r.source = source;
  r.eta = system.eta();
  r.qfi = qfi(source, system, s, variant);
  const double collected = photons_collected(source, system.eta());
  const double l2 = system.rayleigh_length() * system.rayleigh_length();
  r.qfi_normalized = collected > 0.0 ? l2 * r.qfi / collected : 0.0;
  r.crb = cramer_rao(r.qfi);
  r.bound = qfi_upper_bound(system, s, photons_per_source(source));
  return r;
}

std::string_view qfi_csv_header() { return "s,eta,family,params,qfi,qfi_normalized,crb,bound"; }

std::string qfi_csv_row(const QfiReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << r.s << ',' << r.eta << ',' << family_name(r.source) << ',' << params_string(r.source) << ','
      << r.qfi << ',' << r.qfi_normalized << ',' << r.crb << ',' << r.bound;
  return out.str();
}

}  // namespace rqfi
