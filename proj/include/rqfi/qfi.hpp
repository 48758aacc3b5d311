#pragma once

#include <string>
#include <string_view>

#include "rqfi/beamsplitter.hpp"
#include "rqfi/sources.hpp"

namespace rqfi {

/// 2 eta N [dk2 - eta N (1 + eta N) gamma^2 / ((1 + eta N)^2 - delta^2 eta^2 N^2)], factored so s -> 0 is safe.
template <typename Scalar>
Scalar qfi_thermal(Scalar eta, const OverlapFunctionals<Scalar>& fn, Scalar N) {
  const Scalar m = eta * N;
  const Scalar den = (Scalar(1) + m * fn.one_minus_delta) * (Scalar(1) + m * (Scalar(1) + fn.delta));
  return Scalar(2) * m * (fn.dk2 - m * (Scalar(1) + m) * fn.gamma * fn.gamma / den);
}

template <typename Scalar>
Scalar qfi_corr_thermal(Scalar eta, const OverlapFunctionals<Scalar>& fn, Scalar N, Scalar w) {
  const Scalar mp = eta * (Scalar(1) + w) * N;
  const Scalar mm = eta * (Scalar(1) - w) * N;
  const Scalar g2 = fn.gamma * fn.gamma;
  return mp * (fn.dk2 - fn.beta - mp * g2 / (Scalar(1) + (Scalar(1) + fn.delta) * mp)) +
         mm * (fn.dk2 + fn.beta - mm * g2 / (Scalar(1) + fn.one_minus_delta * mm));
}

/// eta (N+ f+ + N- f-) / x_R^2, with f in Rayleigh units.
template <typename Scalar>
Scalar qfi_fock(Scalar eta, const OverlapFunctionals<Scalar>& fn, Scalar n_plus, Scalar n_minus) {
  return eta * (n_plus * (fn.eps_plus_sq + loss_rate_term(eta, fn, Branch::Plus)) +
                n_minus * (fn.eps_minus_sq + loss_rate_term(eta, fn, Branch::Minus)));
}

/// How the residual-squeezing terms of the TMSV formula enter: linearly in dr/ds as
/// printed, or through (dr/ds)^2.
enum class TmsvVariant { AsPrinted, SquaredDerivative };

/// Variant that agrees with the SLD oracle; see `adjudicate_tmsv`.
inline constexpr TmsvVariant kAdjudicatedTmsvVariant = TmsvVariant::SquaredDerivative;

std::string_view to_string(TmsvVariant variant);
TmsvVariant parse_tmsv_variant(std::string_view name);

/// <(d_s log p)^2> + eta N+ eps+^2 + eta N- eps-^2. Thermal and FockPM only.
double qfi_number_diagonal(const SourceSpec& source, const ImagingSystem& system, double s);

double qfi_thermal(double N, const ImagingSystem& system, double s);
/// Thermal QFI assembled as log-derivative moment plus mode-distortion terms.
double qfi_thermal_two_term(double N, const ImagingSystem& system, double s);
/// Limit of x_R^2 QFI / (2 eta N) for eta N -> infinity: dk2 - gamma^2/(2(1+delta)) - gamma^2/(2(1-delta)).
double qfi_thermal_semiclassical_normalized(const ImagingSystem& system, double s);

double qfi_fock(int n_plus, int n_minus, const ImagingSystem& system, double s);
double qfi_tmsv(double xi, const ImagingSystem& system, double s, TmsvVariant variant = kAdjudicatedTmsvVariant);
double qfi_corr_thermal(double N, double w, const ImagingSystem& system, double s);

/// 1/sqrt(qfi); +infinity when qfi == 0. Throws ZeroInformation for negative or NaN input.
double cramer_rao(double qfi);

/// Dispatch on the source family.
double qfi(const SourceSpec& source, const ImagingSystem& system, double s,
           TmsvVariant variant = kAdjudicatedTmsvVariant);

struct QfiReport {
  double s = 0.0;
  SourceSpec source;
  double eta = 0.0;
  double qfi = 0.0;
  double qfi_normalized = 0.0;
  double crb = 0.0;
  double bound = 0.0;
};

QfiReport qfi_report(const SourceSpec& source, const ImagingSystem& system, double s,
                     TmsvVariant variant = kAdjudicatedTmsvVariant);

std::string_view qfi_csv_header();
std::string qfi_csv_row(const QfiReport& report);

}  // namespace rqfi
