#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace rqfi {

/// Integration domain [-half_width, half_width] (Rayleigh units) and node count.
/// A zero half_width selects s/2 + 8 per evaluation.
struct QuadratureSpec {
  double half_width = 0.0;
  int nodes = 512;
};

/// Overlap functionals of a PSF pair at separation s.
///
/// Units follow the inputs: with s in Rayleigh units everything is
/// dimensionless; with physical s, gamma is 1/length and beta, dk2, eps are 1/length^2.
/// `one_minus_delta` and `gamma_sq_over_one_minus_delta` are carried separately
/// because both are needed accurately where delta -> 1.
template <typename Scalar>
struct OverlapFunctionals {
  Scalar s{};
  Scalar delta{};
  Scalar gamma{};
  Scalar beta{};
  Scalar dk2{};
  Scalar eps_plus_sq{};
  Scalar eps_minus_sq{};
  Scalar one_minus_delta{};
  Scalar gamma_sq_over_one_minus_delta{};

  /// Expresses Rayleigh-unit functionals in a length unit where x_R = rayleigh_length.
  OverlapFunctionals scaled(Scalar rayleigh_length) const {
    const Scalar l2 = rayleigh_length * rayleigh_length;
    OverlapFunctionals out = *this;
    out.s = s * rayleigh_length;
    out.gamma = gamma / rayleigh_length;
    out.beta = beta / l2;
    out.dk2 = dk2 / l2;
    out.eps_plus_sq = eps_plus_sq / l2;
    out.eps_minus_sq = eps_minus_sq / l2;
    out.gamma_sq_over_one_minus_delta = gamma_sq_over_one_minus_delta / l2;
    return out;
  }
};

/// Clamp tolerance for eps^2 relative to dk2, and the hard failure threshold.
inline constexpr double kEpsClampTolerance = 1e-9;
inline constexpr double kEpsFailTolerance = 1e-6;

/// Closed-form functionals of the unit-norm Gaussian PSF, psi(x) ~ exp(-x^2/4),
/// at separation `s` in Rayleigh units.
template <typename Scalar>
OverlapFunctionals<Scalar> gaussian_functionals(Scalar s) {
  using std::exp;
  using std::expm1;
  const Scalar u = s * s / Scalar(8);
  OverlapFunctionals<Scalar> fn;
  fn.s = s;
  fn.delta = exp(-u);
  fn.one_minus_delta = -expm1(-u);
  fn.gamma = -(s / Scalar(4)) * fn.delta;
  fn.beta = fn.delta * (Scalar(1) - s * s / Scalar(4)) / Scalar(4);
  fn.dk2 = Scalar(1) / Scalar(4);
  // gamma^2 / (1 - delta) = (u/2) delta^2 / (1 - delta) -> 1/2 as s -> 0
  fn.gamma_sq_over_one_minus_delta =
      u == Scalar(0) ? Scalar(1) / Scalar(2) : (u / Scalar(2)) * fn.delta * fn.delta / fn.one_minus_delta;
  fn.eps_plus_sq = fn.dk2 - fn.beta - fn.gamma * fn.gamma / (Scalar(1) + fn.delta);
  fn.eps_minus_sq = fn.dk2 + fn.beta - fn.gamma_sq_over_one_minus_delta;
  const Scalar floor = -Scalar(kEpsClampTolerance) * fn.dk2;
  if (fn.eps_plus_sq < Scalar(0) && fn.eps_plus_sq >= floor) fn.eps_plus_sq = Scalar(0);
  if (fn.eps_minus_sq < Scalar(0) && fn.eps_minus_sq >= floor) fn.eps_minus_sq = Scalar(0);
  return fn;
}

enum class PsfKind { GaussianClosedForm, NumericSampled };

/// Real amplitude point-spread function psi with unit L2 norm once normalized.
///
/// Sampled PSFs live on a uniform grid. Between samples the amplitude and its
/// derivative are reconstructed by cubic Hermite interpolation from
/// fourth-order finite-difference derivatives; outside the grid psi is zero.
class PsfModel {
 public:
  static PsfModel gaussian(double rayleigh_length);

  /// Raw sampled PSF; call normalize_psf before computing functionals.
  /// A non-positive `rayleigh_length` selects the RMS width of |psi|^2.
  static PsfModel sampled(std::vector<double> x, std::vector<double> amplitude,
                          double rayleigh_length = 0.0, QuadratureSpec quadrature = {});

  PsfKind kind() const { return kind_; }
  double rayleigh_length() const { return rayleigh_length_; }
  const QuadratureSpec& quadrature() const { return quadrature_; }
  void set_quadrature(QuadratureSpec q) { quadrature_ = q; }

  const std::vector<double>& sample_x() const { return x_; }
  const std::vector<double>& sample_amplitude() const { return amp_; }

  // Evaluation in Rayleigh units: the argument is x / x_R and the result is
  // the amplitude of the PSF rescaled to unit width.
  double value(double x) const;
  double derivative(double x) const;

  /// Squared L2 norm, by quadrature over the sample range (exactly 1 for Gaussian).
  double norm_sq() const { return norm_sq_; }

  /// Half-extent of the support in Rayleigh units (infinite for Gaussian).
  double support_half_width() const;

 private:
  friend PsfModel normalize_psf(const PsfModel& raw);
  void rebuild();

  PsfKind kind_ = PsfKind::GaussianClosedForm;
  double rayleigh_length_ = 1.0;
  QuadratureSpec quadrature_{};
  std::vector<double> x_;
  std::vector<double> amp_;
  // Rayleigh-unit grid and reconstruction data.
  double u0_ = 0.0;
  double du_ = 0.0;
  std::vector<double> f_;
  std::vector<double> df_;
  std::vector<double> d2f_;
  double norm_sq_ = 1.0;
};

/// Scales a sampled PSF to unit L2 norm. Gaussian PSFs are returned unchanged.
PsfModel normalize_psf(const PsfModel& raw);

/// Reads a two-column `x,amplitude` CSV (header optional) on a uniform grid.
PsfModel load_psf_csv(const std::string& path, double rayleigh_length = 0.0);

// Functionals in physical units; s is a physical separation >= 0.
double overlap_delta(const PsfModel& psf, double s);
double overlap_gamma(const PsfModel& psf, double s);
double overlap_beta(const PsfModel& psf, double s);
double momentum_variance(const PsfModel& psf);
OverlapFunctionals<double> functionals(const PsfModel& psf, double s);

/// Evaluates the defining integrals by composite Gauss-Legendre quadrature
/// regardless of PSF kind. gamma comes from a central difference of delta.
/// Result in Rayleigh units; `s` is in Rayleigh units.
OverlapFunctionals<double> functionals_by_quadrature(const PsfModel& psf, double s);

}  // namespace rqfi
