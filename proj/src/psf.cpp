#include "rqfi/psf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rqfi/error.hpp"
#include "rqfi/quadrature.hpp"

namespace rqfi {

namespace {

constexpr double kTailWidth = 8.0;
constexpr double kDeltaStep = 1e-4;

// Cubic Hermite interpolation on [0, 1] with end values and slopes (already scaled by h).
double hermite(double t, double p0, double m0, double p1, double m1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

// Fourth-order finite differences on a uniform grid; one-sided at the ends.
std::vector<double> first_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h);
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) / (12 * h);
  return d;
}

std::vector<double> second_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  const double h2 = h * h;
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) / (12 * h2);
  d[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) / (12 * h2);
  d[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) / (12 * h2);
  d[n - 1] = (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] - 156 * f[n - 4] + 61 * f[n - 5] - 10 * f[n - 6]) /
             (12 * h2);
  d[n - 2] = (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] + 14 * f[n - 4] - 6 * f[n - 5] + f[n - 6]) / (12 * h2);
  return d;
}

double gaussian_value(double u) {
  static const double norm = std::pow(2.0 * std::numbers::pi, -0.25);
  return norm * std::exp(-u * u / 4.0);
}

void require_nonnegative(double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw Error(ErrorCode::InvalidArgument, "separation must be finite and >= 0");
}

double domain_half_width(const PsfModel& psf, double s) {
  const double needed = s / 2 + kTailWidth;
  const double w = psf.quadrature().half_width;
  if (w == 0.0) return needed;
  if (w < needed) {
    std::ostringstream msg;
    msg << "half_width " << w << " < s/2 + 8 x_R = " << needed;
    throw Error(ErrorCode::QuadratureDomainTooSmall, msg.str());
  }
  return w;
}

CompositeRule rule_for(const PsfModel& psf, double half_width) {
  const int requested = std::max(psf.quadrature().nodes, 64);
  if (psf.kind() == PsfKind::GaussianClosedForm) return CompositeRule(-half_width, half_width, requested, 16);
  // Sampled PSFs are piecewise polynomial: keep panels no wider than the sample spacing.
  const double du = (psf.sample_x()[1] - psf.sample_x()[0]) / psf.rayleigh_length();
  const int panels = static_cast<int>(std::ceil(2 * half_width / du));
  return CompositeRule(-half_width, half_width, std::max(requested, 4 * panels), 4);
}

double delta_quadrature(const PsfModel& psf, const CompositeRule& rule, double s) {
  return rule.integrate([&](double x) { return psf.value(x + s / 2) * psf.value(x - s / 2); });
}

}  // namespace

PsfModel PsfModel::gaussian(double rayleigh_length) {
  if (!(rayleigh_length > 0.0) || !std::isfinite(rayleigh_length))
    throw Error(ErrorCode::InvalidArgument, "Rayleigh length must be finite and > 0");
  PsfModel psf;
  psf.kind_ = PsfKind::GaussianClosedForm;
  psf.rayleigh_length_ = rayleigh_length;
  return psf;
}

PsfModel PsfModel::sampled(std::vector<double> x, std::vector<double> amplitude, double rayleigh_length,
                           QuadratureSpec quadrature) {
  if (x.size() != amplitude.size()) throw Error(ErrorCode::InvalidArgument, "x and amplitude sizes differ");
  if (x.size() < 8) throw Error(ErrorCode::InvalidArgument, "a sampled PSF needs at least 8 samples");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(amplitude[i]))
      throw Error(ErrorCode::NonFinite, "sample " + std::to_string(i) + " is not finite");
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample grid must be increasing");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-6 * h)
      throw Error(ErrorCode::InvalidArgument, "sample grid must be uniform");

  PsfModel psf;
  psf.kind_ = PsfKind::NumericSampled;
  psf.quadrature_ = quadrature;
  psf.x_ = std::move(x);
  psf.amp_ = std::move(amplitude);
  psf.rayleigh_length_ = 1.0;
  psf.rebuild();
  if (rayleigh_length > 0.0) {
    psf.rayleigh_length_ = rayleigh_length;
  } else if (psf.norm_sq_ > 0.0) {
    // RMS width of |psi|^2 about its centroid.
    const CompositeRule rule(psf.u0_, psf.u0_ + psf.du_ * static_cast<double>(psf.f_.size() - 1),
                             4 * static_cast<int>(psf.f_.size()), 4);
    const double m0 = psf.norm_sq_;
    const double m1 = rule.integrate([&](double u) { return u * std::pow(psf.value(u), 2); }) / m0;
    const double m2 = rule.integrate([&](double u) { return u * u * std::pow(psf.value(u), 2); }) / m0;
    psf.rayleigh_length_ = std::sqrt(std::max(m2 - m1 * m1, 0.0));
    if (!(psf.rayleigh_length_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "PSF has zero width");
  }
  psf.rebuild();
  return psf;
}

void PsfModel::rebuild() {
  if (kind_ != PsfKind::NumericSampled) return;
  const std::size_t n = x_.size();
  u0_ = x_.front() / rayleigh_length_;
  du_ = (x_.back() - x_.front()) / static_cast<double>(n - 1) / rayleigh_length_;
  const double scale = std::sqrt(rayleigh_length_);
  f_.resize(n);
  for (std::size_t i = 0; i < n; ++i) f_[i] = amp_[i] * scale;
  df_ = first_derivative(f_, du_);
  d2f_ = second_derivative(f_, du_);
  const CompositeRule rule(u0_, u0_ + du_ * static_cast<double>(n - 1), 4 * static_cast<int>(n), 4);
  norm_sq_ = rule.integrate([&](double u) { return std::pow(value(u), 2); });
}

double PsfModel::value(double u) const {
  if (kind_ == PsfKind::GaussianClosedForm) return gaussian_value(u);
  const double t = (u - u0_) / du_;
  if (t < 0.0 || t > static_cast<double>(f_.size() - 1)) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(t), f_.size() - 2);
  return hermite(t - static_cast<double>(i), f_[i], df_[i] * du_, f_[i + 1], df_[i + 1] * du_);
}

double PsfModel::derivative(double u) const {
  if (kind_ == PsfKind::GaussianClosedForm) return -u / 2.0 * gaussian_value(u);
  const double t = (u - u0_) / du_;
  if (t < 0.0 || t > static_cast<double>(f_.size() - 1)) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(t), f_.size() - 2);
  return hermite(t - static_cast<double>(i), df_[i], d2f_[i] * du_, df_[i + 1], d2f_[i + 1] * du_);
}

double PsfModel::support_half_width() const {
  if (kind_ == PsfKind::GaussianClosedForm) return std::numeric_limits<double>::infinity();
  return std::max(std::abs(u0_), std::abs(u0_ + du_ * static_cast<double>(f_.size() - 1)));
}

PsfModel normalize_psf(const PsfModel& raw) {
  if (raw.kind() == PsfKind::GaussianClosedForm) return raw;
  for (double a : raw.amp_)
    if (!std::isfinite(a)) throw Error(ErrorCode::NonFinite, "PSF sample is not finite");
  if (std::all_of(raw.amp_.begin(), raw.amp_.end(), [](double a) { return a == 0.0; }) || !(raw.norm_sq_ > 0.0))
    throw Error(ErrorCode::ZeroNorm, "sampled amplitude is identically zero");
  PsfModel out = raw;
  const double k = 1.0 / std::sqrt(raw.norm_sq_);
  for (double& a : out.amp_) a *= k;
  out.rebuild();
  return out;
}

PsfModel load_psf_csv(const std::string& path, double rayleigh_length) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open PSF file '" + path + "'");
  std::vector<double> x;
  std::vector<double> a;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double xi = 0.0;
    double ai = 0.0;
    if (!(row >> xi >> ai)) {
      if (x.empty()) continue;  // header
      throw Error(ErrorCode::InvalidArgument, path + ":" + std::to_string(lineno) + ": expected `x,amplitude`");
    }
    x.push_back(xi);
    a.push_back(ai);
  }
  return normalize_psf(PsfModel::sampled(std::move(x), std::move(a), rayleigh_length));
}

OverlapFunctionals<double> functionals_by_quadrature(const PsfModel& psf, double s) {
  require_nonnegative(s);
  const double w = domain_half_width(psf, s);
  const CompositeRule rule = rule_for(psf, w);

  OverlapFunctionals<double> fn;
  fn.s = s;
  fn.delta = delta_quadrature(psf, rule, s);
  fn.one_minus_delta =
      0.5 * rule.integrate([&](double x) { return std::pow(psf.value(x + s / 2) - psf.value(x - s / 2), 2); });
  fn.gamma = (delta_quadrature(psf, rule, s + kDeltaStep) - delta_quadrature(psf, rule, s - kDeltaStep)) /
             (2 * kDeltaStep);
  if (s == 0.0) fn.gamma = 0.0;
  fn.beta = rule.integrate([&](double x) { return psf.derivative(x + s / 2) * psf.derivative(x - s / 2); });
  fn.dk2 = rule.integrate([&](double x) { return std::pow(psf.derivative(x), 2); });
  fn.gamma_sq_over_one_minus_delta =
      fn.one_minus_delta > 0.0 ? fn.gamma * fn.gamma / fn.one_minus_delta : 2.0 * fn.dk2;
  fn.eps_plus_sq = fn.dk2 - fn.beta - fn.gamma * fn.gamma / (1.0 + fn.delta);
  fn.eps_minus_sq = fn.dk2 + fn.beta - fn.gamma_sq_over_one_minus_delta;
  return fn;
}

namespace {

OverlapFunctionals<double> rayleigh_functionals(const PsfModel& psf, double sigma) {
  require_nonnegative(sigma);
  OverlapFunctionals<double> fn;
  if (psf.kind() == PsfKind::GaussianClosedForm) {
    domain_half_width(psf, sigma);
    fn = gaussian_functionals(sigma);
  } else {
    if (std::abs(psf.norm_sq() - 1.0) > 1e-8)
      throw Error(ErrorCode::InvalidArgument, "sampled PSF is not normalized; call normalize_psf");
    fn = functionals_by_quadrature(psf, sigma);
  }
  for (double* eps : {&fn.eps_plus_sq, &fn.eps_minus_sq}) {
    if (*eps < -kEpsFailTolerance * fn.dk2) {
      std::ostringstream msg;
      msg << "eps^2 = " << *eps << " at s/x_R = " << sigma << " (dk2 = " << fn.dk2 << ")";
      throw Error(ErrorCode::EpsilonNegative, msg.str());
    }
    if (*eps < 0.0) *eps = 0.0;
  }
  return fn;
}

}  // namespace

OverlapFunctionals<double> functionals(const PsfModel& psf, double s) {
  const double xr = psf.rayleigh_length();
  return rayleigh_functionals(psf, s / xr).scaled(xr);
}

double overlap_delta(const PsfModel& psf, double s) {
  require_nonnegative(s);
  const double sigma = s / psf.rayleigh_length();
  const double w = domain_half_width(psf, sigma);
  if (psf.kind() == PsfKind::GaussianClosedForm) return std::exp(-sigma * sigma / 8);
  return delta_quadrature(psf, rule_for(psf, w), sigma);
}

double overlap_gamma(const PsfModel& psf, double s) { return functionals(psf, s).gamma; }

double overlap_beta(const PsfModel& psf, double s) { return functionals(psf, s).beta; }

double momentum_variance(const PsfModel& psf) {
  const double xr = psf.rayleigh_length();
  if (psf.kind() == PsfKind::GaussianClosedForm) return 0.25 / (xr * xr);
  const double w = domain_half_width(psf, 0.0);
  const double dk2 = rule_for(psf, w).integrate([&](double x) { return std::pow(psf.derivative(x), 2); });
  if (!std::isfinite(dk2)) throw Error(ErrorCode::NonFinite, "momentum variance overflowed");
  return dk2 / (xr * xr);
}

}  // namespace rqfi
