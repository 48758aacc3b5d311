#include "rqfi/sources.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "rqfi/error.hpp"

namespace rqfi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Transmissivity of one branch, its s-derivative and (dt/ds)^2 / t (finite at t -> 0).
struct BranchChannel {
  double t;
  double dt_ds;
  double rate;
};

BranchChannel branch_channel(double eta, const OverlapFunctionals<double>& fn, Branch b) {
  if (b == Branch::Plus) return {(1.0 + fn.delta) * eta, eta * fn.gamma, eta * fn.gamma * fn.gamma / (1.0 + fn.delta)};
  return {eta * fn.one_minus_delta, -eta * fn.gamma, eta * fn.gamma_sq_over_one_minus_delta};
}

Eigen::VectorXd geometric_law(double mean, int n_max) {
  Eigen::VectorXd p(n_max + 1);
  const double q = mean / (mean + 1.0);
  double v = 1.0 / (mean + 1.0);
  for (int n = 0; n <= n_max; ++n) {
    p[n] = v;
    v *= q;
  }
  return p;
}

Eigen::VectorXd binomial_law(int trials, double t, int n_max) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_max + 1);
  for (int n = 0; n <= std::min(trials, n_max); ++n) {
    const double log_c = std::lgamma(trials + 1.0) - std::lgamma(n + 1.0) - std::lgamma(trials - n + 1.0);
    const double a = n == 0 ? 0.0 : n * std::log(t);
    const double b = trials - n == 0 ? 0.0 : (trials - n) * std::log1p(-t);
    p[n] = std::exp(log_c + a + b);
  }
  return p;
}

int geometric_cutoff(double mean, const CutoffPolicy& policy) {
  if (mean <= 0.0) return 0;
  const double q = mean / (mean + 1.0);
  int n_max = static_cast<int>(std::ceil(10.0 * (mean + 1.0)));
  while (std::pow(q, n_max + 1) >= policy.tail / 4.0) {
    n_max *= 2;
    if (n_max > policy.max_cutoff) {
      std::ostringstream msg;
      msg << "photon cutoff would exceed " << policy.max_cutoff << " for mean " << mean;
      throw Error(ErrorCode::CutoffOverflow, msg.str());
    }
  }
  return n_max;
}

// Branch means and laws; `cutoffs` < 0 selects them from the policy.
struct Marginals {
  Eigen::VectorXd plus;
  Eigen::VectorXd minus;
  DistributionBasis basis;
};

Marginals marginals(const SourceSpec& source, const ImagingSystem& system, double s, const CutoffPolicy& policy,
                    int cut_plus, int cut_minus) {
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  const auto cp = branch_channel(eta, fn, Branch::Plus);
  const auto cm = branch_channel(eta, fn, Branch::Minus);
  auto geometric = [&](double mp, double mm) {
    const int np = cut_plus >= 0 ? cut_plus : geometric_cutoff(mp, policy);
    const int nm = cut_minus >= 0 ? cut_minus : geometric_cutoff(mm, policy);
    return std::pair{geometric_law(mp, np), geometric_law(mm, nm)};
  };
  return std::visit(
      overloaded{
          [&](const Thermal& th) {
            auto [p, m] = geometric(cp.t * th.N, cm.t * th.N);
            return Marginals{p, m, DistributionBasis::Number};
          },
          [&](const CorrThermal& ct) {
            auto [p, m] = geometric(cp.t * (1 + ct.w) * ct.N, cm.t * (1 - ct.w) * ct.N);
            return Marginals{p, m, DistributionBasis::Number};
          },
          [&](const FockPM& f) {
            const int np = cut_plus >= 0 ? cut_plus : f.n_plus;
            const int nm = cut_minus >= 0 ? cut_minus : f.n_minus;
            return Marginals{binomial_law(f.n_plus, cp.t, np), binomial_law(f.n_minus, cm.t, nm),
                             DistributionBasis::Number};
          },
          [&](const Tmsv& t) {
            const auto bp = squeezed_thermal_branch(t.xi, cp.t);
            const auto bm = squeezed_thermal_branch(t.xi, cm.t);
            auto [p, m] = geometric(bp.T, bm.T);
            return Marginals{p, m, DistributionBasis::SqueezedEigen};
          },
      },
      source);
}

}  // namespace

void validate(const SourceSpec& source) {
  std::visit(overloaded{
                 [](const Thermal& th) {
                   if (!(th.N >= 0.0) || !std::isfinite(th.N))
                     throw Error(ErrorCode::InvalidArgument, "thermal N must be finite and >= 0");
                 },
                 [](const FockPM& f) {
                   if (f.n_plus < 0 || f.n_minus < 0)
                     throw Error(ErrorCode::InvalidArgument, "Fock photon numbers must be >= 0");
                 },
                 [](const Tmsv& t) {
                   if (!(t.xi >= 0.0) || !std::isfinite(t.xi))
                     throw Error(ErrorCode::InvalidArgument, "squeezing xi must be finite and >= 0");
                 },
                 [](const CorrThermal& ct) {
                   if (!(ct.N >= 0.0) || !std::isfinite(ct.N))
                     throw Error(ErrorCode::InvalidArgument, "correlated thermal N must be finite and >= 0");
                   if (!(std::abs(ct.w) <= 1.0))
                     throw Error(ErrorCode::UnphysicalState, "correlation w must satisfy |w| <= 1");
                 },
             },
             source);
}

std::string family_name(const SourceSpec& source) {
  return std::visit(overloaded{
                        [](const Thermal&) { return std::string("thermal"); },
                        [](const FockPM&) { return std::string("fock"); },
                        [](const Tmsv&) { return std::string("tmsv"); },
                        [](const CorrThermal&) { return std::string("corr-thermal"); },
                    },
                    source);
}

std::string params_string(const SourceSpec& source) {
  std::ostringstream out;
  out.precision(12);
  std::visit(overloaded{
                 [&](const Thermal& th) { out << "N=" << th.N; },
                 [&](const FockPM& f) { out << "Nplus=" << f.n_plus << ";Nminus=" << f.n_minus; },
                 [&](const Tmsv& t) { out << "xi=" << t.xi; },
                 [&](const CorrThermal& ct) { out << "N=" << ct.N << ";w=" << ct.w; },
             },
             source);
  return out.str();
}

std::pair<double, double> mode_photons(const SourceSpec& source) {
  return std::visit(overloaded{
                        [](const Thermal& th) { return std::pair{th.N, th.N}; },
                        [](const FockPM& f) { return std::pair{double(f.n_plus), double(f.n_minus)}; },
                        [](const Tmsv& t) {
                          const double n = std::pow(std::sinh(t.xi), 2);
                          return std::pair{n, n};
                        },
                        [](const CorrThermal& ct) { return std::pair{(1 + ct.w) * ct.N, (1 - ct.w) * ct.N}; },
                    },
                    source);
}

double photons_per_source(const SourceSpec& source) {
  const auto [np, nm] = mode_photons(source);
  return 0.5 * (np + nm);
}

double photons_collected(const SourceSpec& source, double eta) {
  const auto [np, nm] = mode_photons(source);
  return eta * (np + nm);
}

ImageDistribution image_distribution(const SourceSpec& source, const ImagingSystem& system, double s,
                                     CutoffPolicy policy, DistributionBasis basis) {
  validate(source);
  const bool squeezed = std::holds_alternative<Tmsv>(source);
  if (squeezed && basis == DistributionBasis::Number)
    throw Error(ErrorCode::UnsupportedBasis, "TMSV image statistics exist only in the squeezed eigenbasis");
  if (!squeezed && basis == DistributionBasis::SqueezedEigen)
    throw Error(ErrorCode::UnsupportedBasis, "number-diagonal families have no squeezed eigenbasis");
  const auto m = marginals(source, system, s, policy, -1, -1);
  ImageDistribution dist;
  dist.s = s;
  dist.basis = m.basis;
  dist.p = m.plus * m.minus.transpose();
  dist.tail_mass = std::max(0.0, 1.0 - dist.p.sum());
  return dist;
}

void write_distribution_csv(const ImageDistribution& dist, std::ostream& out) {
  out << "n,m,p\n";
  out.precision(17);
  for (Eigen::Index n = 0; n < dist.p.rows(); ++n)
    for (Eigen::Index m = 0; m < dist.p.cols(); ++m) out << n << ',' << m << ',' << dist.p(n, m) << '\n';
}

SqueezedThermalBranch squeezed_thermal_branch(double xi, double t) {
  const double cm1 = std::cosh(2 * xi) - 1.0;
  const double sh = std::sinh(2 * xi);
  const double S = 1.0 + 2.0 * t * (1.0 - t) * cm1;  // eta^2 + (1-eta)^2 + 2 eta (1-eta) cosh 2xi
  const double sq = std::sqrt(S);
  SqueezedThermalBranch b;
  b.T = t * (1.0 - t) * cm1 / (sq + 1.0);  // (sqrt(S) - 1) / 2 without cancellation
  b.dT_dt = (1.0 - 2.0 * t) * cm1 / (2.0 * sq);
  const double u = t * sh / sq;
  b.r = 0.5 * std::asinh(u);
  const double du_dt = (sh / sq) * (1.0 - t * (1.0 - 2.0 * t) * cm1 / S);
  b.dr_dt = du_dt / (2.0 * std::sqrt(1.0 + u * u));
  return b;
}

TmsvImageParams tmsv_image_params(double xi, const ImagingSystem& system, double s) {
  validate(Tmsv{xi});
  const auto fn = functionals(system.psf(), s);
  const auto cp = branch_channel(system.eta(), fn, Branch::Plus);
  const auto cm = branch_channel(system.eta(), fn, Branch::Minus);
  const auto bp = squeezed_thermal_branch(xi, cp.t);
  const auto bm = squeezed_thermal_branch(xi, cm.t);
  TmsvImageParams out;
  out.T_plus = bp.T;
  out.T_minus = bm.T;
  out.r_plus = bp.r;
  out.r_minus = bm.r;
  out.dT_plus_ds = bp.dT_dt * cp.dt_ds;
  out.dT_minus_ds = bm.dT_dt * cm.dt_ds;
  out.dr_plus_ds = bp.dr_dt * cp.dt_ds;
  out.dr_minus_ds = bm.dr_dt * cm.dt_ds;
  return out;
}

double log_derivative_moment(const SourceSpec& source, const ImagingSystem& system, double s) {
  validate(source);
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  const auto cp = branch_channel(eta, fn, Branch::Plus);
  const auto cm = branch_channel(eta, fn, Branch::Minus);
  return std::visit(
      overloaded{
          // (dM/ds)^2 / (M (M + 1)) with M = t N, written as N rate / (1 + M).
          [&](const Thermal& th) {
            return th.N * cp.rate / (1.0 + cp.t * th.N) + th.N * cm.rate / (1.0 + cm.t * th.N);
          },
          [&](const FockPM& f) {
            return eta * f.n_plus * loss_rate_term(eta, fn, Branch::Plus) +
                   eta * f.n_minus * loss_rate_term(eta, fn, Branch::Minus);
          },
          // (dT/ds)^2 / (T (T + 1)) with the t -> 0 singularity cancelled through `rate`.
          [&](const Tmsv& t) {
            const double cm1 = std::cosh(2 * t.xi) - 1.0;
            if (cm1 == 0.0) return 0.0;
            double acc = 0.0;
            for (const auto& c : {cp, cm}) {
              if (c.rate == 0.0) continue;
              const auto b = squeezed_thermal_branch(t.xi, c.t);
              const double sq = std::sqrt(1.0 + 2.0 * c.t * (1.0 - c.t) * cm1);
              acc += b.dT_dt * b.dT_dt * c.rate * (sq + 1.0) / ((1.0 - c.t) * cm1 * (b.T + 1.0));
            }
            return acc;
          },
          [](const CorrThermal&) -> double {
            throw Error(ErrorCode::UnsupportedState, "correlated thermal sources use qfi_corr_thermal");
          },
      },
      source);
}

double log_derivative_moment_numeric(const SourceSpec& source, const ImagingSystem& system, double s, double step) {
  if (std::holds_alternative<CorrThermal>(source))
    throw Error(ErrorCode::UnsupportedState, "correlated thermal sources use qfi_corr_thermal");
  const double h = step * system.rayleigh_length();
  const CutoffPolicy policy{};
  const auto centre = marginals(source, system, s, policy, -1, -1);
  const int np = static_cast<int>(centre.plus.size()) - 1;
  const int nm = static_cast<int>(centre.minus.size()) - 1;
  const auto fwd = marginals(source, system, s + h, policy, np, nm);
  const auto bwd = marginals(source, system, std::max(s - h, 0.0), policy, np, nm);
  const double span = (s + h) - std::max(s - h, 0.0);
  const Eigen::MatrixXd p = centre.plus * centre.minus.transpose();
  const Eigen::MatrixXd dp =
      (fwd.plus * fwd.minus.transpose() - bwd.plus * bwd.minus.transpose()) / span;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p.data()[i] > 0.0) acc += dp.data()[i] * dp.data()[i] / p.data()[i];
  return acc;
}

}  // namespace rqfi
