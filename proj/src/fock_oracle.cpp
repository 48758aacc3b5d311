#include "rqfi/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "rqfi/error.hpp"
#include "rqfi/parallel.hpp"

namespace rqfi {

namespace {

// Number of L-tuples of non-negative integers with sum <= m, i.e. C(L + m, L).
class TupleCounts {
 public:
  TupleCounts(int K, int n_max) : stride_(n_max + 1), table_((K + 1) * (n_max + 1)) {
    for (int L = 0; L <= K; ++L)
      for (int m = 0; m <= n_max; ++m)
        table_[L * stride_ + m] = (L == 0 || m == 0) ? 1.0 : at(L - 1, m) + at(L, m - 1);
  }
  double at(int L, int m) const { return table_[L * stride_ + m]; }

 private:
  int stride_;
  std::vector<double> table_;
};

}  // namespace

Eigen::VectorXd ModeBasis::coefficients(double shift) const {
  const double a = shift / (2.0 * rayleigh_length);
  Eigen::VectorXd c(K);
  c[0] = std::exp(-a * a / 2);
  for (int k = 1; k < K; ++k) c[k] = c[k - 1] * a / std::sqrt(double(k));
  return c;
}

double ModeBasis::residual(double shift) const {
  // Poisson(a^2) upper tail beyond K - 1, summed directly.
  const double a2 = std::pow(shift / (2.0 * rayleigh_length), 2);
  double term = std::exp(-a2);
  for (int k = 1; k <= K; ++k) term *= a2 / k;
  double tail = 0.0;
  for (int k = K; k < K + 2000; ++k) {
    tail += term;
    term *= a2 / (k + 1);
    if (term < 1e-18 * tail || term == 0.0) break;
  }
  return tail;
}

FockIndex::FockIndex(int K, int n_max) : K_(K), n_max_(n_max) {
  if (K < 1 || n_max < 0 || n_max > 255) throw Error(ErrorCode::InvalidArgument, "invalid Fock index shape");
  const TupleCounts counts(K, n_max);
  counts_.resize((K + 1) * (n_max + 1));
  for (int L = 0; L <= K; ++L)
    for (int m = 0; m <= n_max; ++m) counts_[L * (n_max + 1) + m] = counts.at(L, m);
  const double dim = counts.at(K, n_max);
  if (dim > 5e7) throw Error(ErrorCode::TruncationBudgetExceeded, "dimension: Fock space too large");
  const auto n = static_cast<std::size_t>(dim);
  occ_.resize(n * K);
  total_.resize(n);
  raise_.assign(n * K, -1);

  // Lexicographic enumeration; index 0 is the vacuum.
  std::vector<int> t(K, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int sum = 0;
    for (int k = 0; k < K; ++k) {
      occ_[i * K + k] = static_cast<std::uint8_t>(t[k]);
      sum += t[k];
    }
    total_[i] = sum;
    // next tuple: increment the last position that has room, zero the tail
    int k = K - 1;
    while (k >= 0) {
      int prefix = 0;
      for (int j = 0; j < k; ++j) prefix += t[j];
      if (prefix + t[k] < n_max) {
        ++t[k];
        for (int j = k + 1; j < K; ++j) t[j] = 0;
        break;
      }
      --k;
    }
  }

  std::vector<int> occ(K);
  for (std::size_t i = 0; i < n; ++i) {
    if (total_[i] == n_max) continue;
    for (int k = 0; k < K; ++k) occ[k] = occ_[i * K + k];
    for (int k = 0; k < K; ++k) {
      ++occ[k];
      raise_[i * K + k] = index_of(occ);
      --occ[k];
    }
  }
}

std::vector<int> FockIndex::occupation(int index) const {
  std::vector<int> out(K_);
  for (int k = 0; k < K_; ++k) out[k] = occ_[static_cast<std::size_t>(index) * K_ + k];
  return out;
}

int FockIndex::index_of(const std::vector<int>& occupation) const {
  if (static_cast<int>(occupation.size()) != K_) return -1;
  // Rank in lexicographic order: tuples that agree on a prefix and are smaller at position i.
  int rem = n_max_;
  double rank = 0.0;
  for (int i = 0; i < K_; ++i) {
    const int v = occupation[i];
    if (v < 0 || v > rem) return -1;
    for (int u = 0; u < v; ++u) rank += counts_[(K_ - 1 - i) * (n_max_ + 1) + rem - u];
    rem -= v;
  }
  return static_cast<int>(rank);
}

Eigen::VectorXd FockIndex::create(const Eigen::VectorXd& u, const Eigen::VectorXd& state) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(state.size());
  for (int i = 0; i < dim(); ++i) {
    const double a = state[i];
    if (a == 0.0) continue;
    for (int k = 0; k < K_; ++k) {
      const int j = raise(i, k);
      if (j < 0) continue;
      out[j] += u[k] * std::sqrt(occ_[static_cast<std::size_t>(i) * K_ + k] + 1.0) * a;
    }
  }
  return out;
}

namespace {

void require_gaussian(const ImagingSystem& system) {
  if (system.psf().kind() != PsfKind::GaussianClosedForm)
    throw Error(ErrorCode::UnsupportedPsf, "the Fock oracle needs the Gaussian PSF (Hermite-Gauss basis)");
}

Eigen::MatrixXd thermal_state(double mean, double tail) {
  if (mean <= 0.0) return Eigen::MatrixXd::Ones(1, 1);
  const double q = mean / (mean + 1.0);
  int L = static_cast<int>(std::ceil(std::log(tail) / std::log(q)));
  L = std::max(L, 1);
  Eigen::VectorXd p(L + 1);
  for (int n = 0; n <= L; ++n) p[n] = (1.0 - q) * std::pow(q, n);
  p /= p.sum();
  return p.asDiagonal();
}

Eigen::MatrixXd fock_state(int n) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n + 1, n + 1);
  rho(n, n) = 1.0;
  return rho;
}

// Vacuum squeezed by exp[(r/2)(a^dag^2 - a^2)]; r < 0 flips the sign of odd pairs.
Eigen::MatrixXd squeezed_vacuum(double r, double tail) {
  if (r == 0.0) return Eigen::MatrixXd::Ones(1, 1);
  const double t = std::tanh(r);
  std::vector<double> amp;
  double norm = 0.0;
  for (int k = 0;; ++k) {
    const double mag = std::exp(0.5 * std::lgamma(2.0 * k + 1) - k * std::log(2.0) - std::lgamma(k + 1.0) +
                                k * std::log(std::abs(t)) - 0.5 * std::log(std::cosh(r)));
    amp.push_back((t < 0 && k % 2 == 1) ? -mag : mag);
    norm += mag * mag;
    if (1.0 - norm < tail || k > 4000) break;
  }
  const int L = 2 * (static_cast<int>(amp.size()) - 1);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(L + 1);
  for (std::size_t k = 0; k < amp.size(); ++k) psi[2 * k] = amp[k];
  psi /= psi.norm();
  return psi * psi.transpose();
}

// Pure-loss channel of transmissivity tau in Kraus form.
Eigen::MatrixXd attenuate(const Eigen::MatrixXd& rho, double tau) {
  const int L = static_cast<int>(rho.rows()) - 1;
  Eigen::MatrixXd kraus = Eigen::MatrixXd::Zero(L + 1, L + 1);  // kraus(a, l) for |a + l> -> |a>
  for (int a = 0; a <= L; ++a)
    for (int l = 0; a + l <= L; ++l) {
      const double log_c = std::lgamma(a + l + 1.0) - std::lgamma(a + 1.0) - std::lgamma(l + 1.0);
      kraus(a, l) = std::sqrt(std::exp(log_c) * std::pow(tau, a) * std::pow(1.0 - tau, l));
    }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(L + 1, L + 1);
  for (int l = 0; l <= L; ++l)
    for (int a = 0; a + l <= L; ++a) {
      const double ka = kraus(a, l);
      if (ka == 0.0) continue;
      for (int b = 0; b + l <= L; ++b) out(a, b) += ka * rho(a + l, b + l) * kraus(b, l);
    }
  return out;
}

struct SourceModes {
  Eigen::MatrixXd plus;
  Eigen::MatrixXd minus;
};

SourceModes source_modes(const SourceSpec& source, double tail) {
  validate(source);
  if (const auto* th = std::get_if<Thermal>(&source)) return {thermal_state(th->N, tail), thermal_state(th->N, tail)};
  if (const auto* f = std::get_if<FockPM>(&source)) return {fock_state(f->n_plus), fock_state(f->n_minus)};
  if (const auto* t = std::get_if<Tmsv>(&source)) return {squeezed_vacuum(t->xi, tail), squeezed_vacuum(-t->xi, tail)};
  const auto& ct = std::get<CorrThermal>(source);
  return {thermal_state((1 + ct.w) * ct.N, tail), thermal_state((1 - ct.w) * ct.N, tail)};
}

struct ImageModes {
  Eigen::MatrixXd plus;   // single-mode states after loss
  Eigen::MatrixXd minus;
  Eigen::VectorXd u_plus;  // normalized image modes in the HG basis
  Eigen::VectorXd u_minus;
  double basis_residual = 0.0;
};

ImageModes image_modes(const SourceModes& src, const ImagingSystem& system, double s, int K) {
  const ModeBasis basis{K, system.rayleigh_length()};
  const Eigen::VectorXd c1 = basis.coefficients(-s / 2);
  const Eigen::VectorXd c2 = basis.coefficients(s / 2);
  const double eta = system.eta();
  const Eigen::VectorXd m_plus = std::sqrt(eta / 2) * (c1 + c2);
  const Eigen::VectorXd m_minus = std::sqrt(eta / 2) * (c1 - c2);
  ImageModes out;
  out.basis_residual = basis.residual(s / 2);
  const double tau_plus = m_plus.squaredNorm();
  const double tau_minus = m_minus.squaredNorm();
  out.u_plus = m_plus / std::sqrt(tau_plus);
  if (tau_minus > 0.0) {
    out.u_minus = m_minus / std::sqrt(tau_minus);
  } else {
    out.u_minus = Eigen::VectorXd::Unit(K, 1);
  }
  out.plus = attenuate(src.plus, tau_plus);
  out.minus = attenuate(src.minus, tau_minus);
  return out;
}

double photon_tail(const ImageModes& m, int n_max) {
  const Eigen::VectorXd p = m.plus.diagonal();
  const Eigen::VectorXd q = m.minus.diagonal();
  double kept = 0.0;
  for (int n = 0; n < p.size() && n <= n_max; ++n)
    for (int k = 0; k < q.size() && n + k <= n_max; ++k) kept += p[n] * q[k];
  return std::max(0.0, 1.0 - kept);
}

int source_photon_cap(const SourceSpec& source) {
  if (const auto* f = std::get_if<FockPM>(&source)) return f->n_plus + f->n_minus;
  return -1;
}

TruncatedState assemble(const ImageModes& modes, const std::shared_ptr<const FockIndex>& index,
                        const OracleOptions& options) {
  const int n_max = index->n_max();
  TruncatedState st;
  st.K = index->modes();
  st.n_max = n_max;
  st.dim = index->dim();
  st.index_map = index;
  st.truncation.basis_residual = modes.basis_residual;
  st.truncation.tail_mass = photon_tail(modes, n_max);
  if (st.truncation.basis_residual > options.basis_residual_budget) {
    std::ostringstream msg;
    msg << "basis residual " << st.truncation.basis_residual << " exceeds budget " << options.basis_residual_budget
        << " at K = " << st.K;
    throw Error(ErrorCode::TruncationBudgetExceeded, msg.str());
  }
  if (st.truncation.tail_mass > options.photon_tail_budget) {
    std::ostringstream msg;
    msg << "photon tail " << st.truncation.tail_mass << " exceeds budget " << options.photon_tail_budget
        << " at n_max = " << n_max;
    throw Error(ErrorCode::TruncationBudgetExceeded, msg.str());
  }

  const int lp = static_cast<int>(modes.plus.rows()) - 1;
  const int lm = static_cast<int>(modes.minus.rows()) - 1;
  for (int n = 0; n <= std::min(lp, n_max); ++n)
    for (int m = 0; m <= std::min(lm, n_max - n); ++m) st.labels.emplace_back(n, m);
  const auto r = static_cast<Eigen::Index>(st.labels.size());

  st.core.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      st.core(i, j) = modes.plus(st.labels[i].first, st.labels[j].first) *
                      modes.minus(st.labels[i].second, st.labels[j].second);
  st.core /= st.core.trace();

  // |n, m> = (u+^dag)^n (u-^dag)^m / sqrt(n! m!) |0>, built by repeated creation.
  st.embedding.resize(st.dim, r);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(st.dim);
  row[0] = 1.0;
  int col = 0;
  for (int n = 0; n <= std::min(lp, n_max); ++n) {
    if (n > 0) row = index->create(modes.u_plus, row) / std::sqrt(double(n));
    Eigen::VectorXd v = row;
    for (int m = 0; m <= std::min(lm, n_max - n); ++m) {
      if (m > 0) v = index->create(modes.u_minus, v) / std::sqrt(double(m));
      st.embedding.col(col++) = v;
    }
  }
  return st;
}

}  // namespace

std::pair<int, int> oracle_truncation(const SourceSpec& source, const ImagingSystem& system, double s,
                                      const OracleOptions& options) {
  require_gaussian(system);
  const double h = options.fd_step * system.rayleigh_length();
  const double reach = (std::abs(s) + h) / 2;
  int K = options.K;
  if (K <= 0) {
    K = 8;
    while (ModeBasis{K, system.rayleigh_length()}.residual(reach) > options.basis_residual_budget) {
      if (++K > 64) throw Error(ErrorCode::TruncationBudgetExceeded, "basis residual: K would exceed 64");
    }
  }
  int n_max = options.n_max;
  if (n_max < 0) {
    n_max = source_photon_cap(source);
    if (n_max < 0) {
      const auto src = source_modes(source, options.source_tail);
      n_max = 0;
      for (double x : {s - h, s, s + h}) {
        const auto modes = image_modes(src, system, x, K);
        while (photon_tail(modes, n_max) > options.photon_tail_budget) {
          if (++n_max > 60) throw Error(ErrorCode::TruncationBudgetExceeded, "photon tail: n_max would exceed 60");
        }
      }
    }
  }
  return {K, n_max};
}

TruncatedState build_image_state(const SourceSpec& source, const ImagingSystem& system, double s, int K, int n_max,
                                 const OracleOptions& options) {
  require_gaussian(system);
  if (K < 2) throw Error(ErrorCode::InvalidArgument, "the mode basis needs K >= 2");
  const double dim = std::round(std::exp(std::lgamma(K + n_max + 1.0) - std::lgamma(K + 1.0) - std::lgamma(n_max + 1.0)));
  if (dim > options.max_dim) {
    std::ostringstream msg;
    msg << "dimension " << dim << " exceeds max_dim " << options.max_dim << " (K = " << K << ", n_max = " << n_max
        << ")";
    throw Error(ErrorCode::TruncationBudgetExceeded, msg.str());
  }
  const auto index = std::make_shared<const FockIndex>(K, n_max);
  return assemble(image_modes(source_modes(source, options.source_tail), system, s, K), index, options);
}

double sld_qfi(const Eigen::MatrixXd& rho, const Eigen::MatrixXd& drho, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const Eigen::MatrixXd x = eig.eigenvectors().transpose() * drho * eig.eigenvectors();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < lam.size(); ++j)
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double den = lam[j] + lam[k];
      if (den > floor) acc += 2.0 * x(j, k) * x(j, k) / den;
    }
  return acc;
}

SldResult qfi_sld(const SourceSpec& source, const ImagingSystem& system, double s, const OracleOptions& options) {
  require_gaussian(system);
  const auto [K, n_max] = oracle_truncation(source, system, s, options);
  const double h = options.fd_step * system.rayleigh_length();
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");

  const double dim = std::round(std::exp(std::lgamma(K + n_max + 1.0) - std::lgamma(K + 1.0) - std::lgamma(n_max + 1.0)));
  if (dim > options.max_dim) {
    std::ostringstream msg;
    msg << "dimension " << dim << " exceeds max_dim " << options.max_dim << " (K = " << K << ", n_max = " << n_max
        << ")";
    throw Error(ErrorCode::TruncationBudgetExceeded, msg.str());
  }
  const auto index = std::make_shared<const FockIndex>(K, n_max);
  const auto src = source_modes(source, options.source_tail);
  auto build = [&](double x) { return assemble(image_modes(src, system, x, K), index, options); };

  const TruncatedState centre = build(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centre.core);
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j)
    if (eig.eigenvalues()[j] > options.eig_floor) support.push_back(j);
  const auto ns = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd lam(ns);
  Eigen::MatrixXd w(centre.core.rows(), ns);
  for (Eigen::Index j = 0; j < ns; ++j) {
    lam[j] = eig.eigenvalues()[support[j]];
    w.col(j) = eig.eigenvectors().col(support[j]);
  }
  const Eigen::MatrixXd e = centre.embedding * w;  // eigenvectors of rho(s) in the support

  // drho applied to the support eigenvectors, for steps h and h/2.
  Eigen::MatrixXd y_step = Eigen::MatrixXd::Zero(centre.dim, ns);
  Eigen::MatrixXd y_half = Eigen::MatrixXd::Zero(centre.dim, ns);
  const std::pair<double, double> stencil_step[] = {{s + h, 1.0 / (2 * h)}, {s - h, -1.0 / (2 * h)}};
  const std::pair<double, double> stencil_half[] = {{s + h / 2, 1.0 / h}, {s - h / 2, -1.0 / h}};
  TruncationReport worst = centre.truncation;
  auto accumulate = [&](Eigen::MatrixXd& y, double x, double weight) {
    const TruncatedState st = build(x);
    worst.tail_mass = std::max(worst.tail_mass, st.truncation.tail_mass);
    worst.basis_residual = std::max(worst.basis_residual, st.truncation.basis_residual);
    y.noalias() += weight * (st.embedding * (st.core * (st.embedding.transpose() * e)));
  };
  for (const auto& [x, wt] : stencil_step) accumulate(y_step, x, wt);
  for (const auto& [x, wt] : stencil_half) accumulate(y_half, x, wt);

  auto spectral = [&](const Eigen::MatrixXd& y) {
    Eigen::MatrixXd x = e.transpose() * y;
    x = 0.5 * (x + x.transpose()).eval();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < ns; ++j) {
      for (Eigen::Index k = 0; k < ns; ++k) acc += 2.0 * x(k, j) * x(k, j) / (lam[j] + lam[k]);
      const double outside = y.col(j).squaredNorm() - x.col(j).squaredNorm();
      acc += 4.0 * std::max(outside, 0.0) / lam[j];
    }
    return acc;
  };

  SldResult out;
  out.qfi_step = spectral(y_step);
  out.qfi_half_step = spectral(y_half);
  out.qfi = options.richardson ? std::max(0.0, spectral((4.0 * y_half - y_step) / 3.0)) : out.qfi_half_step;
  out.eig_floor_used = options.eig_floor;
  out.fd_step = h;
  out.truncation_report = worst;
  out.K = K;
  out.n_max = n_max;
  out.dim = centre.dim;
  const double scale = std::max(std::abs(out.qfi_step), std::abs(out.qfi_half_step));
  if (std::abs(out.qfi_step - out.qfi_half_step) > 1e-3 * scale + 1e-14) {
    std::ostringstream msg;
    msg << "finite-difference estimates " << out.qfi_step << " and " << out.qfi_half_step << " disagree at s = " << s;
    throw Error(ErrorCode::IllConditioned, msg.str());
  }
  return out;
}

int TmsvAdjudication::variants_within_tolerance() const {
  return int(max_dev_as_printed <= tolerance) + int(max_dev_squared <= tolerance);
}

std::string TmsvAdjudication::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "v1";
  j["xi"] = xi;
  j["eta"] = eta;
  j["K"] = K;
  j["n_max"] = n_max;
  j["fd_step"] = fd_step;
  j["tolerance"] = tolerance;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    pts.push_back({{"s", p.s},
                   {"oracle", p.oracle},
                   {"as_printed", p.as_printed},
                   {"squared_derivative", p.squared_derivative},
                   {"tail_mass", p.truncation.tail_mass},
                   {"basis_residual", p.truncation.basis_residual}});
  }
  j["max_rel_dev"] = {{"as_printed", max_dev_as_printed}, {"squared_derivative", max_dev_squared}};
  j["verdict"] = std::string(to_string(verdict));
  j["variants_within_tolerance"] = variants_within_tolerance();
  return j.dump(2);
}

TmsvAdjudication adjudicate_tmsv(double xi, const ImagingSystem& system, const std::vector<double>& s_grid,
                                 const OracleOptions& options) {
  TmsvAdjudication out;
  out.xi = xi;
  out.eta = system.eta();
  out.fd_step = options.fd_step * system.rayleigh_length();
  out.points.resize(s_grid.size());
  std::vector<SldResult> sld(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    const double s = s_grid[i];
    sld[i] = qfi_sld(Tmsv{xi}, system, s, options);
    auto& p = out.points[i];
    p.s = s;
    p.oracle = sld[i].qfi;
    p.as_printed = qfi_tmsv(xi, system, s, TmsvVariant::AsPrinted);
    p.squared_derivative = qfi_tmsv(xi, system, s, TmsvVariant::SquaredDerivative);
    p.truncation = sld[i].truncation_report;
  });
  auto dev = [](double v, double ref) {
    if (ref == 0.0) return v == 0.0 ? 0.0 : std::abs(v);
    return std::abs(v - ref) / std::abs(ref);
  };
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    out.K = std::max(out.K, sld[i].K);
    out.n_max = std::max(out.n_max, sld[i].n_max);
    const auto& p = out.points[i];
    out.max_dev_as_printed = std::max(out.max_dev_as_printed, dev(p.as_printed, p.oracle));
    out.max_dev_squared = std::max(out.max_dev_squared, dev(p.squared_derivative, p.oracle));
  }
  out.verdict =
      out.max_dev_as_printed < out.max_dev_squared ? TmsvVariant::AsPrinted : TmsvVariant::SquaredDerivative;
  return out;
}

}  // namespace rqfi
