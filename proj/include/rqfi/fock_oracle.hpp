#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rqfi/beamsplitter.hpp"
#include "rqfi/qfi.hpp"
#include "rqfi/sources.hpp"

namespace rqfi {

/// First K Hermite-Gauss modes of width x_R. A shifted Gaussian PSF psi(x - y)
/// has coherent-state coefficients exp(-a^2/2) a^k / sqrt(k!), a = y / (2 x_R).
struct ModeBasis {
  int K = 8;
  double rayleigh_length = 1.0;

  /// Coefficients of psi(x - shift), truncated to K entries.
  Eigen::VectorXd coefficients(double shift) const;
  /// 1 - sum_k c_k^2 for the PSF shifted by `shift`.
  double residual(double shift) const;
};

/// Occupation tuples (n_1..n_K) with sum <= n_max, in a fixed order, plus the
/// index of the tuple obtained by adding one photon to mode k.
class FockIndex {
 public:
  FockIndex(int K, int n_max);

  int modes() const { return K_; }
  int n_max() const { return n_max_; }
  int dim() const { return static_cast<int>(total_.size()); }

  std::vector<int> occupation(int index) const;
  /// -1 when the tuple is not in the index (or would exceed n_max).
  int index_of(const std::vector<int>& occupation) const;
  int raise(int index, int mode) const { return raise_[static_cast<std::size_t>(index) * K_ + mode]; }
  int total(int index) const { return total_[index]; }

  /// Applies the creation operator sum_k u_k b_k^dag; photons beyond n_max are dropped.
  Eigen::VectorXd create(const Eigen::VectorXd& u, const Eigen::VectorXd& state) const;

 private:
  int K_;
  int n_max_;
  std::vector<std::uint8_t> occ_;
  std::vector<int> total_;
  std::vector<int> raise_;
  std::vector<double> counts_;
};

struct TruncationReport {
  double tail_mass = 0.0;
  double basis_residual = 0.0;
};

/// Image-plane state of K modes. Stored in factored form rho = E C E^T, where the
/// orthonormal columns of E are the two-mode Fock states |n, m> of the image
/// modes a+, a- written in the K-mode basis. All amplitudes are real.
struct TruncatedState {
  int K = 0;
  int n_max = 0;
  int dim = 0;
  std::shared_ptr<const FockIndex> index_map;
  Eigen::MatrixXd embedding;
  Eigen::MatrixXd core;
  std::vector<std::pair<int, int>> labels;
  TruncationReport truncation;

  Eigen::MatrixXd rho() const { return embedding * core * embedding.transpose(); }
  double trace() const { return core.trace(); }
};

struct OracleOptions {
  int K = 0;          // 0: smallest K >= 8 meeting the basis budget
  int n_max = -1;     // < 0: photon number of Fock sources, or chosen by the tail budget
  double fd_step = 1e-3;  // in units of x_R
  bool richardson = true;
  double eig_floor = 1e-12;
  double photon_tail_budget = 1e-6;
  double basis_residual_budget = 1e-8;
  double source_tail = 1e-10;
  int max_dim = 400000;
};

/// Resolves K and n_max for a source at separation s (stencil half-width included).
std::pair<int, int> oracle_truncation(const SourceSpec& source, const ImagingSystem& system, double s,
                                      const OracleOptions& options);

/// Throws UnsupportedPsf for non-Gaussian PSFs and TruncationBudgetExceeded
/// when the photon tail or basis residual exceed the budgets in `options`.
TruncatedState build_image_state(const SourceSpec& source, const ImagingSystem& system, double s, int K, int n_max,
                                 const OracleOptions& options = {});

struct SldResult {
  double qfi = 0.0;
  double eig_floor_used = 0.0;
  double fd_step = 0.0;
  TruncationReport truncation_report;
  int K = 0;
  int n_max = 0;
  int dim = 0;
  double qfi_step = 0.0;       // central difference with fd_step
  double qfi_half_step = 0.0;  // central difference with fd_step / 2
};

/// QFI by the spectral SLD formula on finite-difference derivatives of rho(s)
/// in the fixed Hermite-Gauss basis. Throws IllConditioned when the step and
/// half-step estimates disagree by more than 1e-3 relative.
SldResult qfi_sld(const SourceSpec& source, const ImagingSystem& system, double s, const OracleOptions& options = {});

/// Dense reference: sum over lambda_j + lambda_k > floor of 2 |<j|drho|k>|^2 / (lambda_j + lambda_k).
double sld_qfi(const Eigen::MatrixXd& rho, const Eigen::MatrixXd& drho, double floor = 1e-12);

struct TmsvAdjudicationPoint {
  double s = 0.0;
  double oracle = 0.0;
  double as_printed = 0.0;
  double squared_derivative = 0.0;
  TruncationReport truncation;
};

struct TmsvAdjudication {
  double xi = 0.0;
  double eta = 0.0;
  int K = 0;
  int n_max = 0;
  double fd_step = 0.0;
  std::vector<TmsvAdjudicationPoint> points;
  double max_dev_as_printed = 0.0;
  double max_dev_squared = 0.0;
  TmsvVariant verdict = TmsvVariant::SquaredDerivative;
  double tolerance = 1e-3;

  /// Number of variants whose max relative deviation is within `tolerance`.
  int variants_within_tolerance() const;
  std::string to_json() const;
};

TmsvAdjudication adjudicate_tmsv(double xi, const ImagingSystem& system, const std::vector<double>& s_grid,
                                 const OracleOptions& options = {});

}  // namespace rqfi
