#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>

#include "rqfi/beamsplitter.hpp"

namespace rqfi {

/// Both sources thermal with N mean photons each.
struct Thermal {
  double N = 0.0;
};

/// Fock state |N+, N-> of the symmetric and antisymmetric source modes.
struct FockPM {
  int n_plus = 0;
  int n_minus = 0;
};

/// Two-mode squeezed vacuum exp[xi (c1^dag c2^dag - c1 c2)]|0>.
struct Tmsv {
  double xi = 0.0;
};

/// Zero-mean Gaussian state with N + 1/2 diagonal and w N cross covariance.
struct CorrThermal {
  double N = 0.0;
  double w = 0.0;
};

using SourceSpec = std::variant<Thermal, FockPM, Tmsv, CorrThermal>;

/// Throws InvalidArgument / UnphysicalState for out-of-range parameters.
void validate(const SourceSpec& source);

std::string family_name(const SourceSpec& source);
/// `key=value` pairs joined by ';'.
std::string params_string(const SourceSpec& source);

/// Mean photon numbers (N+, N-) emitted into the symmetric / antisymmetric source modes.
std::pair<double, double> mode_photons(const SourceSpec& source);

/// Half the total mean photon number, the N of the upper bound.
double photons_per_source(const SourceSpec& source);

/// Mean photons reaching the image plane in the decoupled limit: eta (N+ + N-).
double photons_collected(const SourceSpec& source, double eta);

enum class DistributionBasis { Auto, Number, SqueezedEigen };

struct CutoffPolicy {
  double tail = 1e-10;
  int max_cutoff = 4096;
};

/// Joint photon-number law p(n, m) of the symmetric / antisymmetric image modes.
/// For TMSV it is the law in the squeezed eigenbasis, flagged by `basis`.
struct ImageDistribution {
  Eigen::MatrixXd p;
  double s = 0.0;
  double tail_mass = 0.0;
  DistributionBasis basis = DistributionBasis::Number;
};

ImageDistribution image_distribution(const SourceSpec& source, const ImagingSystem& system, double s,
                                     CutoffPolicy policy = {}, DistributionBasis basis = DistributionBasis::Auto);

/// CSV rows `n,m,p` for every stored entry.
void write_distribution_csv(const ImageDistribution& dist, std::ostream& out);

/// Squeezed-thermal description of one attenuated squeezed-vacuum branch.
struct TmsvImageParams {
  double T_plus = 0.0;
  double T_minus = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;
  double dT_plus_ds = 0.0;
  double dT_minus_ds = 0.0;
  double dr_plus_ds = 0.0;
  double dr_minus_ds = 0.0;
};

/// Thermal occupation T and residual squeezing r after a loss channel of
/// transmissivity t acting on squeezed vacuum of strength xi, with d/dt.
struct SqueezedThermalBranch {
  double T = 0.0;
  double r = 0.0;
  double dT_dt = 0.0;
  double dr_dt = 0.0;
};
SqueezedThermalBranch squeezed_thermal_branch(double xi, double transmissivity);

TmsvImageParams tmsv_image_params(double xi, const ImagingSystem& system, double s);

/// Sum over (n, m) of p (d log p / ds)^2, from closed forms. Thermal, FockPM and Tmsv only.
double log_derivative_moment(const SourceSpec& source, const ImagingSystem& system, double s);

/// Same quantity from central differences of image_distribution with step `step * x_R`.
double log_derivative_moment_numeric(const SourceSpec& source, const ImagingSystem& system, double s,
                                     double step = 1e-5);

}  // namespace rqfi
