#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rqfi/beamsplitter.hpp"
#include "rqfi/sources.hpp"

namespace rqfi {

/// Photons counted in the even (symmetric) and odd (antisymmetric) image modes.
struct CountSample {
  int n_even = 0;
  int n_odd = 0;
};

/// Estimation grid; points are geometrically spaced when `geometric` is set.
struct SearchGrid {
  double s_min = 0.05;
  double s_max = 6.0;
  int points = 400;
  bool geometric = true;

  /// Default grid [0.05, 6] x_R with 400 geometric points.
  static SearchGrid rayleigh(double rayleigh_length);
  std::vector<double> values() const;
};

struct EstimatorRun {
  double true_s = 0.0;
  int shots = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::vector<double> estimates;
  double mean = 0.0;
  double empirical_variance = 0.0;  // unbiased sample variance of the estimates
  double fisher_information = 0.0;  // parity F_s per shot
  double crb_classical = 0.0;       // 1 / (shots F_s)

  double variance_ratio() const { return empirical_variance / crb_classical; }
  std::string to_json() const;
};

/// Classical Fisher information of even/odd photon counting:
/// sum over branches of eta N gamma^2 / ((1 +/- delta)(1 - (1 +/- delta) eta)).
double parity_fisher_information(const FockPM& source, const ImagingSystem& system, double s);

/// `shots` independent draws from Binomial(N+, eta+) x Binomial(N-, eta-),
/// deterministic in (seed, stream).
std::vector<CountSample> sample_counts(const FockPM& source, const ImagingSystem& system, double s, int shots,
                                       std::uint64_t seed, std::uint64_t stream = 0);

/// Pearson statistic of the observed joint counts against the model, and its degrees of freedom.
struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};
ChiSquare chi_square(const std::vector<CountSample>& samples, const FockPM& source, const ImagingSystem& system,
                     double s);

/// Grid maximum of the log-likelihood with one parabolic refinement step; ties go to the smaller s.
/// Throws FlatLikelihood when the log-likelihood varies by less than 1e-12 over the grid.
double ml_estimate(const std::vector<CountSample>& samples, const FockPM& source, const ImagingSystem& system,
                   const SearchGrid& grid);

/// Repeats sample-and-estimate `repeats` times, repeat r using stream r. Needs repeats >= 100.
EstimatorRun crb_benchmark(const FockPM& source, const ImagingSystem& system, double true_s, int shots, int repeats,
                           std::uint64_t seed, const SearchGrid& grid);
EstimatorRun crb_benchmark(const FockPM& source, const ImagingSystem& system, double true_s, int shots, int repeats,
                           std::uint64_t seed);

/// CSV rows `shot,n_even,n_odd`.
void write_samples_csv(const std::vector<CountSample>& samples, std::ostream& out);

}  // namespace rqfi
