#include "rqfi/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <ostream>

#include "rqfi/error.hpp"
#include "rqfi/parallel.hpp"
#include "rqfi/rng.hpp"

namespace rqfi {

namespace {

double log_binomial_pmf(int k, int n, double t) {
  if (t <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (t >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(t) +
         (n - k) * std::log1p(-t);
}

std::pair<double, double> branch_transmissivities(const ImagingSystem& system, double s) {
  return transmissivities(system.eta(), functionals(system.psf(), s));
}

}  // namespace

SearchGrid SearchGrid::rayleigh(double rayleigh_length) {
  return {0.05 * rayleigh_length, 6.0 * rayleigh_length, 400, true};
}

std::vector<double> SearchGrid::values() const {
  if (points < 2 || !(s_min > 0.0) || !(s_max > s_min))
    throw Error(ErrorCode::InvalidArgument, "search grid needs points >= 2 and 0 < s_min < s_max");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double f = double(i) / (points - 1);
    out[i] = geometric ? s_min * std::pow(s_max / s_min, f) : s_min + f * (s_max - s_min);
  }
  out.back() = s_max;
  return out;
}

double parity_fisher_information(const FockPM& source, const ImagingSystem& system, double s) {
  validate(source);
  const auto fn = functionals(system.psf(), s);
  const double eta = system.eta();
  return eta * source.n_plus * loss_rate_term(eta, fn, Branch::Plus) +
         eta * source.n_minus * loss_rate_term(eta, fn, Branch::Minus);
}

std::vector<CountSample> sample_counts(const FockPM& source, const ImagingSystem& system, double s, int shots,
                                       std::uint64_t seed, std::uint64_t stream) {
  validate(source);
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  const auto [tp, tm] = branch_transmissivities(system, s);
  CounterRng rng(seed, stream);
  std::vector<CountSample> out(static_cast<std::size_t>(shots));
  for (auto& c : out) {
    for (int i = 0; i < source.n_plus; ++i) c.n_even += rng.uniform() < tp;
    for (int i = 0; i < source.n_minus; ++i) c.n_odd += rng.uniform() < tm;
  }
  return out;
}

ChiSquare chi_square(const std::vector<CountSample>& samples, const FockPM& source, const ImagingSystem& system,
                     double s) {
  const auto [tp, tm] = branch_transmissivities(system, s);
  const int np = source.n_plus + 1;
  const int nm = source.n_minus + 1;
  std::vector<double> observed(static_cast<std::size_t>(np * nm), 0.0);
  for (const auto& c : samples) observed[c.n_even * nm + c.n_odd] += 1.0;
  ChiSquare out;
  const double total = static_cast<double>(samples.size());
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < nm; ++b) {
      const double expect =
          total * std::exp(log_binomial_pmf(a, source.n_plus, tp) + log_binomial_pmf(b, source.n_minus, tm));
      if (expect <= 0.0) continue;
      const double d = observed[a * nm + b] - expect;
      out.statistic += d * d / expect;
      ++out.dof;
    }
  out.dof = std::max(out.dof - 1, 0);
  return out;
}

double ml_estimate(const std::vector<CountSample>& samples, const FockPM& source, const ImagingSystem& system,
                   const SearchGrid& grid) {
  validate(source);
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  std::vector<double> h_even(source.n_plus + 1, 0.0);
  std::vector<double> h_odd(source.n_minus + 1, 0.0);
  for (const auto& c : samples) {
    if (c.n_even < 0 || c.n_even > source.n_plus || c.n_odd < 0 || c.n_odd > source.n_minus)
      throw Error(ErrorCode::InvalidArgument, "sample exceeds the source photon numbers");
    h_even[c.n_even] += 1.0;
    h_odd[c.n_odd] += 1.0;
  }

  const auto s = grid.values();
  std::vector<double> ll(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto [tp, tm] = branch_transmissivities(system, s[i]);
    double acc = 0.0;
    for (int k = 0; k <= source.n_plus; ++k)
      if (h_even[k] > 0) acc += h_even[k] * log_binomial_pmf(k, source.n_plus, tp);
    for (int k = 0; k <= source.n_minus; ++k)
      if (h_odd[k] > 0) acc += h_odd[k] * log_binomial_pmf(k, source.n_minus, tm);
    ll[i] = acc;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (ll[i] > ll[best]) best = i;
  const auto [lo, hi] = std::minmax_element(ll.begin(), ll.end());
  if (std::isfinite(*lo) && *hi - *lo < 1e-12)
    throw Error(ErrorCode::FlatLikelihood, "log-likelihood is flat over the search grid; widen or move the grid");

  if (best == 0 || best + 1 == s.size()) return s[best];
  const double x0 = s[best - 1], x1 = s[best], x2 = s[best + 1];
  const double y0 = ll[best - 1], y1 = ll[best], y2 = ll[best + 1];
  if (!std::isfinite(y0) || !std::isfinite(y2)) return x1;
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0) return x1;
  const double x = x1 - 0.5 * ((x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0)) / den;
  return std::clamp(x, x0, x2);
}

EstimatorRun crb_benchmark(const FockPM& source, const ImagingSystem& system, double true_s, int shots, int repeats,
                           std::uint64_t seed, const SearchGrid& grid) {
  if (repeats < 100) throw Error(ErrorCode::InvalidArgument, "crb_benchmark needs repeats >= 100");
  EstimatorRun run;
  run.true_s = true_s;
  run.shots = shots;
  run.repeats = repeats;
  run.seed = seed;
  run.fisher_information = parity_fisher_information(source, system, true_s);
  if (!(run.fisher_information > 0.0))
    throw Error(ErrorCode::ZeroInformation, "parity measurement carries no information at this separation");
  run.crb_classical = 1.0 / (shots * run.fisher_information);
  run.estimates.resize(static_cast<std::size_t>(repeats));
  parallel_for(run.estimates.size(), [&](std::size_t r) {
    run.estimates[r] = ml_estimate(sample_counts(source, system, true_s, shots, seed, r), source, system, grid);
  });
  double sum = 0.0;
  for (double e : run.estimates) sum += e;
  run.mean = sum / repeats;
  double ss = 0.0;
  for (double e : run.estimates) ss += (e - run.mean) * (e - run.mean);
  run.empirical_variance = ss / (repeats - 1);
  return run;
}

EstimatorRun crb_benchmark(const FockPM& source, const ImagingSystem& system, double true_s, int shots, int repeats,
                           std::uint64_t seed) {
  return crb_benchmark(source, system, true_s, shots, repeats, seed, SearchGrid::rayleigh(system.rayleigh_length()));
}

std::string EstimatorRun::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "v1";
  j["true_s"] = true_s;
  j["shots"] = shots;
  j["repeats"] = repeats;
  j["seed"] = seed;
  j["mean"] = mean;
  j["empirical_variance"] = empirical_variance;
  j["fisher_information"] = fisher_information;
  j["crb_classical"] = crb_classical;
  j["variance_ratio"] = variance_ratio();
  j["estimates"] = estimates;
  return j.dump(2);
}

void write_samples_csv(const std::vector<CountSample>& samples, std::ostream& out) {
  out << "shot,n_even,n_odd\n";
  for (std::size_t i = 0; i < samples.size(); ++i) out << i << ',' << samples[i].n_even << ',' << samples[i].n_odd << '\n';
}

}  // namespace rqfi
