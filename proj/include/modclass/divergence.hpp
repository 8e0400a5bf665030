#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "modclass/alrt.hpp"
#include "modclass/channel.hpp"
#include "modclass/constellation.hpp"
#include "modclass/rng.hpp"

namespace modclass {

struct KlEstimate {
  double value = 0.0;  // nats
  double std_error = 0.0;
  std::int64_t n_samples = 0;

  /// value > k * std_error (and strictly positive).
  bool positive_with_margin(double k) const { return value > 0.0 && value > k * std_error; }
};

/// Monte Carlo estimate of D(p || q) = E_p[log p(x) - log q(x)] from n i.i.d.
/// draws of `sample`. Throws std::domain_error on a non-finite log-ratio.
template <class Sampler, class LogP, class LogQ>
KlEstimate kl_mc(Sampler&& sample, LogP&& log_p, LogQ&& log_q, std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("kl_mc: need at least one sample");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const auto x = sample(rng);
    const double d = log_p(x) - log_q(x);
    if (!std::isfinite(d)) throw std::domain_error("kl_mc: non-finite log density ratio");
    const double delta = d - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (d - mean);
  }
  const double se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))
                          : std::numeric_limits<double>::infinity();
  return {mean, se, n};
}

// Per-sample GMM p(r | H, u) as a sampler plus log density.
class GmmModel {
 public:
  GmmModel(ConstellationSet scheme, ChannelParams params);

  Complex sample(Rng& rng) const;
  double log_density(Complex r) const;
  const ConstellationSet& scheme() const { return scheme_; }
  const ChannelParams& params() const { return params_; }

 private:
  ConstellationSet scheme_;
  ChannelParams params_;
};

// N-sample ALRT marginal (Rayleigh amplitude, uniform phase, known N0).
class AlrtMarginalModel {
 public:
  AlrtMarginalModel(ConstellationSet scheme, AlrtPriors priors, int length);

  std::vector<Complex> sample(Rng& rng) const;
  /// Proper log density, including the (pi N0)^{-N} constant.
  double log_density(const std::vector<Complex>& r) const;

 private:
  ConstellationSet scheme_;
  AlrtPriors priors_;
  int length_;
};

KlEstimate kl_gmm(const GmmModel& p, const GmmModel& q, std::int64_t n, Rng& rng);
KlEstimate kl_alrt(const AlrtMarginalModel& p, const AlrtMarginalModel& q, std::int64_t n, Rng& rng);

/// Parameter values per axis for a scan (at most 5 each).
struct ScanGrid {
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::vector<double> noise_powers;

  void validate() const;
  std::vector<ChannelParams> points() const;
};

struct ScanPoint {
  ChannelParams params_i;
  ChannelParams params_j;
  KlEstimate kl;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::size_t argmin = 0;

  const ScanPoint& minimum() const { return points.at(argmin); }
  bool all_positive_with_margin(double k) const;
};

/// D(p_i(.|u_i) || p_j(.|u_j)) over grid_i x grid_j; each point draws from its
/// own stream derived from `seed`, so results do not depend on thread count.
ScanResult lemma1_scan(const ConstellationSet& scheme_i, const ConstellationSet& scheme_j, const ScanGrid& grid_i,
                       const ScanGrid& grid_j, std::int64_t n_samples, std::uint64_t seed);

}  // namespace modclass
