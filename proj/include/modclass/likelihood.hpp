#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "modclass/channel.hpp"
#include "modclass/constellation.hpp"
#include "modclass/rng.hpp"

namespace modclass {

/// log(sum exp(v)). Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

// Streaming log-sum-exp with a running maximum.
class LogSumExp {
 public:
  void add(double v);
  void merge(const LogSumExp& other);
  double value() const;
  /// value() - log_count, evaluated so that identical terms give back the term exactly.
  double value_minus(double log_count) const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

/// log p(r | H, a, theta, N0) of the symbol-averaged complex Gaussian mixture.
/// QAM uses the separable grid form, PSK the direct sum; both are guarded
/// against underflow.
double sample_log_likelihood(Complex r, const ConstellationSet& scheme, const ChannelParams& params);

/// sum_n log p(r_n | H, params).
double log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                      const ChannelParams& params);

/// Lambda = -(1/N) sum_n log p(r_n | H, params).
double test_statistic(const ObservationVector& obs, const ConstellationSet& scheme,
                      const ChannelParams& params);

namespace reference {
/// Direct evaluation over every component with an explicit log-sum-exp.
double sample_log_likelihood(Complex r, const ConstellationSet& scheme, const ChannelParams& params);
/// Linear-domain mixture density without any guard; underflows far from the symbols.
double sample_likelihood_naive(Complex r, const ConstellationSet& scheme, const ChannelParams& params);
}  // namespace reference

enum class ClassifierKind { CoherentMl, Hlrt, PartialHlrt, Alrt, Fused };

struct TestStatistic {
  std::vector<double> values;  // Lambda_i per hypothesis; smaller is more likely
  ClassifierKind kind = ClassifierKind::CoherentMl;
  std::optional<std::vector<ChannelParams>> estimated_params;
};

struct Decision {
  int chosen = 0;  // zero-based hypothesis index
  bool tie = false;
};

struct Classification {
  TestStatistic statistic;
  Decision decision;
};

inline constexpr double kTieTolerance = 1e-12;

/// Arg-min with ties (|Lambda_i - Lambda_min| <= 1e-12 max(1, |Lambda_min|))
/// broken uniformly at random from `tie_break`.
Decision decide_min(std::span<const double> values, Rng& tie_break);

/// Coherent ML classifier with the true channel known.
Classification classify_coherent(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                                 const ChannelParams& params, Rng& tie_break);

/// P_e = (1/S) sum_i P_e^i.
double average_pe(std::span<const double> per_hypothesis_pe);

}  // namespace modclass
