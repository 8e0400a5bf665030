#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "modclass/channel.hpp"
#include "modclass/constellation.hpp"
#include "modclass/likelihood.hpp"

namespace modclass {

// Rayleigh amplitude with E[a^2] = Gamma, uniform phase, known N0.
struct AlrtPriors {
  double mean_square_gain = 1.0;
  double noise_power = 1.0;

  void validate() const;
};

struct AlrtNodes {
  int phase = 64;
  int amplitude = 64;
};

inline constexpr std::uint64_t kDefaultExhaustiveCap = std::uint64_t{1} << 20;

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log(p^A(r | H) / C) by enumerating all M^N symbol sequences, where C is the
/// class-independent constant (pi N0)^{-N}. Throws CapExceeded when M^N > cap.
double alrt_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                           const AlrtPriors& priors, std::uint64_t cap = kDefaultExhaustiveCap);

/// Same quantity with the averaging order swapped: per-sample mixtures first,
/// then trapezoid over theta in [-pi, pi) and Gauss-Laguerre over x = a^2 / Gamma.
double alrt_log_likelihood_numeric(std::span<const Complex> samples, const ConstellationSet& scheme,
                                   const AlrtPriors& priors, AlrtNodes nodes = {});

struct AlrtSettings {
  std::uint64_t exhaustive_cap = kDefaultExhaustiveCap;
  AlrtNodes nodes{};
  bool numeric_fallback = true;  // otherwise CapExceeded propagates
};

/// Exhaustive when M^N fits under the cap, numeric otherwise (if allowed).
double alrt_sensor_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                                  const AlrtPriors& priors, const AlrtSettings& settings);

/// Lambda^A_i = -(1/L) sum_l log p^A(r_l | H_i); arg-min with random tie-break.
Classification classify_alrt(std::span<const ObservationVector> sensors, std::span<const ConstellationSet> schemes,
                             const AlrtPriors& priors, const AlrtSettings& settings, Rng& tie_break);

}  // namespace modclass
