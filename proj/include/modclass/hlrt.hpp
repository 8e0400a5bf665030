#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "modclass/channel.hpp"
#include "modclass/constellation.hpp"
#include "modclass/likelihood.hpp"

namespace modclass {

/// Search range [0, A^U] x (0, N^U] x [0, theta^U). theta^U is not stored:
/// it always comes from the scheme via phase_period().
struct ParamCube {
  double amplitude_max = 0.0;
  double noise_max = 0.0;
  double noise_floor = 0.0;
  int grid_points = 15;
  int refine_levels = 3;

  /// A^U = 4 * rms(r), N^U = 2 * mean |r|^2, floor = 1e-9 * mean |r|^2.
  static ParamCube from_observation(const ObservationVector& obs, int grid_points = 15, int refine_levels = 3);
  void validate() const;
};

struct HlrtSettings {
  std::optional<double> amplitude_max;  // default derived from the observation
  std::optional<double> noise_max;
  int grid_points = 15;
  int refine_levels = 3;

  ParamCube cube_for(const ObservationVector& obs) const;
};

/// Period of the symbol-averaged likelihood in theta: 2pi/M for M-PSK, pi/2 for QAM.
double phase_period(const ConstellationSet& scheme);

struct MleResult {
  ChannelParams params;
  double statistic = 0.0;                // Lambda at the returned point
  double coarse_statistic = 0.0;         // best Lambda on the coarse grid
  std::vector<double> level_statistics;  // best Lambda after each refinement level
};

/// Coarse grid values of each axis (amplitude, phase, noise power) for a cube.
struct CubeAxes {
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> noise;
};
CubeAxes coarse_axes(const ParamCube& cube, const ConstellationSet& scheme);

/// argmin_u Lambda(r, u) over the cube: exhaustive coarse grid, then pattern
/// search on successively halved steps around the incumbent.
MleResult mle_estimate(const ObservationVector& obs, const ConstellationSet& scheme, const ParamCube& cube);

/// HLRT: per-hypothesis MLE plugged into Lambda, arg-min over hypotheses.
Classification classify_hlrt(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                             const HlrtSettings& settings, Rng& tie_break);

// Priors of the marginalized parameters.
struct RayleighPrior {
  double mean_square_gain = 1.0;
  int nodes = 16;
};
struct UniformPhasePrior {
  int nodes = 16;  // uniform over one phase period (equivalently the full circle)
};
struct FixedNoisePrior {
  double value = 1.0;
};
struct UniformNoisePrior {
  double low = 0.0;
  double high = 1.0;
  int nodes = 16;
};
using NoisePrior = std::variant<FixedNoisePrior, UniformNoisePrior>;

// u0 = axes with a prior (marginalized); u1 = the rest (maximized).
struct MarginalSpec {
  std::optional<RayleighPrior> amplitude;
  std::optional<UniformPhasePrior> phase;
  std::optional<NoisePrior> noise;

  bool empty() const { return !amplitude && !phase && !noise; }
  void validate() const;
};

/// log int p(r | u1, u0) f(u0) du0 over the full product likelihood. Entries of
/// `u1` on marginalized axes are ignored.
double marginal_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                               const ChannelParams& u1, const MarginalSpec& spec);

/// Partial-marginalization HLRT. Estimated parameters report NaN on marginalized axes.
Classification classify_partial_hlrt(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                                     const MarginalSpec& spec, const HlrtSettings& settings, Rng& tie_break);

}  // namespace modclass
