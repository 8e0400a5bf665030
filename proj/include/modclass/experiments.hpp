#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modclass/alrt.hpp"
#include "modclass/channel.hpp"
#include "modclass/fusion.hpp"
#include "modclass/hlrt.hpp"

namespace modclass {

enum class Scenario { CoherentKnownSnr, NoncoherentHlrt, PartialHlrt, AlrtRayleigh, FusionTheorem5 };

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class SweepVar { N, L, NL };

// N sweep: values are N, L = fixed_l. L sweep: values are L, N = fixed_n.
// NL sweep: values are N, L = product / N.
struct Sweep {
  SweepVar var = SweepVar::N;
  std::vector<int> values;
  int fixed_n = 1;
  int fixed_l = 1;
  int product = 0;

  std::vector<std::pair<int, int>> points() const;  // (N, L) per sweep value
  std::string_view var_name() const;
  void validate() const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::CoherentKnownSnr;
  std::vector<std::string> schemes;
  std::vector<double> snr_db;
  Sweep sweep;
  int trials = 2000;
  std::uint64_t seed = 1;

  // Unset fields take scenario defaults: coherent a = 1, theta = 0; HLRT
  // a = 1 with uniform phase; partial HLRT and ALRT Rayleigh(gamma) with
  // uniform phase.
  std::optional<AmplitudeModel> amplitude;
  std::optional<PhaseModel> phase;
  double gamma = 1.0;
  // Multi-sensor window layout; default Disjoint, FullOverlap for FusionTheorem5.
  std::optional<OverlapMode> overlap;

  HlrtSettings hlrt;
  MarginalSpec partial;
  AlrtSettings alrt;

  void validate() const;
  ChannelSpec channel_spec(double snr_db) const;
  OverlapMode overlap_mode() const;
};

/// Trial counts divided by 10 (floor 100), for CI runs.
ExperimentConfig fast_variant(ExperimentConfig config);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for k successes out of n.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = kZ95);

struct PeEstimate {
  double pe = 0.0;
  std::int64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> per_hypothesis;
  std::vector<std::int64_t> errors;
  std::vector<std::int64_t> hypothesis_trials;

  /// Binomial standard error sqrt(pe (1 - pe) / trials).
  double standard_error() const;
};

/// Per-hypothesis rates averaged with equal weight; Wilson 95% CI on the pooled indicator.
PeEstimate estimate_pe(std::span<const std::int64_t> errors, std::span<const std::int64_t> trials);

struct CurvePoint {
  double sweep_value = 0.0;
  int samples_per_sensor = 0;
  int sensors = 0;
  PeEstimate pe;
};

struct PeCurve {
  std::string series;  // scenario name, with a window-mode suffix for fusion studies
  double snr_db = 0.0;
  std::string sweep_var;
  std::uint64_t seed = 0;
  std::vector<CurvePoint> points;
};

struct Execution {
  bool parallel = true;
  int workers = 0;  // 0: OpenMP default
};

/// True hypothesis index h, trial t: draws channel, symbols and noise from
/// streams keyed by (seed, h, t) and returns the classifier's choice. Sweep
/// points and SNRs reuse the same streams, so curves share random numbers.
int run_trial(const ExperimentConfig& config, std::span<const ConstellationSet> schemes, double snr_db,
              int samples_per_sensor, int sensors, const OverlapMode& overlap, int true_hypothesis,
              std::int64_t trial);

/// One curve per SNR.
std::vector<PeCurve> run_pe_sweep(const ExperimentConfig& config, const Execution& exec = {});

struct Theorem5Comparison {
  int samples_per_sensor = 0;
  int sensors = 0;
  double delta = 0.0;  // |Pe(full overlap) - Pe(disjoint)|
  double combined_se = 0.0;

  double ci_half_width() const { return kZ95 * combined_se; }
  bool statistically_zero() const { return delta <= ci_half_width(); }
};

struct Theorem5Study {
  PeCurve disjoint;
  PeCurve overlap;
  std::vector<Theorem5Comparison> comparisons;
};

/// Disjoint vs full-overlap fusion at fixed L*N, one study per SNR. Both
/// modes use the same streams: sensor 1 sees identical samples in both.
std::vector<Theorem5Study> run_theorem5_study(const ExperimentConfig& config, const Execution& exec = {});

}  // namespace modclass
