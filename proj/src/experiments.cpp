#include "modclass/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "modclass/likelihood.hpp"

namespace modclass {

namespace {

constexpr std::uint64_t key(Stream s) { return static_cast<std::uint64_t>(s); }

// Extra noise copies (second and later sensors on the same time index) share one stream.
constexpr std::uint64_t kExtraCopies = 1;

struct ScenarioName {
  Scenario scenario;
  std::string_view name;
};
constexpr ScenarioName kScenarioNames[] = {
    {Scenario::CoherentKnownSnr, "coherent_known_snr"}, {Scenario::NoncoherentHlrt, "noncoherent_hlrt"},
    {Scenario::PartialHlrt, "partial_hlrt"},           {Scenario::AlrtRayleigh, "alrt_rayleigh"},
    {Scenario::FusionTheorem5, "fusion_theorem5"},
};

std::string_view overlap_name(const OverlapMode& m) {
  if (std::holds_alternative<Disjoint>(m)) return "disjoint";
  if (std::holds_alternative<FullOverlap>(m)) return "full_overlap";
  return "custom";
}

// Per-sensor log-likelihood rows over the hypotheses.
std::vector<double> sensor_row(const ExperimentConfig& config, std::span<const ConstellationSet> schemes,
                               const ObservationVector& obs, const ChannelParams& truth, Rng& tie_break) {
  std::vector<double> row;
  row.reserve(schemes.size());
  const double n = static_cast<double>(obs.size());
  switch (config.scenario) {
    case Scenario::CoherentKnownSnr:
    case Scenario::FusionTheorem5:
      for (const auto& s : schemes) row.push_back(log_likelihood(obs.samples, s, truth));
      break;
    case Scenario::NoncoherentHlrt: {
      const auto c = classify_hlrt(obs, schemes, config.hlrt, tie_break);
      for (double v : c.statistic.values) row.push_back(-v * n);
      break;
    }
    case Scenario::PartialHlrt: {
      const auto c = classify_partial_hlrt(obs, schemes, config.partial, config.hlrt, tie_break);
      for (double v : c.statistic.values) row.push_back(-v * n);
      break;
    }
    case Scenario::AlrtRayleigh:
      throw std::logic_error("sensor_row: ALRT is classified jointly");
  }
  return row;
}

std::int64_t count_errors(const ExperimentConfig& config, std::span<const ConstellationSet> schemes, double snr_db,
                          int n, int l, const OverlapMode& overlap, int h, std::int64_t trials, bool parallel) {
  std::vector<unsigned char> wrong(static_cast<std::size_t>(trials), 0);
  if (parallel) {
    // Any exception inside the region is captured and rethrown after it.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < trials; ++t) {
      try {
        wrong[static_cast<std::size_t>(t)] = run_trial(config, schemes, snr_db, n, l, overlap, h, t) != h;
      } catch (...) {
#pragma omp critical(modclass_trial_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::int64_t t = 0; t < trials; ++t)
      wrong[static_cast<std::size_t>(t)] = run_trial(config, schemes, snr_db, n, l, overlap, h, t) != h;
  }
  std::int64_t errors = 0;
  for (auto w : wrong) errors += w;
  return errors;
}

PeCurve run_curve(const ExperimentConfig& config, std::span<const ConstellationSet> schemes, double snr_db,
                  const OverlapMode& overlap, std::string series, const Execution& exec) {
  const auto s = static_cast<std::int64_t>(schemes.size());
  const std::int64_t per_h = (config.trials + s - 1) / s;
  PeCurve curve;
  curve.series = std::move(series);
  curve.snr_db = snr_db;
  curve.sweep_var = std::string(config.sweep.var_name());
  curve.seed = config.seed;
  const auto points = config.sweep.points();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [n, l] = points[k];
    std::vector<std::int64_t> errors, trials;
    for (int h = 0; h < static_cast<int>(s); ++h) {
      errors.push_back(count_errors(config, schemes, snr_db, n, l, overlap, h, per_h, exec.parallel));
      trials.push_back(per_h);
    }
    curve.points.push_back({static_cast<double>(config.sweep.values[k]), n, l, estimate_pe(errors, trials)});
  }
  return curve;
}

class WorkerScope {
 public:
  explicit WorkerScope(int workers) : saved_(omp_get_max_threads()) {
    if (workers > 0) omp_set_num_threads(workers);
  }
  ~WorkerScope() { omp_set_num_threads(saved_); }
  WorkerScope(const WorkerScope&) = delete;
  WorkerScope& operator=(const WorkerScope&) = delete;

 private:
  int saved_;
};

}  // namespace

std::string_view scenario_name(Scenario s) {
  for (const auto& e : kScenarioNames)
    if (e.scenario == s) return e.name;
  throw std::logic_error("scenario_name: unknown scenario");
}

Scenario parse_scenario(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (const auto& e : kScenarioNames)
    if (e.name == lower) return e.scenario;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::vector<std::pair<int, int>> Sweep::points() const {
  validate();
  std::vector<std::pair<int, int>> out;
  for (int v : values) {
    switch (var) {
      case SweepVar::N: out.emplace_back(v, fixed_l); break;
      case SweepVar::L: out.emplace_back(fixed_n, v); break;
      case SweepVar::NL: out.emplace_back(v, product / v); break;
    }
  }
  return out;
}

std::string_view Sweep::var_name() const {
  switch (var) {
    case SweepVar::N: return "N";
    case SweepVar::L: return "L";
    case SweepVar::NL: return "N";
  }
  return "N";
}

void Sweep::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: value list is empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 1) throw std::invalid_argument("sweep: values must be >= 1");
    if (k > 0 && values[k] <= values[k - 1]) throw std::invalid_argument("sweep: values must be increasing");
  }
  if (fixed_n < 1 || fixed_l < 1) throw std::invalid_argument("sweep: fixed N and L must be >= 1");
  if (var == SweepVar::NL) {
    if (product < 1) throw std::invalid_argument("sweep: L*N product must be >= 1");
    for (int v : values)
      if (product % v != 0)
        throw std::invalid_argument("sweep: N = " + std::to_string(v) + " does not divide L*N = " +
                                    std::to_string(product));
  }
}

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw std::invalid_argument("config: no schemes");
  if (snr_db.empty()) throw std::invalid_argument("config: no SNR values");
  if (trials < 100) throw std::invalid_argument("config: trials must be >= 100");
  if (!(gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");
  sweep.validate();
  partial.validate();
  (void)scheme_catalog(schemes);
  for (double s : snr_db)
    if (!std::isfinite(s)) throw std::invalid_argument("config: SNR values must be finite");
}

ChannelSpec ExperimentConfig::channel_spec(double snr) const {
  ChannelSpec spec;
  switch (scenario) {
    case Scenario::CoherentKnownSnr:
    case Scenario::FusionTheorem5:
      spec.amplitude = FixedAmplitude{1.0};
      spec.phase = FixedPhase{0.0};
      break;
    case Scenario::NoncoherentHlrt:
      spec.amplitude = FixedAmplitude{1.0};
      spec.phase = UniformPhase{};
      break;
    case Scenario::PartialHlrt:
    case Scenario::AlrtRayleigh:
      spec.amplitude = RayleighAmplitude{gamma};
      spec.phase = UniformPhase{};
      break;
  }
  if (amplitude) spec.amplitude = *amplitude;
  if (phase) spec.phase = *phase;
  spec.noise_power = snr_to_noise_power(snr, spec.mean_square_gain());
  spec.validate();
  return spec;
}

OverlapMode ExperimentConfig::overlap_mode() const {
  if (overlap) return *overlap;
  if (scenario == Scenario::FusionTheorem5) return FullOverlap{};
  return Disjoint{};
}

ExperimentConfig fast_variant(ExperimentConfig config) {
  config.trials = std::max(100, config.trials / 10);
  return config;
}

Interval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  const double low = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = k == n ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

double PeEstimate::standard_error() const {
  if (trials <= 0) return 0.0;
  return std::sqrt(pe * (1.0 - pe) / static_cast<double>(trials));
}

PeEstimate estimate_pe(std::span<const std::int64_t> errors, std::span<const std::int64_t> trials) {
  if (errors.empty() || errors.size() != trials.size())
    throw std::invalid_argument("estimate_pe: need matching, non-empty error and trial lists");
  PeEstimate est;
  std::int64_t total_errors = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (trials[i] <= 0 || errors[i] < 0 || errors[i] > trials[i])
      throw std::invalid_argument("estimate_pe: counts must satisfy 0 <= errors <= trials, trials > 0");
    est.per_hypothesis.push_back(static_cast<double>(errors[i]) / static_cast<double>(trials[i]));
    total_errors += errors[i];
    est.trials += trials[i];
  }
  est.errors.assign(errors.begin(), errors.end());
  est.hypothesis_trials.assign(trials.begin(), trials.end());
  est.pe = average_pe(est.per_hypothesis);
  const auto ci = wilson_interval(total_errors, est.trials);
  est.ci_low = std::min(ci.low, est.pe);
  est.ci_high = std::max(ci.high, est.pe);
  return est;
}

int run_trial(const ExperimentConfig& config, std::span<const ConstellationSet> schemes, double snr_db,
              int samples_per_sensor, int sensors, const OverlapMode& overlap, int true_hypothesis,
              std::int64_t trial) {
  const auto h = static_cast<std::uint64_t>(true_hypothesis);
  const auto t = static_cast<std::uint64_t>(trial);
  const auto& truth_scheme = schemes[static_cast<std::size_t>(true_hypothesis)];
  const auto spec = config.channel_spec(snr_db);
  const auto windows = assign_windows(sensors, samples_per_sensor, overlap);
  const auto span = static_cast<std::size_t>(windows.span());

  Rng symbol_rng = make_stream(config.seed, {key(Stream::Symbols), h, t});
  const auto symbols = generate_symbols(truth_scheme, span, symbol_rng);

  // Noise copy c of time index n goes to the c-th sensor that observes n.
  // Copy 0 is a single stream over the whole time axis.
  std::vector<int> copies_seen(span, 0);
  Rng first_copy_rng = make_stream(config.seed, {key(Stream::Noise), h, t, 0});
  const auto first_copy = draw_unit_noise(span, first_copy_rng);
  Rng extra_rng = make_stream(config.seed, {key(Stream::Noise), h, t, kExtraCopies});
  std::vector<std::vector<Complex>> extra;

  std::vector<ObservationVector> observations;
  std::vector<ChannelParams> truths;
  for (int l = 0; l < sensors; ++l) {
    const auto& idx = windows.index_sets[static_cast<std::size_t>(l)];
    std::vector<int> ids;
    std::vector<Complex> noise;
    for (auto n : idx) {
      const auto un = static_cast<std::size_t>(n);
      ids.push_back(symbols[un]);
      const int c = copies_seen[un]++;
      if (c == 0) {
        noise.push_back(first_copy[un]);
      } else {
        while (static_cast<int>(extra.size()) < c) extra.push_back(draw_unit_noise(span, extra_rng));
        noise.push_back(extra[static_cast<std::size_t>(c - 1)][un]);
      }
    }
    Rng channel_rng = make_stream(config.seed, {key(Stream::Channel), h, t, static_cast<std::uint64_t>(l)});
    const auto channel = draw_channel(spec, channel_rng);
    observations.push_back(observe_with_noise(ids, truth_scheme, channel, noise, idx));
    truths.push_back(channel);
  }

  Rng tie_rng = make_stream(config.seed, {key(Stream::TieBreak), h, t});
  if (config.scenario == Scenario::AlrtRayleigh) {
    const AlrtPriors priors{spec.mean_square_gain(), spec.noise_power};
    return classify_alrt(observations, schemes, priors, config.alrt, tie_rng).decision.chosen;
  }
  if (sensors == 1 && (config.scenario == Scenario::CoherentKnownSnr || config.scenario == Scenario::FusionTheorem5))
    return classify_coherent(observations.front(), schemes, truths.front(), tie_rng).decision.chosen;

  std::vector<std::vector<double>> rows;
  for (int l = 0; l < sensors; ++l)
    rows.push_back(sensor_row(config, schemes, observations[static_cast<std::size_t>(l)],
                              truths[static_cast<std::size_t>(l)], tie_rng));
  return fuse_soft(rows, tie_rng).decision.chosen;
}

std::vector<PeCurve> run_pe_sweep(const ExperimentConfig& config, const Execution& exec) {
  config.validate();
  const auto schemes = scheme_catalog(config.schemes);
  const WorkerScope scope(exec.workers);
  const auto overlap = config.overlap_mode();
  std::string series(scenario_name(config.scenario));
  if (config.scenario == Scenario::FusionTheorem5) series += "/" + std::string(overlap_name(overlap));
  std::vector<PeCurve> curves;
  for (double snr : config.snr_db) curves.push_back(run_curve(config, schemes, snr, overlap, series, exec));
  return curves;
}

std::vector<Theorem5Study> run_theorem5_study(const ExperimentConfig& config, const Execution& exec) {
  config.validate();
  if (config.sweep.var != SweepVar::NL)
    throw std::invalid_argument("theorem5 study needs an L*N sweep (all pairs share the same product)");
  const auto schemes = scheme_catalog(config.schemes);
  const WorkerScope scope(exec.workers);
  const std::string base(scenario_name(config.scenario));
  std::vector<Theorem5Study> out;
  for (double snr : config.snr_db) {
    Theorem5Study study;
    study.disjoint = run_curve(config, schemes, snr, Disjoint{}, base + "/disjoint", exec);
    study.overlap = run_curve(config, schemes, snr, FullOverlap{}, base + "/full_overlap", exec);
    for (std::size_t k = 0; k < study.disjoint.points.size(); ++k) {
      const auto& d = study.disjoint.points[k];
      const auto& o = study.overlap.points[k];
      const double se = std::hypot(d.pe.standard_error(), o.pe.standard_error());
      study.comparisons.push_back({d.samples_per_sensor, d.sensors, std::abs(o.pe.pe - d.pe.pe), se});
    }
    out.push_back(std::move(study));
  }
  return out;
}

}  // namespace modclass
