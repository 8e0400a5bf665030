#include "modclass/alrt.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <string>

#include "modclass/quadrature.hpp"

namespace modclass {

namespace {

// M^N, saturating at cap + 1.
std::uint64_t sequence_count(int order, std::size_t length, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (std::size_t n = 0; n < length; ++n) {
    if (count > cap / static_cast<std::uint64_t>(order)) return cap + 1;
    count *= static_cast<std::uint64_t>(order);
  }
  return count;
}

// Accumulates every sequence whose first symbol is `first` into `acc`.
void enumerate_branch(std::span<const Complex> r, const ConstellationSet& scheme, const AlrtPriors& priors,
                      int first, LogSumExp& acc) {
  const std::size_t len = r.size();
  const int m = scheme.order();
  const auto symbols = scheme.symbols();
  const auto energies = scheme.energies();
  const double rho = priors.mean_square_gain / priors.noise_power;
  const double cross_scale = priors.mean_square_gain / (priors.noise_power * priors.noise_power);
  double r_energy = 0.0;
  for (const auto& x : r) r_energy += std::norm(x);
  const double base = -r_energy / priors.noise_power;

  auto term = [&](double energy, double cross2) {
    const double denom = 1.0 + rho * energy;
    return -std::log(denom) + cross_scale * cross2 / denom + base;
  };

  if (len == 1) {
    // |I^* r|^2 = |I|^2 |r|^2 exactly for a single sample.
    const auto e = energies[static_cast<std::size_t>(first)];
    acc.add(term(e, e * r_energy));
    return;
  }

  // Odometer over positions 1..len-1 with prefix sums of energy and I^H r.
  std::vector<int> digit(len, 0);
  std::vector<double> energy_prefix(len + 1, 0.0);
  std::vector<Complex> cross_prefix(len + 1, 0.0);
  digit[0] = first;
  auto refresh = [&](std::size_t from) {
    for (std::size_t k = from; k < len; ++k) {
      const auto d = static_cast<std::size_t>(digit[k]);
      energy_prefix[k + 1] = energy_prefix[k] + energies[d];
      cross_prefix[k + 1] = cross_prefix[k] + std::conj(symbols[d]) * r[k];
    }
  };
  refresh(0);
  while (true) {
    acc.add(term(energy_prefix[len], std::norm(cross_prefix[len])));
    std::size_t pos = len - 1;
    while (pos >= 1 && digit[pos] == m - 1) {
      digit[pos] = 0;
      --pos;
    }
    if (pos == 0) break;
    ++digit[pos];
    refresh(pos);
  }
}

}  // namespace

void AlrtPriors::validate() const {
  if (!(mean_square_gain > 0.0) || !(noise_power > 0.0))
    throw std::invalid_argument("AlrtPriors: Gamma and N0 must be > 0");
}

double alrt_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                           const AlrtPriors& priors, std::uint64_t cap) {
  priors.validate();
  if (samples.empty()) throw std::invalid_argument("alrt_log_likelihood: empty observation");
  const std::uint64_t count = sequence_count(scheme.order(), samples.size(), cap);
  if (count > cap)
    throw CapExceeded("alrt_log_likelihood: " + scheme.label() + "^" + std::to_string(samples.size()) +
                      " sequences exceed the exhaustive cap of " + std::to_string(cap));

  // Fixed partition by first symbol; merged in order so the result does not
  // depend on the number of threads.
  const int m = scheme.order();
  std::vector<LogSumExp> partial(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel() && count >= 4096)
  for (int first = 0; first < m; ++first)
    enumerate_branch(samples, scheme, priors, first, partial[static_cast<std::size_t>(first)]);
  LogSumExp total;
  for (const auto& p : partial) total.merge(p);
  return total.value_minus(static_cast<double>(samples.size()) * std::log(static_cast<double>(m)));
}

double alrt_log_likelihood_numeric(std::span<const Complex> samples, const ConstellationSet& scheme,
                                   const AlrtPriors& priors, AlrtNodes nodes) {
  priors.validate();
  if (samples.empty()) throw std::invalid_argument("alrt_log_likelihood_numeric: empty observation");
  if (nodes.phase < 16 || nodes.amplitude < 16)
    throw std::invalid_argument("alrt_log_likelihood_numeric: need >= 16 nodes per axis");

  const auto rule = gauss_laguerre(nodes.amplitude);
  const auto phases = periodic_nodes(-std::numbers::pi, 2.0 * std::numbers::pi, nodes.phase);
  const double log_phase_w = -std::log(static_cast<double>(nodes.phase));

  LogSumExp acc;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double a = std::sqrt(priors.mean_square_gain * rule.nodes[j]);
    for (double theta : phases)
      acc.add(rule.log_weights[j] + log_phase_w +
              log_likelihood(samples, scheme, ChannelParams{a, theta, priors.noise_power}));
  }
  // Remove C = (pi N0)^{-N} to match the exhaustive form.
  return acc.value() + static_cast<double>(samples.size()) * std::log(std::numbers::pi * priors.noise_power);
}

double alrt_sensor_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                                  const AlrtPriors& priors, const AlrtSettings& settings) {
  if (sequence_count(scheme.order(), samples.size(), settings.exhaustive_cap) <= settings.exhaustive_cap ||
      !settings.numeric_fallback)
    return alrt_log_likelihood(samples, scheme, priors, settings.exhaustive_cap);
  return alrt_log_likelihood_numeric(samples, scheme, priors, settings.nodes);
}

Classification classify_alrt(std::span<const ObservationVector> sensors, std::span<const ConstellationSet> schemes,
                             const AlrtPriors& priors, const AlrtSettings& settings, Rng& tie_break) {
  if (sensors.empty()) throw std::invalid_argument("classify_alrt: need at least one sensor");
  if (schemes.empty()) throw std::invalid_argument("classify_alrt: no hypotheses");
  Classification out;
  out.statistic.kind = ClassifierKind::Alrt;
  const double inv_l = 1.0 / static_cast<double>(sensors.size());
  for (const auto& s : schemes) {
    double total = 0.0;
    for (const auto& obs : sensors) total += alrt_sensor_log_likelihood(obs.samples, s, priors, settings);
    out.statistic.values.push_back(-total * inv_l);
  }
  out.decision = decide_min(out.statistic.values, tie_break);
  return out;
}

}  // namespace modclass
