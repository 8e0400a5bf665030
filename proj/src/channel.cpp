#include "modclass/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace modclass {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

ChannelParams make_channel(double amplitude, double phase, double noise_power) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("channel amplitude must be finite and >= 0");
  if (!(noise_power > 0.0) || !std::isfinite(noise_power))
    throw std::invalid_argument("noise power must be finite and > 0");
  if (!std::isfinite(phase)) throw std::invalid_argument("channel phase must be finite");
  double wrapped = std::fmod(phase, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return {amplitude, wrapped, noise_power};
}

void ChannelSpec::validate() const {
  if (!(noise_power > 0.0)) throw std::invalid_argument("ChannelSpec: noise power must be > 0");
  std::visit(Overloaded{
                 [](const FixedAmplitude& f) {
                   if (!(f.value >= 0.0)) throw std::invalid_argument("ChannelSpec: amplitude must be >= 0");
                 },
                 [](const RayleighAmplitude& r) {
                   if (!(r.mean_square_gain > 0.0))
                     throw std::invalid_argument("ChannelSpec: Rayleigh mean-square gain must be > 0");
                 },
             },
             amplitude);
}

double ChannelSpec::mean_square_gain() const {
  return std::visit(Overloaded{
                        [](const FixedAmplitude& f) { return f.value * f.value; },
                        [](const RayleighAmplitude& r) { return r.mean_square_gain; },
                    },
                    amplitude);
}

ChannelParams draw_channel(const ChannelSpec& spec, Rng& rng) {
  spec.validate();
  const double a = std::visit(Overloaded{
                                  [](const FixedAmplitude& f) { return f.value; },
                                  [&rng](const RayleighAmplitude& r) {
                                    std::exponential_distribution<double> unit(1.0);
                                    return std::sqrt(r.mean_square_gain * unit(rng));
                                  },
                              },
                              spec.amplitude);
  const double theta = std::visit(Overloaded{
                                      [](const FixedPhase& f) { return f.value; },
                                      [&rng](const UniformPhase&) {
                                        std::uniform_real_distribution<double> u(0.0, kTwoPi);
                                        return u(rng);
                                      },
                                  },
                                  spec.phase);
  return make_channel(a, theta, spec.noise_power);
}

std::vector<int> generate_symbols(const ConstellationSet& scheme, std::size_t count, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, scheme.order() - 1);
  std::vector<int> ids(count);
  for (auto& id : ids) id = pick(rng);
  return ids;
}

std::vector<Complex> draw_unit_noise(std::size_t count, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<Complex> w(count);
  for (auto& x : w) {
    const double re = normal(rng);
    const double im = normal(rng);
    x = {re, im};
  }
  return w;
}

ObservationVector observe_with_noise(std::span<const int> symbol_ids, const ConstellationSet& scheme,
                                     const ChannelParams& channel, std::span<const Complex> unit_noise,
                                     std::vector<std::int64_t> indices) {
  if (!(channel.noise_power > 0.0)) throw std::invalid_argument("observe: noise power must be > 0");
  if (unit_noise.size() != symbol_ids.size())
    throw std::invalid_argument("observe: noise length does not match symbol count");
  if (indices.empty()) {
    indices.resize(symbol_ids.size());
    std::iota(indices.begin(), indices.end(), std::int64_t{0});
  } else if (indices.size() != symbol_ids.size()) {
    throw std::invalid_argument("observe: index set length does not match symbol count");
  }
  const Complex g = channel.gain();
  const double sigma = std::sqrt(channel.noise_power);
  ObservationVector obs;
  obs.samples.reserve(symbol_ids.size());
  for (std::size_t n = 0; n < symbol_ids.size(); ++n)
    obs.samples.push_back(g * scheme.symbol(symbol_ids[n]) + sigma * unit_noise[n]);
  obs.indices = std::move(indices);
  return obs;
}

ObservationVector observe(std::span<const int> symbol_ids, const ConstellationSet& scheme,
                          const ChannelParams& channel, Rng& rng) {
  const auto noise = draw_unit_noise(symbol_ids.size(), rng);
  return observe_with_noise(symbol_ids, scheme, channel, noise);
}

double snr_to_noise_power(double snr_db, double mean_square_gain) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_to_noise_power: SNR must be finite");
  if (!(mean_square_gain > 0.0))
    throw std::invalid_argument("snr_to_noise_power: mean-square gain must be > 0");
  return mean_square_gain / std::pow(10.0, snr_db / 10.0);
}

}  // namespace modclass
