#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "modclass/constellation.hpp"
#include "modclass/rng.hpp"

namespace modclass {

// (a, theta, N0) of one sensor over one observation block.
struct ChannelParams {
  double amplitude = 1.0;
  double phase = 0.0;  // radians, [0, 2pi)
  double noise_power = 1.0;

  Complex gain() const { return std::polar(amplitude, phase); }
};

/// Validates a >= 0 and N0 > 0 and wraps theta into [0, 2pi).
ChannelParams make_channel(double amplitude, double phase, double noise_power);

struct FixedAmplitude {
  double value = 1.0;
};
struct RayleighAmplitude {
  double mean_square_gain = 1.0;  // E[a^2]
};
using AmplitudeModel = std::variant<FixedAmplitude, RayleighAmplitude>;

struct FixedPhase {
  double value = 0.0;
};
struct UniformPhase {};
using PhaseModel = std::variant<FixedPhase, UniformPhase>;

struct ChannelSpec {
  AmplitudeModel amplitude = FixedAmplitude{};
  PhaseModel phase = FixedPhase{};
  double noise_power = 1.0;

  void validate() const;
  double mean_square_gain() const;
};

struct ObservationVector {
  std::vector<Complex> samples;
  std::vector<std::int64_t> indices;  // time indices of the transmitted sequence

  std::size_t size() const noexcept { return samples.size(); }
};

/// One block-fading draw. Rayleigh amplitudes have E[a^2] = Gamma.
ChannelParams draw_channel(const ChannelSpec& spec, Rng& rng);

/// i.i.d. uniform symbol indices in [0, M).
std::vector<int> generate_symbols(const ConstellationSet& scheme, std::size_t count, Rng& rng);

/// count samples of CN(0, 1): real and imaginary parts each N(0, 1/2).
std::vector<Complex> draw_unit_noise(std::size_t count, Rng& rng);

/// r_n = a e^{j theta} I_n + w_n with w_n ~ CN(0, N0). Indices default to 0..N-1.
ObservationVector observe(std::span<const int> symbol_ids, const ConstellationSet& scheme,
                          const ChannelParams& channel, Rng& rng);

/// Same model with caller-supplied CN(0, 1) noise, scaled by sqrt(N0).
ObservationVector observe_with_noise(std::span<const int> symbol_ids, const ConstellationSet& scheme,
                                     const ChannelParams& channel, std::span<const Complex> unit_noise,
                                     std::vector<std::int64_t> indices = {});

/// N0 = Gamma / 10^(snr_db / 10).
double snr_to_noise_power(double snr_db, double mean_square_gain = 1.0);

}  // namespace modclass
