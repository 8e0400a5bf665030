#include "modclass/hlrt.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "modclass/quadrature.hpp"

namespace modclass {

namespace {

constexpr int kMaxMovesPerLevel = 8;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One search dimension. count == 1 pins the axis to `first`.
struct Axis {
  double first = 0.0;
  double step = 0.0;
  int count = 1;
  double low = 0.0;   // admissible range for refinement moves
  double high = 0.0;
  bool periodic = false;  // wraps into [low, high)

  double node(int k) const { return first + step * k; }
  bool active() const { return count > 1; }

  double admit(double v) const {
    if (periodic) {
      const double period = high - low;
      v = std::fmod(v - low, period);
      if (v < 0.0) v += period;
      return low + v;
    }
    return std::clamp(v, low, high);
  }
};

using Point = std::array<double, 3>;  // (amplitude, phase, noise)

struct SearchResult {
  Point point{};
  double value = 0.0;
  double coarse_value = 0.0;
  std::vector<double> levels;
};

template <class Objective>
SearchResult grid_search(const std::array<Axis, 3>& axes, int refine_levels, Objective&& objective) {
  const int na = axes[0].count, nt = axes[1].count, nn = axes[2].count;
  const int total = na * nt * nn;
  std::vector<double> values(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(static) if (!omp_in_parallel() && total >= 512)
  for (int idx = 0; idx < total; ++idx) {
    const int ia = idx / (nt * nn);
    const int it = (idx / nn) % nt;
    const int in = idx % nn;
    values[static_cast<std::size_t>(idx)] = objective(Point{axes[0].node(ia), axes[1].node(it), axes[2].node(in)});
  }

  int best_idx = 0;
  for (int idx = 1; idx < total; ++idx)
    if (values[static_cast<std::size_t>(idx)] < values[static_cast<std::size_t>(best_idx)]) best_idx = idx;

  SearchResult res;
  res.point = {axes[0].node(best_idx / (nt * nn)), axes[1].node((best_idx / nn) % nt), axes[2].node(best_idx % nn)};
  res.value = values[static_cast<std::size_t>(best_idx)];
  res.coarse_value = res.value;

  for (int level = 1; level <= refine_levels; ++level) {
    const double shrink = std::ldexp(1.0, -level);
    for (int move = 0; move < kMaxMovesPerLevel; ++move) {
      Point best_neighbor = res.point;
      double best_value = res.value;
      for (int da = -1; da <= 1; ++da) {
        if (da != 0 && !axes[0].active()) continue;
        for (int dt = -1; dt <= 1; ++dt) {
          if (dt != 0 && !axes[1].active()) continue;
          for (int dn = -1; dn <= 1; ++dn) {
            if (dn != 0 && !axes[2].active()) continue;
            if (da == 0 && dt == 0 && dn == 0) continue;
            const Point cand{axes[0].admit(res.point[0] + da * shrink * axes[0].step),
                             axes[1].admit(res.point[1] + dt * shrink * axes[1].step),
                             axes[2].admit(res.point[2] + dn * shrink * axes[2].step)};
            if (cand == res.point) continue;
            const double v = objective(cand);
            if (v < best_value) {
              best_value = v;
              best_neighbor = cand;
            }
          }
        }
      }
      if (!(best_value < res.value)) break;
      res.value = best_value;
      res.point = best_neighbor;
    }
    res.levels.push_back(res.value);
  }
  return res;
}

std::array<Axis, 3> cube_axes(const ParamCube& cube, const ConstellationSet& scheme) {
  const int g = cube.grid_points;
  const double period = phase_period(scheme);
  Axis amp{0.0, cube.amplitude_max / (g - 1), g, 0.0, cube.amplitude_max, false};
  Axis phase{0.0, period / g, g, 0.0, period, true};
  // N0 = 0 is singular, so the coarse grid starts one step above it.
  Axis noise{cube.noise_max / g, cube.noise_max / g, g, cube.noise_floor, cube.noise_max, false};
  return {amp, phase, noise};
}

ChannelParams to_params(const Point& p) { return ChannelParams{p[0], p[1], p[2]}; }

// Quadrature over the marginalized axes: list of (value on each axis, log weight).
struct QuadNode {
  Point value{};
  double log_weight = 0.0;
};

std::vector<QuadNode> marginal_nodes(const ConstellationSet& scheme, const MarginalSpec& spec) {
  std::vector<double> amps{kNaN}, amp_w{0.0};
  if (spec.amplitude) {
    const auto rule = gauss_laguerre(spec.amplitude->nodes);
    amps.clear();
    amp_w.clear();
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      amps.push_back(std::sqrt(spec.amplitude->mean_square_gain * rule.nodes[k]));
      amp_w.push_back(rule.log_weights[k]);
    }
  }
  std::vector<double> phases{kNaN}, phase_w{0.0};
  if (spec.phase) {
    phases = periodic_nodes(0.0, phase_period(scheme), spec.phase->nodes);
    phase_w.assign(phases.size(), -std::log(static_cast<double>(phases.size())));
  }
  std::vector<double> noises{kNaN}, noise_w{0.0};
  if (spec.noise) {
    if (const auto* fixed = std::get_if<FixedNoisePrior>(&*spec.noise)) {
      noises = {fixed->value};
    } else {
      const auto& u = std::get<UniformNoisePrior>(*spec.noise);
      noises.clear();
      for (int k = 0; k < u.nodes; ++k) noises.push_back(u.low + (u.high - u.low) * (k + 0.5) / u.nodes);
      noise_w.assign(noises.size(), -std::log(static_cast<double>(u.nodes)));
    }
  }
  std::vector<QuadNode> out;
  out.reserve(amps.size() * phases.size() * noises.size());
  for (std::size_t i = 0; i < amps.size(); ++i)
    for (std::size_t j = 0; j < phases.size(); ++j)
      for (std::size_t k = 0; k < noises.size(); ++k)
        out.push_back({{amps[i], phases[j], noises[k]}, amp_w[i] + phase_w[j] + noise_w[k]});
  return out;
}

double marginal_log_likelihood_at(std::span<const Complex> samples, const ConstellationSet& scheme,
                                  const Point& u1, const std::vector<QuadNode>& nodes) {
  LogSumExp acc;
  for (const auto& q : nodes) {
    const Point p{std::isnan(q.value[0]) ? u1[0] : q.value[0], std::isnan(q.value[1]) ? u1[1] : q.value[1],
                  std::isnan(q.value[2]) ? u1[2] : q.value[2]};
    acc.add(q.log_weight + log_likelihood(samples, scheme, to_params(p)));
  }
  return acc.value();
}

}  // namespace

ParamCube ParamCube::from_observation(const ObservationVector& obs, int grid_points, int refine_levels) {
  if (obs.samples.empty()) throw std::invalid_argument("ParamCube: empty observation");
  double power = 0.0;
  for (const auto& r : obs.samples) power += std::norm(r);
  power /= static_cast<double>(obs.size());
  if (!(power > 0.0)) power = 1.0;  // all-zero block: any positive scale works
  ParamCube cube;
  cube.amplitude_max = 4.0 * std::sqrt(power);
  cube.noise_max = 2.0 * power;
  cube.noise_floor = 1e-9 * power;
  cube.grid_points = grid_points;
  cube.refine_levels = refine_levels;
  cube.validate();
  return cube;
}

void ParamCube::validate() const {
  if (!(amplitude_max > 0.0) || !(noise_max > 0.0) || !(noise_floor > 0.0) || noise_floor >= noise_max)
    throw std::invalid_argument("ParamCube: bounds must satisfy 0 < floor < N^U and A^U > 0");
  if (grid_points < 2) throw std::invalid_argument("ParamCube: need at least 2 grid points per axis");
  if (refine_levels < 0) throw std::invalid_argument("ParamCube: refine levels must be >= 0");
}

ParamCube HlrtSettings::cube_for(const ObservationVector& obs) const {
  ParamCube cube = ParamCube::from_observation(obs, grid_points, refine_levels);
  if (amplitude_max) cube.amplitude_max = *amplitude_max;
  if (noise_max) {
    cube.noise_max = *noise_max;
    cube.noise_floor = std::min(cube.noise_floor, 1e-9 * *noise_max);
  }
  cube.validate();
  return cube;
}

double phase_period(const ConstellationSet& scheme) {
  return scheme.family() == Family::Psk ? 2.0 * std::numbers::pi / scheme.order() : std::numbers::pi / 2.0;
}

CubeAxes coarse_axes(const ParamCube& cube, const ConstellationSet& scheme) {
  cube.validate();
  const auto axes = cube_axes(cube, scheme);
  CubeAxes out;
  for (int k = 0; k < axes[0].count; ++k) out.amplitude.push_back(axes[0].node(k));
  for (int k = 0; k < axes[1].count; ++k) out.phase.push_back(axes[1].node(k));
  for (int k = 0; k < axes[2].count; ++k) out.noise.push_back(axes[2].node(k));
  return out;
}

MleResult mle_estimate(const ObservationVector& obs, const ConstellationSet& scheme, const ParamCube& cube) {
  if (obs.samples.empty()) throw std::invalid_argument("mle_estimate: empty observation");
  cube.validate();
  const double inv_n = 1.0 / static_cast<double>(obs.size());
  const auto res = grid_search(cube_axes(cube, scheme), cube.refine_levels, [&](const Point& p) {
    return -log_likelihood(obs.samples, scheme, to_params(p)) * inv_n;
  });
  return {to_params(res.point), res.value, res.coarse_value, res.levels};
}

Classification classify_hlrt(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                             const HlrtSettings& settings, Rng& tie_break) {
  if (schemes.empty()) throw std::invalid_argument("classify_hlrt: no hypotheses");
  const ParamCube cube = settings.cube_for(obs);
  Classification out;
  out.statistic.kind = ClassifierKind::Hlrt;
  out.statistic.estimated_params.emplace();
  for (const auto& s : schemes) {
    const auto mle = mle_estimate(obs, s, cube);
    out.statistic.values.push_back(mle.statistic);
    out.statistic.estimated_params->push_back(mle.params);
  }
  out.decision = decide_min(out.statistic.values, tie_break);
  return out;
}

void MarginalSpec::validate() const {
  if (amplitude && (amplitude->nodes < 8 || !(amplitude->mean_square_gain > 0.0)))
    throw std::invalid_argument("MarginalSpec: amplitude prior needs Gamma > 0 and >= 8 nodes");
  if (phase && phase->nodes < 8) throw std::invalid_argument("MarginalSpec: phase prior needs >= 8 nodes");
  if (noise) {
    if (const auto* f = std::get_if<FixedNoisePrior>(&*noise)) {
      if (!(f->value > 0.0)) throw std::invalid_argument("MarginalSpec: fixed noise power must be > 0");
    } else {
      const auto& u = std::get<UniformNoisePrior>(*noise);
      if (!(u.low >= 0.0 && u.high > u.low) || u.nodes < 8)
        throw std::invalid_argument("MarginalSpec: uniform noise prior needs 0 <= low < high and >= 8 nodes");
    }
  }
}

double marginal_log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                               const ChannelParams& u1, const MarginalSpec& spec) {
  spec.validate();
  return marginal_log_likelihood_at(samples, scheme, {u1.amplitude, u1.phase, u1.noise_power},
                                    marginal_nodes(scheme, spec));
}

Classification classify_partial_hlrt(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                                     const MarginalSpec& spec, const HlrtSettings& settings, Rng& tie_break) {
  if (schemes.empty()) throw std::invalid_argument("classify_partial_hlrt: no hypotheses");
  spec.validate();
  if (spec.empty()) {
    auto out = classify_hlrt(obs, schemes, settings, tie_break);
    out.statistic.kind = ClassifierKind::PartialHlrt;
    return out;
  }

  const ParamCube cube = settings.cube_for(obs);
  const double inv_n = 1.0 / static_cast<double>(obs.size());
  Classification out;
  out.statistic.kind = ClassifierKind::PartialHlrt;
  out.statistic.estimated_params.emplace();
  for (const auto& s : schemes) {
    auto axes = cube_axes(cube, s);
    if (spec.amplitude) axes[0] = Axis{kNaN, 0.0, 1, 0.0, 0.0, false};
    if (spec.phase) axes[1] = Axis{kNaN, 0.0, 1, 0.0, 0.0, false};
    if (spec.noise) axes[2] = Axis{kNaN, 0.0, 1, 0.0, 0.0, false};
    const auto nodes = marginal_nodes(s, spec);
    const auto res = grid_search(axes, cube.refine_levels, [&](const Point& p) {
      return -marginal_log_likelihood_at(obs.samples, s, p, nodes) * inv_n;
    });
    out.statistic.values.push_back(res.value);
    out.statistic.estimated_params->push_back(to_params(res.point));
  }
  out.decision = decide_min(out.statistic.values, tie_break);
  return out;
}

}  // namespace modclass
