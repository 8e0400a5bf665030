#include "modclass/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace modclass {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_k exp(-kappa (z - level_k)^2)
double axis_log_sum(double z, std::span<const double> levels, double kappa) {
  double best = kNegInf;
  for (double l : levels) best = std::max(best, -kappa * (z - l) * (z - l));
  double sum = 0.0;
  for (double l : levels) sum += std::exp(-kappa * (z - l) * (z - l) - best);
  return best + std::log(sum);
}

double psk_log_sum(Complex r, std::span<const Complex> symbols, Complex g, double inv_n0) {
  double best = kNegInf;
  for (const auto& s : symbols) best = std::max(best, -std::norm(r - g * s) * inv_n0);
  double sum = 0.0;
  for (const auto& s : symbols) sum += std::exp(-std::norm(r - g * s) * inv_n0 - best);
  return best + std::log(sum);
}

void require_positive_noise(const ChannelParams& p) {
  if (!(p.noise_power > 0.0)) throw std::invalid_argument("likelihood: noise power must be > 0");
}

}  // namespace

double log_sum_exp(std::span<const double> values) {
  LogSumExp acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

void LogSumExp::add(double v) {
  if (v == kNegInf) return;
  if (v <= max_) {
    scaled_sum_ += std::exp(v - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - v) + 1.0;
    max_ = v;
  }
}

void LogSumExp::merge(const LogSumExp& other) {
  if (other.max_ == kNegInf) return;
  if (max_ == kNegInf) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    scaled_sum_ += other.scaled_sum_ * std::exp(other.max_ - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - other.max_) + other.scaled_sum_;
    max_ = other.max_;
  }
}

double LogSumExp::value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(scaled_sum_); }

double LogSumExp::value_minus(double log_count) const {
  return max_ == kNegInf ? kNegInf : max_ + (std::log(scaled_sum_) - log_count);
}

double sample_log_likelihood(Complex r, const ConstellationSet& scheme, const ChannelParams& params) {
  require_positive_noise(params);
  const double inv_n0 = 1.0 / params.noise_power;
  const double norm_const = -std::log(std::numbers::pi * params.noise_power * scheme.order());
  const Complex g = params.gain();
  const double gain2 = std::norm(g);

  if (gain2 == 0.0) return norm_const + std::log(static_cast<double>(scheme.order())) - std::norm(r) * inv_n0;

  if (scheme.blocks().empty()) return norm_const + psk_log_sum(r, scheme.symbols(), g, inv_n0);

  // |r - g s|^2 = |g|^2 |r/g - s|^2, and each block is a Cartesian product.
  const Complex z = r / g;
  const double kappa = gain2 * inv_n0;
  LogSumExp acc;
  for (const auto& b : scheme.blocks())
    acc.add(axis_log_sum(z.real(), b.x_levels, kappa) + axis_log_sum(z.imag(), b.y_levels, kappa));
  return norm_const + acc.value();
}

double log_likelihood(std::span<const Complex> samples, const ConstellationSet& scheme,
                      const ChannelParams& params) {
  double total = 0.0;
  for (const auto& r : samples) total += sample_log_likelihood(r, scheme, params);
  return total;
}

double test_statistic(const ObservationVector& obs, const ConstellationSet& scheme,
                      const ChannelParams& params) {
  if (obs.samples.empty()) throw std::invalid_argument("test_statistic: empty observation");
  return -log_likelihood(obs.samples, scheme, params) / static_cast<double>(obs.size());
}

namespace reference {

double sample_log_likelihood(Complex r, const ConstellationSet& scheme, const ChannelParams& params) {
  require_positive_noise(params);
  const Complex g = params.gain();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(scheme.order()));
  for (const auto& s : scheme.symbols())
    terms.push_back(-std::log(std::numbers::pi * params.noise_power) - std::norm(r - g * s) / params.noise_power);
  return log_sum_exp(terms) - std::log(static_cast<double>(scheme.order()));
}

double sample_likelihood_naive(Complex r, const ConstellationSet& scheme, const ChannelParams& params) {
  const Complex g = params.gain();
  double sum = 0.0;
  for (const auto& s : scheme.symbols())
    sum += std::exp(-std::norm(r - g * s) / params.noise_power) / (std::numbers::pi * params.noise_power);
  return sum / scheme.order();
}

}  // namespace reference

Decision decide_min(std::span<const double> values, Rng& tie_break) {
  if (values.empty()) throw std::invalid_argument("decide_min: no hypotheses");
  const double best = *std::min_element(values.begin(), values.end());
  const double tol = kTieTolerance * std::max(1.0, std::abs(best));
  std::vector<int> tied;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] - best <= tol) tied.push_back(static_cast<int>(i));
  if (tied.size() == 1) return {tied.front(), false};
  std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
  return {tied[pick(tie_break)], true};
}

Classification classify_coherent(const ObservationVector& obs, std::span<const ConstellationSet> schemes,
                                 const ChannelParams& params, Rng& tie_break) {
  if (schemes.empty()) throw std::invalid_argument("classify_coherent: no hypotheses");
  Classification out;
  out.statistic.kind = ClassifierKind::CoherentMl;
  out.statistic.values.reserve(schemes.size());
  for (const auto& s : schemes) out.statistic.values.push_back(test_statistic(obs, s, params));
  out.decision = decide_min(out.statistic.values, tie_break);
  return out;
}

double average_pe(std::span<const double> per_hypothesis_pe) {
  if (per_hypothesis_pe.empty()) throw std::invalid_argument("average_pe: empty list");
  double sum = 0.0;
  for (double p : per_hypothesis_pe) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("average_pe: probability outside [0, 1]");
    sum += p;
  }
  return sum / static_cast<double>(per_hypothesis_pe.size());
}

}  // namespace modclass
