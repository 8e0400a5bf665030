#include "modclass/divergence.hpp"

#include <omp.h>

#include <numbers>

#include "modclass/likelihood.hpp"

namespace modclass {

GmmModel::GmmModel(ConstellationSet scheme, ChannelParams params)
    : scheme_(std::move(scheme)), params_(make_channel(params.amplitude, params.phase, params.noise_power)) {}

Complex GmmModel::sample(Rng& rng) const {
  std::uniform_int_distribution<int> pick(0, scheme_.order() - 1);
  std::normal_distribution<double> normal(0.0, std::sqrt(params_.noise_power / 2.0));
  const Complex s = params_.gain() * scheme_.symbol(pick(rng));
  const double re = normal(rng);
  const double im = normal(rng);
  return s + Complex(re, im);
}

double GmmModel::log_density(Complex r) const { return sample_log_likelihood(r, scheme_, params_); }

AlrtMarginalModel::AlrtMarginalModel(ConstellationSet scheme, AlrtPriors priors, int length)
    : scheme_(std::move(scheme)), priors_(priors), length_(length) {
  priors_.validate();
  if (length_ < 1) throw std::invalid_argument("AlrtMarginalModel: length must be >= 1");
}

std::vector<Complex> AlrtMarginalModel::sample(Rng& rng) const {
  const ChannelSpec spec{RayleighAmplitude{priors_.mean_square_gain}, UniformPhase{}, priors_.noise_power};
  const auto channel = draw_channel(spec, rng);
  const auto ids = generate_symbols(scheme_, static_cast<std::size_t>(length_), rng);
  return observe(ids, scheme_, channel, rng).samples;
}

double AlrtMarginalModel::log_density(const std::vector<Complex>& r) const {
  return alrt_log_likelihood(r, scheme_, priors_) -
         static_cast<double>(r.size()) * std::log(std::numbers::pi * priors_.noise_power);
}

KlEstimate kl_gmm(const GmmModel& p, const GmmModel& q, std::int64_t n, Rng& rng) {
  return kl_mc([&](Rng& g) { return p.sample(g); }, [&](Complex r) { return p.log_density(r); },
               [&](Complex r) { return q.log_density(r); }, n, rng);
}

KlEstimate kl_alrt(const AlrtMarginalModel& p, const AlrtMarginalModel& q, std::int64_t n, Rng& rng) {
  return kl_mc([&](Rng& g) { return p.sample(g); }, [&](const std::vector<Complex>& r) { return p.log_density(r); },
               [&](const std::vector<Complex>& r) { return q.log_density(r); }, n, rng);
}

void ScanGrid::validate() const {
  auto check = [](const std::vector<double>& v, const char* name) {
    if (v.empty() || v.size() > 5)
      throw std::invalid_argument(std::string("ScanGrid: ") + name + " needs 1 to 5 values");
  };
  check(amplitudes, "amplitudes");
  check(phases, "phases");
  check(noise_powers, "noise_powers");
}

std::vector<ChannelParams> ScanGrid::points() const {
  validate();
  std::vector<ChannelParams> out;
  for (double a : amplitudes)
    for (double t : phases)
      for (double n0 : noise_powers) out.push_back(make_channel(a, t, n0));
  return out;
}

bool ScanResult::all_positive_with_margin(double k) const {
  for (const auto& p : points)
    if (!p.kl.positive_with_margin(k)) return false;
  return !points.empty();
}

ScanResult lemma1_scan(const ConstellationSet& scheme_i, const ConstellationSet& scheme_j, const ScanGrid& grid_i,
                       const ScanGrid& grid_j, std::int64_t n_samples, std::uint64_t seed) {
  const auto pi = grid_i.points();
  const auto pj = grid_j.points();
  ScanResult res;
  res.points.resize(pi.size() * pj.size());
  const auto total = static_cast<std::int64_t>(res.points.size());

#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const auto& ui = pi[static_cast<std::size_t>(idx) / pj.size()];
    const auto& uj = pj[static_cast<std::size_t>(idx) % pj.size()];
    Rng rng = make_stream(seed, {static_cast<std::uint64_t>(Stream::Sampler), static_cast<std::uint64_t>(idx)});
    const GmmModel p(scheme_i, ui);
    const GmmModel q(scheme_j, uj);
    res.points[static_cast<std::size_t>(idx)] = {ui, uj, kl_gmm(p, q, n_samples, rng)};
  }
  for (std::size_t k = 1; k < res.points.size(); ++k)
    if (res.points[k].kl.value < res.points[res.argmin].kl.value) res.argmin = k;
  return res;
}

}  // namespace modclass
