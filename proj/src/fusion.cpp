#include "modclass/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace modclass {

std::int64_t WindowAssignment::span() const {
  std::int64_t hi = 0;
  for (const auto& set : index_sets)
    for (auto n : set) hi = std::max(hi, n + 1);
  return hi;
}

bool WindowAssignment::pairwise_disjoint() const {
  std::set<std::int64_t> seen;
  for (const auto& set : index_sets)
    for (auto n : set)
      if (!seen.insert(n).second) return false;
  return true;
}

WindowAssignment assign_windows(int sensors, int samples_per_sensor, const OverlapMode& mode) {
  if (sensors < 1 || samples_per_sensor < 1)
    throw std::invalid_argument("assign_windows: need L >= 1 and N >= 1");
  WindowAssignment w;
  w.sensors = sensors;
  w.samples_per_sensor = samples_per_sensor;
  w.mode = mode;
  const auto n = static_cast<std::int64_t>(samples_per_sensor);

  std::vector<std::int64_t> offsets(static_cast<std::size_t>(sensors), 0);
  if (std::holds_alternative<Disjoint>(mode)) {
    for (int l = 0; l < sensors; ++l) offsets[static_cast<std::size_t>(l)] = l * n;
  } else if (const auto* custom = std::get_if<CustomOffsets>(&mode)) {
    if (custom->offsets.size() != static_cast<std::size_t>(sensors))
      throw std::invalid_argument("assign_windows: expected one offset per sensor");
    if (std::any_of(custom->offsets.begin(), custom->offsets.end(), [](auto o) { return o < 0; }))
      throw std::invalid_argument("assign_windows: offsets must be non-negative");
    offsets = custom->offsets;
  }
  for (auto off : offsets) {
    std::vector<std::int64_t> set(static_cast<std::size_t>(n));
    std::iota(set.begin(), set.end(), off);
    w.index_sets.push_back(std::move(set));
  }
  return w;
}

Classification fuse_soft(std::span<const std::vector<double>> log_likelihoods, Rng& tie_break) {
  if (log_likelihoods.empty()) throw std::invalid_argument("fuse_soft: no sensors");
  const std::size_t s = log_likelihoods.front().size();
  if (s == 0) throw std::invalid_argument("fuse_soft: no hypotheses");
  std::vector<double> total(s, 0.0);
  for (const auto& row : log_likelihoods) {
    if (row.size() != s) throw std::invalid_argument("fuse_soft: ragged likelihood matrix");
    for (std::size_t i = 0; i < s; ++i) {
      if (!std::isfinite(row[i])) throw std::invalid_argument("fuse_soft: non-finite log-likelihood");
      total[i] += row[i];
    }
  }
  Classification out;
  out.statistic.kind = ClassifierKind::Fused;
  const double inv_l = 1.0 / static_cast<double>(log_likelihoods.size());
  for (double t : total) out.statistic.values.push_back(-t * inv_l);
  out.decision = decide_min(out.statistic.values, tie_break);
  return out;
}

std::vector<double> symbol_frequency(std::span<const int> symbol_ids, const ConstellationSet& scheme) {
  if (symbol_ids.empty()) throw std::invalid_argument("symbol_frequency: empty sequence");
  std::vector<double> freq(static_cast<std::size_t>(scheme.order()), 0.0);
  for (int id : symbol_ids) {
    if (id < 0 || id >= scheme.order()) throw std::out_of_range("symbol_frequency: symbol index out of range");
    freq[static_cast<std::size_t>(id)] += 1.0;
  }
  for (auto& f : freq) f /= static_cast<double>(symbol_ids.size());
  return freq;
}

}  // namespace modclass
