#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "modclass/constellation.hpp"
#include "modclass/likelihood.hpp"
#include "modclass/rng.hpp"

namespace modclass {

struct Disjoint {};
struct FullOverlap {};
struct CustomOffsets {
  std::vector<std::int64_t> offsets;  // sensor l observes [offset_l, offset_l + N)
};
using OverlapMode = std::variant<Disjoint, FullOverlap, CustomOffsets>;

struct WindowAssignment {
  int sensors = 0;
  int samples_per_sensor = 0;
  std::vector<std::vector<std::int64_t>> index_sets;
  OverlapMode mode = Disjoint{};

  /// One past the largest observed time index.
  std::int64_t span() const;
  bool pairwise_disjoint() const;
};

/// Disjoint: I_l = {(l-1)N, ..., lN-1}. FullOverlap: I_l = {0, ..., N-1} for every l.
WindowAssignment assign_windows(int sensors, int samples_per_sensor, const OverlapMode& mode);

/// Soft fusion assuming independent sensors: arg-max_i sum_l log p_i(r_l).
/// `log_likelihoods` is L rows of S per-hypothesis values.
Classification fuse_soft(std::span<const std::vector<double>> log_likelihoods, Rng& tie_break);

/// Omega(s_m) / N for each constellation symbol m.
std::vector<double> symbol_frequency(std::span<const int> symbol_ids, const ConstellationSet& scheme);

}  // namespace modclass
