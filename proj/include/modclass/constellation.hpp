#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace modclass {

using Complex = std::complex<double>;

enum class Family { Psk, Qam };

// One rectangular piece of a QAM grid. Every (x, y) pair drawn from the two
// level lists is a constellation point x + jy (levels already normalized).
// A square QAM is a single block; cross constellations need two.
struct GridBlock {
  std::vector<double> x_levels;
  std::vector<double> y_levels;
};

// Unit-power symbol set of an M-PSK or M-QAM scheme. Immutable once built.
class ConstellationSet {
 public:
  // Validates size, distinctness and unit average power; throws
  // std::invalid_argument otherwise.
  ConstellationSet(Family family, std::vector<Complex> symbols, std::vector<double> energies,
                   std::vector<GridBlock> blocks, std::string label);

  Family family() const noexcept { return family_; }
  int order() const noexcept { return static_cast<int>(symbols_.size()); }
  std::span<const Complex> symbols() const noexcept { return symbols_; }
  const Complex& symbol(int m) const { return symbols_.at(static_cast<std::size_t>(m)); }

  /// |I_m|^2 per symbol. Stored exactly (1.0) for PSK so that energy-only
  /// expressions agree bit-for-bit across PSK orders.
  std::span<const double> energies() const noexcept { return energies_; }

  /// Separable decomposition of a QAM grid; empty for PSK.
  std::span<const GridBlock> blocks() const noexcept { return blocks_; }

  const std::string& label() const noexcept { return label_; }

  double mean_power() const;
  double min_distance() const;

 private:
  Family family_;
  std::vector<Complex> symbols_;
  std::vector<double> energies_;
  std::vector<GridBlock> blocks_;
  std::string label_;
};

/// M unit-circle symbols e^{j2pi m/M}, m = 0..M-1. M must be a power of two >= 2.
ConstellationSet psk_set(int order);

/// Square (16, 64, 256) or cross (32, 128) QAM scaled to unit average power.
ConstellationSet qam_set(int order);

/// Parses "BPSK", "QPSK", "{M}PSK" or "{M}QAM" (case-insensitive, optional '-').
ConstellationSet parse_scheme(std::string_view label);

/// Ordered list of schemes; position defines the hypothesis index.
std::vector<ConstellationSet> scheme_catalog(std::span<const std::string> labels);

/// True when both sets contain the same points (order ignored).
bool same_symbol_set(const ConstellationSet& a, const ConstellationSet& b, double tol = 1e-12);

}  // namespace modclass
