#include "modclass/constellation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace modclass {

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

std::vector<double> symmetric_levels(int count) {
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) levels.push_back(static_cast<double>(2 * k - count + 1));
  return levels;
}

std::vector<double> scaled(std::vector<double> v, double s) {
  for (auto& x : v) x *= s;
  return v;
}

}  // namespace

ConstellationSet::ConstellationSet(Family family, std::vector<Complex> symbols,
                                   std::vector<double> energies, std::vector<GridBlock> blocks,
                                   std::string label)
    : family_(family),
      symbols_(std::move(symbols)),
      energies_(std::move(energies)),
      blocks_(std::move(blocks)),
      label_(std::move(label)) {
  if (symbols_.empty()) throw std::invalid_argument("constellation: empty symbol set");
  if (energies_.size() != symbols_.size())
    throw std::invalid_argument("constellation: energy table size mismatch");
  if (std::abs(mean_power() - 1.0) > 1e-12)
    throw std::invalid_argument("constellation: symbols must have unit average power");
  if (symbols_.size() > 1 && !(min_distance() > 0.0))
    throw std::invalid_argument("constellation: symbols must be pairwise distinct");
}

double ConstellationSet::mean_power() const {
  double sum = 0.0;
  for (const auto& s : symbols_) sum += std::norm(s);
  return sum / static_cast<double>(symbols_.size());
}

double ConstellationSet::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    for (std::size_t j = i + 1; j < symbols_.size(); ++j)
      best = std::min(best, std::abs(symbols_[i] - symbols_[j]));
  return best;
}

ConstellationSet psk_set(int order) {
  if (order < 2 || !is_power_of_two(order))
    throw std::invalid_argument("psk_set: order must be a power of two >= 2, got " +
                                std::to_string(order));
  std::vector<Complex> symbols;
  symbols.reserve(static_cast<std::size_t>(order));
  for (int m = 0; m < order; ++m) {
    // Quarter turns are snapped so QPSK is exactly {1, j, -1, -j}.
    if ((4 * m) % order == 0) {
      static constexpr Complex kQuarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      symbols.push_back(kQuarter[(4 * m) / order]);
    } else {
      symbols.push_back(std::polar(1.0, 2.0 * std::numbers::pi * m / order));
    }
  }
  std::string label = order == 2 ? "BPSK" : order == 4 ? "QPSK" : std::to_string(order) + "PSK";
  return ConstellationSet(Family::Psk, std::move(symbols),
                          std::vector<double>(static_cast<std::size_t>(order), 1.0), {},
                          std::move(label));
}

ConstellationSet qam_set(int order) {
  int side = 0;
  int inner = 0;  // cross constellations keep |x| or |y| <= inner levels at full width
  switch (order) {
    case 16: side = 4; break;
    case 64: side = 8; break;
    case 256: side = 16; break;
    case 32: side = 6; inner = 4; break;
    case 128: side = 12; inner = 8; break;
    default:
      throw std::invalid_argument("qam_set: unsupported order " + std::to_string(order) +
                                  " (expected 16, 32, 64, 128 or 256)");
  }

  const auto full = symmetric_levels(side);
  std::vector<GridBlock> raw;
  if (inner == 0) {
    raw.push_back({full, full});
  } else {
    const auto mid = symmetric_levels(inner);
    std::vector<double> outer;
    for (double v : full)
      if (std::abs(v) > inner - 1) outer.push_back(v);
    raw.push_back({full, mid});   // rows |y| within the inner band, full width
    raw.push_back({mid, outer});  // rows beyond the band, corners removed
  }

  // Grid scan order: by real part, then imaginary part.
  std::vector<Complex> points;
  for (const auto& b : raw)
    for (double x : b.x_levels)
      for (double y : b.y_levels) points.emplace_back(x, y);
  std::sort(points.begin(), points.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  double energy = 0.0;
  for (const auto& p : points) energy += std::norm(p);
  const double scale = 1.0 / std::sqrt(energy / static_cast<double>(points.size()));

  std::vector<double> energies;
  energies.reserve(points.size());
  for (auto& p : points) {
    p *= scale;
    energies.push_back(std::norm(p));
  }
  std::vector<GridBlock> blocks;
  for (auto& b : raw) blocks.push_back({scaled(b.x_levels, scale), scaled(b.y_levels, scale)});

  return ConstellationSet(Family::Qam, std::move(points), std::move(energies), std::move(blocks),
                          std::to_string(order) + "QAM");
}

ConstellationSet parse_scheme(std::string_view label) {
  std::string s;
  for (char c : label)
    if (c != '-' && c != '_' && !std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s == "BPSK") return psk_set(2);
  if (s == "QPSK") return psk_set(4);

  const auto digits_end = std::find_if(s.begin(), s.end(),
                                       [](char c) { return !std::isdigit(static_cast<unsigned char>(c)); });
  const std::string family(digits_end, s.end());
  int order = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + (digits_end - s.begin()), order);
  if (digits_end == s.begin() || ec != std::errc{} || (family != "PSK" && family != "QAM"))
    throw std::invalid_argument("unknown modulation label '" + std::string(label) + "'");
  return family == "PSK" ? psk_set(order) : qam_set(order);
}

std::vector<ConstellationSet> scheme_catalog(std::span<const std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("scheme_catalog: empty hypothesis list");
  std::vector<ConstellationSet> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(parse_scheme(l));
  return out;
}

bool same_symbol_set(const ConstellationSet& a, const ConstellationSet& b, double tol) {
  if (a.order() != b.order()) return false;
  for (const auto& s : a.symbols()) {
    const bool found = std::any_of(b.symbols().begin(), b.symbols().end(),
                                   [&](const Complex& t) { return std::abs(s - t) <= tol; });
    if (!found) return false;
  }
  return true;
}

}  // namespace modclass
