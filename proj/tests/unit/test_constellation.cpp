#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "modclass/constellation.hpp"

using namespace modclass;

namespace {

// Integer grid with odd coordinates, optionally dropping the corners of a
// cross constellation, scaled to unit power by brute-force enumeration.
std::vector<Complex> odd_grid(int side, int corner_limit) {
  std::vector<Complex> pts;
  for (int i = -side + 1; i < side; i += 2)
    for (int q = -side + 1; q < side; q += 2) {
      if (corner_limit > 0 && std::abs(i) > corner_limit && std::abs(q) > corner_limit) continue;
      pts.emplace_back(i, q);
    }
  double e = 0;
  for (auto p : pts) e += std::norm(p);
  const double s = std::sqrt(pts.size() / e);
  for (auto& p : pts) p *= s;
  return pts;
}

ConstellationSet from_points(std::vector<Complex> pts) {
  std::vector<double> e;
  for (auto p : pts) e.push_back(std::norm(p));
  return ConstellationSet(Family::Qam, std::move(pts), std::move(e), {}, "oracle");
}

}  // namespace

TEST(Psk, QpskIsExactQuarterTurns) {
  const auto q = psk_set(4);
  ASSERT_EQ(q.order(), 4);
  EXPECT_EQ(q.symbol(0), Complex(1, 0));
  EXPECT_EQ(q.symbol(1), Complex(0, 1));
  EXPECT_EQ(q.symbol(2), Complex(-1, 0));
  EXPECT_EQ(q.symbol(3), Complex(0, -1));
  EXPECT_EQ(q.label(), "QPSK");
}

TEST(Psk, PointsOnUnitCircle) {
  for (int m : {2, 8, 16, 32}) {
    const auto s = psk_set(m);
    for (int k = 0; k < m; ++k) {
      const Complex want = std::polar(1.0, 2 * std::numbers::pi * k / m);
      EXPECT_NEAR(std::abs(s.symbol(k) - want), 0.0, 1e-15) << m << "PSK symbol " << k;
      EXPECT_EQ(s.energies()[k], 1.0);
    }
    EXPECT_EQ(s.family(), Family::Psk);
  }
}

TEST(Psk, RejectsBadOrders) {
  for (int m : {0, 1, 3, 6, 12, -4}) EXPECT_THROW(psk_set(m), std::invalid_argument) << m;
}

TEST(Qam, Qam16MatchesEnumeration) {
  const auto q = qam_set(16);
  EXPECT_TRUE(same_symbol_set(q, from_points(odd_grid(4, 0))));
  // {±1, ±3}/sqrt(10)
  const double unit = 1 / std::sqrt(10.0);
  for (auto s : q.symbols()) {
    for (double c : {s.real(), s.imag()}) {
      const double k = std::abs(c) / unit;
      EXPECT_TRUE(std::abs(k - 1) < 1e-12 || std::abs(k - 3) < 1e-12) << c;
    }
  }
  EXPECT_NEAR(q.min_distance(), 2 * unit, 1e-15);
}

TEST(Qam, SquareOrdersMatchEnumeration) {
  EXPECT_TRUE(same_symbol_set(qam_set(64), from_points(odd_grid(8, 0))));
  EXPECT_TRUE(same_symbol_set(qam_set(256), from_points(odd_grid(16, 0))));
}

TEST(Qam, CrossConstellations) {
  const auto q32 = qam_set(32);
  const auto q128 = qam_set(128);
  EXPECT_EQ(q32.order(), 32);
  EXPECT_EQ(q128.order(), 128);
  EXPECT_TRUE(same_symbol_set(q32, from_points(odd_grid(6, 3))));
  EXPECT_TRUE(same_symbol_set(q128, from_points(odd_grid(12, 7))));
}

TEST(Qam, BlocksCoverSymbolsExactlyOnce) {
  for (int m : {16, 32, 64, 128, 256}) {
    const auto q = qam_set(m);
    std::vector<Complex> pts;
    for (const auto& b : q.blocks())
      for (double x : b.x_levels)
        for (double y : b.y_levels) pts.emplace_back(x, y);
    ASSERT_EQ(static_cast<int>(pts.size()), m);
    EXPECT_TRUE(same_symbol_set(q, from_points(pts), 0.0)) << m;
  }
}

TEST(Qam, RejectsUnsupportedOrders) {
  for (int m : {4, 8, 12, 512}) EXPECT_THROW(qam_set(m), std::invalid_argument) << m;
}

TEST(Catalog, UnitPowerEverywhere) {
  for (const char* l : {"BPSK", "QPSK", "8PSK", "16PSK", "16QAM", "32QAM", "64QAM", "128QAM", "256QAM"}) {
    const auto s = parse_scheme(l);
    EXPECT_NEAR(s.mean_power(), 1.0, 1e-12) << l;
    double e = 0;
    for (double v : s.energies()) e += v;
    EXPECT_NEAR(e / s.order(), 1.0, 1e-12) << l;
  }
}

TEST(Catalog, ParsesLooseLabels) {
  EXPECT_EQ(parse_scheme("16qam").label(), "16QAM");
  EXPECT_EQ(parse_scheme("16-QAM").label(), "16QAM");
  EXPECT_EQ(parse_scheme(" qpsk ").label(), "QPSK");
  EXPECT_EQ(parse_scheme("2psk").label(), "BPSK");
  EXPECT_EQ(parse_scheme("8_psk").order(), 8);
  for (const char* bad : {"", "QAM", "12QAM", "3PSK", "foo", "16QAMX", "PSK8"})
    EXPECT_THROW(parse_scheme(bad), std::invalid_argument) << bad;
}

TEST(Catalog, EmptyListRejected) {
  std::vector<std::string> none;
  EXPECT_THROW(scheme_catalog(none), std::invalid_argument);
  std::vector<std::string> two{"BPSK", "16QAM"};
  const auto c = scheme_catalog(two);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].order(), 16);
}

TEST(ConstellationSet, ValidatesInput) {
  EXPECT_THROW(ConstellationSet(Family::Psk, {}, {}, {}, "x"), std::invalid_argument);
  EXPECT_THROW(ConstellationSet(Family::Psk, {{2, 0}, {-2, 0}}, {4, 4}, {}, "x"), std::invalid_argument);
  EXPECT_THROW(ConstellationSet(Family::Psk, {{1, 0}, {1, 0}}, {1, 1}, {}, "x"), std::invalid_argument);
  EXPECT_THROW(ConstellationSet(Family::Psk, {{1, 0}, {-1, 0}}, {1}, {}, "x"), std::invalid_argument);
}

TEST(ConstellationSet, SameSymbolSetIgnoresOrder) {
  const auto a = psk_set(4);
  const ConstellationSet b(Family::Psk, {{0, -1}, {-1, 0}, {0, 1}, {1, 0}}, {1, 1, 1, 1}, {}, "b");
  EXPECT_TRUE(same_symbol_set(a, b));
  EXPECT_FALSE(same_symbol_set(a, psk_set(8)));
  EXPECT_FALSE(same_symbol_set(psk_set(16), qam_set(16)));
}
