#include <gtest/gtest.h>

#include <cmath>

#include "modclass/experiments.hpp"

using namespace modclass;

namespace {

ExperimentConfig small_config(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.schemes = {"BPSK", "QPSK"};
  c.snr_db = {6.0};
  c.sweep.var = SweepVar::N;
  c.sweep.values = {1, 4};
  c.trials = 100;
  c.seed = 77;
  return c;
}

void expect_same_curves(const std::vector<PeCurve>& a, const std::vector<PeCurve>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_EQ(a[k].points.size(), b[k].points.size());
    for (std::size_t p = 0; p < a[k].points.size(); ++p) EXPECT_EQ(a[k].points[p].pe.errors, b[k].points[p].pe.errors);
  }
}

}  // namespace

TEST(Wilson, ZeroErrorsUpperBound) {
  const auto ci = wilson_interval(0, 1000);
  const double z2 = kZ95 * kZ95;
  EXPECT_EQ(ci.low, 0.0);
  EXPECT_NEAR(ci.high, z2 / (1000 + z2), 1e-15);
  EXPECT_NEAR(ci.high, 0.0038, 1e-4);
}

TEST(Wilson, SymmetricAtHalf) {
  const auto ci = wilson_interval(50, 100);
  EXPECT_NEAR(ci.low + ci.high, 1.0, 1e-14);
  // Hand-evaluated: centre 0.5, half-width z*sqrt(0.0025 + z^2/40000)/(1 + z^2/100).
  const double z2 = kZ95 * kZ95;
  const double half = kZ95 * std::sqrt(0.0025 + z2 / 40000) / (1 + z2 / 100);
  EXPECT_NEAR(ci.high, 0.5 + half, 1e-14);
  EXPECT_THROW(wilson_interval(3, 2), std::invalid_argument);
  EXPECT_THROW(wilson_interval(0, 0), std::invalid_argument);
}

TEST(EstimatePe, AveragesPerHypothesisRates) {
  const std::vector<std::int64_t> e{40, 60}, n{100, 100};
  const auto est = estimate_pe(e, n);
  EXPECT_DOUBLE_EQ(est.pe, 0.5);
  EXPECT_EQ(est.trials, 200);
  EXPECT_DOUBLE_EQ(est.standard_error(), std::sqrt(0.25 / 200));

  const std::vector<std::int64_t> e2{10, 30}, n2{100, 100};
  const auto est2 = estimate_pe(e2, n2);
  EXPECT_DOUBLE_EQ(est2.pe, 0.2);
  EXPECT_LE(est2.ci_low, 0.2);
  EXPECT_GE(est2.ci_high, 0.2);
}

TEST(EstimatePe, RejectsBadCounts) {
  const std::vector<std::int64_t> none;
  const std::vector<std::int64_t> one{1}, two{1, 1}, zero{0}, big{5};
  EXPECT_THROW(estimate_pe(none, none), std::invalid_argument);
  EXPECT_THROW(estimate_pe(one, two), std::invalid_argument);
  EXPECT_THROW(estimate_pe(one, zero), std::invalid_argument);
  EXPECT_THROW(estimate_pe(big, one), std::invalid_argument);
}

TEST(Sweep, Points) {
  Sweep s;
  s.var = SweepVar::N;
  s.values = {1, 10};
  s.fixed_l = 3;
  EXPECT_EQ(s.points(), (std::vector<std::pair<int, int>>{{1, 3}, {10, 3}}));
  s.var = SweepVar::L;
  s.fixed_n = 5;
  EXPECT_EQ(s.points(), (std::vector<std::pair<int, int>>{{5, 1}, {5, 10}}));
  EXPECT_EQ(s.var_name(), "L");
  s.var = SweepVar::NL;
  s.product = 1000;
  EXPECT_EQ(s.points(), (std::vector<std::pair<int, int>>{{1, 1000}, {10, 100}}));
}

TEST(Sweep, Validation) {
  Sweep s;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.values = {2, 2};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.values = {0, 2};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.values = {3, 7};
  s.var = SweepVar::NL;
  s.product = 20;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.values = {4, 5};
  EXPECT_NO_THROW(s.validate());
}

TEST(Config, Validation) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  EXPECT_NO_THROW(c.validate());
  c.trials = 99;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(Scenario::CoherentKnownSnr);
  c.schemes = {"BPSK", "7PSK"};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(Scenario::CoherentKnownSnr);
  c.snr_db = {NAN};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(Scenario::AlrtRayleigh);
  c.gamma = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, ScenarioNamesRoundTrip) {
  for (auto s : {Scenario::CoherentKnownSnr, Scenario::NoncoherentHlrt, Scenario::PartialHlrt, Scenario::AlrtRayleigh,
                 Scenario::FusionTheorem5})
    EXPECT_EQ(parse_scenario(scenario_name(s)), s);
  EXPECT_EQ(parse_scenario("Fusion-Theorem5"), Scenario::FusionTheorem5);
  EXPECT_THROW(parse_scenario("bogus"), std::invalid_argument);
}

TEST(Config, ChannelDefaults) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  auto spec = c.channel_spec(10.0);
  EXPECT_TRUE(std::holds_alternative<FixedAmplitude>(spec.amplitude));
  EXPECT_TRUE(std::holds_alternative<FixedPhase>(spec.phase));
  EXPECT_NEAR(spec.noise_power, 0.1, 1e-15);

  c = small_config(Scenario::NoncoherentHlrt);
  EXPECT_TRUE(std::holds_alternative<UniformPhase>(c.channel_spec(0).phase));

  c = small_config(Scenario::AlrtRayleigh);
  c.gamma = 2.0;
  spec = c.channel_spec(0.0);
  EXPECT_TRUE(std::holds_alternative<RayleighAmplitude>(spec.amplitude));
  EXPECT_NEAR(spec.noise_power, 2.0, 1e-15);

  c.amplitude = FixedAmplitude{0.5};
  EXPECT_NEAR(c.channel_spec(0.0).noise_power, 0.25, 1e-15);
}

TEST(Config, OverlapDefaults) {
  EXPECT_TRUE(std::holds_alternative<Disjoint>(small_config(Scenario::CoherentKnownSnr).overlap_mode()));
  EXPECT_TRUE(std::holds_alternative<FullOverlap>(small_config(Scenario::FusionTheorem5).overlap_mode()));
}

TEST(Config, FastVariant) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  c.trials = 5000;
  EXPECT_EQ(fast_variant(c).trials, 500);
  c.trials = 300;
  EXPECT_EQ(fast_variant(c).trials, 100);
}

TEST(PeSweep, ShapeAndSanity) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  c.snr_db = {0.0, 10.0};
  const auto curves = run_pe_sweep(c);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].series, "coherent_known_snr");
  EXPECT_EQ(curves[0].sweep_var, "N");
  ASSERT_EQ(curves[0].points.size(), 2u);
  for (const auto& curve : curves)
    for (const auto& p : curve.points) {
      EXPECT_EQ(p.pe.trials, 100);
      EXPECT_GE(p.pe.pe, 0.0);
      EXPECT_LE(p.pe.pe, 1.0);
      EXPECT_LE(p.pe.ci_low, p.pe.pe);
      EXPECT_GE(p.pe.ci_high, p.pe.pe);
    }
  // N = 1 BPSK vs QPSK at 0 dB is near chance; N = 4 at 10 dB is rarely wrong.
  EXPECT_GT(curves[0].points[0].pe.pe, 0.1);
  EXPECT_LT(curves[1].points[1].pe.pe, 0.1);
}

TEST(PeSweep, OddTrialCountRoundsUpPerHypothesis) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  c.schemes = {"BPSK", "QPSK", "8PSK"};
  c.sweep.values = {2};
  c.trials = 100;
  const auto p = run_pe_sweep(c)[0].points[0].pe;
  EXPECT_EQ(p.hypothesis_trials, (std::vector<std::int64_t>{34, 34, 34}));
}

TEST(PeSweep, DeterministicAcrossWorkers) {
  auto c = small_config(Scenario::NoncoherentHlrt);
  c.sweep.values = {2, 8};
  const auto serial = run_pe_sweep(c, {false, 1});
  expect_same_curves(serial, run_pe_sweep(c, {true, 1}));
  expect_same_curves(serial, run_pe_sweep(c, {true, 4}));
}

TEST(PeSweep, SeedChangesResults) {
  auto c = small_config(Scenario::CoherentKnownSnr);
  c.snr_db = {0.0};
  c.sweep.values = {1};
  c.trials = 1000;
  const auto a = run_pe_sweep(c);
  c.seed = 78;
  const auto b = run_pe_sweep(c);
  EXPECT_NE(a[0].points[0].pe.errors, b[0].points[0].pe.errors);
}

TEST(PeSweep, SingleSensorOverlapModesAgree) {
  auto c = small_config(Scenario::FusionTheorem5);
  c.sweep.var = SweepVar::L;
  c.sweep.values = {1};
  c.sweep.fixed_n = 5;
  c.overlap = Disjoint{};
  const auto a = run_pe_sweep(c);
  c.overlap = FullOverlap{};
  const auto b = run_pe_sweep(c);
  expect_same_curves(a, b);
  EXPECT_EQ(a[0].series, "fusion_theorem5/disjoint");
  EXPECT_EQ(b[0].series, "fusion_theorem5/full_overlap");
}

TEST(RunTrial, CommonRandomNumbersAcrossSnr) {
  // At a very high SNR the coherent decision is the transmitted hypothesis;
  // the same trial index at two SNRs draws the same symbols and noise.
  auto c = small_config(Scenario::CoherentKnownSnr);
  const auto schemes = scheme_catalog(c.schemes);
  for (int h = 0; h < 2; ++h)
    for (std::int64_t t = 0; t < 20; ++t) {
      EXPECT_EQ(run_trial(c, schemes, 40.0, 8, 1, Disjoint{}, h, t), h);
      EXPECT_EQ(run_trial(c, schemes, 5.0, 8, 1, Disjoint{}, h, t), run_trial(c, schemes, 5.0, 8, 1, Disjoint{}, h, t));
    }
}

TEST(RunTrial, AllScenariosRun) {
  for (auto s : {Scenario::CoherentKnownSnr, Scenario::NoncoherentHlrt, Scenario::PartialHlrt, Scenario::AlrtRayleigh,
                 Scenario::FusionTheorem5}) {
    auto c = small_config(s);
    if (s == Scenario::PartialHlrt) {
      c.partial.amplitude = RayleighPrior{1.0};
      c.partial.phase = UniformPhasePrior{};
    }
    const auto schemes = scheme_catalog(c.schemes);
    const int d = run_trial(c, schemes, 6.0, 3, 2, Disjoint{}, 1, 0);
    EXPECT_TRUE(d == 0 || d == 1) << scenario_name(s);
  }
}

TEST(Theorem5Study, RequiresProductSweep) {
  auto c = small_config(Scenario::FusionTheorem5);
  EXPECT_THROW(run_theorem5_study(c), std::invalid_argument);
}

TEST(Theorem5Study, PairsBothModes) {
  auto c = small_config(Scenario::FusionTheorem5);
  c.sweep.var = SweepVar::NL;
  c.sweep.values = {2, 10};
  c.sweep.product = 20;
  c.snr_db = {0.0};
  const auto studies = run_theorem5_study(c);
  ASSERT_EQ(studies.size(), 1u);
  const auto& st = studies[0];
  EXPECT_EQ(st.disjoint.series, "fusion_theorem5/disjoint");
  EXPECT_EQ(st.overlap.series, "fusion_theorem5/full_overlap");
  ASSERT_EQ(st.comparisons.size(), 2u);
  EXPECT_EQ(st.comparisons[0].samples_per_sensor, 2);
  EXPECT_EQ(st.comparisons[0].sensors, 10);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& cmp = st.comparisons[k];
    const auto& a = st.disjoint.points[k].pe;
    const auto& b = st.overlap.points[k].pe;
    EXPECT_DOUBLE_EQ(cmp.delta, std::abs(a.pe - b.pe));
    EXPECT_DOUBLE_EQ(cmp.combined_se, std::hypot(a.standard_error(), b.standard_error()));
  }
}
