#include <dpc/philox.hpp>
#include <dpc/sim.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace dpc;

TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformIsInOpenClosedUnitInterval) {
  EXPECT_DOUBLE_EQ(uniform_open_closed(0, 0), 0x1.0p-53);
  EXPECT_DOUBLE_EQ(uniform_open_closed(0xffffffff, 0xffffffff), 1.0);
}

TEST(Philox, NormalsHaveUnitMoments) {
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = normal_pair({static_cast<std::uint32_t>(i), 0, 0, 0}, {1, 2});
    s1 += a + b;
    s2 += a * a + b * b;
  }
  EXPECT_NEAR(s1 / (2 * n), 0.0, 0.01);
  EXPECT_NEAR(s2 / (2 * n), 1.0, 0.01);
}

TEST(Scheme, Validation) {
  const ChannelParams c(3.0, FadingSet{0.0, 2.0});
  EXPECT_THROW(simulate(c, SchemeConfig::tin(), 9999, 1), InvalidParameter);
  EXPECT_THROW(simulate(c, SchemeConfig::costa_matched(1.0), 10000, 1), InvalidParameter);
  EXPECT_THROW(simulate(c, SchemeConfig::two_codeword(1.5), 10000, 1), InvalidParameter);
  EXPECT_THROW(simulate(c, SchemeConfig::costa_timeshare({0.5, 0.6}), 10000, 1), InvalidParameter);
  EXPECT_THROW(simulate(c, SchemeConfig::costa_timeshare({1.0}), 10000, 1), InvalidParameter);
  EXPECT_THROW(simulate(ChannelParams(3.0, FadingSet{0.0, 1.0, 2.0}), SchemeConfig::two_codeword(), 10000, 1),
               InvalidParameter);
  EXPECT_THROW(sweep_simulate({}, SchemeConfig::tin(), 10000, 1), InvalidParameter);
}

TEST(Scheme, ResolvedSchedules) {
  const ChannelParams c(3.0, FadingSet{0.0, 2.0});
  const auto avg = resolve(c, SchemeConfig::costa_average());
  ASSERT_EQ(avg.slots.size(), 1u);
  EXPECT_DOUBLE_EQ(*avg.slots[0].target, 1.0);
  const auto ts = resolve(c, SchemeConfig::costa_timeshare());
  ASSERT_EQ(ts.slots.size(), 2u);
  EXPECT_TRUE(ts.decodes(0, 0.0));
  EXPECT_FALSE(ts.decodes(0, 2.0));
  // a2^2 = P+1: everything precoded.
  EXPECT_EQ(resolve(c, SchemeConfig::two_codeword()).beta, 0.0);
  const auto two = resolve(ChannelParams(3.0, FadingSet{0.0, std::sqrt(2.0)}), SchemeConfig::two_codeword());
  EXPECT_NEAR(two.beta, 1.0 - 1.0 / 3.0, 1e-15);
}

TEST(ExactRates, MatchAnalyticForms) {
  const ChannelParams tin(3.0, FadingSet{2.0});
  EXPECT_NEAR(exact_scheme_rates(tin, SchemeConfig::tin())[0], 0.33903595255631885, 1e-12);
  EXPECT_NEAR(exact_scheme_rates(tin, SchemeConfig::costa_matched(2.0))[0], 1.0, 1e-12);
  const ChannelParams chain(1.0, FadingSet{0.0, 4.0, 16.0});
  for (double r : exact_scheme_rates(chain, SchemeConfig::costa_timeshare())) {
    EXPECT_NEAR(r, std::log2(2.0) / 6.0, 1e-12);
  }
  const ChannelParams two(4.0, FadingSet{0.0, std::sqrt(2.0)});
  const auto r = exact_scheme_rates(two, SchemeConfig::two_codeword());
  EXPECT_NEAR(*std::min_element(r.begin(), r.end()), inner2_closed({4.0, 0.0, std::sqrt(2.0)}).value, 1e-12);
}

TEST(Simulate, ReferenceInstances) {
  const auto tin = simulate(ChannelParams(3.0, FadingSet{2.0}), SchemeConfig::tin(), 1000000, 42);
  EXPECT_NEAR(tin.compound, 0.33903, 0.01);
  const auto costa = simulate(ChannelParams(3.0, FadingSet{2.0}), SchemeConfig::costa_matched(2.0), 1000000, 42);
  EXPECT_NEAR(costa.compound, 1.0, 0.01);
  const auto two = simulate(ChannelParams(3.0, FadingSet{0.0, std::sqrt(2.0)}), SchemeConfig::two_codeword(),
                            1000000, 42);
  EXPECT_NEAR(two.compound, 0.54248, 0.02);
}

TEST(Simulate, CompoundIsMinimumAndErrorsAreNonnegative) {
  const auto e = simulate(ChannelParams(1.0, FadingSet{0.5, 1.5, 3.0}), SchemeConfig::tin(), 50000, 3);
  ASSERT_EQ(e.rates.size(), 3u);
  EXPECT_EQ(e.compound, *std::min_element(e.rates.begin(), e.rates.end()));
  for (double s : e.stderrs) EXPECT_GE(s, 0.0);
  EXPECT_GT(e.compound_stderr, 0.0);
  EXPECT_EQ(e.samples, 50000u);
  EXPECT_EQ(e.seed, 3u);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  const ChannelParams c(3.0, FadingSet{0.0, 16.0, 256.0});
  const auto cfg = SchemeConfig::costa_timeshare();
  const auto a = simulate(c, cfg, 100003, 9, 1);
  const auto b = simulate(c, cfg, 100003, 9, 4);
  const auto d = simulate(c, cfg, 100003, 9, 32);
  for (std::size_t j = 0; j < a.rates.size(); ++j) {
    EXPECT_EQ(std::memcmp(&a.rates[j], &b.rates[j], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.rates[j], &d.rates[j], sizeof(double)), 0);
    EXPECT_EQ(a.stderrs[j], b.stderrs[j]);
  }
  const auto other = simulate(c, cfg, 100003, 10, 1);
  EXPECT_NE(other.rates[0], a.rates[0]);
}

TEST(Sweep, SingleCellEqualsSimulate) {
  const ChannelParams c(10.0, FadingSet{0.0, 1.0});
  const auto one = sweep_simulate({c}, SchemeConfig::tin(), 20000, 5);
  const auto direct = simulate(c, SchemeConfig::tin(), 20000, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].rates, direct.rates);
  EXPECT_EQ(one[0].compound, direct.compound);
}

TEST(Sweep, TinPowerSweepTracksAnalyticCurve) {
  std::vector<ChannelParams> grid;
  for (int k = 0; k < 10; ++k) grid.emplace_back(std::pow(10.0, -1.0 + 0.3 * k), FadingSet{1.0});
  const auto out = sweep_simulate(grid, SchemeConfig::tin(), 200000, 77);
  const auto again = sweep_simulate(grid, SchemeConfig::tin(), 200000, 77, 1);
  ASSERT_EQ(out.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double exact = 0.5 * std::log2(1.0 + grid[k].power() / 2.0);
    EXPECT_LE(std::abs(out[k].compound - exact), 4.0 * out[k].compound_stderr) << "cell " << k;
    EXPECT_EQ(out[k].rates, again[k].rates);
  }
  // Cells draw from their own streams.
  const auto twin = sweep_simulate({grid[0], grid[0]}, SchemeConfig::tin(), 200000, 77);
  EXPECT_EQ(twin[0].rates, out[0].rates);
  EXPECT_NE(twin[1].rates, out[0].rates);
}

TEST(Simulate, GeneralizedChannelMatchesNormalized) {
  const ChannelParams raw(8.0, FadingSet{0.0, 1.0}, 4.0, 2.0);
  const auto n = normalize(raw);
  const auto a = exact_scheme_rates(raw, SchemeConfig::costa_timeshare());
  const auto b = exact_scheme_rates(n, SchemeConfig::costa_timeshare());
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  const auto sa = simulate(raw, SchemeConfig::tin(), 200000, 8);
  const auto sb = simulate(n, SchemeConfig::tin(), 200000, 8);
  for (std::size_t j = 0; j < sa.rates.size(); ++j) EXPECT_NEAR(sa.rates[j], sb.rates[j], 1e-9);
}
