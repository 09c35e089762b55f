#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "featprog/featprog.hpp"
#include "test_util.hpp"

using namespace featprog;
using testutil::F;
using testutil::M;
using testutil::S;

TEST(Shift, MovesSamplesForward) {
    const auto out = shift(F({1, 2, 3}), 1);
    EXPECT_EQ(out.values, S({M, 1, 2}));
    EXPECT_EQ(out.warmup, 1u);
    EXPECT_EQ(out.order, 0u);
    EXPECT_EQ(out.lineage, "shift(raw,1)");
}

TEST(Shift, ComposesAdditively) {
    const auto s = F({4, 8, 15, 16, 23, 42});
    const auto twice = shift(shift(s, 1), 1);
    const auto once = shift(s, 2);
    EXPECT_EQ(twice.values, once.values);
    EXPECT_EQ(twice.warmup, once.warmup);
}

TEST(Shift, RejectsNonPositiveAndOversizeLags) {
    EXPECT_THROW((void)shift(F({1, 2, 3}), 0), parameter_error);
    EXPECT_THROW((void)shift(F({1, 2, 3}), -1), parameter_error);
    EXPECT_THROW((void)shift(F({1, 2, 3}), 3), empty_output_error);
}

TEST(Window, TwoSampleMean) {
    const auto out = window(F({1, 2, 3, 4}), 2, WindowStat::mean);
    EXPECT_EQ(out.values, S({M, 1.5, 2.5, 3.5}));
    EXPECT_EQ(out.warmup, 1u);
    EXPECT_EQ(out.lineage, "wmean(raw,2)");
}

TEST(Window, ConstantInputStaysConstant) {
    const auto c = F({2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5});
    for (auto stat : {WindowStat::mean, WindowStat::max, WindowStat::min, WindowStat::ewm}) {
        for (std::int64_t w : {1, 3, 7}) {
            const auto out = window(c, w, stat);
            for (std::size_t t = 0; t < out.values.size(); ++t) {
                if (t + 1 < static_cast<std::size_t>(w)) {
                    EXPECT_FALSE(out.values[t]);
                } else {
                    ASSERT_TRUE(out.values[t]);
                    EXPECT_NEAR(*out.values[t], 2.5, 1e-15);
                }
            }
        }
    }
    const auto sd = window(c, 4, WindowStat::std);
    EXPECT_EQ(*sd.values.back(), 0.0);
}

TEST(Window, SumOfThree) {
    EXPECT_EQ(*window(F({1, 2, 3}), 3, WindowStat::sum).values[2], 6.0);
}

TEST(Window, PopulationStd) {
    // population std of {2, 4, 4, 4, 5, 5, 7, 9} is exactly 2
    const auto out = window(F({2, 4, 4, 4, 5, 5, 7, 9}), 8, WindowStat::std);
    EXPECT_NEAR(*out.values[7], 2.0, 1e-15);
}

TEST(Window, EwmWeightsFavourRecentSamples) {
    const auto w = kernels::ewm_weights(3);  // alpha = 0.5 -> 1, 1/2, 1/4 normalized
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NEAR(w[0], 4.0 / 7.0, 1e-15);
    EXPECT_NEAR(w[1], 2.0 / 7.0, 1e-15);
    EXPECT_NEAR(w[2], 1.0 / 7.0, 1e-15);
    const auto out = window(F({7, 0, 0, 7}), 3, WindowStat::ewm);
    EXPECT_NEAR(*out.values[2], 1.0, 1e-15);
    EXPECT_NEAR(*out.values[3], 4.0, 1e-15);
}

TEST(Window, LookbackOneMeanIsIdentity) {
    const auto s = F({3, M, -1, 0.25});
    EXPECT_EQ(window(s, 1, WindowStat::mean).values, s.values);
}

TEST(Window, MissingInsideWindowPropagates) {
    const auto out = window(F({1, 2, M, 4, 5, 6}), 2, WindowStat::sum);
    EXPECT_EQ(out.values, S({M, 3, M, M, 9, 11}));
}

TEST(Window, RejectsNonPositiveLookback) {
    EXPECT_THROW((void)window(F({1, 2}), 0, WindowStat::mean), parameter_error);
}

TEST(Window, LookbackLongerThanSeriesIsAllMissing) {
    const auto out = window(F({1, 2}), 5, WindowStat::mean);
    EXPECT_EQ(out.values, S({M, M}));
    EXPECT_EQ(out.warmup, 4u);
}

namespace {

std::optional<double> oracle_stat(const std::vector<double>& slice, WindowStat stat) {
    const double n = static_cast<double>(slice.size());
    switch (stat) {
        case WindowStat::mean: return std::accumulate(slice.begin(), slice.end(), 0.0) / n;
        case WindowStat::sum: return std::accumulate(slice.begin(), slice.end(), 0.0);
        case WindowStat::max: return *std::max_element(slice.begin(), slice.end());
        case WindowStat::min: return *std::min_element(slice.begin(), slice.end());
        case WindowStat::std: {
            double sq = 0.0;
            double s = 0.0;
            for (double x : slice) {
                s += x;
                sq += x * x;
            }
            const double mean = s / n;
            return std::sqrt(std::max(0.0, sq / n - mean * mean));
        }
        case WindowStat::ewm: {
            const double alpha = 2.0 / (n + 1.0);
            double num = 0.0;
            double den = 0.0;
            for (std::size_t j = 0; j < slice.size(); ++j) {
                const double wt = std::pow(1.0 - alpha, static_cast<double>(j));
                num += wt * slice[slice.size() - 1 - j];
                den += wt;
            }
            return num / den;
        }
    }
    return std::nullopt;
}

}  // namespace

TEST(Window, MatchesDirectRecomputationOnRandomSeries) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_int_distribution<std::size_t> len(1, 64);
    std::bernoulli_distribution gap(0.05);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = len(rng);
        Series s(n);
        for (auto& x : s)
            if (!gap(rng)) x = val(rng);
        const std::size_t w = std::uniform_int_distribution<std::size_t>(1, n)(rng);
        for (auto stat : all_window_stats) {
            const auto got = kernels::window_values(s, w, stat);
            for (std::size_t t = 0; t < n; ++t) {
                std::optional<double> want;
                if (t + 1 >= w) {
                    std::vector<double> slice;
                    for (std::size_t j = t + 1 - w; j <= t; ++j)
                        if (s[j]) slice.push_back(*s[j]);
                    if (slice.size() == w) want = oracle_stat(slice, stat);
                }
                ASSERT_EQ(got[t].has_value(), want.has_value()) << stat_name(stat) << " t=" << t;
                if (want) {
                    EXPECT_NEAR(*got[t], *want, 1e-9 * (1.0 + std::abs(*want))) << stat_name(stat);
                }
            }
        }
    }
}

TEST(Difference, FirstDifferenceIsMomentum) {
    const auto x = F({3, 5, 9});
    const auto d = difference(x, shift(x, 1));
    EXPECT_EQ(d.values, S({M, 2, 4}));
    EXPECT_EQ(d.order, 1u);
    EXPECT_EQ(d.warmup, 1u);
    EXPECT_EQ(d.lineage, "diff(raw,shift(raw,1))");
}

TEST(Difference, SelfDifferenceIsZero) {
    const auto x = F({1, -2, 8, 0.5});
    const auto d = difference(x, x);
    for (const auto& v : d.values) EXPECT_EQ(*v, 0.0);
}

TEST(Difference, SmoothedDifferenceOfEqualInputs) {
    const auto a = F({1, 2, 3, 4, 5});
    const auto d = difference(a, a, 3);
    EXPECT_EQ(d.values, S({M, M, 0, 0, 0}));
    EXPECT_EQ(d.warmup, 2u);
    EXPECT_EQ(d.lineage, "diff(raw,raw,3)");
}

TEST(Difference, SmoothingAveragesBeforeSubtracting) {
    const auto a = F({1, 2, 3, 4, 5});
    const auto b = F({0, 0, 0, 3, 3});
    // 3-sample means: a -> [.,.,2,3,4], b -> [.,.,0,1,2]
    EXPECT_EQ(difference(a, b, 3).values, S({M, M, 2, 2, 2}));
}

TEST(Difference, OrderIsMaxPlusOne) {
    const auto x = F({1, 2, 3, 4});
    const auto d1 = difference(x, shift(x, 1));
    EXPECT_EQ(difference(d1, x).order, 2u);
    EXPECT_EQ(difference(d1, shift(d1, 1)).order, 2u);
}

TEST(Difference, LengthMismatchAndBadSmoothing) {
    EXPECT_THROW((void)difference(F({1, 2}), F({1, 2, 3})), shape_error);
    EXPECT_THROW((void)difference(F({1, 2}), F({1, 2}), 0), parameter_error);
}

TEST(Ratio, Pointwise) {
    EXPECT_EQ(ratio(F({2, 9}), F({1, 3})).values, S({2, 3}));
    EXPECT_EQ(ratio(F({2, 3, -4}), F({2, 3, -4})).values, S({1, 1, 1}));
    EXPECT_EQ(ratio(F({1, 2}), F({0, 4})).values, S({M, 0.5}));
    EXPECT_THROW((void)ratio(F({1}), F({1, 2})), shape_error);
}

TEST(Ratio, KeepsOrder) {
    const auto x = F({1, 2, 3});
    const auto d = difference(x, shift(x, 1));
    EXPECT_EQ(ratio(d, x).order, 1u);
    EXPECT_EQ(ratio(d, x).warmup, 1u);
}

TEST(Square, Pointwise) {
    EXPECT_EQ(square(F({-2, 3})).values, S({4, 9}));
    EXPECT_EQ(square(F({0, 0})).values, S({0, 0}));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Series s(100);
    for (auto& x : s) x = g(rng);
    for (const auto& v : square(raw_feature(s)).values) EXPECT_GE(*v, 0.0);
}

TEST(Kernels, AreDeterministic) {
    std::mt19937_64 rng(3);
    const auto p = testutil::random_panel(rng, 1, 80);
    const auto x = raw_feature(p.variate(0));
    for (auto stat : all_window_stats) EXPECT_EQ(window(x, 9, stat), window(x, 9, stat));
    EXPECT_EQ(difference(x, shift(x, 2), 4), difference(x, shift(x, 2), 4));
}

TEST(Kernels, WarmupIsExactWithoutInteriorGaps) {
    std::mt19937_64 rng(4);
    const auto p = testutil::random_panel(rng, 1, 60);
    const auto x = raw_feature(p.variate(0));
    const auto d = difference(window(x, 5, WindowStat::std), shift(x, 3), 2);
    const auto e = ratio(window(d, 4, WindowStat::ewm), square(shift(x, 9)));
    for (const auto* f : {&d, &e}) {
        for (std::size_t t = 0; t < f->values.size(); ++t) EXPECT_EQ(f->values[t].has_value(), t >= f->warmup);
    }
    EXPECT_EQ(d.warmup, 5u);
    EXPECT_EQ(e.warmup, 9u);
}
