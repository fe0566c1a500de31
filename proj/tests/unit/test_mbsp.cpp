#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mcsort/mbsp.hpp"

namespace {

using namespace mcsort;
using namespace mcsort::mbsp;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(MbspParams, SimplifiedProfile) {
  const auto m = MbspParams::simplified(8, 2.0);
  EXPECT_EQ(m.p, 8);
  EXPECT_EQ(m.m, 8);
  EXPECT_EQ(m.l, 0);
  EXPECT_EQ(m.L, 0);
  EXPECT_EQ(m.g, 10.0);
  EXPECT_TRUE(std::isinf(m.M));
  EXPECT_TRUE(m.follows_simplified_profile());
  auto off = m;
  off.l = 1;
  EXPECT_FALSE(off.follows_simplified_profile());
}

TEST(CostSr4, UnitKey) { EXPECT_EQ(cost_sr4(1, 5, 1).total, 68.0); }
TEST(CostSr4, Empty) { EXPECT_EQ(cost_sr4(0, 5, 1).total, 0.0); }
TEST(CostSr4, Radix65536) { EXPECT_EQ(cost_sr4(1e6, 5, 1, 65536).total, 3.4e7); }

TEST(CostSr4, TermsSumToTotal) {
  const auto e = cost_sr4(1000, 5, 1);
  EXPECT_EQ(e.term("local-compute"), 4 * 2 * 1000.0);
  EXPECT_EQ(e.term("slow-memory"), 4 * 3 * 1000 * 5.0);
  EXPECT_EQ(e.term("local-compute") + e.term("slow-memory"), e.total);
}

TEST(CostSr4, RejectsNonPowerOfTwoRadix) { EXPECT_THROW(cost_sr4(10, 5, 1, 100), ParameterError); }

TEST(CostPr, UnitKeysPerWorker) {
  for (double p : {1.0, 4.0, 16.0}) EXPECT_EQ(cost_pr(p, p, 5, 1, 256).total, 88 + 10240 * p);
}

TEST(CostPr, MillionKeysFourWorkers) {
  const auto e = cost_pr(1e6, 4, 5, 1, 256);
  EXPECT_EQ(e.total, 22040960.0);
  EXPECT_EQ(e.term("counter-exchange"), 40960.0);
}

TEST(CostPr, Pr2Pr4Crossover) {
  for (double p : {2.0, 4.0, 8.0, 16.0}) {
    const double cross = 1300480.0 * p * p / 44.0;  // about 29556 p^2
    EXPECT_NEAR(cross / (p * p), 29556.36, 0.01);
    EXPECT_GT(cost_pr(cross * 0.99, p, 5, 1, 65536).total, cost_pr(cross * 0.99, p, 5, 1, 256).total);
    EXPECT_LT(cost_pr(cross * 1.01, p, 5, 1, 65536).total, cost_pr(cross * 1.01, p, 5, 1, 256).total);
  }
}

TEST(CostOet, Examples) {
  EXPECT_EQ(cost_oet(1000, 1, 5, 1).total, 88 * 1000.0);
  EXPECT_EQ(cost_oet(0, 4, 5, 1).total, 0.0);
  EXPECT_EQ(cost_oet(1e6, 16, 5, 1).total, 24250000.0);
}

TEST(CostBtn, Examples) {
  EXPECT_EQ(cost_btn(1000, 1, 5, 1).total, 68 * 1000.0);
  EXPECT_EQ(cost_btn(1e6, 16, 5, 1).total, 16750000.0);
  EXPECT_THROW(cost_btn(1000, 6, 5, 1), ParameterError);
}

TEST(CostBtn, CheaperThanOetForEveryPGreaterThanOne) {
  for (double p = 2; p <= 1024; p *= 2) EXPECT_LT(cost_btn(1e7, p, 5, 1).total, cost_oet(1e7, p, 5, 1).total);
}

TEST(CostGsd, Examples) {
  EXPECT_EQ(cost_gsd(1024, 4, 1, 2).n_max.value(), 392.0);
  const auto e = cost_gsd(1e6, 16, 1, 4);
  EXPECT_EQ(e.n_max.value(), 78189.0);
  EXPECT_EQ(e.total, 5813780.0);
  EXPECT_EQ(cost_gsd(1e6, 2, 1, kInf).n_max.value(), 5e5);
  // The expansion factor vanishes but the r p term grows, so a finite w only
  // gets close while r p stays small next to n/p.
  EXPECT_NEAR(cost_gsd(1e12, 2, 1, 1e3).n_max.value() / 5e11, 1.0, 1.1e-3);
  EXPECT_EQ(gsd_n_max(1e6, 16, 3.2), (1 + 1 / 4.0) * 62500 + 64);
}

TEST(CostGsd, LowOrderTermsAreOptIn) {
  const auto base = cost_gsd(1e6, 16, 1, 4);
  const auto full = cost_gsd(1e6, 16, 1, 4, 5.0, true);
  EXPECT_NEAR(full.total - base.total, 16 + 5 * 16 * std::log2(62500.0), 1e-6);
  EXPECT_NEAR(full.term("low-order"), full.total - base.total, 1e-6);
}

TEST(CostGer, Examples) {
  const auto e = cost_ger(1024, 4, 1, 2);
  EXPECT_EQ(e.n_max.value(), 384.0);
  EXPECT_EQ(e.total, 28672.0);
  EXPECT_EQ(cost_ger(1024, 4, 1, kInf).total, 68 * 256.0 + 5 * 256 * 2.0);
}

// GER merges n/p keys where GSD merges n_max, but GER sorts n_max keys
// locally. With r = w the total gap is (n/p)(68/w - 5 lg p / w) - 5 r p lg p,
// so GER only wins on totals once 5 lg p > 68.
TEST(CostGer, MergeTermCheaperThanGsd) {
  for (double p = 2; p <= 64; p *= 2) {
    for (double w : {1.0, 2.0, 5.0}) {
      const auto ger = cost_ger(1e7, p, 1, w);
      const auto gsd = cost_gsd(1e7, p, 1, w);
      EXPECT_LT(ger.term("merge"), gsd.term("merge"));
      const double np = 1e7 / p, lp = std::log2(p);
      EXPECT_NEAR(ger.total - gsd.total, np * (68 - 5 * lp) / w - 5 * w * p * lp, 1e-6 * gsd.total);
    }
  }
  EXPECT_LT(cost_ger(1e12, 1 << 14, 1, 2).total, cost_gsd(1e12, 1 << 14, 1, 2).total);
}

TEST(CostEstimate, TotalsAreTermSums) {
  for (auto model : {Model::sr4, Model::pr4, Model::pr2, Model::btn, Model::oet, Model::gsd, Model::ger}) {
    const auto e = estimate(model, 1e6, 8);
    double sum = 0;
    for (const auto& t : e.terms) {
      EXPECT_GE(t.value, 0.0);
      sum += t.value;
    }
    EXPECT_EQ(sum, e.total);
  }
}

TEST(CostEstimate, MonotoneInN) {
  for (auto model : {Model::sr4, Model::pr4, Model::pr2, Model::btn, Model::oet, Model::gsd, Model::ger}) {
    double prev = 0;
    for (double n = 1; n <= 1e9; n *= 3) {
      const double t = estimate(model, n, 8, 1, 5, 3.0).total;
      EXPECT_GE(t, prev);
      prev = t;
    }
  }
}

TEST(PredictedSpeedup, RadixLimits) {
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e6, 1), 68.0 / 88, 1e-3);
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e9, 1), 68.0 / 88, 1e-5);
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e12, 4), 3.09, 0.005);
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e12, 8), 6.18, 0.005);
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e12, 16), 12.36, 0.005);
  EXPECT_NEAR(predicted_speedup(Model::pr4, 1e9, 8) / 8, 68.0 / 88, 0.01 * 68 / 88);
  EXPECT_EQ(predicted_speedup(Model::sr4, 1e6, 7), 1.0);
}

TEST(PredictedSpeedup, GsdMatchesLargeNFormula) {
  const double n = 131072000;  // 128M
  for (double p : {4.0, 8.0, 16.0}) {
    EXPECT_NEAR(predicted_speedup(Model::gsd, n, p), 68 * p / (68 + 6 * std::log2(p)), 1e-3);
  }
  EXPECT_NEAR(predicted_speedup(Model::gsd, n, 4), 3.4, 0.05);
  EXPECT_NEAR(predicted_speedup(Model::gsd, n, 8), 6.3, 0.05);
  EXPECT_NEAR(predicted_speedup(Model::gsd, n, 16), 11.82, 0.05);
}

TEST(ModelLookup, Names) {
  EXPECT_EQ(model_for("pr2"), Model::pr2);
  EXPECT_FALSE(model_for("gvr"));
  EXPECT_EQ(model_default_omega(1 << 20), 5.0);
}

TEST(MinOversampling, FrozenRegressionValues) {
  EXPECT_EQ(min_oversampling(1 << 20, 4, 0.5, 1), 343u);
  EXPECT_EQ(min_oversampling(1 << 18, 8, 0.5, 1), 337u);
  EXPECT_EQ(min_oversampling(1 << 20, 4, 0.5, 1, std::exp(1.0)), 236u);
}

TEST(MinOversampling, ResultSatisfiesTheInequalityMinimally) {
  const double n = 1 << 20, p = 4, e = 0.5, rho = 1;
  const auto rhs = [&](double s) {
    const double q = p * s - 1;
    return (1 + e) / (e * e) * (2 * rho * std::log2(n) + std::log2(2 * std::numbers::pi * p * p * q) + 1 / (3 * q) / std::log(2.0));
  };
  const double s = static_cast<double>(min_oversampling(n, p, e, rho));
  EXPECT_GE(s, rhs(s));
  EXPECT_LT(s - 1, rhs(s - 1));
}

TEST(MinOversampling, MonotoneInEpsilonAndRho) {
  std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
  for (double e : {0.1, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    const auto s = min_oversampling(1e9, 8, e, 1);
    EXPECT_LT(s, prev);
    prev = s;
  }
  prev = 0;
  for (double rho : {0.5, 1.0, 2.0, 4.0}) {
    const auto s = min_oversampling(1e9, 8, 0.5, rho);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(MinOversampling, InfeasibleAndInvalidArguments) {
  EXPECT_THROW(min_oversampling(1000, 8, 0.5, 1), ParameterError);
  EXPECT_THROW(min_oversampling(1e6, 8, 0.0, 1), ParameterError);
  EXPECT_THROW(min_oversampling(1e6, 8, 1.0, 1), ParameterError);
  EXPECT_THROW(min_oversampling(1e6, 8, 0.5, 0), ParameterError);
  EXPECT_THROW(min_oversampling(1e6, 1, 0.5, 1), ParameterError);
}

}  // namespace
