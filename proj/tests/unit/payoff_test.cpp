// Copyright 2026 The Dualchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "dualchain/payoff.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dualchain {
namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

TEST(Payoff, MatchesFrozenValues) {
  for (const auto& g : oracle::kGoldenPayoffs) {
    const auto t = payoff_triple({g.r_f, g.r_b}, GameParams{g.k, 2016, 2016});
    EXPECT_LT(rel(*t.u_f, g.u_f), 1e-13) << g.r_f << "," << g.r_b;
    EXPECT_LT(rel(*t.u_a, g.u_a), 1e-13);
    EXPECT_LT(rel(*t.u_b, g.u_b), 1e-13);
  }
}

TEST(Payoff, MatchesPerPlayerOracleForAnyPower) {
  testing::for_all(2000, 21, [](testing::Gen& g) {
    const auto p = g.params();
    const auto s = g.state(1e-4);
    const double c = g.uniform(1e-6, 0.5);
    const auto want = oracle::raw_payoffs(s.r_f, s.r_b, p.k, p.n_in, p.n_de, c);
    const auto got = payoff_triple(s, p);
    EXPECT_LT(rel(*got.u_f, want.u_f), 1e-9);
    EXPECT_LT(rel(*got.u_a, want.u_a), 1e-9);
    EXPECT_LT(rel(*got.u_b, want.u_b), 1e-9);
    EXPECT_NEAR(ap_fickle(s, p, c), c * want.u_a, 1e-12);
  });
}

TEST(Payoff, CoexistencePointGivesOnePlusK) {
  testing::for_all(500, 22, [](testing::Gen& g) {
    const auto p = g.params();
    const auto t = payoff_triple({0.0, p.coexist_rb()}, p);
    EXPECT_NEAR(*t.u_f, 1 + p.k, 1e-9);
    EXPECT_NEAR(*t.u_a, 1 + p.k, 1e-9);
    EXPECT_NEAR(*t.u_b, 1 + p.k, 1e-9);
  });
}

TEST(Payoff, AOnlyNeverBelowOne) {
  testing::for_all(1000, 23, [](testing::Gen& g) {
    const auto t = payoff_triple(g.state(), g.params());
    EXPECT_GE(*t.u_a, 1.0 - 1e-12);
  });
}

TEST(Payoff, EdgeLimits) {
  const GameParams p{0.3, 2016, 2016};
  const auto edge = payoff_triple({0.2, 0.0}, p);
  EXPECT_DOUBLE_EQ(*edge.u_a, 1.0);
  EXPECT_DOUBLE_EQ(*edge.u_f, 1.0);
  EXPECT_NEAR(*edge.u_b, 1.5, 1e-12);

  const auto origin = payoff_triple({0.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(*origin.u_a, 1.0);
  EXPECT_FALSE(origin.u_f.has_value());
  EXPECT_FALSE(origin.u_b.has_value());

  const auto all_b = payoff_triple({0.0, 1.0}, p);
  EXPECT_FALSE(all_b.u_a.has_value());
  EXPECT_FALSE(all_b.u_f.has_value());
  EXPECT_TRUE(all_b.u_b.has_value());
}

TEST(Payoff, ErrorsOnUndefinedRequests) {
  const GameParams p{0.3, 2016, 2016};
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code([&] { payoff(Strategy::kAutomatic, {0.2, 0.2}, p); }),
            ErrorCode::kAutomaticNotAnalytic);
  EXPECT_EQ(code([&] { payoff(Strategy::kBOnly, {0.0, 0.0}, p); }),
            ErrorCode::kDivergentPayoff);
  EXPECT_EQ(code([&] { ap_fickle({0.2, 0.0}, p, 0.1); }),
            ErrorCode::kDegenerateState);
}

TEST(Payoff, FickleRewardAtZeroFickle) {
  EXPECT_NEAR(ap_fickle({0.0, 0.5}, GameParams{0.3, 2016, 2016}, 0.1), 0.2,
              1e-15);
}

TEST(Payoff, ConfigOverloadUsesBlockCounts) {
  const auto cfg = make_uniform_config(0.4, 100, 300, 0.0, 2);
  const MiningState s{0.3, 0.2};
  EXPECT_DOUBLE_EQ(payoff(Strategy::kFickle, s, cfg),
                   payoff(Strategy::kFickle, s, GameParams{0.4, 100, 300}));
}

// sign(u_f - u_a) and sign(u_f - u_b) reduce to polynomial comparisons.
TEST(Payoff, PairwiseSignsMatchReducedForms) {
  testing::for_all(2000, 24, [](testing::Gen& g) {
    const auto p = g.params();
    const auto st = g.state(1e-3);
    const double s = st.r_f + st.r_b, b = st.r_b;
    const double w = p.n_in * b * b + p.n_de * s * s;
    const double d = st.r_a() * p.n_in * b * b + (1 - b) * p.n_de * s * s;
    const auto t = payoff_triple(st, p);
    const double fa = p.k * d - b * w;
    const double fb = s * w - p.k * d;
    if (std::abs(fa) > 1e-9 * w) {
      EXPECT_EQ(*t.u_f > *t.u_a, fa > 0);
    }
    if (std::abs(fb) > 1e-9 * w) {
      EXPECT_EQ(*t.u_f > *t.u_b, fb > 0);
    }
  });
}

TEST(Payoff, FickleRewardIsLinearInPower) {
  testing::for_all(500, 25, [](testing::Gen& g) {
    const auto p = g.params();
    const auto s = g.state(1e-3);
    const double c = g.uniform(1e-4, 0.3);
    EXPECT_NEAR(ap_fickle(s, p, 2 * c), 2 * ap_fickle(s, p, c),
                1e-12 * ap_fickle(s, p, c));
  });
  const GameParams p{0.3, 2016, 2016};
  EXPECT_NEAR(ap_fickle({0.0, 0.4}, p, 0.06), 0.06 / 0.6, 1e-15);
}

TEST(Payoff, EdgeMatchesNearbyInterior) {
  // At (k, 0) loyal B earns exactly what A pays.
  const GameParams p{0.4, 2016, 2016};
  EXPECT_NEAR(*payoff_triple({0.4, 0.0}, p).u_b, 1.0, 1e-15);
  EXPECT_NEAR(*payoff_triple({0.4 - 1e-8, 1e-8}, p).u_b, 1.0, 1e-6);

  const GameParams q{0.05, 2016, 2016};
  const auto all_f = payoff_triple({1.0, 0.0}, q);
  EXPECT_DOUBLE_EQ(*all_f.u_f, 1.0);
  EXPECT_DOUBLE_EQ(*all_f.u_a, 1.0);
  EXPECT_NEAR(*all_f.u_b, 0.05, 1e-15);
  const auto near = payoff_triple({1.0 - 1e-8, 1e-8}, q);
  EXPECT_NEAR(*near.u_f, 1.0, 1e-6);
  EXPECT_NEAR(*near.u_a, 1.0, 1e-6);
  EXPECT_NEAR(*near.u_b, 0.05, 1e-6);
}

}  // namespace
}  // namespace dualchain
