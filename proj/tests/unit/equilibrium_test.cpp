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

#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dualchain/equilibrium.hpp"
#include "dualchain/payoff.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dualchain {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(Alpha, FrozenValueAtKOne) {
  EXPECT_NEAR(solve_alpha(GameParams{1.0, 2016, 2016}), oracle::kAlphaK1,
              1e-12);
}

TEST(Alpha, MatchesIndependentBisection) {
  testing::for_all(500, 31, [](testing::Gen& g) {
    const auto p = g.params();
    const double a = solve_alpha(p);
    EXPECT_NEAR(a, oracle::bisect_alpha(p.k, p.n_in, p.n_de), 1e-12);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, p.coexist_rb());
  });
}

TEST(Boundaries, MeetAtCoexistencePoint) {
  testing::for_all(200, 32, [](testing::Gen& g) {
    const auto p = g.params();
    EXPECT_NEAR(*boundary13_rb(0.0, p), p.coexist_rb(), 1e-12);
    EXPECT_NEAR(*boundary23_rb(0.0, p), p.coexist_rb(), 1e-12);
  });
}

TEST(Boundaries, DomainLimits) {
  const GameParams p{0.3, 2016, 2016};
  const double alpha = solve_alpha(p);
  EXPECT_DOUBLE_EQ(*boundary23_rb(0.3, p), 0.0);
  EXPECT_FALSE(boundary23_rb(0.31, p).has_value());
  EXPECT_TRUE(boundary13_rb(1.0 - alpha - 1e-9, p).has_value());
  EXPECT_FALSE(boundary13_rb(1.0 - alpha + 1e-6, p).has_value());
  EXPECT_NEAR(*boundary13_rb(1.0 - alpha - 1e-12, p), alpha, 1e-9);
}

TEST(Boundaries, CurvesAreTies) {
  testing::for_all(300, 33, [](testing::Gen& g) {
    const auto p = g.params();
    const double rf = g.uniform(1e-3, 0.999);
    if (const auto b = boundary13_rb(rf, p); b && *b > 1e-6) {
      const auto t = payoff_triple({rf, *b}, p);
      EXPECT_NEAR(*t.u_f, *t.u_a, 1e-8 * *t.u_a);
    }
    if (const auto b = boundary23_rb(rf, p); b && *b > 1e-6) {
      const auto t = payoff_triple({rf, *b}, p);
      EXPECT_NEAR(*t.u_f, *t.u_b, 1e-8 * *t.u_b);
    }
  });
}

TEST(Boundaries, OneThreeAboveTwoThree) {
  testing::for_all(300, 34, [](testing::Gen& g) {
    const auto p = g.params();
    const double rf = g.uniform(1e-6, 1.0);
    const auto b13 = boundary13_rb(rf, p);
    const auto b23 = boundary23_rb(rf, p);
    if (b13 && b23) {
      EXPECT_GT(*b13, *b23);
    }
  });
}

TEST(Zones, AgreeWithPayoffOrdering) {
  testing::for_all(3000, 35, [](testing::Gen& g) {
    const auto p = g.params();
    const auto s = g.state(1e-4);
    const auto t = payoff_triple(s, p);
    const double best = std::max({*t.u_f, *t.u_a, *t.u_b});
    const double tol = 1e-10;
    const bool f = *t.u_f >= best - tol;
    const bool a = *t.u_a >= best - tol;
    const bool b = *t.u_b >= best - tol;
    Zone want = Zone::kCoexistPoint;
    if (f && !a && !b) want = Zone::kZone3;
    if (!f && a && !b) want = Zone::kZone1;
    if (!f && !a && b) want = Zone::kZone2;
    if (f && a && !b) want = Zone::kBoundary13;
    if (f && !a && b) want = Zone::kBoundary23;
    EXPECT_EQ(zone_of(s, p), want);
  });
}

TEST(Zones, DivergentCornersThrow) {
  const GameParams p{0.3, 2016, 2016};
  EXPECT_EQ(code_of([&] { zone_of({0.0, 0.0}, p); }),
            ErrorCode::kDivergentState);
  EXPECT_EQ(code_of([&] { zone_of({0.0, 1.0}, p); }),
            ErrorCode::kDivergentState);
  EXPECT_EQ(zone_of({0.2, 0.0}, p), Zone::kZone2);
  EXPECT_EQ(zone_of({0.0, p.coexist_rb()}, p), Zone::kCoexistPoint);
}

TEST(Beta, ClosedAtAlphaAndTiesFickleWithA) {
  const GameParams p{0.3, 2016, 2016};
  const double alpha = solve_alpha(p);
  EXPECT_NEAR(solve_beta(p, alpha), 1.0 - alpha, 1e-9);
  const double c = 0.5 * (alpha + p.coexist_rb());
  const double beta = solve_beta(p, c);
  EXPECT_NEAR(*boundary13_rb(beta, p), c, 1e-10);
  EXPECT_EQ(code_of([&] { solve_beta(p, alpha * 0.5); }), ErrorCode::kNotCase3);
  EXPECT_EQ(code_of([&] { solve_beta(p, p.coexist_rb() + 0.01); }),
            ErrorCode::kNotCase3);
}

TEST(Equilibria, CaseShapes) {
  const auto seg = equilibria(make_uniform_config(0.05, 2016, 2016, 0.0, 10));
  EXPECT_EQ(seg.case_tag, 1);
  const auto& s = std::get<LackSegment>(seg.lack);
  EXPECT_DOUBLE_EQ(s.r_f_min, 0.05);
  EXPECT_DOUBLE_EQ(s.r_f_max, 1.0);
  EXPECT_DOUBLE_EQ(s.r_b, 0.0);
  ASSERT_TRUE(seg.coexist_point.has_value());
  EXPECT_NEAR(seg.coexist_point->r_b, 0.05 / 1.05, 1e-15);

  const GameParams p{0.3, 2016, 2016};
  const double alpha = solve_alpha(p);
  const auto c2 = equilibria(make_uniform_config(0.3, 2016, 2016, alpha / 2, 5));
  EXPECT_EQ(c2.case_tag, 2);
  EXPECT_NEAR(std::get<MiningState>(c2.lack).r_f, 1 - alpha / 2, 1e-12);

  const double mid = 0.5 * (alpha + p.coexist_rb());
  const auto c3 = equilibria(make_uniform_config(0.3, 2016, 2016, mid, 5));
  EXPECT_EQ(c3.case_tag, 3);
  EXPECT_NEAR(std::get<MiningState>(c3.lack).r_f, solve_beta(p, mid), 1e-12);
  EXPECT_TRUE(c3.beta.has_value());

  const auto c4 = equilibria(make_uniform_config(0.3, 2016, 2016, 0.5, 5));
  EXPECT_EQ(c4.case_tag, 4);
  EXPECT_FALSE(c4.coexist_point.has_value());
  EXPECT_EQ(std::get<MiningState>(c4.lack), (MiningState{0.0, 0.5}));
  EXPECT_TRUE(std::isinf(c4.distance_to_coexist({0.1, 0.5})));
}

TEST(Equilibria, MembersHaveNoProfitableGroupMove) {
  testing::for_all(300, 36, [](testing::Gen& g) {
    const auto p = g.params();
    const double c = g.coin(0.1) ? 0.0 : g.uniform(0.0, 0.95);
    const auto cfg = make_uniform_config(p.k, std::int64_t(p.n_in),
                                         std::int64_t(p.n_de), c, 3);
    const auto eq = equilibria(cfg);
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& s : eq.sample_points(7)) {
      const auto t = payoff_triple(s, p);
      const double uf = t.u_f.value_or(inf), ua = t.u_a.value_or(inf),
                   ub = t.u_b.value_or(inf);
      const double best = std::max({uf, ua, ub});
      if (s.r_f > 1e-12) {
        EXPECT_GE(uf, best - 1e-9);
      }
      if (s.r_a() > 1e-12) {
        EXPECT_GE(ua, best - 1e-9);
      }
      if (s.r_b - c > 1e-12) {
        EXPECT_GE(ub, best - 1e-9);
      }
    }
  });
}

TEST(Equilibria, SamplePointsCoverSegment) {
  const auto eq = equilibria(make_uniform_config(0.2, 2016, 2016, 0.0, 4));
  const auto pts = eq.sample_points(11);
  EXPECT_EQ(pts.size(), 12u);  // 11 on the segment plus the coexistence point
  EXPECT_DOUBLE_EQ(eq.distance_to_lack({0.5, 0.0}), 0.0);
  EXPECT_NEAR(eq.distance_to_lack({0.1, 0.0}), 0.1, 1e-15);
}

TEST(FiniteDeviation, AOnlyMinerLeavesForB) {
  const auto cfg = make_uniform_config(0.3, 2016, 2016, 0.0, 100);
  const auto d = finite_deviation({0.2, 0.0}, 0.01, Strategy::kAOnly, cfg);
  EXPECT_EQ(d.best_strategy, Strategy::kBOnly);
  EXPECT_EQ(d.binding_inequality, Deviation::kAToB);
  EXPECT_DOUBLE_EQ(d.current_payoff, 1.0);
  // After the move it is the only loyal B miner next to 0.2 fickle power.
  const auto want = oracle::raw_payoffs(0.2, 0.01, 0.3, 2016, 2016, 0.01);
  EXPECT_NEAR(d.best_payoff, want.u_b, 1e-12);
  EXPECT_NEAR(d.payoff_gain, want.u_b - 1.0, 1e-12);
}

TEST(FiniteDeviation, StaysOnEquilibriumSegment) {
  const auto cfg = make_uniform_config(0.3, 2016, 2016, 0.0, 10);
  const auto d = finite_deviation({0.5, 0.0}, 0.1, Strategy::kFickle, cfg);
  EXPECT_EQ(d.best_strategy, Strategy::kFickle);
  EXPECT_EQ(d.binding_inequality, Deviation::kNone);
  EXPECT_DOUBLE_EQ(d.payoff_gain, 0.0);
}

TEST(FiniteDeviation, RejectsPowerOutsideGroup) {
  const auto cfg = make_uniform_config(0.3, 2016, 2016, 0.0, 100);
  EXPECT_EQ(code_of([&] {
              finite_deviation({0.0, 0.5}, 0.01, Strategy::kFickle, cfg);
            }),
            ErrorCode::kPowerNotInGroup);
}

TEST(XThreshold, FrozenValue) {
  EXPECT_NEAR(x_threshold(make_uniform_config(0.5, 2016, 2016, 0.0, 10)),
              oracle::kXThresholdK05C01, 1e-12);
  EXPECT_EQ(code_of([] {
              x_threshold(make_uniform_config(0.3, 2016, 2016, 0.0, 2));
            }),
            ErrorCode::kPowerExceedsK);
}

TEST(Alpha, SmallPriceRoot) {
  const GameParams p{0.05, 2016, 2016};
  const double a = solve_alpha(p);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 0.05 / 1.05);
  // f(alpha) = 0 is the tie between fickle and A at (1 - alpha, alpha).
  const auto t = payoff_triple({1.0 - a, a}, p);
  EXPECT_NEAR(*t.u_f, *t.u_a, 1e-9);
}

TEST(Zones, NamedPoints) {
  const GameParams p{0.05, 2016, 2016};
  EXPECT_EQ(zone_of({0.5, 0.01}, p), Zone::kZone3);
  const double alpha = solve_alpha(p);
  EXPECT_EQ(zone_of({0.0, 0.5 * (alpha + p.coexist_rb())}, p), Zone::kZone2);
  EXPECT_EQ(zone_of({0.0, p.coexist_rb()}, p), Zone::kCoexistPoint);
}

TEST(Boundaries, ExistsNearFullFickle) {
  const GameParams p{0.05, 2016, 2016};
  const auto rb = boundary13_rb(0.95, p);
  ASSERT_TRUE(rb.has_value());
  EXPECT_GT(*rb, 0.0);
  EXPECT_LT(*rb, p.coexist_rb());
}

TEST(Beta, ZeroAtCoexistenceStick) {
  const GameParams p{0.3, 2016, 2016};
  EXPECT_NEAR(solve_beta(p, p.coexist_rb()), 0.0, 1e-9);
}

TEST(Equilibria, HeavyStickIsCaseFour) {
  const auto eq = equilibria(make_uniform_config(0.05, 2016, 2016, 0.9, 1));
  EXPECT_EQ(eq.case_tag, 4);
  EXPECT_EQ(std::get<MiningState>(eq.lack), (MiningState{0.0, 0.9}));
}

TEST(FiniteDeviation, EmptyBChainPaysPriceOverPower) {
  const auto cfg = make_uniform_config(0.3, 2016, 2016, 0.0, 100);
  const auto d = finite_deviation({0.0, 0.0}, 0.01, Strategy::kAOnly, cfg);
  EXPECT_EQ(d.best_strategy, Strategy::kBOnly);
  EXPECT_NEAR(d.payoff_gain, 0.3 / 0.01 - 1.0, 1e-9);
}

TEST(FiniteDeviation, TinyMinerCannotGainAtEquilibrium) {
  const double tiny = 1e-9;
  testing::for_all(100, 37, [&](testing::Gen& g) {
    const auto p = g.params();
    const auto cfg = validate_config(
        RawGameConfig{p.k, 2016, 2016, 0.0, {tiny, 1.0 - tiny}});
    for (const auto& s : equilibria(cfg).sample_points(7)) {
      const std::pair<Strategy, double> groups[] = {
          {Strategy::kFickle, s.r_f},
          {Strategy::kAOnly, s.r_a()},
          {Strategy::kBOnly, s.r_b}};
      for (const auto& [st, power] : groups) {
        if (power < tiny) continue;
        const auto d = finite_deviation(s, tiny, st, cfg);
        EXPECT_LE(d.payoff_gain, 1e-6)
            << strategy_name(st) << " at " << s.r_f << "," << s.r_b;
      }
    }
  });
}

TEST(XThreshold, TieAndSmallPowerLimit) {
  const auto cfg = make_uniform_config(0.5, 2016, 2016, 0.0, 10);
  const double x = x_threshold(cfg);
  EXPECT_NEAR(finite_deviation({x, 0.0}, 0.1, Strategy::kFickle, cfg)
                  .payoff_gain,
              0.0, 1e-12);
  EXPECT_GT(finite_deviation({x - 0.01, 0.0}, 0.1, Strategy::kFickle, cfg)
                .payoff_gain,
            0.0);
  const auto fine = make_uniform_config(0.5, 2016, 2016, 0.0, 100000);
  EXPECT_NEAR(x_threshold(fine), 0.5, 1e-4);
}

}  // namespace
}  // namespace dualchain
