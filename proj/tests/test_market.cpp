#include <doctest.h>

#include <cmath>

#include "dclogit/market.hpp"

using namespace dclogit;

namespace {

// Dense scan plus local refinement of q -> profit((q, I), rival).
double brute_force_best_q(const ProductStrategy& rival, const MarketConfig& cfg) {
    const double I = cfg.income;
    auto value = [&](double q) { return profit({q, I}, rival, cfg); };
    const int n = 200000;
    double best_q = 0.0;
    double best = -1.0;
    for (int i = 1; i <= n; ++i) {
        const double q = I * i / n;
        const double v = value(q);
        if (v > best) {
            best = v;
            best_q = q;
        }
    }
    double lo = std::max(0.0, best_q - I / n);
    double hi = std::min(I, best_q + I / n);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3;
        const double m2 = hi - (hi - lo) / 3;
        (value(m1) < value(m2) ? lo : hi) = value(m1) < value(m2) ? m1 : m2;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("product utility and profit") {
    CHECK(product_utility({1.0 / 3, 1.0}) == doctest::Approx(1.0 / 3));
    CHECK(product_utility({0.0, 1.0}) == 0.0);
    CHECK(product_utility({1.0, 1.0}) == 1.0);
    CHECK_THROWS_AS((void)product_utility({0.0, 0.0}), DomainError);
    CHECK_THROWS_AS((void)product_utility({2.0, 1.0}), DomainError);

    const MarketConfig s1{1.0, 1};
    const MarketConfig s2{1.0, 2};
    CHECK(profit({1.0 / 3, 1}, {1.0 / 3, 1}, s1) == doctest::Approx(1.0 / 3));
    CHECK(profit({0.5, 1}, {0.5, 1}, s2) == doctest::Approx(1.0 / 8));
    CHECK(profit({0.7, 0.7}, {0.5, 1}, s1) == 0.0);
    CHECK_THROWS_AS((void)profit({0.0, 1}, {0.0, 1}, s1), DegenerateMarketError);
    CHECK_THROWS_AS((MarketConfig{0.0, 1}.validate()), ValidationError);
    CHECK_THROWS_AS((MarketConfig{1.0, 3}.validate()), ValidationError);
}

TEST_CASE("market effectiveness and deferral") {
    const MarketConfig s1{1.0, 1};
    const MarketConfig s2{1.0, 2};
    CHECK(market_effectiveness({{{1.0 / 3, 1}, {1.0 / 3, 1}}}, s1) == doctest::Approx(1.0 / 3));
    CHECK(market_effectiveness({{{0.5, 1}, {0.5, 1}}}, s2) == doctest::Approx(0.25));
    CHECK(market_deferral({{{0.5, 1}, {0.5, 1}}}, s2) == doctest::Approx(0.5));
    CHECK(market_deferral({{{0.2, 1}, {0.7, 1}}}, s1) == doctest::Approx(0.0));
    // One product worthless: only the rival contributes.
    CHECK(market_effectiveness({{{0.0, 1}, {0.6, 1}}}, s2) == doctest::Approx(0.6));
    const auto shares = demand_shares({{{0.25, 1}, {0.75, 1}}}, s2);
    CHECK(shares[0] == doctest::Approx(1.0 / 16));
    CHECK(shares[1] == doctest::Approx(9.0 / 16));
}

TEST_CASE("best responses at the symmetric fixed points") {
    const auto r1 = best_response({1.0 / 3, 1.0}, {1.0, 1});
    CHECK(r1.strategy.p == 1.0);
    CHECK(r1.strategy.q == doctest::Approx(1.0 / 3).epsilon(1e-12));
    const auto r2 = best_response({0.5, 1.0}, {1.0, 2});
    CHECK(r2.strategy.q == doctest::Approx(0.5).epsilon(1e-12));
    const auto r3 = best_response({2.0 / 3, 2.0}, {2.0, 1});
    CHECK(r3.strategy.p == 2.0);
    CHECK(r3.strategy.q == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(std::abs(r3.numeric_q - r3.strategy.q) <= 1e-8 * 2.0);
    CHECK_THROWS_AS((void)best_response({0.0, 1.0}, {1.0, 1}), ValidationError);

    CHECK(best_response_ratio(1.0 / 3, 1) == doctest::Approx(1.0 / 3));
    CHECK(best_response_ratio(0.5, 2) == doctest::Approx(0.5));
}

TEST_CASE("property: closed-form best reply matches a brute-force maximizer") {
    for (int s : {1, 2}) {
        for (double I : {0.5, 1.0, 3.0}) {
            for (double rq : {0.05, 0.3, 0.6, 0.95}) {
                for (double rp : {0.5, 1.0}) {
                    const ProductStrategy rival{rq * rp * I, rp * I};
                    const MarketConfig cfg{I, s};
                    const auto br = best_response(rival, cfg);
                    const double oracle = brute_force_best_q(rival, cfg);
                    CHECK(std::abs(br.strategy.q - oracle) <= 1e-6 * I);
                    CHECK(br.strategy.q / I == doctest::Approx(best_response_ratio(rq, s)).epsilon(1e-12));
                    // Raising the price at the optimal ratio never hurts.
                    const double ratio = br.strategy.q / br.strategy.p;
                    CHECK(profit({ratio * 0.9 * I, 0.9 * I}, rival, cfg) <= br.profit + 1e-15);
                }
            }
        }
    }
}

TEST_CASE("property: the two interior conditions of the conflict game are incompatible") {
    for (int i = 1; i <= 1000; ++i) {
        const double u = i / 1000.0;
        const auto r = interior_foc_ratios(u);
        CHECK(std::abs(r.price_condition - r.quality_condition) > 1e-3 * u);
        CHECK(r.quality_condition == doctest::Approx(best_response_ratio(u, 2)));
    }
}

TEST_CASE("equilibria") {
    const auto e1 = solve_equilibrium({1.0, 1});
    CHECK(e1.strategies[0].q == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(e1.strategies[0].p == 1.0);
    CHECK(e1.profits[0] == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(e1.effectiveness == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(e1.deferral == 0.0);

    const auto e2 = solve_equilibrium({1.0, 2});
    CHECK(e2.strategies[1].q == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(e2.profits[1] == doctest::Approx(1.0 / 8).epsilon(1e-10));
    CHECK(e2.effectiveness == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(e2.deferral == doctest::Approx(0.5).epsilon(1e-10));

    const auto e10 = solve_equilibrium({10.0, 2});
    CHECK(e10.strategies[0].q == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(e10.strategies[0].p == 10.0);
    CHECK(e10.profits[0] == doctest::Approx(10.0 / 8).epsilon(1e-10));
    CHECK(e10.step < 1e-12 * 10.0);
    CHECK_FALSE(e10.trace.empty());
}

TEST_CASE("property: comparative statics, homogeneity and deviation checks") {
    for (double I : {0.5, 1.0, 2.0, 10.0}) {
        const auto plain = solve_equilibrium({I, 1});
        const auto conflict = solve_equilibrium({I, 2});
        CHECK(conflict.strategies[0].q / plain.strategies[0].q == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(conflict.profits[0] / plain.profits[0] == doctest::Approx(3.0 / 8).epsilon(1e-9));
        CHECK(conflict.effectiveness / plain.effectiveness == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(conflict.strategies[0].q == doctest::Approx(I / 2).epsilon(1e-10));
        CHECK(plain.strategies[0].q == doctest::Approx(I / 3).epsilon(1e-10));
        CHECK(conflict.deferral == doctest::Approx(0.5).epsilon(1e-10));
        for (const auto* e : {&plain, &conflict}) {
            CHECK(e->foc_residual <= 1e-10 * I);
            CHECK(e->max_deviation_gain < 1e-6 * I);
        }

        // Independent grid search over the full (q, p) square, including p < I.
        for (const auto* e : {&plain, &conflict}) {
            const MarketConfig cfg{I, e == &plain ? 1 : 2};
            const double base = e->profits[0];
            double best_gain = -1.0;
            for (int i = 0; i <= 150; ++i) {
                for (int j = 1; j <= 150; ++j) {
                    const double p = I * j / 150.0;
                    const double q = p * i / 150.0;
                    best_gain = std::max(best_gain, profit({q, p}, e->strategies[1], cfg) - base);
                }
            }
            CHECK(best_gain < 1e-6 * I);
        }
    }
}
