#include <doctest.h>

#include "support.hpp"

using namespace dclogit;
using testing::letters;

namespace {

void check_distribution(const ChoiceDistribution& d, std::vector<double> masses, double deferral,
                        double eps = 1e-12) {
    REQUIRE(d.masses().size() == masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        CHECK(d.masses()[i] == doctest::Approx(masses[i]).epsilon(eps));
    }
    CHECK(d.deferral() == doctest::Approx(deferral).epsilon(eps));
}

std::vector<ModelSpec> random_models(std::mt19937_64& rng, std::size_t k) {
    const auto u = letters(k);
    return {testing::random_dcl(rng, k), DualParams(u, testing::uniform_vector(rng, k, 0.1, 4.0),
                                                    testing::uniform_vector(rng, k, 0.1, 4.0)),
            QuadraticParams(u, testing::uniform_vector(rng, k, 0.1, 4.0)),
            ReciprocalParams(u, testing::distinct_vector(rng, k, 0.2, 4.0), 0.7, true)};
}

}  // namespace

TEST_CASE("DCL share formula") {
    const auto u2 = letters(2);
    const DclParams p(u2, {2.0, 1.0}, {{Menu::pair(0, 1), 1.0}});
    check_distribution(evaluate_dcl(p, Menu::pair(0, 1)), {0.5, 0.25}, 0.25);
    check_distribution(evaluate_dcl(DclParams(u2, {5.0, 1.0}), Menu::singleton(0)), {1.0}, 0.0);

    const DclParams q(letters(3), {1.0, 1.0, 1.0}, {{Menu::full(3), 3.0}});
    check_distribution(evaluate_dcl(q, Menu::full(3)), {1.0 / 6, 1.0 / 6, 1.0 / 6}, 0.5);
    CHECK_THROWS_AS((void)evaluate_dcl(q, Menu::pair(0, 1)), DomainError);
}

TEST_CASE("DCL parameter invariants") {
    const auto u2 = letters(2);
    CHECK_THROWS_AS(DclParams(u2, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(DclParams(u2, {1.0}), ValidationError);
    CHECK_THROWS_AS(DclParams(u2, {1.0, 1.0}, {{Menu::pair(0, 1), 0.0}}), ValidationError);
    CHECK_THROWS_AS(DclParams(u2, {1.0, 1.0}, {{Menu::singleton(0), 1.0}}), ValidationError);
}

TEST_CASE("dual logit is a product of two shares") {
    const auto u2 = letters(2);
    check_distribution(evaluate_dual(DualParams(u2, {1, 1}, {1, 3}), Menu::pair(0, 1)), {1.0 / 8, 3.0 / 8}, 0.5);
    check_distribution(evaluate_dual(DualParams(u2, {1, 1}, {1, 1}), Menu::pair(0, 1)), {0.25, 0.25}, 0.5);
    check_distribution(evaluate_dual(DualParams(u2, {1, 2}, {2, 1}), Menu::singleton(0)), {1.0}, 0.0);
}

TEST_CASE("quadratic logit squares the share") {
    check_distribution(evaluate_quadratic(QuadraticParams(letters(2), {1, 2}), Menu::pair(0, 1)),
                       {1.0 / 9, 4.0 / 9}, 4.0 / 9);
    check_distribution(evaluate_quadratic(QuadraticParams(letters(3), {1, 1, 1}), Menu::full(3)),
                       {1.0 / 9, 1.0 / 9, 1.0 / 9}, 2.0 / 3);
    check_distribution(evaluate_quadratic(QuadraticParams(letters(2), {7, 1}), Menu::singleton(0)), {1.0}, 0.0);
}

TEST_CASE("reciprocal model") {
    const auto u2 = letters(2);
    check_distribution(evaluate_reciprocal(ReciprocalParams(u2, {2, 1}, 1.0), Menu::pair(0, 1)), {0.5, 0.25}, 0.25);
    check_distribution(evaluate_reciprocal(ReciprocalParams(u2, {2, 1}, 2.0), Menu::pair(0, 1)), {0.4, 0.2}, 0.4);
    check_distribution(evaluate_reciprocal(ReciprocalParams(letters(3), {3, 2, 1}, 1.0, true), Menu::full(3)),
                       {3 / 8.5, 2 / 8.5, 1 / 8.5}, 2.5 / 8.5);

    CHECK_THROWS_AS((void)evaluate_reciprocal(ReciprocalParams(letters(3), {3, 2, 1}, 1.0), Menu::full(3)),
                    UnsupportedMenuError);
    CHECK_THROWS_AS(ReciprocalParams(u2, {1, 1}, 1.0), DegeneratePairError);
    CHECK_THROWS_AS(ReciprocalParams(u2, {2, 1}, 0.0), ValidationError);
}

TEST_CASE("dual-induced DCL") {
    const auto u2 = letters(2);
    const auto p = dual_induced_dcl(DualParams(u2, {1, 1}, {1, 3}));
    CHECK(p.u(0) == 1.0);
    CHECK(p.u(1) == 3.0);
    CHECK(p.complexity(Menu::pair(0, 1)) == doctest::Approx(4.0));
    CHECK(dual_induced_dcl(DualParams(u2, {1, 1}, {1, 1})).complexity(Menu::pair(0, 1)) == doctest::Approx(2.0));

    const auto q = dual_induced_dcl(DualParams(letters(3), {1, 2, 3}, {1, 2, 3}));
    // (1+2+3)^2 - (1+4+9) = 22 = 4 + 6 + 12
    CHECK(q.complexity(Menu::full(3)) == doctest::Approx(22.0));
    CHECK(q.complexity(Menu::pair(0, 1)) == doctest::Approx(4.0));
    CHECK(q.complexity(Menu::pair(0, 2)) == doctest::Approx(6.0));
    CHECK(q.complexity(Menu::pair(1, 2)) == doctest::Approx(12.0));
}

TEST_CASE("deferral projection") {
    CHECK(deferral_probability(QuadraticParams(letters(2), {1, 1}), Menu::pair(0, 1)) == doctest::Approx(0.5));
    CHECK(deferral_probability(DclParams(letters(2), {2, 1}, {{Menu::pair(0, 1), 1.0}}), Menu::pair(0, 1)) ==
          doctest::Approx(0.25));
    CHECK(deferral_probability(DualParams(letters(2), {1, 2}, {3, 4}), Menu::singleton(1)) == 0.0);
}

TEST_CASE("property: every model yields a valid distribution satisfying A1, A2 and A3") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
        for (const auto& model : random_models(rng, k)) {
            const auto data = generate_dataset(model);
            CHECK(data.is_full_domain());
            for (const auto& [menu, dist] : data.table()) {
                double total = dist.deferral();
                for (double m : dist.masses()) {
                    total += m;
                    if (menu.size() >= 2) {
                        CHECK(m > 0.0);
                    }
                }
                CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
                if (menu.size() == 1) {
                    CHECK(dist.deferral() == 0.0);
                } else {
                    CHECK(dist.deferral() > 0.0);
                }
            }
            // Odds between two alternatives do not depend on the menu.
            const auto& grand = data.at(Menu::full(k));
            for (const auto& [menu, dist] : data.table()) {
                const auto m = menu.members();
                for (std::size_t i = 0; i + 1 < m.size(); ++i) {
                    const double here = dist.mass(m[i]) / dist.mass(m[i + 1]);
                    const double there = grand.mass(m[i]) / grand.mass(m[i + 1]);
                    CHECK(here == doctest::Approx(there).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("property: dual-induced DCL reproduces the dual logit") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
        const DualParams p(letters(k), testing::uniform_vector(rng, k, 0.1, 5.0),
                           testing::uniform_vector(rng, k, 0.1, 5.0));
        const auto induced = dual_induced_dcl(p);
        for (const auto& menu : all_menus(k)) {
            const auto a = evaluate_dcl(induced, menu);
            const auto b = evaluate_dual(p, menu);
            for (std::size_t i = 0; i < a.masses().size(); ++i) {
                CHECK(std::abs(a.masses()[i] - b.masses()[i]) <= 1e-12);
            }
            CHECK(std::abs(a.deferral() - b.deferral()) <= 1e-12);
            // Additivity over binary submenus.
            if (menu.size() > 2) {
                double pairs = 0.0;
                const auto m = menu.members();
                for (std::size_t i = 0; i < m.size(); ++i) {
                    for (std::size_t j = i + 1; j < m.size(); ++j) {
                        pairs += induced.complexity(Menu::pair(m[i], m[j]));
                    }
                }
                CHECK(induced.complexity(menu) == doctest::Approx(pairs).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("property: quadratic deferral is bounded by 1 - 1/|A|, attained at equal weights") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
        const QuadraticParams p(letters(k), testing::uniform_vector(rng, k, 0.01, 10.0));
        for (const auto& menu : all_menus(k)) {
            const double bound = 1.0 - 1.0 / static_cast<double>(menu.size());
            CHECK(evaluate_quadratic(p, menu).deferral() <= bound + 1e-12);
        }
        const QuadraticParams flat(letters(k), std::vector<double>(k, 2.5));
        CHECK(std::abs(evaluate_quadratic(flat, Menu::full(k)).deferral() - (1.0 - 1.0 / static_cast<double>(k))) <=
              1e-12);
    }
}

TEST_CASE("property: quadratic equals dual with identical criteria") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
        const auto v = testing::uniform_vector(rng, k, 0.1, 5.0);
        const QuadraticParams q(letters(k), v);
        const DualParams d(letters(k), v, v);
        for (const auto& menu : all_menus(k)) {
            const auto a = evaluate_quadratic(q, menu);
            const auto b = evaluate_dual(d, menu);
            for (std::size_t i = 0; i < a.masses().size(); ++i) {
                CHECK(std::abs(a.masses()[i] - b.masses()[i]) <= 1e-12);
            }
            CHECK(std::abs(a.deferral() - b.deferral()) <= 1e-12);
        }
    }
}

TEST_CASE("property: reciprocal binary deferral falls as the utility gap widens") {
    const auto u2 = letters(2);
    for (double lambda : {0.1, 1.0, 5.0}) {
        double previous = 1.0;
        for (int step = 1; step <= 200; ++step) {
            const double gap = 0.01 * step;
            const double defer = deferral_probability(ReciprocalParams(u2, {1.0 + gap, 1.0}, lambda), Menu::pair(0, 1));
            CHECK(defer < previous);
            previous = defer;
        }
    }
}

TEST_CASE("property: dual binary comparative statics match finite differences") {
    std::mt19937_64 rng(17);
    const auto u2 = letters(2);
    const Menu ab = Menu::pair(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        auto v1 = testing::uniform_vector(rng, 2, 0.3, 3.0);
        auto v2 = testing::uniform_vector(rng, 2, 0.3, 3.0);
        auto rho_a = [&](const std::vector<double>& a, const std::vector<double>& b) {
            return evaluate_dual(DualParams(u2, a, b), ab).mass(0);
        };
        const double s1 = v1[0] / (v1[0] + v1[1]);
        const double s2 = v2[0] / (v2[0] + v2[1]);
        // d(s1 s2) with respect to v1(a), v1(b), v2(a), v2(b).
        const double analytic[4] = {s2 * s1 * (1 - s1) / v1[0], -s2 * s1 / (v1[0] + v1[1]),
                                    s1 * s2 * (1 - s2) / v2[0], -s1 * s2 / (v2[0] + v2[1])};
        const double h = 1e-6;
        for (int which = 0; which < 4; ++which) {
            auto up1 = v1, dn1 = v1, up2 = v2, dn2 = v2;
            auto& up = which < 2 ? up1 : up2;
            auto& dn = which < 2 ? dn1 : dn2;
            up[static_cast<std::size_t>(which % 2)] += h;
            dn[static_cast<std::size_t>(which % 2)] -= h;
            const double fd = (rho_a(up1, up2) - rho_a(dn1, dn2)) / (2 * h);
            CHECK((fd > 0) == (which % 2 == 0));
            CHECK(fd == doctest::Approx(analytic[which]).epsilon(1e-4));
        }
    }
}
