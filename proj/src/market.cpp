#include "dclogit/market.hpp"

#include <algorithm>
#include <cmath>

namespace dclogit {
namespace {

constexpr double kStepTolerance = 1e-12;
constexpr int kMaxIterations = 1000;
constexpr double kAgreement = 1e-8;

void validate_strategy(const ProductStrategy& x, const MarketConfig& cfg) {
    if (!(x.q >= 0.0) || !(x.q <= x.p) || !(x.p <= cfg.income)) {
        throw DomainError("strategy must satisfy 0 <= q <= p <= I");
    }
}

double golden_section_max(const auto& f, double lo, double hi, double width) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > width) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

/// Grid, then golden section, then bisection on the sign of a central
/// difference: near the optimum profit differences drop below rounding
/// noise long before the derivative sign does.
double numeric_best_quality(const ProductStrategy& rival, const MarketConfig& cfg) {
    const double income = cfg.income;
    auto f = [&](double q) { return profit({std::clamp(q, 0.0, income), income}, rival, cfg); };
    constexpr int grid = 1000;
    int best = 0;
    double best_value = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double value = f(income * i / grid);
        if (value > best_value) {
            best_value = value;
            best = i;
        }
    }
    double lo = income * std::max(0, best - 1) / grid;
    double hi = income * std::min(grid, best + 1) / grid;
    const double centre = golden_section_max(f, lo, hi, 1e-6 * income);

    const double h = 1e-7 * income;
    auto slope = [&](double q) { return f(q + h) - f(q - h); };
    lo = std::max(0.0, centre - 2e-6 * income);
    hi = std::min(income, centre + 2e-6 * income);
    if (lo - h < 0.0 || hi + h > income || slope(lo) <= 0.0 || slope(hi) >= 0.0) {
        return centre;  // boundary optimum or flat bracket: golden section is final
    }
    while (hi - lo > 1e-13 * income) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void MarketConfig::validate() const {
    if (!(income > 0.0) || !std::isfinite(income)) {
        throw ValidationError("income I must be strictly positive");
    }
    if (s != 1 && s != 2) {
        throw ValidationError("demand exponent s must be 1 or 2");
    }
}

double product_utility(const ProductStrategy& strategy) {
    if (!(strategy.p > 0.0)) {
        throw DomainError("price must be strictly positive to define utility");
    }
    if (!(strategy.q >= 0.0) || strategy.q > strategy.p) {
        throw DomainError("quality must lie in [0, p]");
    }
    return strategy.q / strategy.p;
}

std::array<double, 2> demand_shares(const Profile& profile, const MarketConfig& cfg) {
    cfg.validate();
    const double u0 = product_utility(profile[0]);
    const double u1 = product_utility(profile[1]);
    if (u0 + u1 == 0.0) {
        throw DegenerateMarketError("both products offer zero utility; demand is undefined");
    }
    std::array<double, 2> out{u0 / (u0 + u1), u1 / (u0 + u1)};
    if (cfg.s == 2) {
        out[0] *= out[0];
        out[1] *= out[1];
    }
    return out;
}

double profit(const ProductStrategy& own, const ProductStrategy& rival, const MarketConfig& cfg) {
    validate_strategy(own, cfg);
    validate_strategy(rival, cfg);
    return demand_shares({own, rival}, cfg)[0] * (own.p - own.q);
}

double market_effectiveness(const Profile& profile, const MarketConfig& cfg) {
    const auto shares = demand_shares(profile, cfg);
    return shares[0] * product_utility(profile[0]) + shares[1] * product_utility(profile[1]);
}

double market_deferral(const Profile& profile, const MarketConfig& cfg) {
    const auto shares = demand_shares(profile, cfg);
    return std::max(0.0, 1.0 - shares[0] - shares[1]);
}

double best_response_ratio(double rival_utility, int s) {
    const double uj = rival_utility;
    if (!(uj > 0.0)) {
        throw ValidationError("best reply is undefined against a zero-quality rival");
    }
    if (s == 1) {
        return std::sqrt(uj + uj * uj) - uj;
    }
    if (s == 2) {
        return 0.5 * (std::sqrt(uj * (8.0 + 9.0 * uj)) - 3.0 * uj);
    }
    throw ValidationError("demand exponent s must be 1 or 2");
}

InteriorFocRatios interior_foc_ratios(double rival_utility) {
    return {rival_utility / (1.0 + 2.0 * rival_utility), best_response_ratio(rival_utility, 2)};
}

BestResponse best_response(const ProductStrategy& rival, const MarketConfig& cfg) {
    cfg.validate();
    validate_strategy(rival, cfg);
    if (!(rival.q > 0.0)) {
        throw ValidationError("best reply is undefined against a zero-quality rival");
    }
    // Profit is linear and increasing in p at fixed u = q/p, so p = I.
    const double q = best_response_ratio(product_utility(rival), cfg.s) * cfg.income;
    BestResponse out;
    out.strategy = {q, cfg.income};
    out.profit = profit(out.strategy, rival, cfg);
    out.numeric_q = numeric_best_quality(rival, cfg);
    if (std::abs(out.numeric_q - q) > kAgreement * cfg.income) {
        throw SolverError("closed-form best reply q = " + std::to_string(q) +
                          " disagrees with the numeric maximizer q = " + std::to_string(out.numeric_q));
    }
    return out;
}

double max_deviation_gain(const Profile& profile, const MarketConfig& cfg, int grid) {
    const double base = profit(profile[0], profile[1], cfg);
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 1; a <= grid; ++a) {
        const double p = cfg.income * a / grid;
        for (int b = 0; b <= grid; ++b) {
            const ProductStrategy x{p * b / grid, p};
            if (x.q == 0.0 && product_utility(profile[1]) == 0.0) {
                continue;
            }
            best = std::max(best, profit(x, profile[1], cfg) - base);
        }
    }
    return best;
}

EquilibriumResult solve_equilibrium(const MarketConfig& cfg) {
    cfg.validate();
    const double income = cfg.income;
    EquilibriumResult out;
    double q = income / 4.0;
    double previous_step = std::numeric_limits<double>::infinity();
    double weight = 1.0;
    out.trace.push_back(q);
    for (out.iterations = 1; out.iterations <= kMaxIterations; ++out.iterations) {
        const double reply = best_response_ratio(q / income, cfg.s) * income;
        const double step = std::abs(reply - q);
        if (step >= previous_step && !out.damped) {
            out.damped = true;
            weight = 0.5;
        }
        q += weight * (reply - q);
        out.step = step;
        out.trace.push_back(q);
        if (step < kStepTolerance * income) {
            break;
        }
        previous_step = step;
    }
    if (out.iterations > kMaxIterations) {
        std::string tail;
        for (std::size_t i = out.trace.size() - std::min<std::size_t>(5, out.trace.size()); i < out.trace.size(); ++i) {
            tail += " " + std::to_string(out.trace[i]);
        }
        throw SolverError("best-reply iteration did not converge; last iterates:" + tail);
    }

    const ProductStrategy x{q, income};
    out.strategies = {x, x};
    const auto reply = best_response(x, cfg);
    out.foc_residual = std::abs(reply.strategy.q - q);
    out.profits = {profit(x, x, cfg), profit(x, x, cfg)};
    out.effectiveness = market_effectiveness(out.strategies, cfg);
    out.deferral = market_deferral(out.strategies, cfg);
    out.max_deviation_gain = max_deviation_gain(out.strategies, cfg);
    return out;
}

}  // namespace dclogit
