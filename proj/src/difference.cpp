#include "dclogit/difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dclogit/axioms.hpp"

namespace dclogit {
namespace {

int signum_within(double x, double y, Tolerance tol) {
    if (tol.equal(x, y)) {
        return 0;
    }
    return x > y ? 1 : -1;
}

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda must be strictly positive and finite");
    }
}

void check_decreasing(const GapFunction& f, double lo, double hi) {
    const std::size_t n = lo < hi ? kMonotonicityGrid : 1;
    double previous = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double value = f(g);
        if (!std::isfinite(value) || value <= 0.0) {
            throw ValidationError("gap function must be positive and finite on the observed gap range; f(" +
                                  std::to_string(g) + ") = " + std::to_string(value));
        }
        if (i > 0 && !(value < previous)) {
            throw ValidationError("gap function is not strictly decreasing near gap " + std::to_string(g));
        }
        previous = value;
    }
}

std::vector<RollerCoasterPoint> roller_coaster_impl(std::span<const double> base_u, const MenuComplexity& complexity,
                                                    std::span<const double> added_u) {
    if (base_u.size() < 2) {
        throw ValidationError("roller-coaster base menu needs at least two alternatives");
    }
    const double u_b = std::accumulate(base_u.begin(), base_u.end(), 0.0);
    const double d_b = complexity(base_u);
    const double rho_b = d_b / (u_b + d_b);
    std::vector<double> expanded(base_u.begin(), base_u.end());
    expanded.push_back(0.0);

    std::vector<RollerCoasterPoint> out;
    out.reserve(added_u.size());
    for (double x : added_u) {
        if (!(x > 0.0)) {
            throw ValidationError("added utilities must be strictly positive");
        }
        expanded.back() = x;
        const double u_a = u_b + x;
        const double d_a = complexity(expanded);
        RollerCoasterPoint p{};
        p.added = x;
        p.rho_o = d_a / (u_a + d_a);
        p.rho_o_base = rho_b;
        p.cost_ratio = (d_a - d_b) / d_b;
        p.benefit_ratio = (u_a - u_b) / u_b;
        p.consistent = signum_within(p.rho_o, p.rho_o_base, kStrictTolerance) ==
                       signum_within(p.cost_ratio, p.benefit_ratio, kStrictTolerance);
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::string_view gap_function_name(GapFunctionKind kind) {
    switch (kind) {
        case GapFunctionKind::Reciprocal: return "reciprocal";
        case GapFunctionKind::Exponential: return "exponential";
        case GapFunctionKind::LinearCap: return "linear-cap";
        case GapFunctionKind::Custom: return "custom";
    }
    return "custom";
}

GapFunctionKind parse_gap_function(std::string_view name) {
    if (name == "reciprocal") {
        return GapFunctionKind::Reciprocal;
    }
    if (name == "exponential") {
        return GapFunctionKind::Exponential;
    }
    if (name == "linear-cap") {
        return GapFunctionKind::LinearCap;
    }
    throw ValidationError("unknown gap function '" + std::string(name) + "'");
}

GapFunction GapFunction::reciprocal(double lambda) {
    require_positive_lambda(lambda);
    return {GapFunctionKind::Reciprocal, lambda, [lambda](double x) { return lambda / x; }};
}

GapFunction GapFunction::exponential(double lambda) {
    require_positive_lambda(lambda);
    return {GapFunctionKind::Exponential, lambda, [lambda](double x) { return lambda * std::exp(-x); }};
}

GapFunction GapFunction::linear_cap(double lambda) {
    require_positive_lambda(lambda);
    return {GapFunctionKind::LinearCap, lambda, [lambda](double x) { return std::max(0.0, lambda - x); }};
}

GapFunction GapFunction::custom(std::function<double(double)> f) {
    if (!f) {
        throw ValidationError("custom gap function is empty");
    }
    return {GapFunctionKind::Custom, 0.0, std::move(f)};
}

DclParams build_difference_dcl(const DifferenceSpec& spec, bool additive) {
    DclParams out(spec.universe, spec.u);
    const std::size_t k = spec.universe.size();
    if (k < 2) {
        return out;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double gap = std::abs(spec.u[i] - spec.u[j]);
            if (gap == 0.0) {
                throw DegeneratePairError("alternatives " + spec.universe.id(i) + " and " + spec.universe.id(j) +
                                          " have equal utility; the binary complexity is undefined");
            }
            lo = std::min(lo, gap);
            hi = std::max(hi, gap);
        }
    }
    check_decreasing(spec.f, lo, hi);

    for (const auto& menu : all_menus(k)) {
        if (menu.size() < 2 || (menu.size() > 2 && !additive)) {
            continue;
        }
        const auto members = menu.members();
        double d = 0.0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                d += spec.f(std::abs(spec.u[members[a]] - spec.u[members[b]]));
            }
        }
        out.set_complexity(menu, d);
    }
    return out;
}

ReciprocalParams recover_reciprocal(const ChoiceDataset& data, Anchor anchor, Tolerance tol) {
    const auto& universe = data.universe();
    const std::size_t k = universe.size();
    if (anchor.z >= k) {
        throw DomainError("anchor alternative outside the universe");
    }
    if (!(anchor.alpha > 0.0) || !std::isfinite(anchor.alpha)) {
        throw ValidationError("anchor scale alpha must be strictly positive");
    }
    if (k < 2) {
        throw ValidationError("reciprocal identification needs at least two alternatives");
    }
    data.require_binary_domain();
    ChoiceDataset binary(universe);
    for (const auto& [menu, dist] : data.table()) {
        if (menu.size() <= 2) {
            binary.set(dist);
        }
    }

    std::vector<AxiomReport> reports{check_desirability(binary, tol), check_positivity(binary, tol),
                                     check_active_choice_luce(binary, tol)};
    for (const auto& r : reports) {
        if (!r.passed) {
            throw NotReciprocalError("binary data is not a decision-conflict logit (fails " +
                                         std::string(axiom_name(r.axiom)) + ")",
                                     reports);
        }
    }
    const auto a7 = check_asymmetry(binary, tol);
    if (!a7.passed) {
        throw DegeneratePairError("binary data fails A7: some pair is chosen with equal probability");
    }
    reports.push_back(a7);
    reports.push_back(check_odds_ratio_proportionality(binary, tol));
    if (!reports.back().passed) {
        throw NotReciprocalError("binary data fails A8", reports);
    }

    // Unit-anchor solution first; scaling afterwards keeps (alpha u, alpha^2 lambda) exact.
    std::vector<double> u(k, 1.0);
    for (std::size_t x = 0; x < k; ++x) {
        if (x != anchor.z) {
            const auto& dist = binary.at(Menu::pair(anchor.z, x));
            u[x] = dist.mass(x) / dist.mass(anchor.z);
        }
    }
    std::vector<double> products;
    std::vector<Menu> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const Menu m = Menu::pair(i, j);
            const double defer = binary.at(m).deferral();
            if (defer >= 1.0) {
                throw SolverError("degenerate menu " + menu_label(universe, m) + ": deferral probability is 1");
            }
            const double d = defer / (1.0 - defer) * (u[i] + u[j]);
            products.push_back(d * std::abs(u[i] - u[j]));
            pairs.push_back(m);
        }
    }
    std::vector<double> sorted = products;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double lambda = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    AxiomReport consistency;
    consistency.axiom = Axiom::A8;
    consistency.tolerance = tol;
    for (std::size_t p = 0; p < products.size(); ++p) {
        ++consistency.checked;
        if (!tol.equal(products[p], lambda)) {
            consistency.violations.push_back(
                Violation{{menu_label(universe, pairs[p])}, products[p], lambda, products[p] - lambda});
        }
    }
    consistency.passed = consistency.violations.empty();
    if (!consistency.passed) {
        std::sort(consistency.violations.begin(), consistency.violations.end(),
                  [](const Violation& a, const Violation& b) { return std::abs(a.slack) > std::abs(b.slack); });
        reports.push_back(consistency);
        throw NotReciprocalError("lambda estimates disagree across pairs (worst at " +
                                     consistency.violations.front().witness.front() + ")",
                                 reports);
    }
    if (!(lambda > 0.0)) {
        throw NotReciprocalError("recovered lambda is not positive", reports);
    }

    for (auto& x : u) {
        x *= anchor.alpha;
    }
    return ReciprocalParams(universe, std::move(u), lambda * (anchor.alpha * anchor.alpha));
}

RevealedPreference revealed_preference(const ReciprocalParams& params) {
    RevealedPreference out;
    const std::size_t k = params.universe.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const std::size_t hi = params.u[i] > params.u[j] ? i : j;
            const std::size_t lo = hi == i ? j : i;
            const double d = params.pair_complexity(i, j);
            const double delta = std::max(0.0, d - params.u[lo]);
            out.delta.emplace(Menu::pair(i, j), delta);
            if (params.u[hi] > params.u[lo] + delta) {
                out.strict_pairs.emplace(hi, lo);
            }
        }
    }
    return out;
}

std::vector<CurvePoint> similarity_deferral_curve(double u_base, std::span<const double> gaps, double lambda) {
    require_positive_lambda(lambda);
    if (!(u_base > 0.0)) {
        throw ValidationError("base utility must be strictly positive");
    }
    const ChoiceUniverse universe({"a", "b"});
    std::vector<CurvePoint> out;
    out.reserve(gaps.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double g = gaps[i];
        if (!(g > 0.0) || (i > 0 && !(g > previous))) {
            throw ValidationError("gaps must be strictly positive and strictly ascending");
        }
        previous = g;
        const ReciprocalParams params(universe, {u_base + g, u_base}, lambda);
        out.push_back({g, evaluate_reciprocal(params, Menu::pair(0, 1)).deferral()});
    }
    return out;
}

std::string_view attractiveness_effect_name(AttractivenessEffect e) {
    switch (e) {
        case AttractivenessEffect::Relative: return "relative";
        case AttractivenessEffect::Absolute: return "absolute";
        case AttractivenessEffect::Mixed: return "mixed";
    }
    return "mixed";
}

AttractivenessResult attractiveness_comparison(std::pair<double, double> ab, std::pair<double, double> cd,
                                               double lambda) {
    require_positive_lambda(lambda);
    const ChoiceUniverse universe({"a", "b"});
    auto deferral = [&](std::pair<double, double> p) {
        if (p.first == p.second) {
            throw DegeneratePairError("pair utilities must differ");
        }
        const ReciprocalParams params(universe, {p.first, p.second}, lambda);
        return evaluate_reciprocal(params, Menu::pair(0, 1)).deferral();
    };
    AttractivenessResult r{};
    r.rho_ab = deferral(ab);
    r.rho_cd = deferral(cd);
    r.order = signum_within(r.rho_cd, r.rho_ab, kStrictTolerance);
    const double sq_ab = std::abs(ab.first * ab.first - ab.second * ab.second);
    const double sq_cd = std::abs(cd.first * cd.first - cd.second * cd.second);
    // Deferral falls as the squared-utility gap grows.
    r.squared_gap_order = signum_within(sq_ab, sq_cd, kStrictTolerance);

    const bool same_sum = kStrictTolerance.equal(ab.first + ab.second, cd.first + cd.second);
    const bool same_gap = kStrictTolerance.equal(std::abs(ab.first - ab.second), std::abs(cd.first - cd.second));
    if (same_sum && !same_gap) {
        r.effect = AttractivenessEffect::Relative;
    } else if (same_gap && !same_sum) {
        r.effect = AttractivenessEffect::Absolute;
    } else {
        r.effect = AttractivenessEffect::Mixed;
    }
    return r;
}

std::vector<RollerCoasterPoint> roller_coaster_curve(std::span<const double> base_u, const MenuComplexity& complexity,
                                                     std::span<const double> added_u) {
    return roller_coaster_impl(base_u, complexity, added_u);
}

std::vector<RollerCoasterPoint> roller_coaster_curve(const QuadraticParams& base, std::span<const double> added_v) {
    std::vector<double> base_u;
    for (double v : base.v) {
        base_u.push_back(v * v);
    }
    std::vector<double> grid_u;
    for (double v : added_v) {
        grid_u.push_back(v * v);
    }
    // D = (sum v)^2 - sum v^2 = 2 sum_{i<j} v_i v_j with v = sqrt(u).
    auto complexity = [](std::span<const double> u) {
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            for (std::size_t j = i + 1; j < u.size(); ++j) {
                d += 2.0 * std::sqrt(u[i] * u[j]);
            }
        }
        return d;
    };
    auto points = roller_coaster_impl(base_u, complexity, grid_u);
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].added = added_v[i];
    }
    return points;
}

std::vector<RollerCoasterPoint> roller_coaster_curve(const ReciprocalParams& base, std::span<const double> added_u) {
    if (!base.additive_extension) {
        throw UnsupportedMenuError("expanded menus need the additive extension of the reciprocal model");
    }
    const double lambda = base.lambda;
    auto complexity = [lambda](std::span<const double> u) {
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            for (std::size_t j = i + 1; j < u.size(); ++j) {
                if (u[i] == u[j]) {
                    throw DegeneratePairError("added alternative duplicates an existing utility");
                }
                d += lambda / std::abs(u[i] - u[j]);
            }
        }
        return d;
    };
    return roller_coaster_impl(base.u, complexity, added_u);
}

}  // namespace dclogit
