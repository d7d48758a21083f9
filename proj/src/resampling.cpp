#include "dclogit/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likelihood.hpp"
#include "optimize.hpp"

namespace dclogit {
namespace {

void require_all_passed(const AxiomReport& report, const std::string& context) {
    if (!report.passed) {
        throw NotQuadraticError(context + ": " + std::string(axiom_name(report.axiom)) + " fails", report);
    }
}

/// Softmax over the given log-weights (max-shifted).
std::vector<double> softmax(std::span<const double> log_weights) {
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> s(log_weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::exp(log_weights[i] - top);
        total += s[i];
    }
    for (auto& x : s) {
        x /= total;
    }
    return s;
}

}  // namespace

namespace detail {

std::uint64_t total_count(const CountTable& counts) {
    std::uint64_t n = 0;
    for (const auto& [menu, c] : counts.table()) {
        n += c.total();
    }
    return n;
}

void validate_counts(const CountTable& counts) {
    if (counts.table().empty()) {
        throw ValidationError("count table is empty");
    }
    for (const auto& [menu, c] : counts.table()) {
        if (c.total() == 0) {
            throw ValidationError("menu " + menu_label(counts.universe(), menu) + " has no observations");
        }
        if (menu.size() == 1 && c.deferred > 0) {
            throw ValidationError("deferral observed at singleton menu " +
                                  menu_label(counts.universe(), menu) +
                                  "; the model assigns it probability zero");
        }
    }
}

double quadratic_log_likelihood_full(const CountTable& counts, std::span<const double> theta,
                                     std::span<double> grad) {
    if (!grad.empty()) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    double ll = 0.0;
    for (const auto& [menu, c] : counts.table()) {
        if (menu.size() < 2) {
            continue;
        }
        const auto members = menu.members();
        std::vector<double> logits(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            logits[i] = theta[members[i]];
        }
        const auto s = softmax(logits);
        double s2 = 0.0;
        double defer = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s2 += s[i] * s[i];
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                defer += 2.0 * s[i] * s[j];
            }
        }
        double active = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto n = static_cast<double>(c.chosen[i]);
            active += n;
            if (n > 0.0) {
                ll += n * 2.0 * std::log(s[i]);
            }
        }
        const auto n_defer = static_cast<double>(c.deferred);
        if (n_defer > 0.0) {
            ll += n_defer * std::log(defer);
        }
        if (!grad.empty()) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                double g = 2.0 * static_cast<double>(c.chosen[i]) - 2.0 * s[i] * active;
                if (n_defer > 0.0) {
                    g -= n_defer * 2.0 * s[i] * (s[i] - s2) / defer;
                }
                grad[members[i]] += g;
            }
        }
    }
    return ll;
}

}  // namespace detail

namespace {

/// Alternatives not linked to a1 through observed menus with two or more members.
std::vector<std::size_t> unidentified_alternatives(const CountTable& counts) {
    const std::size_t k = counts.universe().size();
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [menu, c] : counts.table()) {
        if (menu.size() < 2 || c.total() == 0) {
            continue;
        }
        const auto members = menu.members();
        for (std::size_t i = 1; i < members.size(); ++i) {
            parent[find(members[i])] = find(members[0]);
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < k; ++i) {
        if (find(i) != find(0)) {
            out.push_back(i);
        }
    }
    return out;
}

FitDiagnostics identification_diagnostics(const CountTable& counts) {
    FitDiagnostics d;
    for (auto i : unidentified_alternatives(counts)) {
        d.unidentified.push_back(counts.universe().id(i));
    }
    d.under_identified = !d.unidentified.empty();
    return d;
}

}  // namespace

// --- exact identification --------------------------------------------------

DualBinarySolution solve_dual_binary(const ChoiceDataset& data, Tolerance tol) {
    const auto& universe = data.universe();
    if (universe.size() != 2) {
        throw ValidationError("exact dual identification is implemented for two-alternative universes only");
    }
    const auto& dist = data.at(Menu::pair(0, 1));
    if (data.has(Menu::singleton(0)) && data.has(Menu::singleton(1))) {
        const auto a1 = check_desirability(data, tol);
        if (!a1.passed) {
            throw NotDualRepresentableError("binary data fails A1");
        }
    }
    const auto a2 = check_positivity(data, tol);
    if (!a2.passed) {
        throw NotDualRepresentableError("binary data fails A2");
    }

    const double u2 = dist.mass(1) / dist.mass(0);
    const double d = dist.deferral() / dist.mass(0);
    double disc = d * d - 4.0 * u2;
    // A double root whenever the data meets A5 with equality at tol, so the
    // boundary agrees with solve_quadratic.
    if (std::abs(disc) < kDiscriminantClamp || tol.equal(d * d, 4.0 * u2)) {
        disc = 0.0;
    } else if (disc < 0.0) {
        throw NotDualRepresentableError("no real dual-logit solution: D^2 - 4u(a2) = " + std::to_string(disc) +
                                        " < 0 (constrained odds symmetry fails)");
    }
    const double tau = std::sqrt(disc);
    DualBinarySolution out;
    out.discriminant = disc;
    const double high = (d + tau) / 2.0;
    const double low = (d - tau) / 2.0;
    out.solutions.emplace_back(universe, std::vector<double>{1.0, high}, std::vector<double>{1.0, low});
    if (tau > 0.0) {
        out.solutions.emplace_back(universe, std::vector<double>{1.0, low}, std::vector<double>{1.0, high});
    }
    return out;
}

QuadraticParams solve_quadratic(const ChoiceDataset& data, Tolerance tol) {
    data.require_binary_domain();
    const auto& universe = data.universe();
    require_all_passed(check_desirability(data, tol), "quadratic identification");
    require_all_passed(check_positivity(data, tol), "quadratic identification");
    require_all_passed(check_active_choice_luce(data, tol), "quadratic identification");
    require_all_passed(check_constrained_odds_symmetry(data, OddsSymmetryMode::Equality, tol),
                       "quadratic identification");

    const std::size_t k = universe.size();
    std::vector<double> v(k, 1.0);
    for (std::size_t j = 1; j < k; ++j) {
        const auto& dist = data.at(Menu::pair(0, j));
        v[j] = 0.5 * dist.deferral() / dist.mass(0);
    }

    const Menu grand = Menu::full(k);
    if (data.has(grand)) {
        const auto& g = data.at(grand);
        AxiomReport cross;
        cross.axiom = Axiom::A5Equality;
        cross.tolerance = tol;
        for (std::size_t j = 1; j < k; ++j) {
            const double lhs = v[j] * v[j];
            const double rhs = g.mass(j) / g.mass(0);
            ++cross.checked;
            if (!tol.equal(lhs, rhs)) {
                cross.violations.push_back(
                    Violation{{menu_label(universe, grand), universe.id(j)}, lhs, rhs, lhs - rhs});
            }
        }
        cross.passed = cross.violations.empty();
        require_all_passed(cross, "grand-menu cross-check");
    }
    return QuadraticParams(universe, std::move(v));
}

bool dual_jointly_equivalent(const DualParams& p, const DualParams& q, double tol) {
    if (!(p.universe == q.universe)) {
        return false;
    }
    auto proportional = [tol](const std::vector<double>& x, const std::vector<double>& y) {
        const double beta = y[0] / x[0];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double expect = beta * x[i];
            if (std::abs(y[i] - expect) > tol * std::max({1.0, std::abs(y[i]), std::abs(expect)})) {
                return false;
            }
        }
        return true;
    };
    return (proportional(p.v1, q.v1) && proportional(p.v2, q.v2)) ||
           (proportional(p.v1, q.v2) && proportional(p.v2, q.v1));
}

// --- maximum likelihood ----------------------------------------------------

double quadratic_log_likelihood(const CountTable& counts, std::span<const double> theta, std::span<double> grad) {
    const std::size_t k = counts.universe().size();
    if (theta.size() != k - 1) {
        throw ValidationError("quadratic likelihood expects k-1 parameters");
    }
    std::vector<double> full(k, 0.0);
    std::copy(theta.begin(), theta.end(), full.begin() + 1);
    std::vector<double> full_grad(grad.empty() ? 0 : k);
    const double ll = detail::quadratic_log_likelihood_full(counts, full, full_grad);
    if (!grad.empty()) {
        std::copy(full_grad.begin() + 1, full_grad.end(), grad.begin());
    }
    return ll;
}

double dual_log_likelihood(const CountTable& counts, std::span<const double> theta, std::span<double> grad) {
    const std::size_t k = counts.universe().size();
    if (theta.size() != 2 * (k - 1)) {
        throw ValidationError("dual likelihood expects 2(k-1) parameters");
    }
    auto theta1 = [&](std::size_t i) { return i == 0 ? 0.0 : theta[i - 1]; };
    auto theta2 = [&](std::size_t i) { return i == 0 ? 0.0 : theta[k - 1 + i - 1]; };
    if (!grad.empty()) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    double ll = 0.0;
    for (const auto& [menu, c] : counts.table()) {
        if (menu.size() < 2) {
            continue;
        }
        const auto members = menu.members();
        std::vector<double> l1(members.size());
        std::vector<double> l2(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            l1[i] = theta1(members[i]);
            l2[i] = theta2(members[i]);
        }
        const auto s1 = softmax(l1);
        const auto s2 = softmax(l2);
        double diag = 0.0;
        double defer = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            diag += s1[i] * s2[i];
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (i != j) {
                    defer += s1[i] * s2[j];
                }
            }
        }
        double active = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto n = static_cast<double>(c.chosen[i]);
            active += n;
            if (n > 0.0) {
                ll += n * (std::log(s1[i]) + std::log(s2[i]));
            }
        }
        const auto n_defer = static_cast<double>(c.deferred);
        if (n_defer > 0.0) {
            ll += n_defer * std::log(defer);
        }
        if (!grad.empty()) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (members[i] == 0) {
                    continue;
                }
                const auto n = static_cast<double>(c.chosen[i]);
                double g1 = n - s1[i] * active;
                double g2 = n - s2[i] * active;
                if (n_defer > 0.0) {
                    g1 -= n_defer * s1[i] * (s2[i] - diag) / defer;
                    g2 -= n_defer * s2[i] * (s1[i] - diag) / defer;
                }
                grad[members[i] - 1] += g1;
                grad[k - 1 + members[i] - 1] += g2;
            }
        }
    }
    return ll;
}

QuadraticFit fit_quadratic_mle(const CountTable& counts) {
    detail::validate_counts(counts);
    const std::size_t k = counts.universe().size();
    const double scale = 1.0 / static_cast<double>(detail::total_count(counts));
    auto objective = [&](std::span<const double> theta, std::span<double> grad) {
        const double ll = quadratic_log_likelihood(counts, theta, grad);
        for (auto& g : grad) {
            g *= -scale;
        }
        return -ll * scale;
    };
    const auto result = detail::minimize(objective, std::vector<double>(k - 1, 0.0));

    std::vector<double> v(k, 1.0);
    for (std::size_t j = 1; j < k; ++j) {
        v[j] = std::exp(result.x[j - 1]);
    }
    auto diagnostics = identification_diagnostics(counts);
    diagnostics.iterations = result.iterations;
    diagnostics.gradient_norm = result.gradient_norm;
    diagnostics.solver_report = result.report;
    return QuadraticFit{QuadraticParams(counts.universe(), std::move(v)),
                        quadratic_log_likelihood(counts, result.x), std::move(diagnostics)};
}

DualFit fit_dual_mle(const CountTable& counts) {
    detail::validate_counts(counts);
    const std::size_t k = counts.universe().size();

    // Start off the v1 = v2 symmetry manifold, which is invariant under the
    // gradient flow.
    const auto start_fit = fit_quadratic_mle(counts);
    std::vector<double> start(2 * (k - 1));
    for (std::size_t j = 1; j < k; ++j) {
        const double base = std::log(start_fit.params.v[j]);
        const double spread = (j % 2 == 0 ? 0.1 : -0.1);
        start[j - 1] = base + spread;
        start[k - 1 + j - 1] = base - spread;
    }

    const double scale = 1.0 / static_cast<double>(detail::total_count(counts));
    auto objective = [&](std::span<const double> theta, std::span<double> grad) {
        const double ll = dual_log_likelihood(counts, theta, grad);
        for (auto& g : grad) {
            g *= -scale;
        }
        return -ll * scale;
    };
    const auto result = detail::minimize(objective, std::move(start));

    std::vector<double> v1(k, 1.0);
    std::vector<double> v2(k, 1.0);
    for (std::size_t j = 1; j < k; ++j) {
        v1[j] = std::exp(result.x[j - 1]);
        v2[j] = std::exp(result.x[k - 1 + j - 1]);
    }
    // Canonical criterion order: v1(a2) >= v2(a2).
    if (k >= 2 && v1[1] < v2[1]) {
        std::swap(v1, v2);
    }
    auto diagnostics = identification_diagnostics(counts);
    diagnostics.approximate = true;
    diagnostics.iterations = result.iterations;
    diagnostics.gradient_norm = result.gradient_norm;
    diagnostics.solver_report = result.report;
    return DualFit{DualParams(counts.universe(), std::move(v1), std::move(v2)),
                   dual_log_likelihood(counts, result.x), std::move(diagnostics)};
}

}  // namespace dclogit
