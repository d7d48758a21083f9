#include "dclogit/model.hpp"

#include <cmath>
#include <string>

namespace dclogit {
namespace {

void require_positive(std::span<const double> values, const char* what) {
    for (double x : values) {
        if (!(std::isfinite(x) && x > 0.0)) {
            throw ValidationError(std::string(what) + " values must be strictly positive and finite");
        }
    }
}

void require_size(const ChoiceUniverse& universe, std::size_t n, const char* what) {
    if (n != universe.size()) {
        throw ValidationError(std::string(what) + " has " + std::to_string(n) +
                              " entries for a universe of " + std::to_string(universe.size()));
    }
}

void require_in_universe(const ChoiceUniverse& universe, const Menu& menu) {
    if (menu.bits() == 0 || !menu.is_subset_of(Menu::full(universe.size()))) {
        throw DomainError("menu is not a non-empty subset of the universe");
    }
}

ChoiceDistribution singleton_distribution(const Menu& menu) {
    return ChoiceDistribution(menu, {1.0}, 0.0);
}

ChoiceDistribution share_distribution(const Menu& menu, std::span<const double> u, double complexity) {
    double denom = complexity;
    const auto members = menu.members();
    for (auto i : members) {
        denom += u[i];
    }
    std::vector<double> masses;
    masses.reserve(members.size());
    for (auto i : members) {
        masses.push_back(u[i] / denom);
    }
    return ChoiceDistribution(menu, std::move(masses), complexity / denom);
}

/// Shares v(i) / sum_menu v.
std::vector<double> logit_shares(std::span<const double> v, const std::vector<std::size_t>& members) {
    double total = 0.0;
    for (auto i : members) {
        total += v[i];
    }
    std::vector<double> s;
    s.reserve(members.size());
    for (auto i : members) {
        s.push_back(v[i] / total);
    }
    return s;
}

}  // namespace

// --- DclParams -------------------------------------------------------------

DclParams::DclParams(ChoiceUniverse universe, std::vector<double> u, std::map<Menu, double> complexity)
    : universe_(std::move(universe)), u_(std::move(u)) {
    require_size(universe_, u_.size(), "utility vector");
    require_positive(u_, "utility");
    for (const auto& [menu, value] : complexity) {
        set_complexity(menu, value);
    }
}

void DclParams::set_complexity(const Menu& menu, double value) {
    require_in_universe(universe_, menu);
    if (!std::isfinite(value)) {
        throw ValidationError("complexity must be finite at " + menu_label(universe_, menu));
    }
    if (menu.size() == 1) {
        if (value != 0.0) {
            throw ValidationError("complexity must be zero at singleton " + menu_label(universe_, menu));
        }
        return;
    }
    if (!(value > 0.0)) {
        throw ValidationError("complexity must be strictly positive at " + menu_label(universe_, menu));
    }
    complexity_.insert_or_assign(menu, value);
}

bool DclParams::has_complexity(const Menu& menu) const noexcept {
    return menu.size() == 1 || complexity_.contains(menu);
}

double DclParams::complexity(const Menu& menu) const {
    if (menu.size() == 1) {
        return 0.0;
    }
    auto it = complexity_.find(menu);
    if (it == complexity_.end()) {
        throw DomainError("no complexity value for menu " + menu_label(universe_, menu));
    }
    return it->second;
}

double DclParams::total_utility(const Menu& menu) const {
    double s = 0.0;
    for (auto i : menu.members()) {
        s += u_.at(i);
    }
    return s;
}

// --- other parameter types -------------------------------------------------

DualParams::DualParams(ChoiceUniverse universe_, std::vector<double> v1_, std::vector<double> v2_)
    : universe(std::move(universe_)), v1(std::move(v1_)), v2(std::move(v2_)) {
    require_size(universe, v1.size(), "v1");
    require_size(universe, v2.size(), "v2");
    require_positive(v1, "v1");
    require_positive(v2, "v2");
}

QuadraticParams::QuadraticParams(ChoiceUniverse universe_, std::vector<double> v_)
    : universe(std::move(universe_)), v(std::move(v_)) {
    require_size(universe, v.size(), "v");
    require_positive(v, "v");
}

ReciprocalParams::ReciprocalParams(ChoiceUniverse universe_, std::vector<double> u_, double lambda_,
                                   bool additive_extension_)
    : universe(std::move(universe_)), u(std::move(u_)), lambda(lambda_),
      additive_extension(additive_extension_) {
    require_size(universe, u.size(), "utility vector");
    require_positive(u, "utility");
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
        throw ValidationError("lambda must be strictly positive");
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            if (u[i] == u[j]) {
                throw DegeneratePairError("reciprocal model needs distinct utilities; " +
                                          universe.id(i) + " and " + universe.id(j) + " are equal");
            }
        }
    }
}

double ReciprocalParams::pair_complexity(std::size_t i, std::size_t j) const {
    const double gap = std::abs(u.at(i) - u.at(j));
    if (gap == 0.0) {
        throw DegeneratePairError("equal utilities for " + universe.id(i) + " and " + universe.id(j));
    }
    return lambda / gap;
}

const ChoiceUniverse& universe_of(const ModelSpec& model) {
    return std::visit(
        [](const auto& m) -> const ChoiceUniverse& {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DclParams>) {
                return m.universe();
            } else {
                return m.universe;
            }
        },
        model);
}

// --- evaluation ------------------------------------------------------------

ChoiceDistribution evaluate_dcl(const DclParams& params, const Menu& menu) {
    require_in_universe(params.universe(), menu);
    if (menu.size() == 1) {
        return singleton_distribution(menu);
    }
    return share_distribution(menu, params.u(), params.complexity(menu));
}

ChoiceDistribution evaluate_dual(const DualParams& params, const Menu& menu) {
    require_in_universe(params.universe, menu);
    if (menu.size() == 1) {
        return singleton_distribution(menu);
    }
    const auto members = menu.members();
    const auto s1 = logit_shares(params.v1, members);
    const auto s2 = logit_shares(params.v2, members);
    std::vector<double> masses(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        masses[i] = s1[i] * s2[i];
    }
    // Deferral as the off-diagonal sum keeps it positive and accurate.
    double deferral = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (i != j) {
                deferral += s1[i] * s2[j];
            }
        }
    }
    return ChoiceDistribution(menu, std::move(masses), deferral);
}

ChoiceDistribution evaluate_quadratic(const QuadraticParams& params, const Menu& menu) {
    require_in_universe(params.universe, menu);
    if (menu.size() == 1) {
        return singleton_distribution(menu);
    }
    const auto members = menu.members();
    const auto s = logit_shares(params.v, members);
    std::vector<double> masses(members.size());
    double deferral = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        masses[i] = s[i] * s[i];
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            deferral += 2.0 * s[i] * s[j];
        }
    }
    return ChoiceDistribution(menu, std::move(masses), deferral);
}

ChoiceDistribution evaluate_reciprocal(const ReciprocalParams& params, const Menu& menu) {
    require_in_universe(params.universe, menu);
    if (menu.size() == 1) {
        return singleton_distribution(menu);
    }
    if (menu.size() > 2 && !params.additive_extension) {
        throw UnsupportedMenuError("reciprocal model is defined on binary menus only; menu " +
                                   menu_label(params.universe, menu) +
                                   " needs the additive extension");
    }
    const auto members = menu.members();
    double complexity = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            complexity += params.pair_complexity(members[a], members[b]);
        }
    }
    return share_distribution(menu, params.u, complexity);
}

ChoiceDistribution evaluate(const ModelSpec& model, const Menu& menu) {
    return std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DclParams>) {
                return evaluate_dcl(m, menu);
            } else if constexpr (std::is_same_v<T, DualParams>) {
                return evaluate_dual(m, menu);
            } else if constexpr (std::is_same_v<T, QuadraticParams>) {
                return evaluate_quadratic(m, menu);
            } else {
                return evaluate_reciprocal(m, menu);
            }
        },
        model);
}

DclParams dual_induced_dcl(const DualParams& params) {
    const std::size_t k = params.universe.size();
    std::vector<double> u(k);
    for (std::size_t i = 0; i < k; ++i) {
        u[i] = params.v1[i] * params.v2[i];
    }
    DclParams out(params.universe, std::move(u));
    for (const auto& menu : all_menus(k)) {
        if (menu.size() < 2) {
            continue;
        }
        // Off-diagonal form of sum(v1) sum(v2) - sum(v1 v2): no cancellation.
        const auto members = menu.members();
        double d = 0.0;
        for (auto a : members) {
            for (auto b : members) {
                if (a != b) {
                    d += params.v1[a] * params.v2[b];
                }
            }
        }
        out.set_complexity(menu, d);
    }
    return out;
}

double deferral_probability(const ModelSpec& model, const Menu& menu) {
    return evaluate(model, menu).deferral();
}

ChoiceDataset generate_dataset(const ModelSpec& model) {
    const auto& universe = universe_of(model);
    ChoiceDataset out(universe);
    for (const auto& menu : all_menus(universe.size())) {
        out.set(evaluate(model, menu));
    }
    return out;
}

ChoiceDataset generate_binary_dataset(const ModelSpec& model) {
    const auto& universe = universe_of(model);
    ChoiceDataset out(universe);
    const std::size_t k = universe.size();
    for (std::size_t i = 0; i < k; ++i) {
        out.set(evaluate(model, Menu::singleton(i)));
        for (std::size_t j = i + 1; j < k; ++j) {
            out.set(evaluate(model, Menu::pair(i, j)));
        }
    }
    return out;
}

}  // namespace dclogit
