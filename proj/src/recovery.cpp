#include "dclogit/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace dclogit {

Anchor Anchor::canonical(const ChoiceUniverse& universe) {
    return Anchor{universe.smallest_id_index(), 1.0};
}

std::vector<double> recover_utilities(const ChoiceDataset& data, Anchor anchor) {
    const auto& universe = data.universe();
    if (anchor.z >= universe.size()) {
        throw DomainError("anchor alternative outside the universe");
    }
    if (!(anchor.alpha > 0.0 && std::isfinite(anchor.alpha))) {
        throw ValidationError("anchor scale alpha must be strictly positive");
    }
    const auto& grand = data.at(Menu::full(universe.size()));
    const double ref = grand.mass(anchor.z);
    std::vector<double> u(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i) {
        const double p = grand.mass(i);
        if (!(p > 0.0)) {
            throw SolverError("positivity violated: rho(" + universe.id(i) + ",X) = 0");
        }
        u[i] = i == anchor.z ? anchor.alpha : anchor.alpha * (p / ref);
    }
    return u;
}

std::map<Menu, double> recover_complexity(const ChoiceDataset& data, std::span<const double> u) {
    if (u.size() != data.universe().size()) {
        throw ValidationError("utility vector does not match the universe");
    }
    for (double x : u) {
        if (!(x > 0.0)) {
            throw ValidationError("utilities must be strictly positive");
        }
    }
    std::map<Menu, double> out;
    for (const auto& [menu, dist] : data.table()) {
        const double defer = dist.deferral();
        if (defer >= 1.0) {
            throw SolverError("degenerate menu " + menu_label(data.universe(), menu) +
                              ": deferral probability is 1");
        }
        double total = 0.0;
        for (auto i : menu.members()) {
            total += u[i];
        }
        out.emplace(menu, defer / (1.0 - defer) * total);
    }
    return out;
}

DclParams recover_dcl(const ChoiceDataset& data, Anchor anchor, Tolerance tol) {
    data.require_full_domain();
    std::vector<AxiomReport> reports{check_desirability(data, tol), check_positivity(data, tol),
                                     check_active_choice_luce(data, tol)};
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
    if (!ok) {
        std::string failed;
        for (const auto& r : reports) {
            if (!r.passed) {
                failed += failed.empty() ? "" : ", ";
                failed += axiom_name(r.axiom);
            }
        }
        throw NotRepresentableError("dataset is not a decision-conflict logit (fails " + failed + ")",
                                    std::move(reports));
    }
    auto u = recover_utilities(data, anchor);
    auto complexity = recover_complexity(data, u);
    DclParams out(data.universe(), std::move(u));
    for (const auto& [menu, value] : complexity) {
        if (menu.size() > 1) {
            out.set_complexity(menu, value);
        }
    }
    return out;
}

bool dcl_equivalent(const DclParams& p, const DclParams& q, double tol) {
    if (!(p.universe() == q.universe())) {
        return false;
    }
    auto close = [tol](double x, double y) {
        return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
    };
    const double beta = q.u(0) / p.u(0);
    for (std::size_t i = 0; i < p.u().size(); ++i) {
        if (!close(q.u(i), beta * p.u(i))) {
            return false;
        }
    }
    if (p.complexity().size() != q.complexity().size()) {
        return false;
    }
    for (const auto& [menu, d] : p.complexity()) {
        if (!q.has_complexity(menu) || !close(q.complexity(menu), beta * d)) {
            return false;
        }
    }
    return true;
}

}  // namespace dclogit
