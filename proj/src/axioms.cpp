#include "dclogit/axioms.hpp"

#include <algorithm>
#include <cmath>

namespace dclogit {
namespace {

class ReportBuilder {
public:
    ReportBuilder(const ChoiceDataset& data, Axiom axiom, Tolerance tol) : data_(data) {
        report_.axiom = axiom;
        report_.tolerance = tol;
    }

    void checked() { ++report_.checked; }
    void vacuous() { ++report_.vacuous; }

    void fail(std::vector<std::string> witness, double lhs, double rhs, double slack) {
        report_.violations.push_back(Violation{std::move(witness), lhs, rhs, slack});
    }

    [[nodiscard]] std::string menu(const Menu& m) const { return menu_label(data_.universe(), m); }
    [[nodiscard]] std::string alt(std::size_t i) const { return data_.universe().id(i); }

    AxiomReport finish() {
        // Worst first, by slack normalized to the compared magnitudes.
        auto severity = [](const Violation& v) {
            const double scale = std::max({std::abs(v.lhs), std::abs(v.rhs), 1e-300});
            return std::abs(v.slack) / scale;
        };
        std::stable_sort(report_.violations.begin(), report_.violations.end(),
                         [&](const Violation& a, const Violation& b) { return severity(a) > severity(b); });
        report_.passed = report_.violations.empty();
        return std::move(report_);
    }

private:
    const ChoiceDataset& data_;
    AxiomReport report_;
};

double binary_mass(const ChoiceDataset& data, std::size_t x, std::size_t y) {
    return data.at(Menu::pair(x, y)).mass(x);
}

double binary_deferral(const ChoiceDataset& data, std::size_t x, std::size_t y) {
    return data.at(Menu::pair(x, y)).deferral();
}

/// rho(x,{a,x}) / rho(a,{a,x}); 1 when x == a.
double relative_to(const ChoiceDataset& data, std::size_t a, std::size_t x) {
    if (x == a) {
        return 1.0;
    }
    return binary_mass(data, x, a) / binary_mass(data, a, x);
}

}  // namespace

std::string_view axiom_name(Axiom axiom) {
    switch (axiom) {
        case Axiom::A1: return "A1";
        case Axiom::A2: return "A2";
        case Axiom::A3: return "A3";
        case Axiom::A4: return "A4";
        case Axiom::A5: return "A5";
        case Axiom::A5Equality: return "A5-equality";
        case Axiom::A6: return "A6";
        case Axiom::A7: return "A7";
        case Axiom::A8: return "A8";
        case Axiom::A9: return "A9";
    }
    return "?";
}

AxiomReport check_desirability(const ChoiceDataset& data, Tolerance tol) {
    data.require_singletons();
    ReportBuilder r(data, Axiom::A1, tol);
    for (std::size_t i = 0; i < data.universe().size(); ++i) {
        const double p = data.at(Menu::singleton(i)).mass(i);
        r.checked();
        if (!tol.equal(p, 1.0)) {
            r.fail({r.alt(i)}, p, 1.0, p - 1.0);
        }
    }
    return r.finish();
}

AxiomReport check_positivity(const ChoiceDataset& data, Tolerance tol) {
    if (data.table().empty()) {
        throw IncompleteDataError("dataset is empty");
    }
    ReportBuilder r(data, Axiom::A2, tol);
    for (const auto& [menu, dist] : data.table()) {
        if (menu.size() < 2) {
            continue;
        }
        for (auto i : menu.members()) {
            r.checked();
            const double p = dist.mass(i);
            if (!(p > tol.abs)) {
                r.fail({r.menu(menu), r.alt(i)}, p, 0.0, p - tol.abs);
            }
        }
        r.checked();
        if (!(dist.deferral() > tol.abs)) {
            r.fail({r.menu(menu), std::string(kOutsideOption)}, dist.deferral(), 0.0,
                   dist.deferral() - tol.abs);
        }
    }
    return r.finish();
}

AxiomReport check_active_choice_luce(const ChoiceDataset& data, Tolerance tol) {
    if (data.table().empty()) {
        throw IncompleteDataError("dataset is empty");
    }
    ReportBuilder r(data, Axiom::A3, tol);
    const auto& table = data.table();
    for (auto ia = table.begin(); ia != table.end(); ++ia) {
        const auto& [menu_a, dist_a] = *ia;
        if (menu_a.size() < 2) {
            continue;
        }
        for (auto ib = std::next(ia); ib != table.end(); ++ib) {
            const auto& [menu_b, dist_b] = *ib;
            const Menu shared = menu_a.intersect(menu_b);
            if (shared.size() < 2) {
                continue;
            }
            const auto members = shared.members();
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    const auto a = members[x];
                    const auto b = members[y];
                    // rho(a,A)/rho(b,A) = rho(a,B)/rho(b,B), cross-multiplied.
                    const double lhs = dist_a.mass(a) * dist_b.mass(b);
                    const double rhs = dist_b.mass(a) * dist_a.mass(b);
                    r.checked();
                    if (!tol.equal(lhs, rhs)) {
                        r.fail({r.menu(menu_a), r.menu(menu_b), r.alt(a), r.alt(b)}, lhs, rhs, lhs - rhs);
                    }
                }
            }
        }
    }
    return r.finish();
}

AxiomReport check_active_choice_lower_bounds(const ChoiceDataset& data, Tolerance tol) {
    data.require_full_domain();
    ReportBuilder r(data, Axiom::A4, tol);
    for (const auto& [big, dist_big] : data.table()) {
        // Enumerate every non-empty strict submenu B of A.
        for (std::uint64_t sub = (big.bits() - 1) & big.bits(); sub != 0; sub = (sub - 1) & big.bits()) {
            const Menu small(sub);
            const auto& dist_small = data.at(small);
            const double defer_big = dist_big.deferral();
            const double defer_small = dist_small.deferral();
            if (defer_big >= defer_small) {
                r.vacuous();
                continue;
            }
            r.checked();
            // rho(B,B) * rho(A\B,A) * rho(o,A) >= (rho(o,B) - rho(o,A)) * rho(B,A)
            const Menu rest(big.bits() & ~sub);
            const double lhs = dist_small.active() * dist_big.mass(rest) * defer_big;
            const double rhs = (defer_small - defer_big) * dist_big.mass(small);
            if (!tol.geq(lhs, rhs)) {
                r.fail({r.menu(big), r.menu(small)}, lhs, rhs, lhs - rhs);
            }
        }
    }
    return r.finish();
}

AxiomReport check_constrained_odds_symmetry(const ChoiceDataset& data, OddsSymmetryMode mode, Tolerance tol) {
    data.require_binary_domain();
    ReportBuilder r(data, mode == OddsSymmetryMode::Equality ? Axiom::A5Equality : Axiom::A5, tol);
    const std::size_t k = data.universe().size();
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto& dist = data.at(Menu::pair(a, b));
            // rho(o)^2 >= 4 rho(a) rho(b)
            const double lhs = dist.deferral() * dist.deferral();
            const double rhs = 4.0 * dist.mass(a) * dist.mass(b);
            r.checked();
            const bool ok = mode == OddsSymmetryMode::Equality ? tol.equal(lhs, rhs) : tol.geq(lhs, rhs);
            if (!ok) {
                r.fail({r.menu(Menu::pair(a, b))}, lhs, rhs, lhs - rhs);
            }
        }
    }
    return r.finish();
}

AxiomReport check_odds_ratio_boundedness(const ChoiceDataset& data, Tolerance tol) {
    data.require_binary_domain();
    ReportBuilder r(data, Axiom::A6, tol);
    const std::size_t k = data.universe().size();

    // Strictly ordered binary pairs (better, worse).
    std::vector<std::pair<std::size_t, std::size_t>> ordered;
    for (std::size_t x = 0; x < k; ++x) {
        for (std::size_t y = x + 1; y < k; ++y) {
            const double px = binary_mass(data, x, y);
            const double py = binary_mass(data, y, x);
            if (tol.greater(px, py)) {
                ordered.emplace_back(x, y);
            } else if (tol.greater(py, px)) {
                ordered.emplace_back(y, x);
            }
        }
    }

    for (const auto& [a, b] : ordered) {
        for (const auto& [c, d] : ordered) {
            if (a == c && b == d) {
                r.vacuous();
                continue;
            }
            r.checked();
            // Utility gaps on the common scale u(a) = 1.
            const double gap_ab = 1.0 - relative_to(data, a, b);
            const double gap_cd = relative_to(data, a, c) - relative_to(data, a, d);
            const bool gap_side = tol.geq(gap_ab, gap_cd);

            // [rho(o,ab)/rho(a,ab)] / [rho(o,cd)/rho(c,cd)] <= rho(c,ac)/rho(a,ac)
            const double ratio_ca = relative_to(data, a, c);
            const double odds_lhs = binary_deferral(data, a, b) * binary_mass(data, c, d);
            const double odds_rhs = ratio_ca * binary_mass(data, a, b) * binary_deferral(data, c, d);
            const bool odds_side = tol.geq(odds_rhs, odds_lhs);

            if (gap_side != odds_side) {
                const double gap_margin = gap_ab - gap_cd;
                const double odds_margin = odds_rhs - odds_lhs;
                r.fail({r.alt(a), r.alt(b), r.alt(c), r.alt(d)}, gap_margin, odds_margin,
                       std::abs(gap_margin) < std::abs(odds_margin) ? gap_margin : odds_margin);
            }
        }
    }
    return r.finish();
}

AxiomReport check_asymmetry(const ChoiceDataset& data, Tolerance tol) {
    if (data.table().empty()) {
        throw IncompleteDataError("dataset is empty");
    }
    ReportBuilder r(data, Axiom::A7, tol);
    for (const auto& [menu, dist] : data.table()) {
        if (menu.size() < 2) {
            r.vacuous();
            continue;
        }
        const auto members = menu.members();
        for (std::size_t x = 0; x < members.size(); ++x) {
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                const double pa = dist.mass(members[x]);
                const double pb = dist.mass(members[y]);
                r.checked();
                if (tol.equal(pa, pb)) {
                    r.fail({r.menu(menu), r.alt(members[x]), r.alt(members[y])}, pa, pb, pa - pb);
                }
            }
        }
    }
    return r.finish();
}

AxiomReport check_odds_ratio_proportionality(const ChoiceDataset& data, Tolerance tol) {
    data.require_binary_domain();
    ReportBuilder r(data, Axiom::A8, tol);
    const std::size_t k = data.universe().size();
    auto beats = [&](std::size_t x, std::size_t y) {
        return tol.greater(binary_mass(data, x, y), binary_mass(data, y, x));
    };
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            for (std::size_t c = 0; c < k; ++c) {
                if (a == b || b == c || a == c) {
                    continue;
                }
                if (!(beats(a, b) && beats(b, c) && beats(a, c))) {
                    continue;
                }
                const double o_ab = binary_deferral(data, a, b);
                const double o_bc = binary_deferral(data, b, c);
                const double o_ac = binary_deferral(data, a, c);
                const double a_ab = binary_mass(data, a, b);
                const double b_ab = binary_mass(data, b, a);
                const double b_bc = binary_mass(data, b, c);
                const double a_ac = binary_mass(data, a, c);
                const double c_ac = binary_mass(data, c, a);

                const double odds_ratio_a = (o_ab * a_ac) / (a_ab * o_ac);
                const double first_lhs = (o_ab * b_bc) / (b_ab * o_bc);
                const double first_rhs = odds_ratio_a - 1.0;
                const double second_rhs = ((a_ac - c_ac) * a_ab) / (a_ac * (a_ab - b_ab));

                r.checked();
                const std::vector<std::string> witness{r.alt(a), r.alt(b), r.alt(c)};
                if (!tol.equal(first_lhs, first_rhs)) {
                    auto w = witness;
                    w.emplace_back("first");
                    r.fail(std::move(w), first_lhs, first_rhs, first_lhs - first_rhs);
                }
                if (!tol.equal(odds_ratio_a, second_rhs)) {
                    auto w = witness;
                    w.emplace_back("second");
                    r.fail(std::move(w), odds_ratio_a, second_rhs, odds_ratio_a - second_rhs);
                }
            }
        }
    }
    return r.finish();
}

AxiomReport check_balancing_odds(const ChoiceDataset& data, Tolerance tol) {
    data.require_full_domain();
    ReportBuilder r(data, Axiom::A9, tol);
    const std::uint64_t full = Menu::full(data.universe().size()).bits();
    for (const auto& [inner, dist_inner] : data.table()) {
        if (inner.size() < 2) {
            continue;
        }
        const std::uint64_t free = full & ~inner.bits();
        const auto members = inner.members();
        // Enumerate every superset B = A + extra, extra ranging over subsets of the complement.
        std::uint64_t extra = 0;
        while (true) {
            const Menu outer(inner.bits() | extra);
            if (inner.size() == 2) {
                // Single-pair sum: both sides coincide identically.
                r.vacuous();
            } else {
                const auto& dist_outer = data.at(outer);
                const double lhs = dist_outer.mass(inner) / dist_inner.active();
                double rhs = 0.0;
                for (std::size_t x = 0; x < members.size(); ++x) {
                    for (std::size_t y = x + 1; y < members.size(); ++y) {
                        const Menu pair = Menu::pair(members[x], members[y]);
                        const auto& dist_pair = data.at(pair);
                        rhs += dist_outer.mass(pair) / dist_pair.active() *
                               (dist_pair.deferral() / dist_inner.deferral());
                    }
                }
                r.checked();
                if (!tol.equal(lhs, rhs)) {
                    r.fail({r.menu(inner), r.menu(outer)}, lhs, rhs, lhs - rhs);
                }
            }
            if (extra == free) {
                break;
            }
            extra = (extra - free) & free;  // next subset of the complement
        }
    }
    return r.finish();
}

AxiomReport check_axiom(const ChoiceDataset& data, Axiom axiom, Tolerance tol) {
    switch (axiom) {
        case Axiom::A1: return check_desirability(data, tol);
        case Axiom::A2: return check_positivity(data, tol);
        case Axiom::A3: return check_active_choice_luce(data, tol);
        case Axiom::A4: return check_active_choice_lower_bounds(data, tol);
        case Axiom::A5: return check_constrained_odds_symmetry(data, OddsSymmetryMode::Inequality, tol);
        case Axiom::A5Equality: return check_constrained_odds_symmetry(data, OddsSymmetryMode::Equality, tol);
        case Axiom::A6: return check_odds_ratio_boundedness(data, tol);
        case Axiom::A7: return check_asymmetry(data, tol);
        case Axiom::A8: return check_odds_ratio_proportionality(data, tol);
        case Axiom::A9: return check_balancing_odds(data, tol);
    }
    throw ValidationError("unknown axiom");
}

std::string_view model_class_name(ModelClass c) {
    switch (c) {
        case ModelClass::Dcl: return "DCL";
        case ModelClass::MonotonicDcl: return "monotonic";
        case ModelClass::AdditiveDcl: return "additive";
        case ModelClass::DualBinary: return "dual";
        case ModelClass::Quadratic: return "quadratic";
        case ModelClass::UtilityDifference: return "utility-difference";
        case ModelClass::ReciprocalDifferences: return "reciprocal-differences";
    }
    return "?";
}

std::set<ModelClass> classify(const ChoiceDataset& data, Tolerance tol) {
    data.require_full_domain();
    std::set<ModelClass> out;
    if (!check_desirability(data, tol).passed || !check_positivity(data, tol).passed ||
        !check_active_choice_luce(data, tol).passed) {
        return out;
    }
    out.insert(ModelClass::Dcl);
    if (check_active_choice_lower_bounds(data, tol).passed) {
        out.insert(ModelClass::MonotonicDcl);
    }
    if (check_balancing_odds(data, tol).passed) {
        out.insert(ModelClass::AdditiveDcl);
    }
    if (check_constrained_odds_symmetry(data, OddsSymmetryMode::Inequality, tol).passed) {
        out.insert(ModelClass::DualBinary);
    }
    if (check_constrained_odds_symmetry(data, OddsSymmetryMode::Equality, tol).passed) {
        out.insert(ModelClass::Quadratic);
    }
    if (check_odds_ratio_boundedness(data, tol).passed) {
        out.insert(ModelClass::UtilityDifference);
    }
    if (check_asymmetry(data, tol).passed && check_odds_ratio_proportionality(data, tol).passed) {
        out.insert(ModelClass::ReciprocalDifferences);
    }
    return out;
}

}  // namespace dclogit
