#pragma once

#include <map>
#include <variant>
#include <vector>

#include "dclogit/core.hpp"

namespace dclogit {

/// Decision-conflict logit parameters: strictly positive utilities on the
/// universe and a complexity value per menu. Singleton complexity is zero
/// and never stored; every stored menu has at least two members and D > 0.
class DclParams {
public:
    DclParams(ChoiceUniverse universe, std::vector<double> u, std::map<Menu, double> complexity = {});

    [[nodiscard]] const ChoiceUniverse& universe() const noexcept { return universe_; }
    [[nodiscard]] std::span<const double> u() const noexcept { return u_; }
    [[nodiscard]] double u(std::size_t i) const { return u_.at(i); }
    [[nodiscard]] const std::map<Menu, double>& complexity() const noexcept { return complexity_; }
    [[nodiscard]] bool has_complexity(const Menu& menu) const noexcept;
    /// 0 for singletons; throws DomainError when a larger menu has no entry.
    [[nodiscard]] double complexity(const Menu& menu) const;
    /// Summed utility over a menu.
    [[nodiscard]] double total_utility(const Menu& menu) const;

    void set_complexity(const Menu& menu, double value);

private:
    ChoiceUniverse universe_;
    std::vector<double> u_;
    std::map<Menu, double> complexity_;
};

/// Two utility criteria v1, v2 (the dual logit).
struct DualParams {
    DualParams(ChoiceUniverse universe, std::vector<double> v1, std::vector<double> v2);

    ChoiceUniverse universe;
    std::vector<double> v1;
    std::vector<double> v2;
};

/// Single criterion v (the quadratic logit).
struct QuadraticParams {
    QuadraticParams(ChoiceUniverse universe, std::vector<double> v);

    ChoiceUniverse universe;
    std::vector<double> v;
};

/// Reciprocal-differences model: binary complexity lambda / |u(a) - u(b)|.
/// Menus larger than two require the additive extension.
struct ReciprocalParams {
    ReciprocalParams(ChoiceUniverse universe, std::vector<double> u, double lambda,
                     bool additive_extension = false);

    ChoiceUniverse universe;
    std::vector<double> u;
    double lambda;
    bool additive_extension;

    /// lambda / |u(i) - u(j)|.
    [[nodiscard]] double pair_complexity(std::size_t i, std::size_t j) const;
};

using ModelSpec = std::variant<DclParams, DualParams, QuadraticParams, ReciprocalParams>;

[[nodiscard]] const ChoiceUniverse& universe_of(const ModelSpec& model);

[[nodiscard]] ChoiceDistribution evaluate_dcl(const DclParams& params, const Menu& menu);
[[nodiscard]] ChoiceDistribution evaluate_dual(const DualParams& params, const Menu& menu);
[[nodiscard]] ChoiceDistribution evaluate_quadratic(const QuadraticParams& params, const Menu& menu);
[[nodiscard]] ChoiceDistribution evaluate_reciprocal(const ReciprocalParams& params, const Menu& menu);
[[nodiscard]] ChoiceDistribution evaluate(const ModelSpec& model, const Menu& menu);

/// u = v1 * v2 and D(A) = sum(v1) sum(v2) - sum(v1 v2), populated on every
/// menu of the universe.
[[nodiscard]] DclParams dual_induced_dcl(const DualParams& params);

[[nodiscard]] double deferral_probability(const ModelSpec& model, const Menu& menu);

/// Evaluates the model on every non-empty menu of its universe.
[[nodiscard]] ChoiceDataset generate_dataset(const ModelSpec& model);

/// Evaluates the model on the singleton and binary menus only.
[[nodiscard]] ChoiceDataset generate_binary_dataset(const ModelSpec& model);

}  // namespace dclogit
