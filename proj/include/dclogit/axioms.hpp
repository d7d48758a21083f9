#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dclogit/core.hpp"

namespace dclogit {

enum class Axiom {
    A1,           ///< Desirability
    A2,           ///< Positivity
    A3,           ///< Active-choice Luce
    A4,           ///< Active-choice lower bounds
    A5,           ///< Constrained odds symmetry (inequality)
    A5Equality,   ///< Constrained odds symmetry with equality
    A6,           ///< Odds-ratio boundedness
    A7,           ///< Active-choice asymmetry
    A8,           ///< Odds-ratio proportionality
    A9,           ///< Balancing odds
};

[[nodiscard]] std::string_view axiom_name(Axiom axiom);

/// One failed instance of an axiom. For (in)equalities lhs/rhs are the two
/// compared quantities; for biconditionals they are the signed margins of
/// the two sides. slack is the directed amount by which the check failed.
struct Violation {
    std::vector<std::string> witness;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct AxiomReport {
    Axiom axiom = Axiom::A1;
    bool passed = true;
    std::vector<Violation> violations;  ///< worst first
    Tolerance tolerance;
    std::size_t checked = 0;  ///< substantive instances evaluated
    std::size_t vacuous = 0;  ///< instances satisfied through a trivial branch
};

enum class OddsSymmetryMode { Inequality, Equality };

// Menus required: singletons for A1; whatever is present for A2, A3 and A7;
// singletons + binaries for A5, A6 and A8; the full domain for A4 and A9.
// Missing menus raise IncompleteDataError.

[[nodiscard]] AxiomReport check_desirability(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_positivity(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_active_choice_luce(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_active_choice_lower_bounds(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_constrained_odds_symmetry(const ChoiceDataset& data, OddsSymmetryMode mode,
                                                          Tolerance tol = {});

/// Biconditional between the ordering of utility gaps (read off binary
/// menus on a common scale anchored at a) and the deferral odds-ratio bound
/// rho(c,{a,c}) / rho(a,{a,c}). Quadruples need not be distinct across pairs.
[[nodiscard]] AxiomReport check_odds_ratio_boundedness(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_asymmetry(const ChoiceDataset& data, Tolerance tol = {});
[[nodiscard]] AxiomReport check_odds_ratio_proportionality(const ChoiceDataset& data, Tolerance tol = {});
/// Checked for every B that contains A, including B = A.
[[nodiscard]] AxiomReport check_balancing_odds(const ChoiceDataset& data, Tolerance tol = {});

[[nodiscard]] AxiomReport check_axiom(const ChoiceDataset& data, Axiom axiom, Tolerance tol = {});

enum class ModelClass {
    Dcl,
    MonotonicDcl,
    AdditiveDcl,
    DualBinary,
    Quadratic,
    UtilityDifference,
    ReciprocalDifferences,
};

[[nodiscard]] std::string_view model_class_name(ModelClass c);

/// Model classes whose characterizing axioms hold. Empty when A1-A3 fail.
[[nodiscard]] std::set<ModelClass> classify(const ChoiceDataset& data, Tolerance tol = {});

}  // namespace dclogit
