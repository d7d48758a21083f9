#pragma once

#include <vector>

#include "dclogit/axioms.hpp"
#include "dclogit/core.hpp"
#include "dclogit/model.hpp"

namespace dclogit {

/// Reference alternative z and scale alpha fixing the utility normalization
/// u(z) = alpha.
struct Anchor {
    std::size_t z = 0;
    double alpha = 1.0;

    /// Lexicographically smallest id, alpha = 1.
    static Anchor canonical(const ChoiceUniverse& universe);
};

/// Raised when a dataset fails the axioms a representation requires.
class NotRepresentableError : public SolverError {
public:
    NotRepresentableError(const std::string& what, std::vector<AxiomReport> reports)
        : SolverError(what), reports_(std::move(reports)) {}

    [[nodiscard]] const std::vector<AxiomReport>& reports() const noexcept { return reports_; }

private:
    std::vector<AxiomReport> reports_;
};

/// u(a) = alpha * rho(a,X) / rho(z,X) on the grand menu X.
[[nodiscard]] std::vector<double> recover_utilities(const ChoiceDataset& data, Anchor anchor);

/// D(A) = rho(o,A) / (1 - rho(o,A)) * sum_A u for every menu in the dataset.
[[nodiscard]] std::map<Menu, double> recover_complexity(const ChoiceDataset& data, std::span<const double> u);

/// Full (u, D) identification. Requires the full domain and A1-A3 at tol.
[[nodiscard]] DclParams recover_dcl(const ChoiceDataset& data, Anchor anchor, Tolerance tol = {});

/// True iff q = beta * p for the beta fixed at the first alternative,
/// componentwise within tol (relative, floored at 1).
[[nodiscard]] bool dcl_equivalent(const DclParams& p, const DclParams& q, double tol);

}  // namespace dclogit
