#pragma once

#include <vector>

#include "dclogit/axioms.hpp"
#include "dclogit/core.hpp"
#include "dclogit/model.hpp"

namespace dclogit {

/// Raised when binary data has no real dual-logit solution.
class NotDualRepresentableError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Raised when data fails the equality form of constrained odds symmetry.
class NotQuadraticError : public SolverError {
public:
    NotQuadraticError(const std::string& what, AxiomReport report)
        : SolverError(what), report_(std::move(report)) {}
    [[nodiscard]] const AxiomReport& report() const noexcept { return report_; }

private:
    AxiomReport report_;
};

/// Both roots of the binary identification quadratic, normalized so that
/// v1(a1) = v2(a1) = 1 and ordered with v1(a2) >= v2(a2).
struct DualBinarySolution {
    std::vector<DualParams> solutions;  ///< one (double root) or two
    double discriminant = 0.0;          ///< D({a1,a2})^2 - 4 u(a2)
};

/// Discriminant values within clamp of 0, or meeting A5 with equality at the
/// caller's tolerance, are treated as 0 (a single, symmetric solution).
inline constexpr double kDiscriminantClamp = 1e-9;

[[nodiscard]] DualBinarySolution solve_dual_binary(const ChoiceDataset& data, Tolerance tol = {});

/// v(a1) = 1, v(a_j) = rho(o,{a1,a_j}) / (2 rho(a1,{a1,a_j})), cross-checked
/// against the grand menu when present.
[[nodiscard]] QuadraticParams solve_quadratic(const ChoiceDataset& data, Tolerance tol = {});

/// True iff q's criteria are positive rescalings of p's, possibly swapped.
[[nodiscard]] bool dual_jointly_equivalent(const DualParams& p, const DualParams& q, double tol);

// --- maximum likelihood ----------------------------------------------------

struct FitDiagnostics {
    int iterations = 0;
    double gradient_norm = 0.0;
    bool under_identified = false;           ///< some parameter has no binary information
    std::vector<std::string> unidentified;   ///< alternatives without information
    bool approximate = false;                ///< fit is not backed by an exact identification result
    std::string solver_report;
};

struct QuadraticFit {
    QuadraticParams params;
    double log_likelihood;
    FitDiagnostics diagnostics;
};

struct DualFit {
    DualParams params;
    double log_likelihood;
    FitDiagnostics diagnostics;
};

/// Log-likelihood of counts under the quadratic logit with v = exp(theta),
/// theta(a1) fixed at 0; writes d/dtheta for a2..ak into grad when non-empty.
[[nodiscard]] double quadratic_log_likelihood(const CountTable& counts, std::span<const double> theta,
                                              std::span<double> grad = {});

/// Same for the dual logit; theta = (log v1(a2..ak), log v2(a2..ak)).
[[nodiscard]] double dual_log_likelihood(const CountTable& counts, std::span<const double> theta,
                                         std::span<double> grad = {});

[[nodiscard]] QuadraticFit fit_quadratic_mle(const CountTable& counts);

/// Two free criteria; flagged approximate.
[[nodiscard]] DualFit fit_dual_mle(const CountTable& counts);

}  // namespace dclogit
