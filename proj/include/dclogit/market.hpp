#pragma once

#include <array>
#include <string>
#include <vector>

#include "dclogit/core.hpp"

namespace dclogit {

/// Both products offer zero utility, so demand shares are 0/0.
class DegenerateMarketError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Quality q and price p in the same cost units; 0 <= q <= p <= I.
struct ProductStrategy {
    double q = 0.0;
    double p = 0.0;
};

struct MarketConfig {
    double income = 1.0;  ///< I > 0
    int s = 1;            ///< demand exponent: 1 logit, 2 quadratic logit

    void validate() const;
};

using Profile = std::array<ProductStrategy, 2>;

/// u = q / p. Throws DomainError for p = 0 or q outside [0, p].
[[nodiscard]] double product_utility(const ProductStrategy& strategy);

/// Demand share of each product, [u_i / (u_1 + u_2)]^s.
[[nodiscard]] std::array<double, 2> demand_shares(const Profile& profile, const MarketConfig& cfg);

/// share^s * (p - q) for the firm playing own against rival.
[[nodiscard]] double profit(const ProductStrategy& own, const ProductStrategy& rival, const MarketConfig& cfg);

/// Sum over firms of demand share times utility.
[[nodiscard]] double market_effectiveness(const Profile& profile, const MarketConfig& cfg);

/// 1 - sum of shares (zero for s = 1).
[[nodiscard]] double market_deferral(const Profile& profile, const MarketConfig& cfg);

/// Utility ratio q/p of the best reply to a rival offering utility u_j, at p = I.
[[nodiscard]] double best_response_ratio(double rival_utility, int s);

/// Ratios implied by the two interior first-order conditions of the s = 2 game:
/// the price condition u_j / (1 + 2 u_j) and the quality condition
/// (sqrt(u_j (8 + 9 u_j)) - 3 u_j) / 2.
struct InteriorFocRatios {
    double price_condition;
    double quality_condition;
};
[[nodiscard]] InteriorFocRatios interior_foc_ratios(double rival_utility);

struct BestResponse {
    ProductStrategy strategy;
    double profit = 0.0;
    /// Quality maximizer found numerically at p = I (grid, golden section,
    /// then bisection on the derivative sign).
    double numeric_q = 0.0;
};

/// Closed-form best reply at p = I, checked against a numeric maximizer over
/// q in [0, I]; throws SolverError when they disagree by more than 1e-8 I.
/// Throws ValidationError when the rival offers zero quality.
[[nodiscard]] BestResponse best_response(const ProductStrategy& rival, const MarketConfig& cfg);

struct EquilibriumResult {
    Profile strategies{};
    std::array<double, 2> profits{};
    double effectiveness = 0.0;
    double deferral = 0.0;
    int iterations = 0;
    double step = 0.0;            ///< last change in quality
    double foc_residual = 0.0;    ///< |q - best reply| at the fixed point
    double max_deviation_gain = 0.0;  ///< best unilateral gain found on the (q, p) grid
    bool damped = false;
    std::vector<double> trace;    ///< quality iterates
};

/// Grid resolution per axis for the deviation oracle.
inline constexpr int kDeviationGrid = 100;

/// Largest profit gain available to firm 0 by deviating on a grid over
/// 0 <= q <= p <= I, relative to its profit at the profile.
[[nodiscard]] double max_deviation_gain(const Profile& profile, const MarketConfig& cfg, int grid = kDeviationGrid);

/// Symmetric equilibrium by best-reply iteration from q = I/4, p = I.
[[nodiscard]] EquilibriumResult solve_equilibrium(const MarketConfig& cfg);

}  // namespace dclogit
