#pragma once

// Internal: quasi-Newton minimization shared by the maximum-likelihood fits.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dclogit::detail {

struct MinimizeSettings {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    std::string report;
};

/// Objective: returns f(x) and writes the gradient when grad is non-empty.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// BFGS with line search. Throws OptimizationError when the gradient
/// tolerance is not reached within the iteration budget.
MinimizeResult minimize(const Objective& objective, std::vector<double> start,
                        const MinimizeSettings& settings = {});

}  // namespace dclogit::detail
