#pragma once

// Internal: quadratic-logit log-likelihood over unconstrained log-weights.

#include <span>

#include "dclogit/core.hpp"

namespace dclogit::detail {

/// theta holds one log-weight per universe alternative (no normalization);
/// grad, when non-empty, receives d(log L)/d(theta_i) for every alternative.
double quadratic_log_likelihood_full(const CountTable& counts, std::span<const double> theta,
                                     std::span<double> grad);

/// Rejects empty menus and deferral at singletons (probability zero under the model).
void validate_counts(const CountTable& counts);

std::uint64_t total_count(const CountTable& counts);

}  // namespace dclogit::detail
