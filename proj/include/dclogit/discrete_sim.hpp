#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dclogit/core.hpp"
#include "dclogit/model.hpp"
#include "dclogit/resampling.hpp"

namespace dclogit {

/// Systematic utility beta . x_i for each alternative; the random part is
/// standard Gumbel noise added per draw.
struct LinearUtilitySpec {
    LinearUtilitySpec(ChoiceUniverse universe, std::vector<double> beta, std::vector<std::vector<double>> x);

    ChoiceUniverse universe;
    std::vector<double> beta;
    std::vector<std::vector<double>> x;  ///< aligned with universe order, each of size |beta|

    [[nodiscard]] double index(std::size_t i) const;
    [[nodiscard]] std::vector<double> indices() const;
};

struct SimResult {
    ChoiceUniverse universe;
    Menu menu;
    std::vector<std::uint64_t> counts;  ///< aligned with menu.members()
    std::uint64_t deferral_count = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    /// Trials with an exact tie at the top of some round; recorded as deferrals.
    std::uint64_t ties = 0;

    [[nodiscard]] std::vector<double> frequencies() const;
    [[nodiscard]] double deferral_frequency() const;
    /// Counts add up to n and no ties occurred.
    [[nodiscard]] bool self_check() const;
};

using Rng = std::mt19937_64;

/// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
[[nodiscard]] double sample_uniform_open(Rng& rng);

/// Standard Gumbel via -log(-log U).
[[nodiscard]] double sample_gumbel(Rng& rng);

/// Trials are processed in fixed blocks; each (seed, block, round) triple
/// seeds its own generator, so results do not depend on the thread count and
/// the two sampling rounds never share a stream.
inline constexpr std::uint64_t kSimulationBlock = 1U << 16;

/// Generator for one (seed, block, round) substream.
[[nodiscard]] Rng substream(std::uint64_t seed, std::uint64_t block, std::uint64_t round);

/// One Gumbel round, argmax choice, on the given menu (default: every alternative).
[[nodiscard]] SimResult simulate_conditional_logit(const LinearUtilitySpec& spec, std::uint64_t n,
                                                   std::uint64_t seed, unsigned threads = 0);
[[nodiscard]] SimResult simulate_conditional_logit(const LinearUtilitySpec& spec, const Menu& menu,
                                                   std::uint64_t n, std::uint64_t seed, unsigned threads = 0);

/// Two independent Gumbel rounds; an alternative is chosen only when it is
/// the unique argmax in both, otherwise the trial is a deferral.
[[nodiscard]] SimResult simulate_quadratic_discrete(const LinearUtilitySpec& spec, std::uint64_t n,
                                                    std::uint64_t seed, unsigned threads = 0);
[[nodiscard]] SimResult simulate_quadratic_discrete(const LinearUtilitySpec& spec, const Menu& menu,
                                                    std::uint64_t n, std::uint64_t seed, unsigned threads = 0);

struct EndogenousComplexity {
    Menu menu;
    std::vector<double> u;  ///< exp(2 beta . x_i) for every universe alternative
    double d = 0.0;         ///< 2 sum_{i<j} exp(beta . (x_i + x_j)) over the menu

    /// DclParams with D set on the menu.
    [[nodiscard]] DclParams params(const ChoiceUniverse& universe) const;
};

/// Indices are shifted by their maximum only when exponentiation would overflow.
[[nodiscard]] EndogenousComplexity endogenous_complexity(const LinearUtilitySpec& spec);
[[nodiscard]] EndogenousComplexity endogenous_complexity(const LinearUtilitySpec& spec, const Menu& menu);

struct BetaFit {
    std::vector<double> beta;
    double log_likelihood;
    FitDiagnostics diagnostics;
};

/// Quadratic-logit log-likelihood as a function of beta; fills grad when non-empty.
[[nodiscard]] double beta_log_likelihood(const CountTable& counts, const std::vector<std::vector<double>>& x,
                                         std::span<const double> beta, std::span<double> grad = {});

/// Maximum-likelihood beta. Throws UnderIdentifiedError when attribute
/// differences within observed menus do not have full column rank.
[[nodiscard]] BetaFit fit_beta(const CountTable& counts, const std::vector<std::vector<double>>& x);

/// Records the simulated outcomes under the result's menu.
void add_counts(CountTable& table, const SimResult& result);

}  // namespace dclogit
