#include "dclogit/discrete_sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "likelihood.hpp"
#include "optimize.hpp"

namespace dclogit {
namespace {

// Exponent beyond which exp() overflows in double precision (log(DBL_MAX) ~ 709.8).
constexpr double kExpLimit = 700.0;

struct BlockTally {
    std::vector<std::uint64_t> counts;
    std::uint64_t deferred = 0;
    std::uint64_t ties = 0;
};

/// Index of the unique maximum of index + Gumbel noise, or -1 on a tie.
long noisy_argmax(std::span<const double> index, Rng& rng) {
    long best = -1;
    double top = -std::numeric_limits<double>::infinity();
    bool tied = false;
    for (std::size_t i = 0; i < index.size(); ++i) {
        const double value = index[i] + sample_gumbel(rng);
        if (value > top) {
            top = value;
            best = static_cast<long>(i);
            tied = false;
        } else if (value == top) {
            tied = true;
        }
    }
    return tied ? -1 : best;
}

template <typename Trial>
SimResult run_blocks(const LinearUtilitySpec& spec, const Menu& menu, std::uint64_t n, std::uint64_t seed,
                     unsigned threads, Trial trial) {
    if (n == 0) {
        throw ValidationError("number of draws must be at least 1");
    }
    if (menu.size() == 0 || !menu.is_subset_of(Menu::full(spec.universe.size()))) {
        throw DomainError("menu outside the universe");
    }
    const auto members = menu.members();
    const std::size_t k = members.size();
    std::vector<double> index;
    for (auto i : members) {
        index.push_back(spec.index(i));
    }
    const std::uint64_t blocks = (n + kSimulationBlock - 1) / kSimulationBlock;
    std::vector<BlockTally> tallies(blocks, BlockTally{std::vector<std::uint64_t>(k, 0), 0, 0});

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            const std::uint64_t begin = b * kSimulationBlock;
            const std::uint64_t size = std::min(kSimulationBlock, n - begin);
            trial(index, seed, b, size, tallies[b]);
        }
    };
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    SimResult out{spec.universe, menu, std::vector<std::uint64_t>(k, 0), 0, n, seed, 0};
    for (const auto& t : tallies) {
        for (std::size_t i = 0; i < k; ++i) {
            out.counts[i] += t.counts[i];
        }
        out.deferral_count += t.deferred;
        out.ties += t.ties;
    }
    return out;
}

}  // namespace

LinearUtilitySpec::LinearUtilitySpec(ChoiceUniverse universe_, std::vector<double> beta_,
                                     std::vector<std::vector<double>> x_)
    : universe(std::move(universe_)), beta(std::move(beta_)), x(std::move(x_)) {
    if (x.size() != universe.size()) {
        throw ValidationError("attribute table must have one row per alternative");
    }
    for (const auto& row : x) {
        if (row.size() != beta.size()) {
            throw ValidationError("attribute vectors must match the dimension of beta (" +
                                  std::to_string(beta.size()) + ")");
        }
    }
    for (double b : beta) {
        if (!std::isfinite(b)) {
            throw ValidationError("beta must be finite");
        }
    }
}

double LinearUtilitySpec::index(std::size_t i) const {
    double v = 0.0;
    for (std::size_t m = 0; m < beta.size(); ++m) {
        v += beta[m] * x.at(i)[m];
    }
    return v;
}

std::vector<double> LinearUtilitySpec::indices() const {
    std::vector<double> out(universe.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = index(i);
    }
    return out;
}

std::vector<double> SimResult::frequencies() const {
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    }
    return out;
}

double SimResult::deferral_frequency() const {
    return static_cast<double>(deferral_count) / static_cast<double>(n);
}

bool SimResult::self_check() const {
    std::uint64_t total = deferral_count;
    for (auto c : counts) {
        total += c;
    }
    return total == n && ties == 0;
}

double sample_uniform_open(Rng& rng) {
    // (m + 0.5) / 2^53 with m in [0, 2^53) never reaches 0 or 1.
    const std::uint64_t m = rng() >> 11;
    return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

double sample_gumbel(Rng& rng) {
    return -std::log(-std::log(sample_uniform_open(rng)));
}

Rng substream(std::uint64_t seed, std::uint64_t block, std::uint64_t round) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                      static_cast<std::uint32_t>(round)};
    return Rng(seq);
}

SimResult simulate_conditional_logit(const LinearUtilitySpec& spec, std::uint64_t n, std::uint64_t seed,
                                     unsigned threads) {
    return simulate_conditional_logit(spec, Menu::full(spec.universe.size()), n, seed, threads);
}

SimResult simulate_conditional_logit(const LinearUtilitySpec& spec, const Menu& menu, std::uint64_t n,
                                     std::uint64_t seed, unsigned threads) {
    return run_blocks(spec, menu, n, seed, threads,
                      [](std::span<const double> index, std::uint64_t s, std::uint64_t block, std::uint64_t size,
                         BlockTally& tally) {
                          auto rng = substream(s, block, 0);
                          for (std::uint64_t t = 0; t < size; ++t) {
                              const long pick = noisy_argmax(index, rng);
                              if (pick < 0) {
                                  ++tally.ties;
                                  ++tally.deferred;
                              } else {
                                  ++tally.counts[static_cast<std::size_t>(pick)];
                              }
                          }
                      });
}

SimResult simulate_quadratic_discrete(const LinearUtilitySpec& spec, std::uint64_t n, std::uint64_t seed,
                                      unsigned threads) {
    return simulate_quadratic_discrete(spec, Menu::full(spec.universe.size()), n, seed, threads);
}

SimResult simulate_quadratic_discrete(const LinearUtilitySpec& spec, const Menu& menu, std::uint64_t n,
                                      std::uint64_t seed, unsigned threads) {
    return run_blocks(spec, menu, n, seed, threads,
                      [](std::span<const double> index, std::uint64_t s, std::uint64_t block, std::uint64_t size,
                         BlockTally& tally) {
                          auto first = substream(s, block, 1);
                          auto second = substream(s, block, 2);
                          for (std::uint64_t t = 0; t < size; ++t) {
                              const long a = noisy_argmax(index, first);
                              const long b = noisy_argmax(index, second);
                              if (a < 0 || b < 0) {
                                  ++tally.ties;
                                  ++tally.deferred;
                              } else if (a == b) {
                                  ++tally.counts[static_cast<std::size_t>(a)];
                              } else {
                                  ++tally.deferred;
                              }
                          }
                      });
}

DclParams EndogenousComplexity::params(const ChoiceUniverse& universe) const {
    DclParams out(universe, u);
    if (menu.size() >= 2) {
        out.set_complexity(menu, d);
    }
    return out;
}

EndogenousComplexity endogenous_complexity(const LinearUtilitySpec& spec) {
    return endogenous_complexity(spec, Menu::full(spec.universe.size()));
}

EndogenousComplexity endogenous_complexity(const LinearUtilitySpec& spec, const Menu& menu) {
    auto index = spec.indices();
    const double top = *std::max_element(index.begin(), index.end());
    if (2.0 * top > kExpLimit) {
        for (auto& v : index) {
            v -= top;
        }
    }
    EndogenousComplexity out;
    out.menu = menu;
    out.u.resize(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        out.u[i] = std::exp(2.0 * index[i]);
    }
    const auto members = menu.members();
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            out.d += 2.0 * std::exp(index[members[a]] + index[members[b]]);
        }
    }
    return out;
}

double beta_log_likelihood(const CountTable& counts, const std::vector<std::vector<double>>& x,
                           std::span<const double> beta, std::span<double> grad) {
    const std::size_t k = counts.universe().size();
    if (x.size() != k) {
        throw ValidationError("attribute table must have one row per alternative");
    }
    std::vector<double> theta(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (x[i].size() != beta.size()) {
            throw ValidationError("attribute vectors must match the dimension of beta");
        }
        for (std::size_t m = 0; m < beta.size(); ++m) {
            theta[i] += beta[m] * x[i][m];
        }
    }
    std::vector<double> theta_grad(grad.empty() ? 0 : k);
    const double ll = detail::quadratic_log_likelihood_full(counts, theta, theta_grad);
    if (!grad.empty()) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t m = 0; m < beta.size(); ++m) {
                grad[m] += theta_grad[i] * x[i][m];
            }
        }
    }
    return ll;
}

BetaFit fit_beta(const CountTable& counts, const std::vector<std::vector<double>>& x) {
    detail::validate_counts(counts);
    const std::size_t k = counts.universe().size();
    if (x.size() != k || x.empty() || x.front().empty()) {
        throw ValidationError("attribute table must have one non-empty row per alternative");
    }
    const std::size_t m = x.front().size();

    // Only differences within a menu move the likelihood.
    std::vector<std::vector<double>> rows;
    for (const auto& [menu, c] : counts.table()) {
        if (menu.size() < 2 || c.total() == 0) {
            continue;
        }
        const auto members = menu.members();
        for (std::size_t b = 1; b < members.size(); ++b) {
            std::vector<double> row(m);
            for (std::size_t j = 0; j < m; ++j) {
                row[j] = x[members[b]][j] - x[members[0]][j];
            }
            rows.push_back(std::move(row));
        }
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rows[r][j];
        }
    }
    const auto rank = rows.empty() ? 0 : Eigen::FullPivLU<Eigen::MatrixXd>(design).rank();
    if (static_cast<std::size_t>(rank) < m) {
        throw UnderIdentifiedError("attribute differences within observed menus have rank " +
                                   std::to_string(rank) + " < " + std::to_string(m) +
                                   "; beta is not identified");
    }

    const double scale = 1.0 / static_cast<double>(detail::total_count(counts));
    auto objective = [&](std::span<const double> beta, std::span<double> grad) {
        const double ll = beta_log_likelihood(counts, x, beta, grad);
        for (auto& g : grad) {
            g *= -scale;
        }
        return -ll * scale;
    };
    const auto result = detail::minimize(objective, std::vector<double>(m, 0.0));

    BetaFit out{result.x, beta_log_likelihood(counts, x, result.x), {}};
    out.diagnostics.iterations = result.iterations;
    out.diagnostics.gradient_norm = result.gradient_norm;
    out.diagnostics.solver_report = result.report;
    return out;
}

void add_counts(CountTable& table, const SimResult& result) {
    if (!(table.universe() == result.universe)) {
        throw ValidationError("simulation result belongs to a different universe");
    }
    table.set(result.menu, MenuCounts{result.counts, result.deferral_count});
}

}  // namespace dclogit
