#pragma once

// Shared fixtures: small universes, random parameter draws and dataset surgery.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dclogit/core.hpp"
#include "dclogit/model.hpp"

namespace testing {

using namespace dclogit;

inline ChoiceUniverse letters(std::size_t k) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < k; ++i) {
        ids.push_back(std::string(1, static_cast<char>('a' + i)));
    }
    return ChoiceUniverse(std::move(ids));
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t k, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(k);
    for (auto& x : out) {
        x = dist(rng);
    }
    return out;
}

/// Utilities separated by at least `gap` so reciprocal pairs are well conditioned.
inline std::vector<double> distinct_vector(std::mt19937_64& rng, std::size_t k, double lo, double hi,
                                           double gap = 0.05) {
    for (;;) {
        auto v = uniform_vector(rng, k, lo, hi);
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            for (std::size_t j = i + 1; j < k && ok; ++j) {
                ok = std::abs(v[i] - v[j]) >= gap;
            }
        }
        if (ok) {
            return v;
        }
    }
}

/// General DCL with independent random complexity on every menu of size >= 2.
inline DclParams random_dcl(std::mt19937_64& rng, std::size_t k) {
    const auto universe = letters(k);
    DclParams p(universe, uniform_vector(rng, k, 0.2, 5.0));
    std::uniform_real_distribution<double> d(0.1, 6.0);
    for (const auto& menu : all_menus(k)) {
        if (menu.size() > 1) {
            p.set_complexity(menu, d(rng));
        }
    }
    return p;
}

/// DCL whose complexity grows with the menu: D(A) = sum over members of w plus a size bonus.
inline DclParams random_monotone_dcl(std::mt19937_64& rng, std::size_t k) {
    const auto universe = letters(k);
    DclParams p(universe, uniform_vector(rng, k, 0.2, 5.0));
    const auto w = uniform_vector(rng, k, 0.1, 2.0);
    for (const auto& menu : all_menus(k)) {
        if (menu.size() > 1) {
            double d = 0.0;
            for (auto i : menu.members()) {
                d += w[i];
            }
            p.set_complexity(menu, d * static_cast<double>(menu.size() - 1));
        }
    }
    return p;
}

/// Copy of data with one menu's distribution replaced.
inline ChoiceDataset with_menu(const ChoiceDataset& data, ChoiceDistribution dist) {
    ChoiceDataset out = data;
    out.set(std::move(dist));
    return out;
}

/// Binary distribution {a: pa, b: pb, o: rest} on a two-member menu.
inline ChoiceDistribution binary(std::size_t i, std::size_t j, double pi, double pj) {
    return ChoiceDistribution(Menu::pair(i, j), i < j ? std::vector<double>{pi, pj} : std::vector<double>{pj, pi},
                              1.0 - pi - pj);
}

inline ChoiceDistribution sure_thing(std::size_t i) {
    return ChoiceDistribution(Menu::singleton(i), {1.0}, 0.0);
}

}  // namespace testing
