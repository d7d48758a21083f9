#include "dclogit/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dclogit {

double Tolerance::slack(double x, double y) const noexcept {
    return std::max(std::abs(x), std::abs(y)) * rel + abs;
}

bool Tolerance::equal(double x, double y) const noexcept {
    return std::abs(x - y) <= slack(x, y);
}

bool Tolerance::geq(double x, double y) const noexcept {
    return x >= y - slack(x, y);
}

bool Tolerance::greater(double x, double y) const noexcept {
    return x > y + slack(x, y);
}

// --- ChoiceUniverse --------------------------------------------------------

ChoiceUniverse::ChoiceUniverse(std::vector<std::string> ids) : ids_(std::move(ids)) {
    if (ids_.size() < 2) {
        throw ValidationError("choice universe needs at least 2 alternatives");
    }
    if (ids_.size() > kMaxSize) {
        throw ValidationError("choice universe exceeds " + std::to_string(kMaxSize) + " alternatives");
    }
    std::set<std::string_view> seen;
    for (const auto& id : ids_) {
        if (id.empty()) {
            throw ValidationError("alternative id must be non-empty");
        }
        if (id == kOutsideOption) {
            throw ValidationError("alternative id 'o' is reserved for the outside option");
        }
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate alternative id '" + id + "'");
        }
    }
}

std::size_t ChoiceUniverse::index_of(std::string_view id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) {
        throw DomainError("unknown alternative id '" + std::string(id) + "'");
    }
    return static_cast<std::size_t>(it - ids_.begin());
}

bool ChoiceUniverse::contains(std::string_view id) const noexcept {
    return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

std::size_t ChoiceUniverse::smallest_id_index() const noexcept {
    return static_cast<std::size_t>(std::min_element(ids_.begin(), ids_.end()) - ids_.begin());
}

// --- Menu ------------------------------------------------------------------

Menu::Menu(std::uint64_t bits) : bits_(bits) {
    if (bits_ == 0) {
        throw ValidationError("menu must be non-empty");
    }
}

Menu Menu::of(std::initializer_list<std::size_t> members) {
    return of(std::span<const std::size_t>(members.begin(), members.size()));
}

Menu Menu::of(std::span<const std::size_t> members) {
    std::uint64_t bits = 0;
    for (auto i : members) {
        if (i >= ChoiceUniverse::kMaxSize) {
            throw ValidationError("menu member index out of range");
        }
        bits |= std::uint64_t{1} << i;
    }
    return Menu{bits};
}

Menu Menu::pair(std::size_t i, std::size_t j) {
    return Menu{(std::uint64_t{1} << i) | (std::uint64_t{1} << j)};
}

Menu Menu::full(std::size_t k) {
    return Menu{k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1};
}

std::size_t Menu::size() const noexcept {
    return static_cast<std::size_t>(std::popcount(bits_));
}

std::vector<std::size_t> Menu::members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    }
    return out;
}

Menu Menu::intersect(const Menu& other) const noexcept {
    Menu m;
    m.bits_ = bits_ & other.bits_;
    return m;
}

std::vector<Menu> all_menus(std::size_t k) {
    if (k > 30) {
        throw ValidationError("full-domain enumeration limited to 30 alternatives");
    }
    std::vector<Menu> out;
    const std::uint64_t n = std::uint64_t{1} << k;
    out.reserve(n - 1);
    for (std::uint64_t bits = 1; bits < n; ++bits) {
        out.emplace_back(bits);
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

bool canonical_less(const Menu& a, const Menu& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a.members() < b.members();
}

std::string menu_label(const ChoiceUniverse& universe, const Menu& menu) {
    std::string s = "{";
    bool first = true;
    for (auto i : menu.members()) {
        if (!first) {
            s += ',';
        }
        s += universe.id(i);
        first = false;
    }
    s += '}';
    return s;
}

Menu parse_menu(const ChoiceUniverse& universe, std::string_view text) {
    std::vector<std::size_t> idx;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto token = text.substr(start, end - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (!token.empty()) {
            idx.push_back(universe.index_of(token));
        }
        start = end + 1;
    }
    if (idx.empty()) {
        throw ValidationError("empty menu");
    }
    return Menu::of(idx);
}

// --- ChoiceDistribution ----------------------------------------------------

ChoiceDistribution::ChoiceDistribution(Menu menu, std::vector<double> masses, double deferral,
                                       double sum_tolerance)
    : menu_(menu), masses_(std::move(masses)), deferral_(deferral) {
    if (masses_.size() != menu_.size()) {
        throw ValidationError("distribution has " + std::to_string(masses_.size()) +
                              " masses for a menu of size " + std::to_string(menu_.size()));
    }
    double total = deferral_;
    auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!in_unit(deferral_)) {
        throw ValidationError("deferral probability outside [0,1]");
    }
    for (double p : masses_) {
        if (!in_unit(p)) {
            throw ValidationError("choice probability outside [0,1]");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > sum_tolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "choice probabilities sum to " << total << ", not 1";
        throw ValidationError(msg.str());
    }
}

double ChoiceDistribution::mass(std::size_t i) const {
    if (!menu_.contains(i)) {
        throw DomainError("alternative not in menu");
    }
    const std::uint64_t below = menu_.bits() & ((std::uint64_t{1} << i) - 1);
    return masses_[static_cast<std::size_t>(std::popcount(below))];
}

double ChoiceDistribution::mass(const Menu& subset) const {
    double s = 0.0;
    for (auto i : subset.members()) {
        s += mass(i);
    }
    return s;
}

double ChoiceDistribution::active() const noexcept {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

// --- ChoiceDataset ---------------------------------------------------------

ChoiceDataset::ChoiceDataset(ChoiceUniverse universe) : universe_(std::move(universe)) {}

void ChoiceDataset::set(ChoiceDistribution dist) {
    if (!dist.menu().is_subset_of(Menu::full(universe_.size()))) {
        throw DomainError("menu outside the universe");
    }
    auto key = dist.menu();
    table_.insert_or_assign(key, std::move(dist));
}

const ChoiceDistribution& ChoiceDataset::at(const Menu& menu) const {
    auto it = table_.find(menu);
    if (it == table_.end()) {
        throw IncompleteDataError("dataset has no record for menu " + menu_label(universe_, menu));
    }
    return it->second;
}

bool ChoiceDataset::is_full_domain() const noexcept {
    const std::size_t k = universe_.size();
    return k < 64 && table_.size() == (std::uint64_t{1} << k) - 1;
}

void ChoiceDataset::require_full_domain() const {
    for (const auto& m : all_menus(universe_.size())) {
        if (!has(m)) {
            throw IncompleteDataError("full domain required; missing menu " + menu_label(universe_, m));
        }
    }
}

void ChoiceDataset::require_singletons() const {
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        if (!has(Menu::singleton(i))) {
            throw IncompleteDataError("missing singleton menu {" + universe_.id(i) + "}");
        }
    }
}

void ChoiceDataset::require_binary_domain() const {
    require_singletons();
    const std::size_t k = universe_.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (!has(Menu::pair(i, j))) {
                throw IncompleteDataError("missing binary menu " +
                                          menu_label(universe_, Menu::pair(i, j)));
            }
        }
    }
}

// --- CountTable ------------------------------------------------------------

std::uint64_t MenuCounts::total() const noexcept {
    return std::accumulate(chosen.begin(), chosen.end(), deferred);
}

CountTable::CountTable(ChoiceUniverse universe) : universe_(std::move(universe)) {}

void CountTable::set(const Menu& menu, MenuCounts counts) {
    if (!menu.is_subset_of(Menu::full(universe_.size()))) {
        throw DomainError("menu outside the universe");
    }
    if (counts.chosen.size() != menu.size()) {
        throw ValidationError("count record size does not match menu " + menu_label(universe_, menu));
    }
    table_.insert_or_assign(menu, std::move(counts));
}

const MenuCounts& CountTable::at(const Menu& menu) const {
    auto it = table_.find(menu);
    if (it == table_.end()) {
        throw IncompleteDataError("count table has no record for menu " + menu_label(universe_, menu));
    }
    return it->second;
}

ChoiceDataset CountTable::frequencies() const {
    ChoiceDataset out(universe_);
    for (const auto& [menu, counts] : table_) {
        const auto n = counts.total();
        if (n == 0) {
            continue;
        }
        const double dn = static_cast<double>(n);
        std::vector<double> masses;
        masses.reserve(counts.chosen.size());
        for (auto c : counts.chosen) {
            masses.push_back(static_cast<double>(c) / dn);
        }
        out.set(ChoiceDistribution(menu, std::move(masses), static_cast<double>(counts.deferred) / dn));
    }
    return out;
}

}  // namespace dclogit
