#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dclogit {

// ---------------------------------------------------------------------------
// Errors
//
// Two families, matching the CLI exit-code contract: ValidationError covers
// malformed or out-of-domain input (exit 1), SolverError covers inputs that
// are well-formed but not representable or not solvable (exit 2).
// ---------------------------------------------------------------------------

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IncompleteDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedMenuError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DegeneratePairError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OptimizationError : public SolverError {
public:
    using SolverError::SolverError;
};

class UnderIdentifiedError : public SolverError {
public:
    using SolverError::SolverError;
};

// ---------------------------------------------------------------------------
// Tolerance
// ---------------------------------------------------------------------------

/// Mixed relative/absolute comparison: |x - y| <= max(|x|,|y|) * rel + abs.
struct Tolerance {
    double rel = 1e-6;
    double abs = 1e-9;

    [[nodiscard]] double slack(double x, double y) const noexcept;
    [[nodiscard]] bool equal(double x, double y) const noexcept;
    /// x >= y up to tolerance.
    [[nodiscard]] bool geq(double x, double y) const noexcept;
    /// x > y by more than the tolerance.
    [[nodiscard]] bool greater(double x, double y) const noexcept;
};

inline constexpr Tolerance kStrictTolerance{1e-9, 1e-12};

// ---------------------------------------------------------------------------
// Universe and menus
// ---------------------------------------------------------------------------

inline constexpr std::string_view kOutsideOption = "o";

struct Alternative {
    std::string id;
};

/// Ordered, finite set of market alternatives. The order fixes the
/// canonical indexing a_1..a_k used throughout the library.
class ChoiceUniverse {
public:
    static constexpr std::size_t kMaxSize = 62;

    explicit ChoiceUniverse(std::vector<std::string> ids);

    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] const std::string& id(std::size_t i) const { return ids_.at(i); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    /// Throws DomainError for unknown ids.
    [[nodiscard]] std::size_t index_of(std::string_view id) const;
    [[nodiscard]] bool contains(std::string_view id) const noexcept;

    /// Index of the lexicographically smallest id.
    [[nodiscard]] std::size_t smallest_id_index() const noexcept;

    friend bool operator==(const ChoiceUniverse&, const ChoiceUniverse&) = default;

private:
    std::vector<std::string> ids_;
};

/// Non-empty subset of a universe, stored as a bitset over canonical indices.
/// Set equality is key equality.
class Menu {
public:
    Menu() = default;
    explicit Menu(std::uint64_t bits);
    static Menu of(std::initializer_list<std::size_t> members);
    static Menu of(std::span<const std::size_t> members);
    static Menu singleton(std::size_t i) { return Menu{std::uint64_t{1} << i}; }
    static Menu pair(std::size_t i, std::size_t j);
    static Menu full(std::size_t k);

    [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] bool contains(std::size_t i) const noexcept { return (bits_ >> i) & 1U; }
    /// Members in ascending canonical order.
    [[nodiscard]] std::vector<std::size_t> members() const;
    [[nodiscard]] bool is_subset_of(const Menu& other) const noexcept {
        return (bits_ & ~other.bits_) == 0;
    }
    [[nodiscard]] bool is_strict_subset_of(const Menu& other) const noexcept {
        return is_subset_of(other) && bits_ != other.bits_;
    }
    [[nodiscard]] Menu with(std::size_t i) const { return Menu{bits_ | (std::uint64_t{1} << i)}; }
    [[nodiscard]] Menu intersect(const Menu& other) const noexcept;

    friend auto operator<=>(const Menu&, const Menu&) = default;

private:
    std::uint64_t bits_ = 0;
};

/// Every non-empty menu of a k-alternative universe, ordered by size and
/// then by canonical member order.
[[nodiscard]] std::vector<Menu> all_menus(std::size_t k);

/// Canonical ordering used for serialization: size first, then members.
[[nodiscard]] bool canonical_less(const Menu& a, const Menu& b);

/// "{a,b}" style label.
[[nodiscard]] std::string menu_label(const ChoiceUniverse& universe, const Menu& menu);

/// Parses a comma-separated id list ("a,b") into a menu.
[[nodiscard]] Menu parse_menu(const ChoiceUniverse& universe, std::string_view text);

// ---------------------------------------------------------------------------
// Choice distributions and datasets
// ---------------------------------------------------------------------------

/// Probabilities over one menu's members plus the deferral (outside option)
/// mass. Masses are aligned with menu.members().
class ChoiceDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Throws ValidationError when the masses are not in [0,1] or do not sum
    /// to one within sum_tolerance. No renormalization is performed.
    ChoiceDistribution(Menu menu, std::vector<double> masses, double deferral,
                       double sum_tolerance = kSumTolerance);

    [[nodiscard]] const Menu& menu() const noexcept { return menu_; }
    [[nodiscard]] std::span<const double> masses() const noexcept { return masses_; }
    [[nodiscard]] double deferral() const noexcept { return deferral_; }
    /// Mass of universe alternative i; throws DomainError when i is not offered.
    [[nodiscard]] double mass(std::size_t i) const;
    /// rho(S, menu): summed mass over the members of S (S must be within the menu).
    [[nodiscard]] double mass(const Menu& subset) const;
    /// Sum of all active-choice masses.
    [[nodiscard]] double active() const noexcept;

private:
    Menu menu_;
    std::vector<double> masses_;
    double deferral_ = 0.0;
};

class ChoiceDataset {
public:
    explicit ChoiceDataset(ChoiceUniverse universe);

    [[nodiscard]] const ChoiceUniverse& universe() const noexcept { return universe_; }
    [[nodiscard]] const std::map<Menu, ChoiceDistribution>& table() const noexcept { return table_; }

    /// Inserts or replaces the distribution for its menu.
    void set(ChoiceDistribution dist);
    [[nodiscard]] bool has(const Menu& menu) const noexcept { return table_.contains(menu); }
    /// Throws IncompleteDataError when the menu is absent.
    [[nodiscard]] const ChoiceDistribution& at(const Menu& menu) const;

    [[nodiscard]] bool is_full_domain() const noexcept;
    void require_full_domain() const;
    /// Every singleton and binary menu present.
    void require_binary_domain() const;
    void require_singletons() const;

private:
    ChoiceUniverse universe_;
    std::map<Menu, ChoiceDistribution> table_;
};

/// Observed outcome counts at one menu, aligned with menu.members().
struct MenuCounts {
    std::vector<std::uint64_t> chosen;
    std::uint64_t deferred = 0;

    [[nodiscard]] std::uint64_t total() const noexcept;
};

class CountTable {
public:
    explicit CountTable(ChoiceUniverse universe);

    [[nodiscard]] const ChoiceUniverse& universe() const noexcept { return universe_; }
    [[nodiscard]] const std::map<Menu, MenuCounts>& table() const noexcept { return table_; }
    void set(const Menu& menu, MenuCounts counts);
    [[nodiscard]] const MenuCounts& at(const Menu& menu) const;
    /// Empirical frequencies per menu; menus with zero total are skipped.
    [[nodiscard]] ChoiceDataset frequencies() const;

private:
    ChoiceUniverse universe_;
    std::map<Menu, MenuCounts> table_;
};

}  // namespace dclogit
