#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dclogit/core.hpp"
#include "dclogit/model.hpp"
#include "dclogit/recovery.hpp"

namespace dclogit {

// ---------------------------------------------------------------------------
// Utility-difference models: D({a,b}) = f(|u(a) - u(b)|), f strictly decreasing
// ---------------------------------------------------------------------------

enum class GapFunctionKind { Reciprocal, Exponential, LinearCap, Custom };

[[nodiscard]] std::string_view gap_function_name(GapFunctionKind kind);
/// Throws ValidationError for unknown names ("reciprocal", "exponential", "linear-cap").
[[nodiscard]] GapFunctionKind parse_gap_function(std::string_view name);

struct GapFunction {
    GapFunctionKind kind = GapFunctionKind::Reciprocal;
    double lambda = 1.0;
    std::function<double(double)> f;

    /// lambda / x
    static GapFunction reciprocal(double lambda);
    /// lambda * exp(-x)
    static GapFunction exponential(double lambda);
    /// max(0, lambda - x)
    static GapFunction linear_cap(double lambda);
    static GapFunction custom(std::function<double(double)> f);

    [[nodiscard]] double operator()(double gap) const { return f(gap); }
};

struct DifferenceSpec {
    ChoiceUniverse universe;
    std::vector<double> u;
    GapFunction f;
};

/// Number of sample points used to check that f is strictly decreasing over
/// the observed gap range.
inline constexpr std::size_t kMonotonicityGrid = 1024;

/// Binary complexity from f; larger menus get pairwise sums when additive and
/// are left undefined otherwise. Zero gaps raise DegeneratePairError for every
/// f. Throws ValidationError when f is not strictly decreasing on the sampled
/// gap range or f(gap) <= 0 at an observed gap.
[[nodiscard]] DclParams build_difference_dcl(const DifferenceSpec& spec, bool additive);

// ---------------------------------------------------------------------------
// Reciprocal-differences identification
// ---------------------------------------------------------------------------

class NotReciprocalError : public NotRepresentableError {
public:
    using NotRepresentableError::NotRepresentableError;
};

/// Uses singleton and binary menus only. u(x) = alpha rho(x,{z,x}) / rho(z,{z,x});
/// lambda is the median of D({a,b}) |u(a) - u(b)| over pairs and must agree
/// with every pair within tol. Scaling the anchor by alpha scales the result
/// to (alpha u, alpha^2 lambda) exactly.
[[nodiscard]] ReciprocalParams recover_reciprocal(const ChoiceDataset& data, Anchor anchor, Tolerance tol = {});

struct RevealedPreference {
    /// (a, b) with a strictly preferred to b, in canonical indices.
    std::set<std::pair<std::size_t, std::size_t>> strict_pairs;
    /// delta for each binary menu, oriented from the higher- to the lower-utility member:
    /// max(0, D({a,b}) - u(lower)).
    std::map<Menu, double> delta;

    [[nodiscard]] bool prefers(std::size_t a, std::size_t b) const { return strict_pairs.contains({a, b}); }
};

[[nodiscard]] RevealedPreference revealed_preference(const ReciprocalParams& params);

// ---------------------------------------------------------------------------
// Effect generators
// ---------------------------------------------------------------------------

struct CurvePoint {
    double x;
    double rho_o;
};

/// Deferral at {a,b} with u = (u_base + g, u_base) under the reciprocal model,
/// one point per gap. Gaps must be strictly positive and ascending.
[[nodiscard]] std::vector<CurvePoint> similarity_deferral_curve(double u_base, std::span<const double> gaps,
                                                                double lambda);

enum class AttractivenessEffect { Relative, Absolute, Mixed };

[[nodiscard]] std::string_view attractiveness_effect_name(AttractivenessEffect e);

struct AttractivenessResult {
    double rho_ab;
    double rho_cd;
    /// +1 when rho(o,{c,d}) > rho(o,{a,b}), -1 when smaller, 0 when equal.
    int order;
    /// Same comparison through u(a)^2 - u(b)^2 versus u(c)^2 - u(d)^2.
    int squared_gap_order;
    AttractivenessEffect effect;
};

[[nodiscard]] AttractivenessResult attractiveness_comparison(std::pair<double, double> ab,
                                                             std::pair<double, double> cd, double lambda);

struct RollerCoasterPoint {
    double added;
    double rho_o;          ///< deferral at the expanded menu A
    double rho_o_base;     ///< deferral at the base menu B
    double cost_ratio;     ///< [D(A) - D(B)] / D(B)
    double benefit_ratio;  ///< [u(A) - u(B)] / u(B)
    /// rho_o <= rho_o_base and cost_ratio <= benefit_ratio agree.
    bool consistent;
};

/// Complexity of a menu given the DCL utilities of its members.
using MenuComplexity = std::function<double(std::span<const double> u)>;

/// Appends one alternative with DCL utility x for each grid value to the base
/// menu utilities and reports deferral before and after.
[[nodiscard]] std::vector<RollerCoasterPoint> roller_coaster_curve(std::span<const double> base_u,
                                                                   const MenuComplexity& complexity,
                                                                   std::span<const double> added_u);

/// Quadratic logit: the grid is in v units (DCL utility v^2).
[[nodiscard]] std::vector<RollerCoasterPoint> roller_coaster_curve(const QuadraticParams& base,
                                                                   std::span<const double> added_v);

/// Reciprocal model with the additive extension.
[[nodiscard]] std::vector<RollerCoasterPoint> roller_coaster_curve(const ReciprocalParams& base,
                                                                   std::span<const double> added_u);

}  // namespace dclogit
