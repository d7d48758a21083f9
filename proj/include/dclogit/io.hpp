#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dclogit/axioms.hpp"
#include "dclogit/core.hpp"
#include "dclogit/difference.hpp"
#include "dclogit/discrete_sim.hpp"
#include "dclogit/market.hpp"
#include "dclogit/model.hpp"
#include "dclogit/resampling.hpp"

namespace dclogit::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Probabilities loaded from disk may carry rounding from other tools.
inline constexpr double kFileSumTolerance = 1e-6;

/// Contents of a dataset file: every record is either a probability record
/// or a count record; mixing the two in one file is rejected.
struct DatasetFile {
    ChoiceUniverse universe;
    std::optional<ChoiceDataset> probabilities;
    std::optional<CountTable> counts;

    /// Probabilities as stored, or empirical frequencies of the counts.
    [[nodiscard]] ChoiceDataset dataset() const;
    /// Throws ValidationError when the file holds probabilities.
    [[nodiscard]] const CountTable& count_table() const;
};

// --- datasets --------------------------------------------------------------

[[nodiscard]] DatasetFile parse_dataset(const Json& doc);
[[nodiscard]] DatasetFile load_dataset(const std::filesystem::path& path);

[[nodiscard]] Json to_json(const ChoiceDataset& data);
[[nodiscard]] Json to_json(const CountTable& counts);
[[nodiscard]] Json to_json(const DatasetFile& file);

/// Canonical text: two-space indentation, sorted keys, shortest round-trip
/// floats, trailing newline.
[[nodiscard]] std::string dump(const Json& doc);
void save_json(const std::filesystem::path& path, const Json& doc);
[[nodiscard]] Json read_json(const std::filesystem::path& path);

// --- model parameters ------------------------------------------------------

/// Reads {"model": "dcl"|"dual"|"quadratic"|"reciprocal"|"difference", ...}.
/// Difference models are returned as their DCL form.
[[nodiscard]] ModelSpec parse_model(const Json& doc);
[[nodiscard]] ModelSpec load_model(const std::filesystem::path& path);
[[nodiscard]] Json to_json(const ModelSpec& model);
[[nodiscard]] Json to_json(const ChoiceDistribution& dist, const ChoiceUniverse& universe);

// --- reports ---------------------------------------------------------------

[[nodiscard]] Json to_json(const AxiomReport& report);
[[nodiscard]] Json to_json(const FitDiagnostics& d);
[[nodiscard]] Json to_json(const SimResult& result);
[[nodiscard]] Json to_json(const EquilibriumResult& result, const MarketConfig& cfg);

// --- CSV -------------------------------------------------------------------

struct AttributeTable {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> x;

    /// Rows reordered to the universe; throws DomainError on missing ids.
    [[nodiscard]] std::vector<std::vector<double>> aligned(const ChoiceUniverse& universe) const;
};

/// Header `id,x1,...,xm`, one row per alternative.
[[nodiscard]] AttributeTable parse_attributes(std::istream& in);
[[nodiscard]] AttributeTable load_attributes(const std::filesystem::path& path);

/// Header `x,rho_o`.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace dclogit::io
