#include "dclogit/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dclogit::io {
namespace {

std::string where(std::size_t record) {
    return "record " + std::to_string(record) + ": ";
}

const Json& field(const Json& obj, const char* key, const std::string& context) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(context + "missing field '" + key + "'");
    }
    return obj.at(key);
}

double number(const Json& value, const std::string& context) {
    if (!value.is_number()) {
        throw ValidationError(context + "expected a number, got " + value.dump());
    }
    return value.get<double>();
}

std::vector<std::string> string_list(const Json& value, const std::string& context) {
    if (!value.is_array()) {
        throw ValidationError(context + "expected an array of ids");
    }
    std::vector<std::string> out;
    for (const auto& item : value) {
        if (!item.is_string()) {
            throw ValidationError(context + "ids must be strings, got " + item.dump());
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

ChoiceUniverse parse_universe(const Json& doc, const std::string& context = "") {
    try {
        return ChoiceUniverse(string_list(field(doc, "universe", context), context + "universe: "));
    } catch (const DomainError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(context + e.what());
    }
}

Menu parse_menu_ids(const ChoiceUniverse& universe, const Json& value, const std::string& context) {
    const auto ids = string_list(value, context + "menu: ");
    if (ids.empty()) {
        throw ValidationError(context + "menu is empty");
    }
    std::uint64_t bits = 0;
    for (const auto& id : ids) {
        if (!universe.contains(id)) {
            throw DomainError(context + "unknown alternative '" + id + "'");
        }
        const auto bit = std::uint64_t{1} << universe.index_of(id);
        if (bits & bit) {
            throw ValidationError(context + "alternative '" + id + "' listed twice in the menu");
        }
        bits |= bit;
    }
    return Menu(bits);
}

Json menu_ids(const ChoiceUniverse& universe, const Menu& menu) {
    Json out = Json::array();
    for (auto i : menu.members()) {
        out.push_back(universe.id(i));
    }
    return out;
}

/// Values object keyed by the menu's ids; keys must match the menu exactly.
const Json& menu_values(const ChoiceUniverse& universe, const Menu& menu, const Json& record,
                        const std::string& context) {
    const auto& values = field(record, "values", context);
    if (!values.is_object()) {
        throw ValidationError(context + "'values' must be an object keyed by alternative id");
    }
    for (const auto& [key, v] : values.items()) {
        if (!universe.contains(key) || !menu.contains(universe.index_of(key))) {
            throw ValidationError(context + "value for '" + key + "' which is not on the menu");
        }
    }
    for (auto i : menu.members()) {
        if (!values.contains(universe.id(i))) {
            throw ValidationError(context + "missing value for '" + universe.id(i) + "'");
        }
    }
    return values;
}

std::uint64_t count_value(const Json& value, const std::string& context) {
    if (value.is_number_unsigned()) {
        return value.get<std::uint64_t>();
    }
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    }
    throw ValidationError(context + "counts must be nonnegative integers, got " + value.dump());
}

std::vector<Menu> canonical_menus(const auto& table) {
    std::vector<Menu> menus;
    for (const auto& [menu, value] : table) {
        menus.push_back(menu);
    }
    std::sort(menus.begin(), menus.end(), canonical_less);
    return menus;
}

Json id_map(const ChoiceUniverse& universe, std::span<const double> values) {
    Json out = Json::object();
    for (std::size_t i = 0; i < universe.size(); ++i) {
        out[universe.id(i)] = values[i];
    }
    return out;
}

std::vector<double> read_id_map(const ChoiceUniverse& universe, const Json& doc, const char* key) {
    const std::string context = std::string(key) + ": ";
    const auto& obj = field(doc, key, "");
    if (!obj.is_object()) {
        throw ValidationError(context + "expected an object keyed by alternative id");
    }
    for (const auto& [id, v] : obj.items()) {
        if (!universe.contains(id)) {
            throw DomainError(context + "unknown alternative '" + id + "'");
        }
    }
    std::vector<double> out(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!obj.contains(universe.id(i))) {
            throw ValidationError(context + "missing value for '" + universe.id(i) + "'");
        }
        out[i] = number(obj.at(universe.id(i)), context);
    }
    return out;
}

Json tolerance_json(const Tolerance& tol) {
    return Json{{"rel", tol.rel}, {"abs", tol.abs}};
}

}  // namespace

// --- datasets --------------------------------------------------------------

ChoiceDataset DatasetFile::dataset() const {
    if (probabilities) {
        return *probabilities;
    }
    return counts->frequencies();
}

const CountTable& DatasetFile::count_table() const {
    if (!counts) {
        throw ValidationError("this command needs count records, but the dataset holds probabilities");
    }
    return *counts;
}

DatasetFile parse_dataset(const Json& doc) {
    if (!doc.is_object()) {
        throw ValidationError("dataset must be a JSON object");
    }
    const auto& version = field(doc, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw ValidationError("unsupported schema_version " + version.dump() + " (expected " +
                              std::to_string(kSchemaVersion) + ")");
    }
    const auto universe = parse_universe(doc);
    const auto& records = field(doc, "records", "");
    if (!records.is_array()) {
        throw ValidationError("'records' must be an array");
    }

    DatasetFile out{universe, std::nullopt, std::nullopt};
    std::set<Menu> seen;
    std::string kind_seen;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string ctx = where(r);
        const auto& kind_field = field(rec, "kind", ctx);
        if (!kind_field.is_string()) {
            throw ValidationError(ctx + "'kind' must be \"prob\" or \"count\"");
        }
        const auto kind = kind_field.get<std::string>();
        if (kind != "prob" && kind != "count") {
            throw ValidationError(ctx + "'kind' must be \"prob\" or \"count\", got \"" + kind + "\"");
        }
        if (!kind_seen.empty() && kind != kind_seen) {
            throw ValidationError(ctx + "mixes \"" + kind + "\" with \"" + kind_seen + "\" records");
        }
        kind_seen = kind;

        const Menu menu = parse_menu_ids(universe, field(rec, "menu", ctx), ctx);
        if (!seen.insert(menu).second) {
            throw ValidationError(ctx + "duplicate menu " + menu_label(universe, menu));
        }
        const auto& values = menu_values(universe, menu, rec, ctx);
        const auto& deferral = field(rec, "deferral", ctx);

        if (kind == "prob") {
            if (!out.probabilities) {
                out.probabilities.emplace(universe);
            }
            std::vector<double> masses;
            for (auto i : menu.members()) {
                masses.push_back(number(values.at(universe.id(i)), ctx));
            }
            try {
                out.probabilities->set(
                    ChoiceDistribution(menu, std::move(masses), number(deferral, ctx), kFileSumTolerance));
            } catch (const ValidationError& e) {
                throw ValidationError(ctx + e.what());
            }
        } else {
            if (!out.counts) {
                out.counts.emplace(universe);
            }
            MenuCounts c;
            for (auto i : menu.members()) {
                c.chosen.push_back(count_value(values.at(universe.id(i)), ctx));
            }
            c.deferred = count_value(deferral, ctx);
            out.counts->set(menu, std::move(c));
        }
    }
    if (!out.probabilities && !out.counts) {
        out.probabilities.emplace(universe);
    }
    return out;
}

DatasetFile load_dataset(const std::filesystem::path& path) {
    const auto doc = read_json(path);
    try {
        return parse_dataset(doc);
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

Json to_json(const ChoiceDataset& data) {
    const auto& universe = data.universe();
    Json records = Json::array();
    for (const auto& menu : canonical_menus(data.table())) {
        const auto& dist = data.at(menu);
        Json values = Json::object();
        const auto members = menu.members();
        for (std::size_t i = 0; i < members.size(); ++i) {
            values[universe.id(members[i])] = dist.masses()[i];
        }
        records.push_back(Json{{"menu", menu_ids(universe, menu)},
                               {"kind", "prob"},
                               {"values", values},
                               {"deferral", dist.deferral()}});
    }
    return Json{{"schema_version", kSchemaVersion}, {"universe", universe.ids()}, {"records", records}};
}

Json to_json(const CountTable& counts) {
    const auto& universe = counts.universe();
    Json records = Json::array();
    for (const auto& menu : canonical_menus(counts.table())) {
        const auto& c = counts.at(menu);
        Json values = Json::object();
        const auto members = menu.members();
        for (std::size_t i = 0; i < members.size(); ++i) {
            values[universe.id(members[i])] = c.chosen[i];
        }
        records.push_back(Json{{"menu", menu_ids(universe, menu)},
                               {"kind", "count"},
                               {"values", values},
                               {"deferral", c.deferred}});
    }
    return Json{{"schema_version", kSchemaVersion}, {"universe", universe.ids()}, {"records", records}};
}

Json to_json(const DatasetFile& file) {
    return file.counts ? to_json(*file.counts) : to_json(*file.probabilities);
}

std::string dump(const Json& doc) {
    return doc.dump(2) + "\n";
}

void save_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << dump(doc);
    if (!out) {
        throw ValidationError("failed writing " + path.string());
    }
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

// --- model parameters ------------------------------------------------------

ModelSpec parse_model(const Json& doc) {
    if (!doc.is_object()) {
        throw ValidationError("model file must be a JSON object");
    }
    const auto& kind_field = field(doc, "model", "");
    if (!kind_field.is_string()) {
        throw ValidationError("'model' must be a string");
    }
    const auto kind = kind_field.get<std::string>();
    const auto universe = parse_universe(doc);
    auto flag = [&](const char* key) {
        if (!doc.contains(key)) {
            return false;
        }
        if (!doc.at(key).is_boolean()) {
            throw ValidationError(std::string("'") + key + "' must be true or false");
        }
        return doc.at(key).get<bool>();
    };

    if (kind == "dcl") {
        DclParams params(universe, read_id_map(universe, doc, "u"));
        if (doc.contains("D")) {
            const auto& entries = doc.at("D");
            if (!entries.is_array()) {
                throw ValidationError("'D' must be an array of {menu, value}");
            }
            for (std::size_t r = 0; r < entries.size(); ++r) {
                const std::string ctx = "D[" + std::to_string(r) + "]: ";
                const Menu menu = parse_menu_ids(universe, field(entries[r], "menu", ctx), ctx);
                if (params.has_complexity(menu)) {
                    throw ValidationError(ctx + "duplicate menu " + menu_label(universe, menu));
                }
                const double value = number(field(entries[r], "value", ctx), ctx);
                if (menu.size() == 1) {
                    if (value != 0.0) {
                        throw ValidationError(ctx + "singleton complexity must be 0");
                    }
                    continue;
                }
                try {
                    params.set_complexity(menu, value);
                } catch (const ValidationError& e) {
                    throw ValidationError(ctx + e.what());
                }
            }
        }
        return params;
    }
    if (kind == "dual") {
        return DualParams(universe, read_id_map(universe, doc, "v1"), read_id_map(universe, doc, "v2"));
    }
    if (kind == "quadratic") {
        return QuadraticParams(universe, read_id_map(universe, doc, "v"));
    }
    if (kind == "reciprocal") {
        return ReciprocalParams(universe, read_id_map(universe, doc, "u"), number(field(doc, "lambda", ""), "lambda: "),
                                flag("additive"));
    }
    if (kind == "difference") {
        const auto& f = field(doc, "f", "");
        const auto& fk = field(f, "kind", "f: ");
        if (!fk.is_string()) {
            throw ValidationError("f.kind must be a string");
        }
        const double lambda = number(field(f, "lambda", "f: "), "f.lambda: ");
        GapFunction g;
        switch (parse_gap_function(fk.get<std::string>())) {
            case GapFunctionKind::Reciprocal: g = GapFunction::reciprocal(lambda); break;
            case GapFunctionKind::Exponential: g = GapFunction::exponential(lambda); break;
            case GapFunctionKind::LinearCap: g = GapFunction::linear_cap(lambda); break;
            case GapFunctionKind::Custom: throw ValidationError("custom gap functions cannot be loaded from a file");
        }
        return build_difference_dcl(DifferenceSpec{universe, read_id_map(universe, doc, "u"), g}, flag("additive"));
    }
    throw ValidationError("unknown model '" + kind + "' (expected dcl, dual, quadratic, reciprocal or difference)");
}

ModelSpec load_model(const std::filesystem::path& path) {
    const auto doc = read_json(path);
    try {
        return parse_model(doc);
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

Json to_json(const ModelSpec& model) {
    return std::visit(
        [](const auto& m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DclParams>) {
                Json d = Json::array();
                for (const auto& menu : canonical_menus(m.complexity())) {
                    d.push_back(Json{{"menu", menu_ids(m.universe(), menu)}, {"value", m.complexity(menu)}});
                }
                return Json{{"model", "dcl"}, {"universe", m.universe().ids()}, {"u", id_map(m.universe(), m.u())},
                            {"D", d}};
            } else if constexpr (std::is_same_v<T, DualParams>) {
                return Json{{"model", "dual"}, {"universe", m.universe.ids()}, {"v1", id_map(m.universe, m.v1)},
                            {"v2", id_map(m.universe, m.v2)}};
            } else if constexpr (std::is_same_v<T, QuadraticParams>) {
                return Json{{"model", "quadratic"}, {"universe", m.universe.ids()}, {"v", id_map(m.universe, m.v)}};
            } else {
                return Json{{"model", "reciprocal"}, {"universe", m.universe.ids()}, {"u", id_map(m.universe, m.u)},
                            {"lambda", m.lambda}, {"additive", m.additive_extension}};
            }
        },
        model);
}

Json to_json(const ChoiceDistribution& dist, const ChoiceUniverse& universe) {
    Json values = Json::object();
    const auto members = dist.menu().members();
    for (std::size_t i = 0; i < members.size(); ++i) {
        values[universe.id(members[i])] = dist.masses()[i];
    }
    return Json{{"menu", menu_ids(universe, dist.menu())}, {"values", values}, {"deferral", dist.deferral()}};
}

// --- reports ---------------------------------------------------------------

Json to_json(const AxiomReport& report) {
    Json violations = Json::array();
    for (const auto& v : report.violations) {
        violations.push_back(Json{{"witness", v.witness}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}});
    }
    return Json{{"axiom", std::string(axiom_name(report.axiom))},
                {"passed", report.passed},
                {"tolerance", tolerance_json(report.tolerance)},
                {"checked", report.checked},
                {"vacuous", report.vacuous},
                {"violations", violations}};
}

Json to_json(const FitDiagnostics& d) {
    return Json{{"iterations", d.iterations},
                {"gradient_norm", d.gradient_norm},
                {"under_identified", d.under_identified},
                {"unidentified", d.unidentified},
                {"approximate", d.approximate},
                {"solver_report", d.solver_report}};
}

Json to_json(const SimResult& result) {
    Json counts = Json::object();
    Json freqs = Json::object();
    const auto f = result.frequencies();
    const auto members = result.menu.members();
    for (std::size_t i = 0; i < result.counts.size(); ++i) {
        counts[result.universe.id(members[i])] = result.counts[i];
        freqs[result.universe.id(members[i])] = f[i];
    }
    return Json{{"universe", result.universe.ids()},
                {"menu", menu_ids(result.universe, result.menu)},
                {"counts", counts},
                {"deferral_count", result.deferral_count},
                {"n", result.n},
                {"seed", result.seed},
                {"ties", result.ties},
                {"frequencies", freqs},
                {"deferral_frequency", result.deferral_frequency()},
                {"self_check", result.self_check()}};
}

Json to_json(const EquilibriumResult& r, const MarketConfig& cfg) {
    Json strategies = Json::array();
    for (const auto& x : r.strategies) {
        strategies.push_back(Json{{"q", x.q}, {"p", x.p}});
    }
    return Json{{"income", cfg.income},
                {"s", cfg.s},
                {"q", r.strategies[0].q},
                {"p", r.strategies[0].p},
                {"profit", r.profits[0]},
                {"effectiveness", r.effectiveness},
                {"deferral", r.deferral},
                {"strategies", strategies},
                {"profits", r.profits},
                {"diagnostics",
                 Json{{"iterations", r.iterations},
                      {"step", r.step},
                      {"foc_residual", r.foc_residual},
                      {"max_deviation_gain", r.max_deviation_gain},
                      {"damped", r.damped}}}};
}

// --- CSV -------------------------------------------------------------------

std::vector<std::vector<double>> AttributeTable::aligned(const ChoiceUniverse& universe) const {
    std::vector<std::vector<double>> out;
    for (const auto& id : universe.ids()) {
        const auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) {
            throw DomainError("attribute table has no row for '" + id + "'");
        }
        out.push_back(x[static_cast<std::size_t>(it - ids.begin())]);
    }
    return out;
}

AttributeTable parse_attributes(std::istream& in) {
    AttributeTable out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    auto split = [](const std::string& text) {
        std::vector<std::string> cells;
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        return cells;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = split(line);
        const std::string ctx = "attributes line " + std::to_string(line_no) + ": ";
        if (width == 0) {
            if (cells.size() < 2 || cells[0] != "id") {
                throw ValidationError(ctx + "header must be id,x1,...,xm");
            }
            width = cells.size();
            continue;
        }
        if (cells.size() != width) {
            throw ValidationError(ctx + "expected " + std::to_string(width) + " fields, got " +
                                  std::to_string(cells.size()));
        }
        if (std::find(out.ids.begin(), out.ids.end(), cells[0]) != out.ids.end()) {
            throw ValidationError(ctx + "duplicate id '" + cells[0] + "'");
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            double v = 0.0;
            const auto* first = cells[c].data();
            const auto* last = first + cells[c].size();
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
                throw ValidationError(ctx + "cannot parse '" + cells[c] + "' as a number");
            }
            row.push_back(v);
        }
        out.ids.push_back(cells[0]);
        out.x.push_back(std::move(row));
    }
    if (width == 0 || out.ids.empty()) {
        throw ValidationError("attribute table is empty");
    }
    return out;
}

AttributeTable load_attributes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    try {
        return parse_attributes(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
    out << "x,rho_o\n";
    for (const auto& p : points) {
        out << format_double(p.x) << ',' << format_double(p.rho_o) << '\n';
    }
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace dclogit::io
