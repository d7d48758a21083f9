#include "dclogit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "dclogit/axioms.hpp"
#include "dclogit/difference.hpp"
#include "dclogit/discrete_sim.hpp"
#include "dclogit/io.hpp"
#include "dclogit/market.hpp"
#include "dclogit/recovery.hpp"
#include "dclogit/resampling.hpp"

namespace dclogit {
namespace {

using io::Json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out) const {
        std::vector<std::size_t> width(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) {
            width[c] = header[c].size();
            for (const auto& r : rows) {
                width[c] = std::max(width[c], r[c].size());
            }
        }
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                out << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
            }
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) {
            line(r);
        }
    }
};

/// Emits JSON on stdout, or writes it to --out and prints the table instead.
void emit(std::ostream& out, const Json& doc, const std::string& path, const Table* table = nullptr) {
    if (path.empty()) {
        out << io::dump(doc);
        return;
    }
    io::save_json(path, doc);
    if (table != nullptr) {
        table->print(out);
    } else {
        out << "wrote " << path << '\n';
    }
}

std::string num(double v) {
    return io::format_double(v);
}

Tolerance resolve_tolerance(double flag) {
    Tolerance tol;
    if (const char* env = std::getenv("DCLOGIT_TOLERANCE"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) {
            throw ValidationError(std::string("DCLOGIT_TOLERANCE must be a positive number, got '") + env + "'");
        }
        tol.rel = v;
    }
    if (flag > 0.0) {
        tol.rel = flag;
    } else if (flag < 0.0 || std::isnan(flag)) {
        throw ValidationError("--tol must be positive");
    }
    return tol;
}

Table axiom_table(const std::vector<AxiomReport>& reports) {
    Table t{{"axiom", "passed", "checked", "vacuous", "violations", "worst witness"}, {}};
    for (const auto& r : reports) {
        std::string witness;
        if (!r.violations.empty()) {
            for (const auto& w : r.violations.front().witness) {
                witness += (witness.empty() ? "" : " ") + w;
            }
        }
        t.rows.push_back({std::string(axiom_name(r.axiom)), r.passed ? "yes" : "NO", std::to_string(r.checked),
                          std::to_string(r.vacuous), std::to_string(r.violations.size()), witness});
    }
    return t;
}

Axiom parse_axiom(const std::string& name) {
    static const std::vector<std::pair<std::string, Axiom>> names{
        {"A1", Axiom::A1}, {"A2", Axiom::A2}, {"A3", Axiom::A3}, {"A4", Axiom::A4},
        {"A5", Axiom::A5}, {"A5eq", Axiom::A5Equality}, {"A6", Axiom::A6}, {"A7", Axiom::A7},
        {"A8", Axiom::A8}, {"A9", Axiom::A9}};
    for (const auto& [n, a] : names) {
        if (n == name || axiom_name(a) == name) {
            return a;
        }
    }
    throw ValidationError("unknown axiom '" + name + "'");
}

enum class Needs { Singletons, Present, Binary, Full };

Needs axiom_needs(Axiom a) {
    switch (a) {
        case Axiom::A1: return Needs::Singletons;
        case Axiom::A2:
        case Axiom::A3:
        case Axiom::A7: return Needs::Present;
        case Axiom::A5:
        case Axiom::A5Equality:
        case Axiom::A6:
        case Axiom::A8: return Needs::Binary;
        case Axiom::A4:
        case Axiom::A9: return Needs::Full;
    }
    return Needs::Full;
}

bool domain_available(const ChoiceDataset& data, Needs needs) {
    const std::size_t k = data.universe().size();
    switch (needs) {
        case Needs::Present: return !data.table().empty();
        case Needs::Full: return data.is_full_domain();
        case Needs::Singletons:
        case Needs::Binary:
            for (std::size_t i = 0; i < k; ++i) {
                if (!data.has(Menu::singleton(i))) {
                    return false;
                }
                for (std::size_t j = i + 1; needs == Needs::Binary && j < k; ++j) {
                    if (!data.has(Menu::pair(i, j))) {
                        return false;
                    }
                }
            }
            return true;
    }
    return false;
}

Json reports_json(const std::vector<AxiomReport>& reports) {
    Json out = Json::array();
    for (const auto& r : reports) {
        out.push_back(io::to_json(r));
    }
    return out;
}

/// Menus a model can be evaluated on.
std::vector<Menu> evaluable_menus(const ModelSpec& model) {
    const std::size_t k = universe_of(model).size();
    std::vector<Menu> out;
    for (const auto& menu : all_menus(k)) {
        if (const auto* dcl = std::get_if<DclParams>(&model)) {
            if (menu.size() > 1 && !dcl->has_complexity(menu)) {
                continue;
            }
        }
        if (const auto* rec = std::get_if<ReciprocalParams>(&model)) {
            if (menu.size() > 2 && !rec->additive_extension) {
                continue;
            }
        }
        out.push_back(menu);
    }
    return out;
}

std::uint64_t derive_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::vector<double>> identity_attributes(std::size_t k) {
    std::vector<std::vector<double>> x(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        x[i][i] = 1.0;
    }
    return x;
}

/// x_1 = 0 and x_i = e_{i-1}: beta_j is the log-utility of a_{j+1} relative to a_1.
std::vector<std::vector<double>> reference_attributes(std::size_t k) {
    std::vector<std::vector<double>> x(k, std::vector<double>(k - 1, 0.0));
    for (std::size_t i = 1; i < k; ++i) {
        x[i][i - 1] = 1.0;
    }
    return x;
}

std::vector<std::string> default_ids(std::size_t k) {
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= k; ++i) {
        ids.push_back("a" + std::to_string(i));
    }
    return ids;
}

const CLI::App* deepest_parsed(const CLI::App& app) {
    const CLI::App* node = &app;
    for (bool descended = true; descended;) {
        descended = false;
        for (const auto* sub : node->get_subcommands()) {
            node = sub;
            descended = true;
        }
    }
    return node;
}

/// Parses the command line; returns an exit code when parsing already
/// finished the job (help or usage error) and nullopt when a command should run.
std::optional<int> run(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"dclogit"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << deepest_parsed(app)->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        err << deepest_parsed(app)->help();
        return kExitValidation;
    }
    return std::nullopt;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decision-conflict logit toolkit: evaluation, identification, axiom checks, "
                 "simulation and duopoly equilibrium.",
                 "dclogit"};
    app.require_subcommand(1);
    app.fallthrough();  // global options such as --tol may follow the subcommand
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    double tol_flag = 0.0;
    std::string out_path;
    app.add_option("--tol", tol_flag, "Relative tolerance for axiom checks (overrides DCLOGIT_TOLERANCE)")
        ->check(CLI::PositiveNumber);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a model on one menu or on every menu it defines");
    std::string model_path;
    std::string menu_text;
    eval->add_option("model", model_path, "Model parameters JSON")->required()->check(CLI::ExistingFile);
    eval->add_option("--menu", menu_text, "Comma-separated alternative ids");
    eval->add_option("--out", out_path, "Write JSON here");

    // recover
    auto* recover = app.add_subcommand("recover", "Recover model parameters from exact choice probabilities");
    std::string data_path;
    std::string recover_model = "dcl";
    std::string anchor_id;
    double alpha = 1.0;
    recover->add_option("data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
    recover->add_option("--model", recover_model, "dcl or reciprocal")
        ->check(CLI::IsMember({"dcl", "reciprocal"}));
    recover->add_option("--anchor", anchor_id, "Reference alternative (default: smallest id)");
    recover->add_option("--alpha", alpha, "Utility of the reference alternative")->check(CLI::PositiveNumber);
    recover->add_option("--out", out_path, "Write JSON here");

    // axioms
    auto* axioms = app.add_subcommand("axioms", "Check behavioral axioms on a dataset");
    std::vector<std::string> axiom_names;
    axioms->add_option("data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
    axioms->add_option("--axiom", axiom_names, "Axioms to check (A1..A9, A5eq); default: all the data supports")
        ->delimiter(',');
    axioms->add_option("--out", out_path, "Write JSON report here and print a table");

    // solve-dual / solve-quadratic
    auto* solve_dual = app.add_subcommand("solve-dual", "Exact dual-logit identification on two alternatives");
    solve_dual->add_option("data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
    solve_dual->add_option("--out", out_path, "Write JSON here");
    auto* solve_quad = app.add_subcommand("solve-quadratic", "Exact quadratic-logit identification");
    solve_quad->add_option("data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
    solve_quad->add_option("--out", out_path, "Write JSON here");

    // fit
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit on count data");
    std::string fit_model = "quadratic";
    std::string attributes_path;
    fit->add_option("data", data_path, "Dataset JSON with count records")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", fit_model, "quadratic, dual or beta")
        ->check(CLI::IsMember({"quadratic", "dual", "beta"}));
    fit->add_option("--attributes", attributes_path, "Attribute CSV (beta model; default: unit vectors, first alternative as reference)")
        ->check(CLI::ExistingFile);
    fit->add_option("--out", out_path, "Write JSON here");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo choice with Gumbel noise");
    std::vector<double> beta;
    std::uint64_t n = 1000000;
    std::optional<std::uint64_t> seed;
    int rounds = 2;
    simulate->add_option("--beta", beta, "Coefficients, comma-separated")->required()->delimiter(',');
    simulate->add_option("--attributes", attributes_path, "Attribute CSV (default: x_i = e_i, ids a1..ak)")
        ->check(CLI::ExistingFile);
    simulate->add_option("--n", n, "Number of trials")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "RNG seed (derived and printed when absent)");
    simulate->add_option("--rounds", rounds, "1: conditional logit, 2: two-round Pareto choice")
        ->check(CLI::IsMember({1, 2}));
    simulate->add_option("--out", out_path, "Write JSON here");

    // effects
    auto* effects = app.add_subcommand("effects", "Deferral curves and comparisons");
    effects->require_subcommand(1);
    auto* similarity = effects->add_subcommand("similarity", "Deferral against the utility gap (CSV)");
    double u_base = 1.0;
    double lambda = 1.0;
    std::vector<double> grid;
    similarity->add_option("--u-base", u_base, "Utility of the weaker alternative")->check(CLI::PositiveNumber);
    similarity->add_option("--lambda", lambda, "Conflict sensitivity")->check(CLI::PositiveNumber);
    similarity->add_option("--gaps", grid, "Utility gaps, ascending")->required()->delimiter(',');
    auto* roller = effects->add_subcommand("roller-coaster", "Deferral after adding one alternative (CSV)");
    std::string roller_model = "quadratic";
    std::vector<double> base;
    roller->add_option("--model", roller_model, "quadratic (values are v) or reciprocal (values are u)")
        ->check(CLI::IsMember({"quadratic", "reciprocal"}));
    roller->add_option("--base", base, "Base menu values")->required()->delimiter(',');
    roller->add_option("--added", grid, "Values of the added alternative")->required()->delimiter(',');
    roller->add_option("--lambda", lambda, "Conflict sensitivity (reciprocal)")->check(CLI::PositiveNumber);
    auto* attract = effects->add_subcommand("attractiveness", "Compare deferral at two binary menus (JSON)");
    std::vector<double> ab;
    std::vector<double> cd;
    attract->add_option("--ab", ab, "u(a),u(b)")->required()->delimiter(',')->expected(2);
    attract->add_option("--cd", cd, "u(c),u(d)")->required()->delimiter(',')->expected(2);
    attract->add_option("--lambda", lambda, "Conflict sensitivity")->check(CLI::PositiveNumber);

    // equilibrium
    auto* equilibrium = app.add_subcommand("equilibrium", "Symmetric duopoly price-quality equilibrium");
    double income = 1.0;
    int s = 1;
    bool conflict = false;
    equilibrium->add_option("--income", income, "Consumer income I")->check(CLI::PositiveNumber);
    auto* s_opt = equilibrium->add_option("--s", s, "Demand exponent")->check(CLI::IsMember({1, 2}));
    equilibrium->add_flag("--conflict", conflict, "Decision conflict (quadratic-logit demand, s = 2)")
        ->excludes(s_opt);
    equilibrium->add_option("--out", out_path, "Write JSON here and print a table");

    if (const auto code = run(app, args, out, err)) {
        return *code;
    }

    try {
        const Tolerance tol = resolve_tolerance(tol_flag);

        if (eval->parsed()) {
            const auto model = io::load_model(model_path);
            const auto& universe = universe_of(model);
            if (!menu_text.empty()) {
                const auto dist = evaluate(model, parse_menu(universe, menu_text));
                emit(out, io::to_json(dist, universe), out_path);
            } else {
                ChoiceDataset data(universe);
                for (const auto& menu : evaluable_menus(model)) {
                    data.set(evaluate(model, menu));
                }
                emit(out, io::to_json(data), out_path);
            }
        } else if (recover->parsed()) {
            const auto data = io::load_dataset(data_path).dataset();
            Anchor anchor = Anchor::canonical(data.universe());
            if (!anchor_id.empty()) {
                anchor.z = data.universe().index_of(anchor_id);
            }
            anchor.alpha = alpha;
            try {
                if (recover_model == "dcl") {
                    emit(out, io::to_json(ModelSpec{recover_dcl(data, anchor, tol)}), out_path);
                } else {
                    emit(out, io::to_json(ModelSpec{recover_reciprocal(data, anchor, tol)}), out_path);
                }
            } catch (const NotRepresentableError& e) {
                err << io::dump(Json{{"reports", reports_json(e.reports())}});
                throw;
            }
        } else if (axioms->parsed()) {
            const auto data = io::load_dataset(data_path).dataset();
            std::vector<Axiom> wanted;
            std::vector<std::string> skipped;
            if (axiom_names.empty()) {
                for (auto a : {Axiom::A1, Axiom::A2, Axiom::A3, Axiom::A4, Axiom::A5, Axiom::A5Equality, Axiom::A6,
                               Axiom::A7, Axiom::A8, Axiom::A9}) {
                    if (domain_available(data, axiom_needs(a))) {
                        wanted.push_back(a);
                    } else {
                        skipped.emplace_back(axiom_name(a));
                    }
                }
            } else {
                for (const auto& name : axiom_names) {
                    wanted.push_back(parse_axiom(name));
                }
            }
            std::vector<AxiomReport> reports;
            for (auto a : wanted) {
                reports.push_back(check_axiom(data, a, tol));
            }
            Json doc{{"reports", reports_json(reports)}, {"skipped", skipped}};
            if (data.is_full_domain()) {
                Json classes = Json::array();
                for (auto c : classify(data, tol)) {
                    classes.push_back(std::string(model_class_name(c)));
                }
                doc["classes"] = classes;
            }
            const auto table = axiom_table(reports);
            emit(out, doc, out_path, &table);
        } else if (solve_dual->parsed()) {
            const auto data = io::load_dataset(data_path).dataset();
            const auto solution = solve_dual_binary(data, tol);
            Json sols = Json::array();
            for (const auto& p : solution.solutions) {
                sols.push_back(io::to_json(ModelSpec{p}));
            }
            emit(out, Json{{"solutions", sols}, {"discriminant", solution.discriminant}}, out_path);
        } else if (solve_quad->parsed()) {
            const auto data = io::load_dataset(data_path).dataset();
            emit(out, io::to_json(ModelSpec{solve_quadratic(data, tol)}), out_path);
        } else if (fit->parsed()) {
            const auto file = io::load_dataset(data_path);
            const auto& counts = file.count_table();
            Json doc;
            if (fit_model == "quadratic") {
                const auto r = fit_quadratic_mle(counts);
                doc = Json{{"model", "quadratic"}, {"params", io::to_json(ModelSpec{r.params})},
                           {"log_likelihood", r.log_likelihood}, {"diagnostics", io::to_json(r.diagnostics)}};
            } else if (fit_model == "dual") {
                const auto r = fit_dual_mle(counts);
                doc = Json{{"model", "dual"}, {"params", io::to_json(ModelSpec{r.params})},
                           {"log_likelihood", r.log_likelihood}, {"diagnostics", io::to_json(r.diagnostics)}};
            } else {
                const auto x = attributes_path.empty() ? reference_attributes(counts.universe().size())
                                                       : io::load_attributes(attributes_path).aligned(counts.universe());
                const auto r = fit_beta(counts, x);
                doc = Json{{"model", "beta"}, {"beta", r.beta}, {"log_likelihood", r.log_likelihood},
                           {"diagnostics", io::to_json(r.diagnostics)}};
            }
            emit(out, doc, out_path);
        } else if (simulate->parsed()) {
            std::vector<std::string> ids;
            std::vector<std::vector<double>> x;
            if (attributes_path.empty()) {
                ids = default_ids(beta.size());
                x = identity_attributes(beta.size());
            } else {
                const auto table = io::load_attributes(attributes_path);
                ids = table.ids;
                x = table.x;
            }
            const LinearUtilitySpec spec(ChoiceUniverse(ids), beta, x);
            if (!seed) {
                seed = derive_seed();
                err << "seed: " << *seed << '\n';
            }
            const auto result = rounds == 1 ? simulate_conditional_logit(spec, n, *seed)
                                            : simulate_quadratic_discrete(spec, n, *seed);
            emit(out, io::to_json(result), out_path);
        } else if (effects->parsed()) {
            std::vector<CurvePoint> points;
            if (similarity->parsed()) {
                points = similarity_deferral_curve(u_base, grid, lambda);
            } else if (roller->parsed()) {
                const ChoiceUniverse universe(default_ids(base.size()));
                const auto curve = roller_model == "quadratic"
                                       ? roller_coaster_curve(QuadraticParams(universe, base), grid)
                                       : roller_coaster_curve(ReciprocalParams(universe, base, lambda, true), grid);
                for (const auto& p : curve) {
                    points.push_back({p.added, p.rho_o});
                }
            } else {
                const auto r = attractiveness_comparison({ab[0], ab[1]}, {cd[0], cd[1]}, lambda);
                out << io::dump(Json{{"rho_ab", r.rho_ab},
                                     {"rho_cd", r.rho_cd},
                                     {"order", r.order},
                                     {"squared_gap_order", r.squared_gap_order},
                                     {"effect", std::string(attractiveness_effect_name(r.effect))}});
                return kExitOk;
            }
            io::write_curve_csv(out, points);
        } else if (equilibrium->parsed()) {
            const MarketConfig cfg{income, conflict ? 2 : s};
            const auto r = solve_equilibrium(cfg);
            Table table{{"firm", "q", "p", "profit"}, {}};
            for (std::size_t i = 0; i < 2; ++i) {
                table.rows.push_back({std::to_string(i + 1), num(r.strategies[i].q), num(r.strategies[i].p),
                                      num(r.profits[i])});
            }
            table.rows.push_back({"W", num(r.effectiveness), "", ""});
            table.rows.push_back({"deferral", num(r.deferral), "", ""});
            emit(out, io::to_json(r, cfg), out_path, &table);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace dclogit
