#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dclogit/io.hpp"
#include "support.hpp"

using namespace dclogit;
using testing::letters;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("DCLOGIT_TEST_TMP");
    const fs::path dir = fs::path(env ? env : fs::temp_directory_path().string()) / "io_scratch";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

io::Json two_alternative_doc(double pa, double pb, double po) {
    return io::Json::parse(R"({
      "schema_version": 1,
      "universe": ["a", "b"],
      "records": [
        {"menu": ["a"], "kind": "prob", "values": {"a": 1.0}, "deferral": 0.0},
        {"menu": ["b"], "kind": "prob", "values": {"b": 1.0}, "deferral": 0.0},
        {"menu": ["b", "a"], "kind": "prob", "values": {"a": )" +
                           std::to_string(pa) + R"(, "b": )" + std::to_string(pb) + R"(}, "deferral": )" +
                           std::to_string(po) + "}]}");
}

template <class F>
std::string validation_message(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("dataset files") {
    const auto file = io::parse_dataset(two_alternative_doc(0.5, 0.25, 0.25));
    REQUIRE(file.probabilities);
    CHECK(file.dataset().table().size() == 3);
    CHECK(file.dataset().is_full_domain());
    CHECK(file.dataset().at(Menu::pair(0, 1)).mass(1) == 0.25);
    CHECK_THROWS_AS((void)file.count_table(), ValidationError);

    const auto msg = validation_message([] { (void)io::parse_dataset(two_alternative_doc(0.5, 0.2, 0.1)); });
    CHECK(msg.find("record 2") != std::string::npos);

    // Rounding from other tools is tolerated at 1e-6.
    CHECK_NOTHROW((void)io::parse_dataset(two_alternative_doc(0.5, 0.25, 0.2500005)));

    auto partial = two_alternative_doc(0.5, 0.25, 0.25);
    partial["records"].erase(2);
    CHECK_THROWS_AS(io::parse_dataset(partial).dataset().require_full_domain(), IncompleteDataError);
}

TEST_CASE("dataset validation errors") {
    auto doc = two_alternative_doc(0.5, 0.25, 0.25);
    doc["schema_version"] = 2;
    CHECK_THROWS_AS((void)io::parse_dataset(doc), ValidationError);

    doc = two_alternative_doc(0.5, 0.25, 0.25);
    doc["records"][2]["menu"] = {"a", "z"};
    CHECK_THROWS_AS((void)io::parse_dataset(doc), DomainError);

    doc = two_alternative_doc(0.5, 0.25, 0.25);
    doc["records"].push_back(doc["records"][0]);
    CHECK(validation_message([&] { (void)io::parse_dataset(doc); }).find("duplicate") != std::string::npos);

    doc = two_alternative_doc(0.5, 0.25, 0.25);
    doc["records"][0]["kind"] = "count";
    doc["records"][0]["values"]["a"] = 3;
    doc["records"][0]["deferral"] = 0;
    CHECK(validation_message([&] { (void)io::parse_dataset(doc); }).find("mixes") != std::string::npos);

    doc = two_alternative_doc(0.5, 0.25, 0.25);
    doc["records"][2]["values"].erase("b");
    CHECK_THROWS_AS((void)io::parse_dataset(doc), ValidationError);

    const auto path = scratch("broken.json");
    std::ofstream(path) << "{\"schema_version\": 1,\n  \"universe\": [\"a\", \"b\"\n";
    const auto parse_msg = validation_message([&] { (void)io::load_dataset(path); });
    CHECK(parse_msg.find("broken.json") != std::string::npos);
    CHECK(parse_msg.find("line") != std::string::npos);
    CHECK_THROWS_AS((void)io::load_dataset(scratch("does-not-exist.json")), ValidationError);
}

TEST_CASE("count files") {
    const auto doc = io::Json::parse(R"({
      "schema_version": 1, "universe": ["x", "y"],
      "records": [{"menu": ["x", "y"], "kind": "count", "values": {"x": 30, "y": 10}, "deferral": 60}]})");
    const auto file = io::parse_dataset(doc);
    REQUIRE(file.counts);
    CHECK(file.count_table().at(Menu::pair(0, 1)).total() == 100);
    CHECK(file.dataset().at(Menu::pair(0, 1)).mass(0) == doctest::Approx(0.3));

    auto bad = doc;
    bad["records"][0]["values"]["x"] = -1;
    CHECK_THROWS_AS((void)io::parse_dataset(bad), ValidationError);
    bad["records"][0]["values"]["x"] = 1.5;
    CHECK_THROWS_AS((void)io::parse_dataset(bad), ValidationError);
}

TEST_CASE("save and load are byte-identical for canonical files") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 4);
        const auto data = generate_dataset(testing::random_dcl(rng, k));
        const auto first = scratch("round_a.json");
        const auto second = scratch("round_b.json");
        io::save_json(first, io::to_json(data));
        const auto loaded = io::load_dataset(first);
        io::save_json(second, io::to_json(loaded));
        CHECK(slurp(first) == slurp(second));
        // Doubles survive exactly.
        const auto reread = loaded.dataset();
        for (const auto& [menu, dist] : data.table()) {
            const auto& back = reread.at(menu);
            for (std::size_t i = 0; i < dist.masses().size(); ++i) {
                CHECK(back.masses()[i] == dist.masses()[i]);
            }
            CHECK(back.deferral() == dist.deferral());
        }
    }

    CountTable counts(letters(3));
    counts.set(Menu::full(3), MenuCounts{{5, 6, 7}, 8});
    counts.set(Menu::pair(0, 2), MenuCounts{{1, 2}, 3});
    const auto text = io::dump(io::to_json(counts));
    CHECK(io::dump(io::to_json(io::parse_dataset(io::Json::parse(text)))) == text);
    // Canonical order: smaller menus first.
    CHECK(text.find("\"c\"\n") < text.rfind("\"b\""));
}

TEST_CASE("model files round-trip") {
    const std::vector<ModelSpec> models{
        DclParams(letters(2), {2.0, 1.0}, {{Menu::pair(0, 1), 1.0}}),
        DualParams(letters(3), {1, 2, 3}, {3, 2, 1}),
        QuadraticParams(letters(2), {1.0, 0.1}),
        ReciprocalParams(letters(3), {3, 2, 1}, 0.5, true),
    };
    for (const auto& m : models) {
        const auto text = io::dump(io::to_json(m));
        const auto back = io::parse_model(io::Json::parse(text));
        CHECK(back.index() == m.index());
        CHECK(io::dump(io::to_json(back)) == text);
        for (const auto& menu : all_menus(universe_of(m).size())) {
            CHECK(evaluate(back, menu).deferral() == evaluate(m, menu).deferral());
        }
    }

    const auto diff = io::parse_model(io::Json::parse(R"({
      "model": "difference", "universe": ["a", "b", "c"], "u": {"a": 2, "b": 1, "c": 0.5},
      "f": {"kind": "reciprocal", "lambda": 1}, "additive": true})"));
    REQUIRE(std::holds_alternative<DclParams>(diff));
    CHECK(std::get<DclParams>(diff).complexity(Menu::full(3)) == doctest::Approx(11.0 / 3));

    CHECK_THROWS_AS((void)io::parse_model(io::Json::parse(R"({"model": "probit", "universe": ["a", "b"]})")),
                    ValidationError);
    CHECK_THROWS_AS((void)io::parse_model(io::Json::parse(
                        R"({"model": "quadratic", "universe": ["a", "b"], "v": {"a": 1}})")),
                    ValidationError);
    CHECK_THROWS_AS((void)io::parse_model(io::Json::parse(
                        R"({"model": "quadratic", "universe": ["a", "b"], "v": {"a": 1, "b": -2}})")),
                    ValidationError);
}

TEST_CASE("report serialization") {
    ChoiceDataset bad(letters(2));
    bad.set(testing::sure_thing(0));
    bad.set(testing::sure_thing(1));
    bad.set(testing::binary(0, 1, 0.4, 0.4));
    const auto j = io::to_json(check_constrained_odds_symmetry(bad, OddsSymmetryMode::Inequality));
    CHECK(j["axiom"] == "A5");
    CHECK(j["passed"] == false);
    CHECK(j["tolerance"]["rel"] == 1e-6);
    CHECK(j["violations"][0]["witness"][0] == "{a,b}");
    CHECK(j["violations"][0]["lhs"].get<double>() == doctest::Approx(0.04));

    const auto eq = io::to_json(solve_equilibrium({1.0, 2}), {1.0, 2});
    CHECK(eq["q"].get<double>() == doctest::Approx(0.5));
    CHECK(eq["p"] == 1.0);
    CHECK(eq["profit"].get<double>() == doctest::Approx(0.125));
}

TEST_CASE("attribute CSV and curve CSV") {
    std::istringstream in("id,x1,x2\nb,0.5,1\na,1,0\n");
    const auto t = io::parse_attributes(in);
    CHECK(t.ids == std::vector<std::string>{"b", "a"});
    const auto x = t.aligned(letters(2));
    CHECK(x[0] == std::vector<double>{1.0, 0.0});
    CHECK(x[1] == std::vector<double>{0.5, 1.0});
    CHECK_THROWS_AS((void)t.aligned(letters(3)), DomainError);

    std::istringstream ragged("id,x1,x2\na,1\n");
    CHECK_THROWS_AS((void)io::parse_attributes(ragged), ValidationError);
    std::istringstream header("name,x1\na,1\n");
    CHECK_THROWS_AS((void)io::parse_attributes(header), ValidationError);
    std::istringstream junk("id,x1\na,one\n");
    CHECK_THROWS_AS((void)io::parse_attributes(junk), ValidationError);

    std::ostringstream out;
    io::write_curve_csv(out, {{1.0, 0.25}, {0.5, 1.0 / 3}});
    CHECK(out.str() == "x,rho_o\n1,0.25\n0.5,0.3333333333333333\n");
}

TEST_CASE("shortest float formatting round-trips") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(2.0) == "2");
}
