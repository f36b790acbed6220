#include "drmdp/error.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/problem_io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace drmdp;
using nlohmann::json;

namespace {

ParseError parse_error_of(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a ParseError");
    return ParseError(ParseErrc::syntax, "", "");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("shipped coin-toss file") {
    const auto p = load_problem(std::filesystem::path(DRMDP_DATA_DIR) / "cointoss.json");
    CHECK(p == coin_toss_problem(0.45, {1, 0.1}));
}

TEST_CASE("parse errors name the field") {
    auto doc = problem_to_json(coin_toss_problem(0.45, {1, 0.1}));

    SUBCASE("distribution sum") {
        auto bad = doc;
        bad["center"][0][1][5] = bad["center"][0][1][5].get<double>() - 0.1;
        const auto e = parse_error_of(bad.dump());
        CHECK(e.kind() == ParseErrc::distribution_sum);
        CHECK(e.field() == "/center/0/1");
    }
    SUBCASE("missing alpha") {
        auto bad = doc;
        bad.erase("alpha");
        const auto e = parse_error_of(bad.dump());
        CHECK(e.kind() == ParseErrc::missing_field);
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    SUBCASE("wrong type") {
        auto bad = doc;
        bad["alpha"] = "0.45";
        CHECK(parse_error_of(bad.dump()).kind() == ParseErrc::type_mismatch);
    }
    SUBCASE("wrong shape") {
        auto bad = doc;
        bad["reward"][3].erase(1);
        const auto e = parse_error_of(bad.dump());
        CHECK(e.kind() == ParseErrc::shape);
        CHECK(e.field() == "/reward/3");
    }
    SUBCASE("syntax") {
        const auto e = parse_error_of("{\n  \"alpha\": 0.45,\n  oops\n}");
        CHECK(e.kind() == ParseErrc::syntax);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    SUBCASE("invalid discount") {
        auto bad = doc;
        bad["alpha"] = 1.0;
        try {
            parse_problem(bad.dump());
            FAIL("expected an Error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::invalid_discount);
        }
    }
    SUBCASE("missing kernel entry") {
        auto bad = doc;
        bad["center"][2][0] = nullptr;
        try {
            parse_problem(bad.dump());
            FAIL("expected an Error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::missing_kernel_entry);
        }
    }
    SUBCASE("unreadable file") {
        try {
            load_problem("/nonexistent/problem.json");
            FAIL("expected a ParseError");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseErrc::io);
        }
    }
}

TEST_CASE("round trip through JSON") {
    testing::rng_t rng(6);
    for (int t = 0; t < 20; ++t) {
        const auto p = testing::random_problem(rng, {.with_true_kernel = t % 2 == 0});
        CHECK(parse_problem(problem_to_json(p).dump()) == p);
    }
    const auto path = std::filesystem::temp_directory_path() / "drmdp_roundtrip.json";
    const auto p = coin_toss_problem(0.3, {2, 0.7});
    write_problem(p, path);
    CHECK(load_problem(path) == p);
    std::filesystem::remove(path);
}

} // TEST_SUITE

TEST_SUITE("experiment") {

TEST_CASE("decimal formatting") {
    CHECK(format_decimal(0.0) == "0");
    CHECK(format_decimal(1.0) == "1.00000000000");
    CHECK(format_decimal(0.05) == "0.0500000000000");
    CHECK(format_decimal(-2.5) == "-2.50000000000");
    CHECK(format_decimal(0.263636363636363) == "0.263636363636");
    CHECK(format_decimal(123456.789) == "123456.789000");
    CHECK(format_decimal(1e-13) == "0.000000000000100000000000");
    CHECK(format_decimal(9.9999999999996) == "10.0000000000");
    CHECK(format_decimal(1.0, 3) == "1.00");
}

TEST_CASE("CSV layout") {
    std::ostringstream empty;
    write_csv({}, empty);
    CHECK(empty.str() == "epsilon,x0,v_true,v_robust,diff,bound,ratio\n");

    ExperimentRow r{0.1, 3, 1.5, 1.25, 0.25, 0.5, 0.5};
    std::ostringstream one;
    write_csv({r}, one);
    CHECK(one.str() ==
          "epsilon,x0,v_true,v_robust,diff,bound,ratio\n"
          "0.100000000000,3,1.50000000000,1.25000000000,0.250000000000,0.500000000000,0.500000000000\n");

    const auto path = std::filesystem::temp_directory_path() / "drmdp_empty.csv";
    emit_csv({}, path);
    CHECK(slurp(path) == "epsilon,x0,v_true,v_robust,diff,bound,ratio\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit_csv({}, "/nonexistent/dir/out.csv"), Error);
}

TEST_CASE("coin-toss experiment rows") {
    const auto rows = run_cointoss_experiment({});
    REQUIRE(rows.size() == 11 * 6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].x0 == i % 6);
        CHECK(rows[i].epsilon == doctest::Approx(0.05 * static_cast<double>(i / 6)));
        CHECK(rows[i].diff >= -2e-9);
        CHECK(rows[i].diff <= rows[i].bound + 2e-9);
        CHECK(rows[i].bound == doctest::Approx(rows[i].epsilon * 1.45 / 0.55));
    }
    CHECK(rows[0].ratio == 0.0);

    CoinTossOptions all;
    all.all_states = true;
    all.epsilons = {0.2, 0.1};
    const auto full = run_cointoss_experiment(all);
    REQUIRE(full.size() == 22);
    CHECK(full.front().epsilon == 0.1);

    std::ostringstream a, b;
    write_csv(run_cointoss_experiment({}), a);
    write_csv(rows, b);
    CHECK(a.str() == b.str());

    CoinTossOptions bad;
    bad.epsilons = {-0.1};
    CHECK_THROWS_AS(run_cointoss_experiment(bad), Error);
}

} // TEST_SUITE
