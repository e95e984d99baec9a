#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trcexp/channel_io.hpp"
#include "trcexp/cli.hpp"
#include "trcexp/csv.hpp"

using namespace trcexp;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("parse_channel_json defaults and sentinels") {
    SUBCASE("minimal file: uniform P, matched deterministic decoder") {
        auto file = parse_channel_json(R"({"W": [[0.9, 0.1], [0.1, 0.9]]})");
        CHECK(file.model.p == std::vector<double>{0.5, 0.5});
        CHECK(file.decoder.w_tilde == file.model.w);
        CHECK(std::isinf(file.decoder.beta));
        CHECK(file.model.input_alphabet.size() == 2);
        CHECK(file.model.output_alphabet.size() == 2);
    }

    SUBCASE("beta sentinel and numeric beta") {
        auto inf_file =
            parse_channel_json(R"({"W": [[0.9, 0.1], [0.1, 0.9]], "beta": "inf"})");
        CHECK(std::isinf(inf_file.decoder.beta));
        auto one = parse_channel_json(R"({"W": [[0.9, 0.1], [0.1, 0.9]], "beta": 1.0})");
        CHECK(one.decoder.beta == 1.0);
    }

    SUBCASE("negative probability is rejected naming the entry") {
        CHECK_THROWS_WITH_AS(parse_channel_json(R"({"W": [[1.1, -0.1], [0.1, 0.9]]})"),
                             doctest::Contains("W(1|0)"), std::invalid_argument);
    }

    SUBCASE("malformed inputs") {
        CHECK_THROWS_AS(parse_channel_json("{"), std::runtime_error);
        CHECK_THROWS_AS(parse_channel_json(R"({"P": [0.5, 0.5]})"), std::runtime_error);
        CHECK_THROWS_AS(parse_channel_json(R"({"W": [[0.9, 0.1], [0.1]]})"),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_channel_json(R"({"W": [[0.9, 0.1], [0.1, 0.9]], "beta": -1})"),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_channel_file("/nonexistent/file.json"), std::runtime_error);
    }

    SUBCASE("non-stochastic metric warns but does not reject") {
        auto file = parse_channel_json(
            R"({"W": [[0.9, 0.1], [0.1, 0.9]], "W_tilde": [[0.8, 0.1], [0.1, 0.8]]})");
        CHECK(!file.warnings.empty());
    }
}

TEST_CASE("CSV formatting and determinism") {
    SUBCASE("empty rows give a header-only file") {
        write_csv({}, "cli_test_empty.csv");
        CHECK(slurp("cli_test_empty.csv") == csv_header() + "\n");
    }

    SUBCASE("rows round-trip through a reader") {
        CurveRow row;
        row.rate = 0.125;
        row.dual = 0.25;
        row.regime_value = 0.5;
        row.regime_label = "low";
        row.e_r = 1.0 / 3.0;
        row.e_sp = kPosInf;
        row.e_ex = 0.75;
        row.achiever = DualParams{0.5, 0.0, 0.0, 1.0, 2.0};
        std::vector<CurveRow> rows{row};
        write_csv(rows, "cli_test_row.csv");
        const auto text = slurp("cli_test_row.csv");
        std::istringstream in(text);
        std::string header, line;
        std::getline(in, header);
        CHECK(header == csv_header());
        std::getline(in, line);
        std::istringstream fields(line);
        std::string field;
        std::vector<std::string> parsed;
        while (std::getline(fields, field, ',')) parsed.push_back(field);
        CHECK(parsed.size() >= 13);
        CHECK(std::stod(parsed[0]) == 0.125);
        CHECK(std::stod(parsed[1]) == 0.25);
        CHECK(parsed[3] == "low");
        CHECK(parsed[5] == "inf");

        write_csv(rows, "cli_test_row2.csv");
        CHECK(slurp("cli_test_row2.csv") == text);
    }

    SUBCASE("format_g12 is stable") {
        CHECK(format_g12(0.5) == "0.5");
        CHECK(format_g12(kNegInf) == "-inf");
        CHECK(format_g12(1.0 / 3.0) == "0.333333333333");
    }
}

TEST_CASE("run_command dispatch") {
    const std::string bsc_path = write_temp("cli_test_bsc.json", R"({
        "W": [[0.9, 0.1], [0.1, 0.9]]
    })");

    SUBCASE("curve happy path") {
        std::ostringstream out, err;
        const int code = run_command({"curve", "--channel", bsc_path, "--rmin", "0", "--rmax",
                                      "0.3", "--points", "3", "--out", "cli_test_curve.csv"},
                                     out, err);
        CHECK(code == 0);
        const auto text = slurp("cli_test_curve.csv");
        int lines = 0;
        for (char c : text) lines += c == '\n' ? 1 : 0;
        CHECK(lines == 4);  // header + 3 rows
    }

    SUBCASE("dual at zero rate reports the expurgated-level value") {
        std::ostringstream out, err;
        const int code = run_command({"dual", "--channel", bsc_path, "--rate", "0.0", "--json"},
                                     out, err);
        CHECK(code == 0);
        auto j = nlohmann::json::parse(out.str());
        CHECK(j["value"].get<double>() >= 0.25);
        CHECK(j["sigma"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(j["tau"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("primal alphabet cap yields an input error") {
        const std::string big_path = write_temp("cli_test_4x4.json", R"({
            "W": [[0.7, 0.1, 0.1, 0.1], [0.1, 0.7, 0.1, 0.1],
                  [0.1, 0.1, 0.7, 0.1], [0.1, 0.1, 0.1, 0.7]]
        })");
        std::ostringstream out, err;
        const int code = run_command(
            {"primal", "--channel", big_path, "--rate", "0.1", "--grid", "0.05"}, out, err);
        CHECK(code == 1);
        CHECK(err.str().find("alphabet") != std::string::npos);
    }

    SUBCASE("unknown flag prints usage and exits 1") {
        std::ostringstream out, err;
        CHECK(run_command({"curve", "--bogus"}, out, err) == 1);
        CHECK(run_command({"nonsense"}, out, err) == 1);
    }

    SUBCASE("identities subcommand passes") {
        std::ostringstream out, err;
        CHECK(run_command({"identities"}, out, err) == 0);
        CHECK(out.str().find("PASS") != std::string::npos);
        CHECK(out.str().find("FAIL") == std::string::npos);
    }

    SUBCASE("regimes table prints critical rates") {
        std::ostringstream out, err;
        const int code = run_command({"regimes", "--channel", bsc_path, "--points", "5"}, out, err);
        CHECK(code == 0);
        CHECK(out.str().find("R_c1") != std::string::npos);
        CHECK(out.str().find("moderate") != std::string::npos);
    }

    SUBCASE("simulate is seeded and reports the estimate") {
        std::ostringstream out1, out2, err;
        const std::vector<std::string> args{"simulate", "--channel", bsc_path, "--n", "4",
                                            "--rate", "0.1",      "--codes",  "20",  "--seed", "7"};
        CHECK(run_command(args, out1, err) == 0);
        CHECK(run_command(args, out2, err) == 0);
        CHECK(out1.str() == out2.str());
        CHECK(out1.str().find("estimate") != std::string::npos);
    }
}
