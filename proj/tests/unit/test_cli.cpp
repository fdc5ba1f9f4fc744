#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/cli.hpp"
#include "cli/commands.hpp"
#include "doctest.h"
#include "json.hpp"

using hctree::cli::run_cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("hctree_cli_test_" + name);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve reports every solution") {
    const auto r = run({"solve", "-k", "2", "-l", "5", "--json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["solutions"].size() == 3);
    CHECK(j["solutions"][1]["even_value"].get<double>() == doctest::Approx(0.0763932).epsilon(1e-6));
    CHECK(j["solutions"][1]["odd_value"].get<double>() == doctest::Approx(0.5236068).epsilon(1e-6));

    const auto one = run({"solve", "--order", "2", "--lambda", "3", "--csv"});
    REQUIRE(one.code == 0);
    CHECK(parse_csv(one.out).size() == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"solve", "-k", "0", "-l", "1"}).code == 2);
    CHECK(run({"solve", "-k", "2"}).code == 2);
    CHECK(run({"solve", "-k", "2", "-l", "abc"}).code == 2);
    CHECK(run({"solve", "-k", "2", "-l", "1", "--json", "--csv"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"critical", "-k", "1"}).code == 2);
    CHECK(run({"weak", "-k", "2", "-i", "4", "-l", "3"}).code == 2);
    CHECK(run({"weak", "-k", "2", "-l", "3", "--set", "I1"}).code == 2);
    CHECK(run({"oracle", "-k", "2", "-l", "2", "--mode", "random"}).code == 2);
    CHECK(run({"sweep", "-k", "2", "-q", "D", "-lmin", "1", "-lmax", "2"}).code == 2);
    CHECK(run({"sweep", "-k", "2", "-q", "solutions", "-lmin", "3", "-lmax", "2"}).code == 2);
    CHECK(run({"sweep", "-k", "2", "-q", "solutions", "-lmin", "1", "-lmax", "2", "-n", "1"}).code == 2);
    CHECK(run({"sweep", "-k", "2", "-q", "nonsense", "-lmin", "1", "-lmax", "2"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("classify verdicts") {
    auto verdicts = [](const std::vector<std::string>& args) {
        const auto r = run(args);
        REQUIRE(r.code == 0);
        std::vector<std::string> out;
        const auto j = nlohmann::json::parse(r.out);
        for (const auto& m : j["measures"]) out.push_back(m["verdict"]);
        return out;
    };
    const auto k2 = verdicts({"classify", "-k", "2", "-l", "5", "--json"});
    REQUIRE(k2.size() == 3);
    CHECK(k2[1] == "ProvenExtremal");
    CHECK(k2[2] == "ProvenExtremal");
    const auto k3 = verdicts({"classify", "-k", "3", "-l", "2", "--json"});
    CHECK(k3[1] == "ProvenExtremal");
    const auto big = verdicts({"classify", "-k", "2", "-l", "30", "--json"});
    CHECK(big[0] == "ProvenNonExtremal");
}

TEST_CASE("critical values") {
    auto value = [](const std::string& k, const std::string& key) {
        const auto r = run({"critical", "-k", k, "--json"});
        REQUIRE(r.code == 0);
        return nlohmann::json::parse(r.out)["values"][key].get<double>();
    };
    CHECK(value("2", "lambda_cr") == 4.0);
    CHECK(value("3", "lambda_cr") == doctest::Approx(1.6875).epsilon(1e-15));
    CHECK(value("6", "lambda_minus") == doctest::Approx(5.6953).epsilon(1e-5));
    CHECK(value("6", "lambda_plus") == doctest::Approx(64.0));
    const auto table = run({"critical", "-k", "2"});
    CHECK(table.out.find("lambda_star") != std::string::npos);
    CHECK(table.out.find("lambda_minus") == std::string::npos);
}

TEST_CASE("oracle pass and fail") {
    const auto ti = run({"oracle", "-k", "2", "-l", "2", "-n", "3", "--mode", "ti"});
    CHECK(ti.code == 0);
    CHECK(ti.out.find("PASS") != std::string::npos);
    const auto per = run({"oracle", "-k", "2", "-l", "5", "-n", "3", "--mode", "periodic"});
    CHECK(per.code == 0);
    CHECK(per.out.find("PASS") != std::string::npos);
    const auto bad = run({"oracle", "-k", "2", "-l", "2", "-n", "3", "--mode", "perturbed", "--json"});
    CHECK(bad.code == 0);
    const auto j = nlohmann::json::parse(bad.out);
    CHECK_FALSE(j["pass"].get<bool>());
    CHECK(j["max_deviation"].get<double>() > 1e-4);

    CHECK(run({"oracle", "-k", "3", "-l", "2", "-n", "4"}).code == 1);
    CHECK(run({"oracle", "-k", "2", "-l", "2", "-n", "3", "--mode", "periodic"}).code == 1);
}

TEST_CASE("oracle sampler output is seeded") {
    const std::vector<std::string> args = {"oracle", "-k", "2", "-l", "5", "-n", "3", "--mode", "periodic",
                                           "--samples", "2000", "--seed", "3", "--json"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["sampler"]["hard_core_violations"].get<int>() == 0);
}

TEST_CASE("weak subcommand") {
    const auto r = run({"weak", "-k", "6", "-i", "1", "-l", "10", "--set", "I4", "--json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["solutions"].size() >= 3);
    const auto csv = run({"weak", "-k", "2", "-l", "6", "--set", "2", "--csv"});
    REQUIRE(csv.code == 0);
    CHECK(parse_csv(csv.out).size() == 4);
}

TEST_CASE("sweep: discriminant changes sign at 27/16") {
    const auto r = run({"sweep", "-k", "3", "--quantity", "D", "-lmin", "1", "-lmax", "5", "-n", "100"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 101);
    CHECK(rows[0] == std::vector<std::string>{"lambda", "D"});
    double crossing = 0.0;
    for (std::size_t j = 2; j < rows.size(); ++j) {
        if (std::stod(rows[j - 1][1]) < 0.0 && std::stod(rows[j][1]) >= 0.0) crossing = std::stod(rows[j][0]);
    }
    CHECK(crossing == doctest::Approx(1.6875).epsilon(0.03));
}

TEST_CASE("sweep: g is negative and decreasing") {
    const auto r = run({"sweep", "-k", "3", "--quantity", "g", "-lmin", "1.7", "-lmax", "100"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 101);
    for (std::size_t j = 1; j < rows.size(); ++j) {
        const double g = std::stod(rows[j][1]);
        CHECK(g < 0.0);
        if (j > 1) CHECK(g < std::stod(rows[j - 1][1]));
    }
}

TEST_CASE("sweep: solution count jumps at 4") {
    const auto r = run({"sweep", "-k", "2", "--quantity", "solutions", "-lmin", "1", "-lmax", "8", "-n", "50"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    for (std::size_t j = 1; j < rows.size(); ++j) {
        const double lambda = std::stod(rows[j][0]);
        CHECK(rows[j][1] == (lambda > 4.0 ? "3" : "1"));
    }
}

TEST_CASE("sweep columns and missing values") {
    const auto r = run({"sweep", "-k", "2", "-q", "s2,verdict", "-q", "weakperiodic_count", "-lmin", "1", "-lmax",
                        "8", "-n", "3", "--scale", "log"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"lambda", "s2_ti", "s2_periodic", "verdict_ti", "verdict_periodic",
                                              "weak_solutions", "weak_non_ti"});
    CHECK(rows[1][2] == "nan");
    CHECK(rows[2][0] == "2.82842712474619");
    CHECK(rows[3][2] != "nan");
}

TEST_CASE("sweep output does not depend on the thread count") {
    hctree::cli::SweepSpec spec;
    spec.k = 3;
    spec.lambda_min = 0.5;
    spec.lambda_max = 40.0;
    spec.points = 37;
    spec.quantities = {"solutions", "s2", "ks", "msw", "verdict", "D"};
    CHECK(hctree::cli::sweep_csv(spec, 1) == hctree::cli::sweep_csv(spec, 4));
}

TEST_CASE("sweep writes files") {
    const auto path = temp_file("sweep.csv");
    const auto r = run({"sweep", "-k", "2", "-q", "solutions", "--lmin", "1", "--lmax", "8", "-n", "5", "--out",
                        path.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.rfind("lambda,solutions\n1,1\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    std::filesystem::remove(path);

    CHECK(run({"sweep", "-k", "2", "-q", "solutions", "--lmin", "1", "--lmax", "8", "--out",
               "/nonexistent-dir/x.csv"})
              .code == 1);
}

TEST_CASE("config file with command-line override") {
    const auto path = temp_file("config.toml");
    {
        std::ofstream f(path);
        f << "# defaults\norder = 2\nlambda = 5\njson = true\n[sweep]\nquantity = \"D\"\n";
    }
    const auto from_file = run({"solve", "--config", path.string()});
    REQUIRE(from_file.code == 0);
    CHECK(nlohmann::json::parse(from_file.out)["solutions"].size() == 3);

    const auto overridden = run({"solve", "--config", path.string(), "-l", "3"});
    REQUIRE(overridden.code == 0);
    CHECK(nlohmann::json::parse(overridden.out)["solutions"].size() == 1);

    {
        std::ofstream f(path);
        f << "order = 2\nbogus = 1\n";
    }
    CHECK(run({"solve", "--config", path.string(), "-l", "3"}).code == 2);
    std::filesystem::remove(path);
    CHECK(run({"solve", "-l", "3", "--config", temp_file("missing.toml").string()}).code == 2);
}

}
