#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = levyou::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) {
    return std::string(LEVYOU_CONFIG_DIR) + "/" + name + ".json";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "levyou_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = scratch(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

}  // namespace

TEST_CASE("cf subcommand") {
    const Result r = run({"cf", "--config", config("gaussian_const"), "--a-grid", "0:1:1"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "re", "im"});
    CHECK(rows[1] == std::vector<std::string>{"0", "1", "0"});
    CHECK(rows[2][0] == "1");
    CHECK(std::fabs(std::stod(rows[2][1]) - std::exp(-(1.0 - std::exp(-2.0)) / 4.0)) < 1e-9);
    CHECK(rows[2][1].rfind("0.80560", 0) == 0);
    CHECK(rows[2][2] == "0");
}

TEST_CASE("config errors exit with code 2 and name the key") {
    const fs::path bad_json = write_temp("bad.json", "{ \"dimension\": 1, ");
    Result r = run({"cf", "--config", bad_json.string(), "--a-grid", "0:1:1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("<document>") != std::string::npos);

    const fs::path bad_key = write_temp(
        "bad_key.json",
        R"({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian", "R": [[-1]]}, "sede": 1})");
    r = run({"cf", "--config", bad_key.string(), "--a-grid", "0:1:1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("sede") != std::string::npos);

    const fs::path bad_expr =
        write_temp("bad_expr.json", R"({"dimension": 1, "A": [["-1+"]], "noise": {"type": "gaussian"}})");
    r = run({"cf", "--config", bad_expr.string(), "--a-grid", "0:1:1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("A[0][0]") != std::string::npos);

    r = run({"cf", "--config", "/nonexistent.json", "--a-grid", "0:1:1"});
    CHECK(r.code == 2);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"cf", "--a-grid", "0:1:1"}).code == 2);
    CHECK(run({"cf", "--config", config("gaussian_const")}).code == 2);
    CHECK(run({"cf", "--config", config("gaussian_const"), "--a-grid", "1:0"}).code == 2);
    CHECK(run({"cf", "--config", config("gaussian_const"), "--a-grid", "0:1:1", "--x", "1,2"})
              .code == 2);
    CHECK(run({"cf", "--config", config("gaussian_const"), "--a-grid", "0:1:1", "--s", "2"})
              .code == 2);
    CHECK(run({"simulate", "--config", config("gaussian_const"), "--scheme", "milstein"}).code ==
          2);
    CHECK(run({"cf", "--config", config("gaussian_const"), "--a-grid", "0:1:1", "--out",
               "/nonexistent/dir/out.csv"})
              .code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("family subcommand") {
    SUBCASE("Cauchy density at the origin") {
        const Result r = run({"family", "--config", config("cauchy_const"), "--t-grid", "0:4:2",
                              "--y-grid", "0:0:1"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0] == std::vector<std::string>{"t", "y", "density"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::fabs(std::stod(rows[i][2]) - 0.3183099) < 1e-4);
        }
    }
    SUBCASE("Gaussian variance column") {
        const Result r = run({"family", "--config", config("gaussian_const"), "--t-grid", "-2:2:1"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 6);
        CHECK(rows[0] == std::vector<std::string>{"t", "b_1", "R_11"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::fabs(std::stod(rows[i][2]) - 0.5) < 1e-8);
        }
    }
    SUBCASE("characteristic function of nu_t") {
        const Result r =
            run({"family", "--config", config("cauchy_const"), "--t", "1", "--a-grid", "-1:1:1"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 4);
        CHECK(std::fabs(std::stod(rows[1][2]) - std::exp(-1.0)) < 1e-8);
    }
    SUBCASE("Gaussian density through FFT inversion") {
        const Result r =
            run({"family", "--config", config("gaussian_const"), "--y-grid", "-1:1:0.5"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 6);
        const double y = std::stod(rows[3][1]);
        CHECK(y == 0.0);
        CHECK(std::fabs(std::stod(rows[3][2]) - 1.0 / std::sqrt(3.14159265358979323846)) < 1e-6);
    }
    SUBCASE("no decay") {
        const Result r = run({"family", "--config", config("unstable")});
        CHECK(r.code == 3);
        CHECK(r.err.find("stability") != std::string::npos);
    }
}

TEST_CASE("verify subcommand") {
    SUBCASE("Gaussian") {
        const Result r = run({"verify", "--config", config("gaussian_const"), "--runs", "2000"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["max_cf_error"].get<double>() < 1e-6);
        CHECK(std::fabs(j["cond_i"].get<double>() - 0.5) < 1e-6);
        CHECK(j["cond_ii"].get<double>() == 0.0);
        CHECK(j["decay"]["valid"].get<bool>());
        CHECK(j["ks_distance"].get<double>() < 0.1);
    }
    SUBCASE("Cauchy") {
        const Result r = run({"verify", "--config", config("cauchy_const"), "--pairs",
                              "0:1,-2:0.5", "--runs", "2000"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["pairs"].size() == 2);
        CHECK(j["max_cf_error"].get<double>() < 1e-6);
    }
    SUBCASE("compound Poisson") {
        const Result r = run({"verify", "--config", config("compound_poisson")});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(std::fabs(j["cond_ii"].get<double>() - 0.125) < 1e-6);
        CHECK(j["cond_ii_holds"].get<bool>());
        CHECK(j["ks_distance"].is_null());
    }
    SUBCASE("no decay") {
        CHECK(run({"verify", "--config", config("unstable")}).code == 3);
    }
}

TEST_CASE("simulate subcommand") {
    SUBCASE("zero noise gives the transported state") {
        const Result r = run({"simulate", "--config", config("deterministic"), "--runs", "1",
                              "--x", "1", "--s", "0", "--t", "1"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == std::vector<std::string>{"x_1"});
        // dX = (-X + 2) dt from x = 1
        CHECK(std::fabs(std::stod(rows[1][0]) - (2.0 - std::exp(-1.0))) < 1e-9);
        CHECK(r.err.find("\"runs\"") != std::string::npos);
    }
    SUBCASE("reruns are byte-identical") {
        const fs::path a = scratch("sim_a.csv"), b = scratch("sim_b.csv");
        const std::vector<std::string> base = {"simulate", "--config", config("compound_poisson"),
                                               "--runs", "300", "--steps", "100", "--a-grid",
                                               "-1:1:1"};
        auto with_out = [&](const fs::path& p) {
            auto args = base;
            args.push_back("--out");
            args.push_back(p.string());
            return args;
        };
        REQUIRE(run(with_out(a)).code == 0);
        REQUIRE(run(with_out(b)).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(slurp(a.string() + ".summary.json") == slurp(b.string() + ".summary.json"));
        auto reseeded = with_out(b);
        reseeded.push_back("--seed");
        reseeded.push_back("5");
        REQUIRE(run(reseeded).code == 0);
        CHECK(slurp(a) != slurp(b));
    }
    SUBCASE("Brownian summary variance") {
        const fs::path summary = scratch("brownian_summary.json");
        const Result r = run({"simulate", "--config", config("gaussian_const"), "--runs", "100000",
                              "--steps", "200", "--out", scratch("brownian.csv").string(),
                              "--summary", summary.string()});
        REQUIRE(r.code == 0);
        const json j = json::parse(slurp(summary));
        CHECK(std::fabs(j["covariance"][0][0].get<double>() - 0.43233) < 0.01);
        CHECK(j["runs"].get<int>() == 100000);
    }
    SUBCASE("Euler path output") {
        const fs::path path = scratch("path.csv");
        const Result r = run({"simulate", "--config", config("gaussian_2d"), "--runs", "2",
                              "--steps", "10", "--scheme", "euler", "--path", path.string(),
                              "--x", "0,0"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(slurp(path));
        CHECK(rows.size() == 12);
        CHECK(rows[0] == std::vector<std::string>{"time", "x_1", "x_2"});
    }
}

TEST_CASE("decay subcommand") {
    Result r = run({"decay", "--config", config("unstable")});
    REQUIRE(r.code == 0);
    CHECK_FALSE(json::parse(r.out)["valid"].get<bool>());
    r = run({"decay", "--config", config("gaussian_periodic"), "--s", "-5", "--t", "5"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["valid"].get<bool>());
    CHECK(j["eps"].get<double>() > 0.9);
    CHECK(j["t_min"].get<double>() == -5.0);
}

TEST_CASE("every shipped config runs") {
    for (const auto& entry : fs::directory_iterator(LEVYOU_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        const std::string cfg = entry.path().string();
        const bool stable = entry.path().stem() != "unstable";
        INFO(cfg);
        CHECK(run({"cf", "--config", cfg, "--a-grid", "-1:1:0.5"}).code == 0);
        CHECK(run({"decay", "--config", cfg}).code == 0);
        CHECK(run({"simulate", "--config", cfg, "--runs", "50", "--steps", "50"}).code == 0);
        const Result v = run({"verify", "--config", cfg, "--runs", "500"});
        CHECK(v.code == (stable ? 0 : 3));
        if (stable) {
            CHECK(json::parse(v.out)["max_cf_error"].get<double>() < 1e-6);
        }
        CHECK(run({"family", "--config", cfg, "--t", "0.5"}).code == (stable ? 0 : 3));
    }
}
