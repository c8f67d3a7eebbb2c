#include "levyou/config.hpp"
#include "levyou/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>

using namespace levyou;

namespace {

std::vector<std::string> keys_of(std::string_view text) {
    try {
        parse_scenario_json(text);
    } catch (const ConfigError& e) {
        std::vector<std::string> out;
        for (const auto& [key, msg] : e.issues()) {
            out.push_back(key);
        }
        return out;
    }
    return {};
}

bool has_key(const std::vector<std::string>& keys, const std::string& k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

}  // namespace

TEST_CASE("shipped configs parse") {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(LEVYOU_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        INFO(entry.path().string());
        CHECK_NOTHROW(load_scenario(entry.path().string()));
        ++count;
    }
    CHECK(count >= 8);
}

TEST_CASE("a full config round-trips into the scenario") {
    const Scenario sc = parse_scenario_json(R"J({
        "dimension": 2,
        "A": [["-1", 0.5], ["0", "-(2+sin(t))"]],
        "B": [["1", "0"], ["0", "2"]],
        "f": ["cos(t)", 1],
        "noise": {"type": "compound_poisson", "b": [0.1, 0], "R": [[1, 0], [0, 0]],
                  "atoms": [[2, 0.5, -1], [1, 0, 1]]},
        "numerics": {"ode_step": 0.002, "quad_step": 0.004, "tail_tol": 1e-8,
                     "identity_tol": 1e-5, "decay_window": 10, "decay_samples": 21},
        "seed": 99,
        "name": "n", "description": "d"
    })J");
    CHECK(sc.dim() == 2);
    CHECK(sc.A()(1.0)(0, 1) == 0.5);
    CHECK(sc.A()(0.0)(1, 1) == -2.0);
    CHECK(sc.f()(0.0)(0) == 1.0);
    CHECK(sc.noise().is_compound_poisson());
    CHECK(sc.noise().poisson_params().atoms.size() == 2);
    CHECK(sc.noise().poisson_params().atoms[0].rate == 2.0);
    CHECK(sc.noise().drift()(0) == 0.1);
    CHECK(sc.numerics().ode_step == 0.002);
    CHECK(sc.numerics().quad_step == 0.004);
    CHECK(sc.numerics().tail_tol == 1e-8);
    CHECK(sc.numerics().identity_tol == 1e-5);
    CHECK(sc.numerics().decay_window == 10.0);
    CHECK(sc.numerics().decay_samples == 21);
    CHECK(sc.seed() == 99);
}

TEST_CASE("defaults") {
    const Scenario sc = parse_scenario_json(R"J({
        "dimension": 1, "A": [["-1"]], "noise": {"type": "stable", "alpha": 1.5, "sigma": 2}
    })J");
    CHECK(sc.B()(3.0)(0, 0) == 1.0);
    CHECK(sc.f().is_zero());
    CHECK(sc.numerics().tail_tol == 1e-9);
    CHECK(sc.seed() == 0);
    CHECK(sc.noise().stable_params().alpha == 1.5);
    const Scenario g = parse_scenario_json(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian"}})J");
    CHECK(g.noise().covariance()(0, 0) == 0.0);
}

TEST_CASE("errors name the offending key") {
    CHECK(has_key(keys_of("{ not json"), "<document>"));
    CHECK(has_key(keys_of("[1, 2]"), "<document>"));
    CHECK(has_key(keys_of(R"J({"A": [["-1"]], "noise": {"type": "gaussian"}})J"), "dimension"));
    CHECK(has_key(keys_of(R"J({"dimension": 0, "A": [["-1"]]})J"), "dimension"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "noise": {"type": "gaussian"}})J"), "A"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]]})J"), "noise"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["sin("]], "noise": {"type": "gaussian"}})J"),
                  "A[0][0]"));
    CHECK(has_key(keys_of(R"J({"dimension": 2, "A": [["-1", "0"], ["0"]], "noise": {"type": "gaussian"}})J"),
                  "A"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "f": ["x"], "noise": {"type": "gaussian"}})J"),
                  "f[0]"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "levy"}})J"),
                  "noise.type"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "stable"}})J"),
                  "noise.alpha"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "stable", "alpha": 3, "sigma": 1}})J"),
                  "noise"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "compound_poisson", "atoms": [[1]]}})J"),
                  "noise.atoms[0]"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian", "alpha": 1}})J"),
                  "noise.alpha"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian"}, "numerics": {"tail_tol": 0.5}})J"),
                  "numerics"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian"}, "numerics": {"step": 1}})J"),
                  "numerics.step"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian"}, "seed": -3})J"),
                  "seed"));
    CHECK(has_key(keys_of(R"J({"dimension": 1, "A": [["-1"]], "noise": {"type": "gaussian"}, "extra": 1})J"),
                  "extra"));
    CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("every issue is reported at once") {
    const auto keys = keys_of(R"J({
        "dimension": 1, "A": [["("]], "f": [true], "noise": {"type": "nope"}, "bogus": 0
    })J");
    CHECK(has_key(keys, "A[0][0]"));
    CHECK(has_key(keys, "f[0]"));
    CHECK(has_key(keys, "noise.type"));
    CHECK(has_key(keys, "bogus"));
    try {
        parse_scenario_json(R"J({"dimension": 1, "A": [["("]], "noise": {"type": "gaussian"}})J");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("A[0][0]") != std::string::npos);
    }
}
