#pragma once

// JSON scenario configs.
//
//   {
//     "dimension": 1,
//     "A": [["-(2+sin(t))"]],
//     "B": [["1"]],                       optional, default identity
//     "f": ["0"],                         optional, default zero
//     "noise": {"type": "gaussian", "b": [0], "R": [[1]]},
//     "numerics": {"ode_step": 1e-3, "quad_step": 1e-3, "tail_tol": 1e-9},
//     "seed": 42
//   }
//
// noise.type is "gaussian" (b, R), "compound_poisson" (b, R, atoms as
// [[rate, y_1, ..., y_d], ...]) or "stable" (alpha, sigma). Coefficient
// entries are expression strings or numbers. "name" and "description" are
// accepted and ignored.

#include "levyou/scenario.hpp"

#include <string>
#include <string_view>

namespace levyou {

// Throws ConfigError listing every offending key.
Scenario parse_scenario_json(std::string_view text);
Scenario load_scenario(const std::string& path);

}  // namespace levyou
