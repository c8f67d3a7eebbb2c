#include "levyou/config.hpp"

#include "levyou/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace levyou {

namespace {

using json = nlohmann::json;

class Reader {
public:
    std::vector<ConfigError::Issue> issues;

    void fail(const std::string& key, const std::string& msg) { issues.emplace_back(key, msg); }

    std::optional<CoeffExpr> expr(const json& v, const std::string& key) {
        if (v.is_number()) {
            return CoeffExpr::constant(v.get<double>());
        }
        if (!v.is_string()) {
            fail(key, "expected an expression string or a number");
            return std::nullopt;
        }
        try {
            return CoeffExpr::parse(v.get<std::string>());
        } catch (const SyntaxError& e) {
            fail(key, e.what());
            return std::nullopt;
        }
    }

    std::optional<double> number(const json& v, const std::string& key) {
        if (!v.is_number()) {
            fail(key, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<MatrixFn> matrix_fn(const json& v, const std::string& key, std::size_t d) {
        if (!shape_ok(v, key, d)) {
            return std::nullopt;
        }
        std::vector<CoeffExpr> entries;
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                auto e = expr(v[i][j], entry_key(key, i, j));
                ok = ok && e.has_value();
                entries.push_back(e.value_or(CoeffExpr()));
            }
        }
        return ok ? std::optional<MatrixFn>(MatrixFn(d, std::move(entries))) : std::nullopt;
    }

    std::optional<VectorFn> vector_fn(const json& v, const std::string& key, std::size_t d) {
        if (!v.is_array() || v.size() != d) {
            fail(key, "expected an array of " + std::to_string(d) + " entries");
            return std::nullopt;
        }
        std::vector<CoeffExpr> entries;
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            auto e = expr(v[i], key + "[" + std::to_string(i) + "]");
            ok = ok && e.has_value();
            entries.push_back(e.value_or(CoeffExpr()));
        }
        return ok ? std::optional<VectorFn>(VectorFn(std::move(entries))) : std::nullopt;
    }

    std::optional<Matrix> matrix(const json& v, const std::string& key, std::size_t d) {
        if (!shape_ok(v, key, d)) {
            return std::nullopt;
        }
        const auto di = static_cast<Eigen::Index>(d);
        Matrix m(di, di);
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                auto x = number(v[i][j], entry_key(key, i, j));
                ok = ok && x.has_value();
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x.value_or(0.0);
            }
        }
        return ok ? std::optional<Matrix>(m) : std::nullopt;
    }

    std::optional<Vector> vector(const json& v, const std::string& key, std::size_t d) {
        if (!v.is_array() || v.size() != d) {
            fail(key, "expected an array of " + std::to_string(d) + " numbers");
            return std::nullopt;
        }
        Vector out(static_cast<Eigen::Index>(d));
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            auto x = number(v[i], key + "[" + std::to_string(i) + "]");
            ok = ok && x.has_value();
            out(static_cast<Eigen::Index>(i)) = x.value_or(0.0);
        }
        return ok ? std::optional<Vector>(out) : std::nullopt;
    }

private:
    static std::string entry_key(const std::string& key, std::size_t i, std::size_t j) {
        return key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
    }

    bool shape_ok(const json& v, const std::string& key, std::size_t d) {
        bool ok = v.is_array() && v.size() == d;
        for (std::size_t i = 0; ok && i < d; ++i) {
            ok = v[i].is_array() && v[i].size() == d;
        }
        if (!ok) {
            fail(key, "expected a " + std::to_string(d) + "x" + std::to_string(d) +
                          " array of arrays");
        }
        return ok;
    }
};

std::optional<LevyModel> read_noise(Reader& rd, const json& v, std::size_t d) {
    if (!v.is_object()) {
        rd.fail("noise", "expected an object");
        return std::nullopt;
    }
    const std::string type = v.contains("type") && v["type"].is_string()
                                 ? v["type"].get<std::string>()
                                 : std::string();
    const auto di = static_cast<Eigen::Index>(d);
    const std::size_t before = rd.issues.size();

    const auto allowed = [&](std::set<std::string> keys) {
        keys.insert("type");
        for (const auto& [k, _] : v.items()) {
            if (!keys.contains(k)) {
                rd.fail("noise." + k, "unknown key for noise type '" + type + "'");
            }
        }
    };
    const auto read_b = [&] {
        return v.contains("b") ? rd.vector(v["b"], "noise.b", d) : Vector(Vector::Zero(di));
    };
    const auto read_R = [&] {
        return v.contains("R") ? rd.matrix(v["R"], "noise.R", d) : Matrix(Matrix::Zero(di, di));
    };

    try {
        if (type == "gaussian") {
            allowed({"b", "R"});
            auto b = read_b();
            auto R = read_R();
            if (rd.issues.size() == before) {
                return LevyModel::gaussian(*b, *R);
            }
        } else if (type == "compound_poisson") {
            allowed({"b", "R", "atoms"});
            auto b = read_b();
            auto R = read_R();
            std::vector<JumpAtom> atoms;
            if (!v.contains("atoms") || !v["atoms"].is_array() || v["atoms"].empty()) {
                rd.fail("noise.atoms", "expected a non-empty array of [rate, y_1, ..., y_d]");
            } else {
                for (std::size_t k = 0; k < v["atoms"].size(); ++k) {
                    const json& a = v["atoms"][k];
                    const std::string key = "noise.atoms[" + std::to_string(k) + "]";
                    if (!a.is_array() || a.size() != d + 1) {
                        rd.fail(key, "expected [rate, y_1, ..., y_" + std::to_string(d) + "]");
                        continue;
                    }
                    Vector y(di);
                    bool ok = true;
                    auto rate = rd.number(a[0], key + "[0]");
                    ok = rate.has_value();
                    for (std::size_t i = 0; i < d; ++i) {
                        auto yi = rd.number(a[i + 1], key + "[" + std::to_string(i + 1) + "]");
                        ok = ok && yi.has_value();
                        y(static_cast<Eigen::Index>(i)) = yi.value_or(0.0);
                    }
                    if (ok) {
                        atoms.push_back(JumpAtom{*rate, y});
                    }
                }
            }
            if (rd.issues.size() == before) {
                return LevyModel::compound_poisson(*b, *R, std::move(atoms));
            }
        } else if (type == "stable") {
            allowed({"alpha", "sigma"});
            std::optional<double> alpha;
            std::optional<double> sigma;
            if (!v.contains("alpha")) {
                rd.fail("noise.alpha", "required for stable noise");
            } else {
                alpha = rd.number(v["alpha"], "noise.alpha");
            }
            if (!v.contains("sigma")) {
                rd.fail("noise.sigma", "required for stable noise");
            } else {
                sigma = rd.number(v["sigma"], "noise.sigma");
            }
            if (rd.issues.size() == before) {
                return LevyModel::stable(d, *alpha, *sigma);
            }
        } else {
            rd.fail("noise.type", "expected \"gaussian\", \"compound_poisson\" or \"stable\"");
        }
    } catch (const Error& e) {
        rd.fail("noise", e.what());
    }
    return std::nullopt;
}

Numerics read_numerics(Reader& rd, const json& v) {
    Numerics n;
    if (!v.is_object()) {
        rd.fail("numerics", "expected an object");
        return n;
    }
    for (const auto& [key, val] : v.items()) {
        const std::string full = "numerics." + key;
        if (key == "decay_samples") {
            if (!val.is_number_unsigned()) {
                rd.fail(full, "expected a non-negative integer");
            } else {
                n.decay_samples = val.get<std::size_t>();
            }
            continue;
        }
        double* slot = key == "ode_step"       ? &n.ode_step
                       : key == "quad_step"    ? &n.quad_step
                       : key == "tail_tol"     ? &n.tail_tol
                       : key == "flow_tol"     ? &n.flow_tol
                       : key == "identity_tol" ? &n.identity_tol
                       : key == "decay_window" ? &n.decay_window
                       : key == "bound_warning" ? &n.bound_warning
                                                : nullptr;
        if (slot == nullptr) {
            rd.fail(full, "unknown key");
        } else if (auto x = rd.number(val, full)) {
            *slot = *x;
        }
    }
    return n;
}

}  // namespace

Scenario parse_scenario_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("<document>", "expected a JSON object");
    }

    Reader rd;
    static const std::set<std::string> known = {"dimension", "A",    "B",    "f",          "noise",
                                                "numerics",  "seed", "name", "description"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) {
            rd.fail(key, "unknown key");
        }
    }

    std::size_t d = 0;
    if (!doc.contains("dimension")) {
        rd.fail("dimension", "required");
    } else if (!doc["dimension"].is_number_integer() || doc["dimension"].get<long long>() < 1 ||
               doc["dimension"].get<long long>() > 16) {
        rd.fail("dimension", "expected an integer in 1..16");
    } else {
        d = doc["dimension"].get<std::size_t>();
    }
    if (d == 0) {
        throw ConfigError(rd.issues);
    }

    std::optional<MatrixFn> A;
    if (!doc.contains("A")) {
        rd.fail("A", "required");
    } else {
        A = rd.matrix_fn(doc["A"], "A", d);
    }
    std::optional<MatrixFn> B = doc.contains("B")
                                    ? rd.matrix_fn(doc["B"], "B", d)
                                    : MatrixFn::constant(Matrix::Identity(
                                          static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    std::optional<VectorFn> f = doc.contains("f")
                                    ? rd.vector_fn(doc["f"], "f", d)
                                    : VectorFn::constant(Vector::Zero(static_cast<Eigen::Index>(d)));
    std::optional<LevyModel> noise;
    if (!doc.contains("noise")) {
        rd.fail("noise", "required");
    } else {
        noise = read_noise(rd, doc["noise"], d);
    }
    const Numerics numerics = doc.contains("numerics") ? read_numerics(rd, doc["numerics"])
                                                       : Numerics{};
    std::uint64_t seed = 0;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            rd.fail("seed", "expected a non-negative integer");
        } else {
            seed = doc["seed"].get<std::uint64_t>();
        }
    }

    if (!rd.issues.empty()) {
        throw ConfigError(rd.issues);
    }
    try {
        return Scenario(std::move(*A), std::move(*B), std::move(*f), std::move(*noise), numerics,
                        seed);
    } catch (const DomainError& e) {
        throw ConfigError("numerics", e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("<file>", "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

}  // namespace levyou
