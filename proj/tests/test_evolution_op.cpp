#include "levyou/errors.hpp"
#include "levyou/evolution_op.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

using namespace levyou;

namespace {

EvolutionOperator scalar_op(const std::string& a, double step = 1e-3) {
    return EvolutionOperator(MatrixFn::scalar(parse_expr(a)), step);
}

// Bounded, time-dependent 2x2 generator with ||A|| <= 10.
EvolutionOperator coupled_op(double step = 1e-3) {
    return EvolutionOperator(
        MatrixFn::parse({{"-1+0.5*sin(t)", "2*sin(t)"}, {"-3*cos(t)", "-2"}}), step);
}

}  // namespace

TEST_CASE("evaluate_U examples") {
    SUBCASE("constant -I over unit time") {
        const EvolutionOperator op(MatrixFn::constant(-Matrix::Identity(2, 2)), 1e-3);
        const Matrix U = op.evaluate(1.5, 0.5);
        CHECK(std::fabs(U(0, 0) - std::exp(-1.0)) < 1e-9);
        CHECK(std::fabs(U(1, 1) - std::exp(-1.0)) < 1e-9);
        CHECK(std::fabs(U(0, 1)) < 1e-15);
        CHECK(std::fabs(U(0, 0) - 0.36787944117) < 1e-9);
    }
    SUBCASE("U(s,s) is exactly the identity") {
        const EvolutionOperator op = coupled_op();
        for (double s : {-3.7, 0.0, 2.25}) {
            CHECK(op.evaluate(s, s) == Matrix::Identity(2, 2));
        }
    }
    SUBCASE("periodic scalar generator against the closed form") {
        const EvolutionOperator op = scalar_op("-(2+sin(t))");
        const double U = op.evaluate(1.0, 0.0)(0, 0);
        CHECK(std::fabs(U - oracle::periodic_U(1.0, 0.0)) < 1e-8);
        CHECK(std::fabs(U - std::exp(-(2.0 + 1.0 - std::cos(1.0)))) < 1e-8);
    }
    SUBCASE("off-grid endpoints") {
        const EvolutionOperator op = scalar_op("-(2+sin(t))");
        const double U = op.evaluate(3.14159, -0.7777)(0, 0);
        CHECK(std::fabs(U - oracle::periodic_U(3.14159, -0.7777)) < 1e-8);
    }
}

TEST_CASE("evaluate_U rejects s > t") {
    const EvolutionOperator op = scalar_op("-1");
    CHECK_THROWS_AS(op.evaluate(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(EvolutionOperator(MatrixFn::scalar(parse_expr("1")), 0.0), DomainError);
}

TEST_CASE("flow property over random triples") {
    const EvolutionOperator op = coupled_op();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        double v[3] = {u(gen), u(gen), u(gen)};
        std::sort(v, v + 3);
        const double r = v[0], s = v[1], t = v[2];
        const Matrix lhs = op.evaluate(t, s) * op.evaluate(s, r);
        worst = std::max(worst, operator_norm(lhs - op.evaluate(t, r)));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("backward derivative dU/ds = -U(t,s) A(s)") {
    const EvolutionOperator op = coupled_op();
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    const double delta = 1e-3;
    for (int i = 0; i < 20; ++i) {
        const double s = u(gen);
        const double t = s + 0.1 + u(gen) / 4.0;
        const Matrix fd = (op.evaluate(t, s + delta) - op.evaluate(t, s - delta)) / (2.0 * delta);
        const Matrix exact = -op.evaluate(t, s) * op.generator()(s);
        CHECK(operator_norm(fd - exact) < 1e-4);
    }
}

TEST_CASE("forward derivative dU/dt = A(t) U(t,s)") {
    const EvolutionOperator op = coupled_op();
    const double s = 0.3, t = 2.1, delta = 1e-3;
    const Matrix fd = (op.evaluate(t + delta, s) - op.evaluate(t - delta, s)) / (2.0 * delta);
    CHECK(operator_norm(fd - op.generator()(t) * op.evaluate(t, s)) < 1e-4);
}

TEST_CASE("RK4 convergence order") {
    SUBCASE("constant generator") {
        double prev = 0.0;
        for (double h : {0.1, 0.05, 0.025}) {
            const double err =
                std::fabs(scalar_op("-1", h).evaluate(1.0, 0.0)(0, 0) - std::exp(-1.0));
            if (prev > 0.0) {
                CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
            }
            prev = err;
        }
    }
    SUBCASE("periodic generator") {
        double prev = 0.0;
        for (double h : {0.1, 0.05, 0.025}) {
            const double err = std::fabs(scalar_op("-(2+sin(t))", h).evaluate(1.0, 0.0)(0, 0) -
                                         oracle::periodic_U(1.0, 0.0));
            if (prev > 0.0) {
                CHECK(prev / err == doctest::Approx(16.0).epsilon(0.15));
            }
            prev = err;
        }
    }
}

TEST_CASE("cache returns identical results and is thread-safe") {
    const EvolutionOperator op = coupled_op();
    const Matrix first = op.evaluate(2.0, 1.0);
    CHECK(op.cache_size() >= 1);
    CHECK(op.evaluate(2.0, 1.0) == first);
    op.clear_cache();
    CHECK(op.cache_size() == 0);
    CHECK(op.evaluate(2.0, 1.0) == first);

    std::vector<Matrix> got(4);
    std::vector<std::thread> pool;
    for (int w = 0; w < 4; ++w) {
        pool.emplace_back([&, w] {
            for (int k = 0; k < 20; ++k) {
                got[w] = op.evaluate(3.0 + 0.001 * k, 0.5);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    const Matrix ref = op.evaluate(3.0 + 0.001 * 19, 0.5);
    for (const auto& g : got) {
        CHECK(g == ref);
    }
}

TEST_CASE("propagators_to matches evaluate on the grid") {
    const EvolutionOperator op = coupled_op();
    // one RK4 step per grid interval, so a grid matching ode_step reproduces evaluate
    const std::size_t n = 1000;
    const std::vector<double> blocks = op.propagators_to(2.0, 1.0, n);
    REQUIRE(blocks.size() == (n + 1) * 4);
    for (std::size_t j : {std::size_t{0}, std::size_t{417}, n}) {
        const double r = 1.0 + static_cast<double>(j) / static_cast<double>(n);
        const Eigen::Map<const Matrix> U(blocks.data() + 4 * j, 2, 2);
        CHECK(operator_norm(U - op.evaluate(2.0, r)) < 1e-9);
    }
}

TEST_CASE("estimate_decay examples") {
    SUBCASE("contracting constant generator") {
        const EvolutionOperator op(MatrixFn::constant(-Matrix::Identity(2, 2)), 1e-3);
        const DecayEstimate d = estimate_decay(op, 0.0, 10.0, 21);
        CHECK(d.valid);
        CHECK(d.epsilon >= 0.99);
        CHECK(d.C >= 1.0);
    }
    SUBCASE("expanding generator") {
        const EvolutionOperator op(MatrixFn::constant(Matrix::Identity(2, 2)), 1e-3);
        CHECK_FALSE(estimate_decay(op, 0.0, 10.0, 21).valid);
    }
    SUBCASE("periodic scalar generator") {
        const EvolutionOperator op = scalar_op("-(2+sin(t))");
        const DecayEstimate d = estimate_decay(op, -10.0, 10.0, 41);
        CHECK(d.valid);
        CHECK(d.epsilon >= 0.99);
        // the fitted bound majorizes the exact norm at the sample pairs
        for (int i = 0; i < 41; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double s = -10.0 + 0.5 * j;
                const double t = -10.0 + 0.5 * i;
                CHECK(oracle::periodic_U(t, s) <= d.bound(t - s) * (1.0 + 1e-9));
            }
        }
    }
    SUBCASE("preconditions") {
        const EvolutionOperator op = scalar_op("-1");
        CHECK_THROWS_AS(estimate_decay(op, 1.0, 1.0, 20), DomainError);
        CHECK_THROWS_AS(estimate_decay(op, 0.0, 1.0, 9), DomainError);
    }
}

TEST_CASE("operator norm") {
    Matrix m(2, 2);
    m << 3.0, 0.0, 4.0, 0.0;
    CHECK(operator_norm(m) == doctest::Approx(5.0));
    CHECK(operator_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
}
