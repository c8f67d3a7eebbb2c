#include "levyou/density.hpp"
#include "levyou/evolution_family.hpp"
#include "levyou/ou_core.hpp"
#include "levyou/simulate.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace levyou;

namespace {

Scenario periodic_scenario(LevyModel noise) {
    return Scenario(MatrixFn::scalar(parse_expr("-(2+sin(t))")), MatrixFn::scalar(parse_expr("1")),
                    VectorFn::parse({"cos(t)"}), std::move(noise));
}

LevyModel brownian() { return LevyModel::gaussian(Vector::Zero(1), Matrix::Identity(1, 1)); }

void BM_EvaluateU(benchmark::State& state) {
    const EvolutionOperator op(
        MatrixFn::parse({{"-1+0.5*sin(t)", "2*sin(t)"}, {"-3*cos(t)", "-2"}}), 1e-3);
    const double span = static_cast<double>(state.range(0));
    for (auto _ : state) {
        op.clear_cache();
        benchmark::DoNotOptimize(op.evaluate(span, 0.0));
    }
}
BENCHMARK(BM_EvaluateU)->Arg(1)->Arg(10);

void BM_CfSolution(benchmark::State& state) {
    const Scenario sc = periodic_scenario(brownian());
    const TransitionLaw law(sc, 0.0, 1.0);
    const Vector x = Vector::Zero(1), a = Vector::Ones(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(law.cf(x, a));
    }
}
BENCHMARK(BM_CfSolution);

void BM_FamilyNu(benchmark::State& state) {
    const Scenario sc = periodic_scenario(LevyModel::stable(1, 1.0, 1.0));
    const EvolutionFamily fam = build_family(sc);
    double t = 0.0;
    for (auto _ : state) {
        t += 0.01;
        benchmark::DoNotOptimize(fam.nu(t)->cf(Vector::Ones(1)));
    }
}
BENCHMARK(BM_FamilyNu);

void BM_InvertCf(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            invert_cf([](double a) { return Complex(std::exp(-std::fabs(a)), 0.0); }, 400.0, n));
    }
}
BENCHMARK(BM_InvertCf)->Arg(1 << 12)->Arg(1 << 16);

void BM_TerminalSamples(benchmark::State& state) {
    const Scenario sc = periodic_scenario(brownian());
    const auto scheme = state.range(0) == 0 ? Scheme::ExactRepr : Scheme::Euler;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            terminal_samples(sc, 0.0, 1.0, Vector::Zero(1), 1000, 1000, scheme, 1));
    }
}
BENCHMARK(BM_TerminalSamples)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
