#include "levyou/scenario.hpp"

#include "levyou/errors.hpp"

#include <cmath>

namespace levyou {

Scenario::Scenario(MatrixFn A, MatrixFn B, VectorFn f, LevyModel noise, Numerics numerics,
                   std::uint64_t seed)
    : A_(std::move(A)),
      B_(std::move(B)),
      f_(std::move(f)),
      noise_(std::move(noise)),
      numerics_(numerics),
      seed_(seed) {
    const std::size_t d = A_.dim();
    if (d == 0) {
        throw DomainError("scenario dimension must be positive");
    }
    if (B_.dim() != d || f_.dim() != d || noise_.dim() != d) {
        throw DomainError("A, B, f and the noise must share dimension " + std::to_string(d));
    }
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(numerics_.ode_step) || !positive(numerics_.quad_step)) {
        throw DomainError("ode_step and quad_step must be positive");
    }
    if (!(numerics_.tail_tol > 0.0 && numerics_.tail_tol <= 1e-2)) {
        throw DomainError("tail_tol must lie in (0, 1e-2]");
    }
    if (!positive(numerics_.flow_tol) || !positive(numerics_.identity_tol)) {
        throw DomainError("flow_tol and identity_tol must be positive");
    }
    if (!positive(numerics_.decay_window) || numerics_.decay_samples < 10) {
        throw DomainError("decay_window must be positive and decay_samples >= 10");
    }
    evolution_ = std::make_shared<const EvolutionOperator>(A_, numerics_.ode_step);
}

Scenario Scenario::with_seed(std::uint64_t seed) const {
    Scenario copy = *this;
    copy.seed_ = seed;
    return copy;
}

std::vector<std::string> Scenario::boundedness_warnings(double t0, double t1) const {
    std::vector<std::string> out;
    const std::size_t n = 257;
    if (auto w = probe_bound(A_, t0, t1, n, numerics_.bound_warning)) {
        out.push_back("A: " + *w);
    }
    if (auto w = probe_bound(B_, t0, t1, n, numerics_.bound_warning)) {
        out.push_back("B: " + *w);
    }
    if (auto w = probe_bound(f_, t0, t1, n, numerics_.bound_warning)) {
        out.push_back("f: " + *w);
    }
    return out;
}

}  // namespace levyou
