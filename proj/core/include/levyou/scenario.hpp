#pragma once

#include "levyou/coeffexpr.hpp"
#include "levyou/evolution_op.hpp"
#include "levyou/levy.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace levyou {

struct Numerics {
    double ode_step = 1e-3;
    double quad_step = 1e-3;
    // Truncation tolerance for improper time integrals, in (0, 1e-2].
    double tail_tol = 1e-9;
    double flow_tol = 1e-7;
    double identity_tol = 1e-6;
    // Decay of U is fitted on [t - decay_window, t].
    double decay_window = 20.0;
    std::size_t decay_samples = 41;
    // Coefficient magnitudes above this trigger a boundedness warning.
    double bound_warning = 1e6;
};

// Problem instance for dX = (A(t) X(t-) + f(t)) dt + B(t) dZ(t).
class Scenario {
public:
    Scenario(MatrixFn A, MatrixFn B, VectorFn f, LevyModel noise, Numerics numerics = {},
             std::uint64_t seed = 0);

    std::size_t dim() const noexcept { return A_.dim(); }
    const MatrixFn& A() const noexcept { return A_; }
    const MatrixFn& B() const noexcept { return B_; }
    const VectorFn& f() const noexcept { return f_; }
    const LevyModel& noise() const noexcept { return noise_; }
    const Numerics& numerics() const noexcept { return numerics_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const EvolutionOperator& evolution() const noexcept { return *evolution_; }

    Scenario with_seed(std::uint64_t seed) const;

    // Boundedness probe of A, B, f on [t0, t1].
    std::vector<std::string> boundedness_warnings(double t0, double t1) const;

private:
    MatrixFn A_;
    MatrixFn B_;
    VectorFn f_;
    LevyModel noise_;
    Numerics numerics_;
    std::uint64_t seed_;
    std::shared_ptr<const EvolutionOperator> evolution_;
};

}  // namespace levyou
