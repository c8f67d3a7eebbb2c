#pragma once

#include "levyou/coeffexpr.hpp"
#include "levyou/linalg.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace levyou {

// Fitted exponential stability bound ||U(t,s)|| <= C exp(-epsilon (t-s)).
struct DecayEstimate {
    double C = 1.0;
    double epsilon = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    bool valid = false;

    // C exp(-epsilon tau)
    double bound(double tau) const;
};

// Evolution operator U(t,s) of dU/dt = A(t) U, U(s,s) = I, integrated with
// fixed-step classical RK4.
//
// For the linear ODE one RK4 step from r to r+h maps Y to P(r,h) Y, where
// P(r,h) depends only on A at r, r+h/2, r+h. Every U this class returns is
// a product of such step propagators, which is what makes the flow property
// hold to rounding on a shared grid.
//
// evaluate() caches results whose endpoints lie on the ode_step grid; the
// cache is guarded by a mutex so the operator can be shared across threads.
class EvolutionOperator {
public:
    EvolutionOperator(MatrixFn A, double ode_step);

    std::size_t dim() const noexcept { return A_.dim(); }
    double step() const noexcept { return step_; }
    const MatrixFn& generator() const noexcept { return A_; }

    // U(t,s). Throws DomainError when s > t.
    Matrix evaluate(double t, double s) const;

    // One RK4 step propagator P(r,h).
    Matrix step_propagator(double r, double h) const;

    // U(t, r_j) for the uniform grid r_j = s + j (t-s)/n, j = 0..n, built by
    // accumulating one RK4 step per grid interval from t backwards. Column-major d*d blocks,
    // block j is U(t, r_j).
    std::vector<double> propagators_to(double t, double s, std::size_t n) const;

    std::size_t cache_size() const;
    void clear_cache() const;

private:
    using Key = std::pair<std::int64_t, std::int64_t>;

    Matrix integrate(double t, double s) const;
    bool grid_key(double s, double t, Key& key) const;

    MatrixFn A_;
    double step_;
    mutable std::mutex mutex_;
    mutable std::map<Key, Matrix> cache_;
};

// Fits log ||U(t,s)|| ~ log C - epsilon (t-s) by least squares over all pairs
// of an n_samples-point grid on [t_min, t_max]. C is then raised (and kept
// >= 1) so the bound majorizes every sample. valid is false when the fitted
// epsilon is not positive or a sample is non-finite.
DecayEstimate estimate_decay(const EvolutionOperator& op, double t_min, double t_max,
                             std::size_t n_samples);

}  // namespace levyou
