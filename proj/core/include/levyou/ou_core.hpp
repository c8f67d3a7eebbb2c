#pragma once

// Law of the solution X_{s,x}(t) = U(t,s)x + int U f dr + int U B dZ.
//
// Everything here is expressed on a TimeSlab: a uniform Simpson grid over
// [s,t] carrying G_j = U(t,r_j) B(r_j) and U(t,r_j) f(r_j). The characteristic
// function is
//
//   phi(a) = exp( i<a, U(t,s)x + int U f dr> - int eta(G(r)^T a) dr ),
//
// and the infinitely divisible triple (b_st, R_st, M_st) is assembled on the
// same grid. M_st is never materialized: it is available only through
// integrals against the pushforward y -> G(r) y.

#include "levyou/evolution_op.hpp"
#include "levyou/linalg.hpp"
#include "levyou/scenario.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace levyou {

class TimeSlab {
public:
    // Grid of n = 2 ceil((t-s) / (2 quad_step)) intervals; empty when s == t.
    static std::shared_ptr<const TimeSlab> build(const Scenario& sc, double s, double t);

    double s() const noexcept { return s_; }
    double t() const noexcept { return t_; }
    std::size_t dim() const noexcept { return dim_; }
    // Number of grid nodes (intervals + 1), or 0 for an empty slab.
    std::size_t size() const noexcept { return nodes_.size(); }

    double node(std::size_t j) const { return nodes_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }
    // G_j = U(t,r_j) B(r_j), column-major.
    Eigen::Map<const Matrix> pushforward(std::size_t j) const;

    // U(t,s)
    const Matrix& transport() const noexcept { return transport_; }
    // int_s^t U(t,r) f(r) dr
    const Vector& drift_integral() const noexcept { return drift_integral_; }

    // int_s^t eta(G(r)^T a) dr for the given noise model.
    Complex exponent_integral(const LevyModel& noise, std::span<const double> a) const;

private:
    double s_ = 0.0;
    double t_ = 0.0;
    std::size_t dim_ = 0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> pushforward_;
    Matrix transport_;
    Vector drift_integral_;
};

// Functional view of the pushforward jump measure M_st.
class JumpFunctional {
public:
    JumpFunctional() = default;
    JumpFunctional(std::shared_ptr<const TimeSlab> slab, LevyModel noise);

    // True when integrals against M_st vanish identically.
    bool empty() const noexcept;

    // int_s^t int g(U(t,r)B(r)y) M(dy) dr. Compound Poisson (or no jumps).
    double integrate(const std::function<double(const Vector&)>& g) const;

    // int [ e^{i<a,z>} - 1 - i<a,z>/(1+|z|^2) ] M_st(dz)
    Complex levy_khintchine_integral(const Vector& a) const;

    // For stable noise in dimension 1: the scale c with
    // c^alpha = int sigma^alpha |U(t,r)B(r)|^alpha dr.
    std::optional<double> stable_scale() const;

private:
    std::shared_ptr<const TimeSlab> slab_;
    std::optional<LevyModel> noise_;
};

struct TripleResult {
    double s = 0.0;
    double t = 0.0;
    // Set for limits s -> -infinity; s then holds the truncation point.
    bool infinite_past = false;
    Vector b;
    Matrix R;
    JumpFunctional jumps;
    std::shared_ptr<const TimeSlab> slab;
};

// exp(i<a, shift + b> - 1/2 <a, R a> + int [...] M(dz)): the Levy-Khintchine
// characteristic function of the triple translated by shift.
Complex triple_cf(const TripleResult& triple, const Vector& shift, const Vector& a);

// Infinitely divisible law [b, R, M] with a characteristic function.
class IDLaw {
public:
    using CfFn = std::function<Complex(const Vector&)>;

    IDLaw(Vector b, Matrix R, JumpFunctional jumps, CfFn cf);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(b_.size()); }
    const Vector& b() const noexcept { return b_; }
    const Matrix& R() const noexcept { return R_; }
    const JumpFunctional& jumps() const noexcept { return jumps_; }

    Complex cf(const Vector& a) const { return cf_(a); }
    // Characteristic function rebuilt from (b, R, jumps) alone.
    Complex cf_from_triple(const Vector& a) const;

private:
    Vector b_;
    Matrix R_;
    JumpFunctional jumps_;
    CfFn cf_;
};

// Law of X_{s,x}(t) prepared for repeated characteristic-function queries.
class TransitionLaw {
public:
    TransitionLaw(const Scenario& sc, double s, double t);

    Complex cf(const Vector& x, const Vector& a) const;
    const TimeSlab& slab() const noexcept { return *slab_; }

private:
    const Scenario* sc_;
    std::shared_ptr<const TimeSlab> slab_;
};

Complex cf_solution(const Scenario& sc, double s, double t, const Vector& x, const Vector& a);

TripleResult compute_triple(const Scenario& sc, double s, double t);

// Decay of U fitted on [t - decay_window, t]. Throws DecayUnavailable when the
// fit does not show exponential decay.
DecayEstimate decay_near(const Scenario& sc, double t);

struct LimitOptions {
    // Multiplies the computed truncation horizon (tail checks use 2).
    double horizon_scale = 1.0;
};

// Length T such that the integrands of b, R, the jump terms and condition
// (ii) contribute less than tail_tol on (-infinity, t - T].
double truncation_horizon(const Scenario& sc, double t, const DecayEstimate& decay);

// Slab over [t - T, t] used for every improper integral at time t.
std::shared_ptr<const TimeSlab> limit_slab(const Scenario& sc, double t, LimitOptions opts = {});

TripleResult limit_triple(const Scenario& sc, double t, LimitOptions opts = {});

struct ConditionCheck {
    bool holds = false;
    // NaN when only the analytic majorant is available.
    double value = std::numeric_limits<double>::quiet_NaN();
};

struct ExistenceReport {
    // sup_{s<t} tr R_{s,t} = tr R_{-inf,t}
    ConditionCheck cond_i;
    // int_{-inf}^t int (1 ^ |U(t,r)B(r)y|^2) M(dy) dr
    ConditionCheck cond_ii;
    // C^2 C_B^2 K_1 + K_2: bound on the condition (ii) integrand per unit time.
    double cond_ii_majorant_rate = 0.0;
    DecayEstimate decay;
    double horizon = 0.0;
};

ExistenceReport check_existence_conditions(const Scenario& sc, double t);

}  // namespace levyou
