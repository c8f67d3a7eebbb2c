#pragma once

// Evolution system of measures nu_t = [b_{-inf,t}, R_{-inf,t}, M_{-inf,t}].
//
// nu_t has characteristic function
//
//   exp( i<a, int_{-inf}^t U(t,r) f(r) dr> - int_{-inf}^t eta(B(r)^T U(t,r)^T a) dr )
//
// and satisfies, for s <= t,
//
//   nu_s^(U(t,s)^T a) phi_{X_{s,0}(t)}(a) = nu_t^(a),
//   nu_t = p_{s,t}(0, .) * (nu_s o U(t,s)^{-1}).

#include "levyou/coeffexpr.hpp"
#include "levyou/ou_core.hpp"
#include "levyou/rng.hpp"
#include "levyou/scenario.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace levyou {

class EvolutionFamily {
public:
    EvolutionFamily(Scenario sc, ExistenceReport report);

    const Scenario& scenario() const noexcept { return sc_; }
    // Existence report at the reference time used to build the family.
    const ExistenceReport& report() const noexcept { return report_; }

    // nu_t, cached per t.
    std::shared_ptr<const IDLaw> nu(double t) const;

private:
    Scenario sc_;
    ExistenceReport report_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<const IDLaw>> cache_;
};

// Checks decay and conditions (i), (ii) at t_ref. Throws DecayUnavailable or
// ConditionsFailed.
EvolutionFamily build_family(const Scenario& sc, double t_ref = 0.0);

// max over the grid of |nu_s^(U(t,s)^T a) phi_{X_{s,0}(t)}(a) - nu_t^(a)|.
double verify_identity_cf(const EvolutionFamily& fam, double s, double t,
                          const std::vector<Vector>& a_grid);

// Two-sample KS distance between U(t,s) Y + X_{s,0}(t), Y ~ nu_s, and direct
// draws from nu_t. Dimension 1 with Gaussian or stable noise only.
double verify_identity_convolution(const EvolutionFamily& fam, double s, double t,
                                   std::size_t n_samples, RngStream& rng,
                                   std::size_t n_steps = 200);

// nu_t = N(b_{-inf,t}, R_{-inf,t}). Throws NotGaussian when the noise has a
// Levy measure.
IDLaw gaussian_family_closed_form(const Scenario& sc, double t);

// One-dimensional closed-form laws: a point mass, a normal law, or a
// symmetric stable law with characteristic function
// exp(i a loc - scale^alpha |a|^alpha).
class Law1D {
public:
    enum class Kind { Point, Gaussian, Stable };

    static Law1D point(double loc);
    static Law1D gaussian(double mean, double variance);
    static Law1D stable(double alpha, double loc, double scale);

    Kind kind() const noexcept { return kind_; }
    double location() const noexcept { return loc_; }
    // Variance for Gaussian, scale for stable, 0 for a point mass.
    double spread() const noexcept { return spread_; }
    double alpha() const noexcept { return alpha_; }

    Complex cf(double a) const;
    // Point, Gaussian and Cauchy (alpha = 1) only.
    double cdf(double y) const;
    double sample(RngStream& rng) const;
    // Law of u X.
    Law1D scaled(double u) const;
    // Smallest r with P(|X| <= r) >= p, by bisection on the cdf.
    double quantile_radius(double p) const;

private:
    Law1D(Kind kind, double loc, double spread, double alpha);

    Kind kind_;
    double loc_;
    double spread_;
    double alpha_;
};

// nu_t of a one-dimensional family as a Law1D. Throws Unsupported for compound
// Poisson noise.
Law1D closed_form_law(const EvolutionFamily& fam, double t);

// Largest p-quantile radius of nu_t over the grid (empirical tightness).
double empirical_tightness(const EvolutionFamily& fam, const std::vector<double>& t_grid,
                           double p = 0.99);

struct CauchyOptions {
    double quad_step = 1e-3;
    double tail_tol = 1e-9;
    // lambda is probed for positivity on [t - probe_window, t] (and on the
    // full truncation window when longer).
    double probe_window = 50.0;
};

struct CauchyParameters {
    double scale = 0.0;     // a(t) = int e^{-int_r^t lambda} sigma(r) dr
    double location = 0.0;  // b(t) = int e^{-int_r^t lambda} drift(r) dr
    double horizon = 0.0;
};

// Parameters of nu_t for dX = (-lambda X + drift) dt + sigma dZ, Z standard
// Cauchy. Throws DomainError when lambda is not bounded below by a positive
// constant or sigma is negative on the probe window.
CauchyParameters cauchy_parameters_from_drift(const CoeffExpr& lam, const CoeffExpr& drift,
                                              const CoeffExpr& sig, double t,
                                              CauchyOptions opts = {});

// As above with drift = lambda mu.
CauchyParameters cauchy_family_parameters(const CoeffExpr& lam, const CoeffExpr& mu,
                                          const CoeffExpr& sig, double t,
                                          CauchyOptions opts = {});

// a(t) / (pi [(y - b(t))^2 + a(t)^2])
double cauchy_family_density(const CoeffExpr& lam, const CoeffExpr& mu, const CoeffExpr& sig,
                             double t, double y, CauchyOptions opts = {});

}  // namespace levyou
