#pragma once

// Monte Carlo simulation of dX = (A X(t-) + f) dt + B dZ.
//
// ExactRepr discretizes only the stochastic convolution of the mild solution,
//   X(t) = U(t,s)x + int U f dr + sum_j U(t,r_j) B(r_j) (Z(r_{j+1}) - Z(r_j)),
// with left endpoints r_j. Euler steps the integral equation directly,
//   X_{k+1} = X_k + (A(r_k) X_k + f(r_k)) dr + B(r_k) dZ_k.
//
// Increments over intervals starting before time 0 come from a separate
// stream, realizing the two-sided extension of Z.

#include "levyou/linalg.hpp"
#include "levyou/rng.hpp"
#include "levyou/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace levyou {

enum class Scheme { ExactRepr, Euler };

struct PathSample {
    std::vector<double> times;
    std::vector<Vector> states;
    Scheme scheme = Scheme::Euler;
    std::uint64_t seed = 0;
    std::size_t jump_count = 0;
};

// Precomputes everything deterministic for the exact representation so runs
// only draw increments.
class ExactSimulator {
public:
    ExactSimulator(const Scenario& sc, double s, double t, const Vector& x, std::size_t n_steps);

    std::size_t dim() const noexcept { return dim_; }
    // Writes the terminal state; returns the number of jumps realized.
    std::size_t sample_into(RngStream& rng, std::span<double> out) const;
    Vector sample(RngStream& rng) const;

private:
    LevyModel noise_;
    std::size_t dim_;
    std::size_t steps_;
    double s_;
    double dt_;
    Vector deterministic_;           // U(t,s)x + int U f
    std::vector<double> kernels_;    // U(t,r_j) B(r_j), column-major
};

class EulerSimulator {
public:
    EulerSimulator(const Scenario& sc, double s, double t, const Vector& x, std::size_t n_steps);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t sample_into(RngStream& rng, std::span<double> out) const;
    PathSample path(RngStream& rng) const;

private:
    std::size_t run(RngStream& rng, std::span<double> state, std::vector<Vector>* path) const;

    LevyModel noise_;
    std::size_t dim_;
    std::size_t steps_;
    double s_;
    double t_;
    double dt_;
    Vector x0_;
    std::vector<double> A_;  // A(r_k), column-major blocks
    std::vector<double> B_;
    std::vector<double> f_;
};

Vector simulate_exact(const Scenario& sc, double s, double t, const Vector& x, std::size_t n_steps,
                      RngStream& rng);
PathSample simulate_euler(const Scenario& sc, double s, double t, const Vector& x,
                          std::size_t n_steps, RngStream& rng);

// (1/N) sum_k exp(i <a, X_k>)
Complex empirical_cf(const std::vector<Vector>& samples, const Vector& a);

struct MonteCarloResult {
    std::vector<Vector> terminal;
    std::vector<std::size_t> jumps;
};

// Runs n_runs independent simulations. Run k uses RngStream(seed).fork(k), so
// the result does not depend on the number of worker threads (0 = default).
MonteCarloResult terminal_samples(const Scenario& sc, double s, double t, const Vector& x,
                                  std::size_t n_runs, std::size_t n_steps, Scheme scheme,
                                  std::size_t threads = 0);

// LEVY_OU_THREADS when set, otherwise the hardware concurrency.
std::size_t worker_count();

// "time,x_1,...,x_d" rows with 17 significant digits.
void write_path_csv(std::ostream& out, const PathSample& path);

}  // namespace levyou
