#include "levyou/simulate.hpp"

#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/ou_core.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

namespace levyou {

namespace {

constexpr std::size_t kMaxDim = 16;

void check_args(double s, double t, const Vector& x, std::size_t dim, std::size_t n_steps) {
    if (!std::isfinite(s) || !std::isfinite(t) || s > t) {
        throw DomainError("simulation requires finite s <= t");
    }
    if (n_steps < 1) {
        throw DomainError("simulation requires n_steps >= 1");
    }
    if (static_cast<std::size_t>(x.size()) != dim) {
        throw DomainError("initial state has the wrong dimension");
    }
}

// Increments over [r, r+dt) with r < 0 come from the stream reserved for
// negative times.
class TwoSidedNoise {
public:
    TwoSidedNoise(RngStream& rng, double s) : positive_(&rng) {
        if (s < 0.0) {
            negative_.emplace(rng.engine()());
        }
    }
    RngStream& at(double r) { return (r < 0.0 && negative_) ? *negative_ : *positive_; }

private:
    RngStream* positive_;
    std::optional<RngStream> negative_;
};

}  // namespace

// --- ExactSimulator ---------------------------------------------------------

ExactSimulator::ExactSimulator(const Scenario& sc, double s, double t, const Vector& x,
                               std::size_t n_steps)
    : noise_(sc.noise()), dim_(sc.dim()), steps_(n_steps), s_(s) {
    check_args(s, t, x, dim_, n_steps);
    dt_ = (t - s) / static_cast<double>(n_steps);
    const auto slab = TimeSlab::build(sc, s, t);
    deterministic_ = slab->transport() * x + slab->drift_integral();

    const auto d = static_cast<Eigen::Index>(dim_);
    const std::size_t block = dim_ * dim_;
    kernels_.resize(n_steps * block);
    if (s == t) {
        return;
    }
    const std::vector<double> props = sc.evolution().propagators_to(t, s, n_steps);
    Matrix B(d, d);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const double r = s + static_cast<double>(j) * dt_;
        sc.B().evaluate_into(r, B.data());
        Eigen::Map<const Matrix> U(props.data() + j * block, d, d);
        Eigen::Map<Matrix>(kernels_.data() + j * block, d, d).noalias() = U * B;
    }
}

std::size_t ExactSimulator::sample_into(RngStream& rng, std::span<double> out) const {
    if (out.size() != dim_) {
        throw DomainError("output buffer has the wrong dimension");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = deterministic_(static_cast<Eigen::Index>(i));
    }
    if (dt_ <= 0.0) {
        return 0;
    }
    TwoSidedNoise noise(rng, s_);
    double dz[kMaxDim];
    const std::span<double> dz_span(dz, dim_);
    std::size_t jumps = 0;
    const std::size_t block = dim_ * dim_;
    for (std::size_t j = 0; j < steps_; ++j) {
        const double r = s_ + static_cast<double>(j) * dt_;
        jumps += noise_.sample_increment_into(dt_, noise.at(r), dz_span);
        const double* K = kernels_.data() + j * block;
        for (std::size_t c = 0; c < dim_; ++c) {
            const double z = dz[c];
            const double* col = K + c * dim_;
            for (std::size_t i = 0; i < dim_; ++i) {
                out[i] += col[i] * z;
            }
        }
    }
    return jumps;
}

Vector ExactSimulator::sample(RngStream& rng) const {
    Vector out(static_cast<Eigen::Index>(dim_));
    sample_into(rng, std::span<double>(out.data(), dim_));
    return out;
}

// --- EulerSimulator ---------------------------------------------------------

EulerSimulator::EulerSimulator(const Scenario& sc, double s, double t, const Vector& x,
                               std::size_t n_steps)
    : noise_(sc.noise()), dim_(sc.dim()), steps_(n_steps), s_(s), t_(t), x0_(x) {
    check_args(s, t, x, dim_, n_steps);
    dt_ = (t - s) / static_cast<double>(n_steps);
    const std::size_t block = dim_ * dim_;
    A_.resize(n_steps * block);
    B_.resize(n_steps * block);
    f_.resize(n_steps * dim_);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double r = s + static_cast<double>(k) * dt_;
        sc.A().evaluate_into(r, A_.data() + k * block);
        sc.B().evaluate_into(r, B_.data() + k * block);
        const Vector fk = sc.f()(r);
        std::copy(fk.data(), fk.data() + dim_, f_.data() + k * dim_);
    }
}

std::size_t EulerSimulator::run(RngStream& rng, std::span<double> state,
                                std::vector<Vector>* path) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        state[i] = x0_(static_cast<Eigen::Index>(i));
    }
    if (path != nullptr) {
        path->push_back(x0_);
    }
    if (dt_ <= 0.0) {
        return 0;
    }
    TwoSidedNoise noise(rng, s_);
    double dz[kMaxDim];
    double next[kMaxDim];
    const std::span<double> dz_span(dz, dim_);
    const std::size_t block = dim_ * dim_;
    std::size_t jumps = 0;
    for (std::size_t k = 0; k < steps_; ++k) {
        const double r = s_ + static_cast<double>(k) * dt_;
        jumps += noise_.sample_increment_into(dt_, noise.at(r), dz_span);
        const double* A = A_.data() + k * block;
        const double* B = B_.data() + k * block;
        const double* f = f_.data() + k * dim_;
        for (std::size_t i = 0; i < dim_; ++i) {
            double drift = f[i];
            double diffusion = 0.0;
            for (std::size_t c = 0; c < dim_; ++c) {
                drift += A[c * dim_ + i] * state[c];
                diffusion += B[c * dim_ + i] * dz[c];
            }
            next[i] = state[i] + drift * dt_ + diffusion;
        }
        std::copy(next, next + dim_, state.begin());
        if (path != nullptr) {
            path->push_back(Eigen::Map<const Vector>(next, static_cast<Eigen::Index>(dim_)));
        }
    }
    return jumps;
}

std::size_t EulerSimulator::sample_into(RngStream& rng, std::span<double> out) const {
    if (out.size() != dim_) {
        throw DomainError("output buffer has the wrong dimension");
    }
    return run(rng, out, nullptr);
}

PathSample EulerSimulator::path(RngStream& rng) const {
    PathSample p;
    p.scheme = Scheme::Euler;
    p.seed = rng.seed();
    p.times.reserve(steps_ + 1);
    for (std::size_t k = 0; k <= steps_; ++k) {
        p.times.push_back(k == steps_ ? t_ : s_ + static_cast<double>(k) * dt_);
    }
    p.states.reserve(steps_ + 1);
    double state[kMaxDim];
    p.jump_count = run(rng, std::span<double>(state, dim_), &p.states);
    return p;
}

Vector simulate_exact(const Scenario& sc, double s, double t, const Vector& x, std::size_t n_steps,
                      RngStream& rng) {
    return ExactSimulator(sc, s, t, x, n_steps).sample(rng);
}

PathSample simulate_euler(const Scenario& sc, double s, double t, const Vector& x,
                          std::size_t n_steps, RngStream& rng) {
    return EulerSimulator(sc, s, t, x, n_steps).path(rng);
}

Complex empirical_cf(const std::vector<Vector>& samples, const Vector& a) {
    if (samples.empty()) {
        throw DomainError("empirical_cf needs at least one sample");
    }
    double re = 0.0;
    double im = 0.0;
    for (const auto& x : samples) {
        const double phase = a.dot(x);
        re += std::cos(phase);
        im += std::sin(phase);
    }
    const double n = static_cast<double>(samples.size());
    return {re / n, im / n};
}

std::size_t worker_count() {
    if (const char* env = std::getenv("LEVY_OU_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MonteCarloResult terminal_samples(const Scenario& sc, double s, double t, const Vector& x,
                                  std::size_t n_runs, std::size_t n_steps, Scheme scheme,
                                  std::size_t threads) {
    std::optional<ExactSimulator> exact;
    std::optional<EulerSimulator> euler;
    if (scheme == Scheme::ExactRepr) {
        exact.emplace(sc, s, t, x, n_steps);
    } else {
        euler.emplace(sc, s, t, x, n_steps);
    }
    const std::size_t d = sc.dim();
    MonteCarloResult result;
    result.terminal.assign(n_runs, Vector::Zero(static_cast<Eigen::Index>(d)));
    result.jumps.assign(n_runs, 0);

    const RngStream base(sc.seed());
    const auto work = [&](std::size_t worker, std::size_t stride) {
        for (std::size_t k = worker; k < n_runs; k += stride) {
            RngStream rng = base.fork(k);
            const std::span<double> out(result.terminal[k].data(), d);
            result.jumps[k] = exact ? exact->sample_into(rng, out) : euler->sample_into(rng, out);
        }
    };

    std::size_t W = threads == 0 ? worker_count() : threads;
    W = std::max<std::size_t>(1, std::min(W, n_runs));
    if (W == 1) {
        work(0, 1);
        return result;
    }
    std::vector<std::thread> pool;
    pool.reserve(W);
    for (std::size_t w = 0; w < W; ++w) {
        pool.emplace_back(work, w, W);
    }
    for (auto& th : pool) {
        th.join();
    }
    return result;
}

void write_path_csv(std::ostream& out, const PathSample& path) {
    const std::size_t d = path.states.empty() ? 0 : static_cast<std::size_t>(path.states[0].size());
    out << "time";
    for (std::size_t i = 1; i <= d; ++i) {
        out << ",x_" << i;
    }
    out << '\n';
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        out << format_double(path.times[k]);
        for (std::size_t i = 0; i < d; ++i) {
            out << ',' << format_double(path.states[k](static_cast<Eigen::Index>(i)));
        }
        out << '\n';
    }
}

}  // namespace levyou
