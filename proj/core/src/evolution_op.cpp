#include "levyou/evolution_op.hpp"

#include "levyou/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levyou {

double DecayEstimate::bound(double tau) const { return C * std::exp(-epsilon * tau); }

EvolutionOperator::EvolutionOperator(MatrixFn A, double ode_step)
    : A_(std::move(A)), step_(ode_step) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw DomainError("ode_step must be positive and finite");
    }
    if (A_.dim() == 0) {
        throw DomainError("evolution operator needs a non-empty generator");
    }
}

namespace {

// One RK4 step for Y' = A(r) Y applied to the identity, given A at the step
// start, midpoint and end.
Matrix rk4_propagator(const Matrix& a0, const Matrix& am, const Matrix& a1, double h) {
    const auto d = a0.rows();
    const Matrix I = Matrix::Identity(d, d);
    const Matrix k1 = a0;
    const Matrix k2 = am * (I + 0.5 * h * k1);
    const Matrix k3 = am * (I + 0.5 * h * k2);
    const Matrix k4 = a1 * (I + h * k3);
    return I + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Matrix EvolutionOperator::step_propagator(double r, double h) const {
    return rk4_propagator(A_(r), A_(r + 0.5 * h), A_(r + h), h);
}

bool EvolutionOperator::grid_key(double s, double t, Key& key) const {
    const double qs = s / step_;
    const double qt = t / step_;
    const double rs = std::nearbyint(qs);
    const double rt = std::nearbyint(qt);
    constexpr double kTol = 1e-9;
    constexpr double kRange = 9.0e15;
    if (std::fabs(qs - rs) > kTol * std::max(1.0, std::fabs(qs)) ||
        std::fabs(qt - rt) > kTol * std::max(1.0, std::fabs(qt)) || std::fabs(rs) > kRange ||
        std::fabs(rt) > kRange) {
        return false;
    }
    key = {static_cast<std::int64_t>(rs), static_cast<std::int64_t>(rt)};
    return true;
}

Matrix EvolutionOperator::integrate(double t, double s) const {
    const auto d = static_cast<Eigen::Index>(dim());
    Matrix U = Matrix::Identity(d, d);
    const double span = t - s;
    const auto full = static_cast<std::size_t>(std::floor(span / step_ * (1.0 + 1e-12)));
    const bool constant = A_.is_constant();
    Matrix P_const;
    if (constant && full > 0) {
        P_const = step_propagator(s, step_);
    }
    for (std::size_t k = 0; k < full; ++k) {
        const double r = s + static_cast<double>(k) * step_;
        U = (constant ? P_const : step_propagator(r, step_)) * U;
    }
    const double last_start = s + static_cast<double>(full) * step_;
    const double rest = t - last_start;
    if (rest > 1e-12 * step_) {
        U = step_propagator(last_start, rest) * U;
    }
    return U;
}

Matrix EvolutionOperator::evaluate(double t, double s) const {
    if (!(std::isfinite(t) && std::isfinite(s))) {
        throw DomainError("evolution operator needs finite times");
    }
    if (s > t) {
        throw DomainError("U(t,s) requires s <= t");
    }
    const auto d = static_cast<Eigen::Index>(dim());
    if (s == t) {
        return Matrix::Identity(d, d);
    }
    Key key;
    const bool cacheable = grid_key(s, t, key);
    if (cacheable) {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    Matrix U = integrate(t, s);
    if (cacheable) {
        std::lock_guard lock(mutex_);
        cache_.emplace(key, U);
    }
    return U;
}

std::vector<double> EvolutionOperator::propagators_to(double t, double s, std::size_t n) const {
    if (s > t) {
        throw DomainError("propagators_to requires s <= t");
    }
    const auto d = static_cast<Eigen::Index>(dim());
    const std::size_t block = static_cast<std::size_t>(d * d);
    std::vector<double> out((n + 1) * block);
    Eigen::Map<Matrix>(out.data() + n * block, d, d).setIdentity();
    if (n == 0) {
        return out;
    }
    const double h = (t - s) / static_cast<double>(n);
    const bool constant = A_.is_constant();
    Matrix P;
    if (constant) {
        P = step_propagator(s, h);
    }
    Matrix a_next = constant ? Matrix() : A_(t);
    for (std::size_t jj = n; jj-- > 0;) {
        const double r = (jj == 0) ? s : s + static_cast<double>(jj) * h;
        if (!constant) {
            const double r_end = (jj + 1 == n) ? t : s + static_cast<double>(jj + 1) * h;
            const double step = r_end - r;
            Matrix a0 = A_(r);
            P = rk4_propagator(a0, A_(r + 0.5 * step), a_next, step);
            a_next = std::move(a0);
        }
        Eigen::Map<const Matrix> right(out.data() + (jj + 1) * block, d, d);
        Eigen::Map<Matrix>(out.data() + jj * block, d, d).noalias() = right * P;
    }
    return out;
}

std::size_t EvolutionOperator::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

void EvolutionOperator::clear_cache() const {
    std::lock_guard lock(mutex_);
    cache_.clear();
}

DecayEstimate estimate_decay(const EvolutionOperator& op, double t_min, double t_max,
                             std::size_t n_samples) {
    if (!(t_min < t_max)) {
        throw DomainError("estimate_decay requires t_min < t_max");
    }
    if (n_samples < 10) {
        throw DomainError("estimate_decay requires at least 10 samples");
    }
    DecayEstimate est;
    est.t_min = t_min;
    est.t_max = t_max;

    std::vector<double> grid(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        grid[k] = (k + 1 == n_samples)
                      ? t_max
                      : t_min + (t_max - t_min) * static_cast<double>(k) /
                                    static_cast<double>(n_samples - 1);
    }
    std::vector<Matrix> segment(n_samples - 1);
    for (std::size_t k = 0; k + 1 < n_samples; ++k) {
        segment[k] = op.evaluate(grid[k + 1], grid[k]);
    }

    std::vector<double> tau;
    std::vector<double> log_norm;
    const auto d = static_cast<Eigen::Index>(op.dim());
    for (std::size_t i = 0; i + 1 < n_samples; ++i) {
        Matrix U = Matrix::Identity(d, d);
        for (std::size_t j = i + 1; j < n_samples; ++j) {
            U = segment[j - 1] * U;
            const double norm = operator_norm(U);
            if (!std::isfinite(norm) || norm <= 0.0) {
                return est;
            }
            tau.push_back(grid[j] - grid[i]);
            log_norm.push_back(std::log(norm));
        }
    }

    const double n = static_cast<double>(tau.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        sx += tau[k];
        sy += log_norm[k];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        sxx += (tau[k] - mx) * (tau[k] - mx);
        sxy += (tau[k] - mx) * (log_norm[k] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    est.epsilon = -slope;

    double log_c = std::max(intercept, 0.0);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        log_c = std::max(log_c, log_norm[k] + est.epsilon * tau[k]);
    }
    est.C = std::exp(log_c);
    est.valid = std::isfinite(est.epsilon) && est.epsilon > 0.0 && std::isfinite(est.C);
    return est;
}

}  // namespace levyou
