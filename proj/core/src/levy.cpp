#include "levyou/levy.hpp"

#include "levyou/errors.hpp"

#include <cmath>
#include <numbers>

namespace levyou {

namespace {

constexpr double kPsdTol = 1e-12;
constexpr std::size_t kMaxDim = 16;

Matrix psd_square_root(const Matrix& R) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(R);
    Vector ev = eig.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -kPsdTol) {
            throw DomainError("noise covariance R is not positive semidefinite");
        }
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return eig.eigenvectors() * ev.asDiagonal();
}

double dot(std::span<const double> a, const Vector& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * y(static_cast<Eigen::Index>(i));
    }
    return s;
}

}  // namespace

LevyModel::LevyModel(Vector b, Matrix R, JumpPart jumps)
    : b_(std::move(b)), R_(std::move(R)), jumps_(std::move(jumps)) {
    const auto d = b_.size();
    if (d == 0 || static_cast<std::size_t>(d) > kMaxDim) {
        throw DomainError("noise dimension must be in 1..16");
    }
    if (R_.rows() != d || R_.cols() != d) {
        throw DomainError("noise covariance R must be d x d");
    }
    if (!b_.allFinite() || !R_.allFinite()) {
        throw DomainError("noise drift and covariance must be finite");
    }
    if ((R_ - R_.transpose()).cwiseAbs().maxCoeff() != 0.0) {
        throw DomainError("noise covariance R must be symmetric");
    }
    R_sqrt_ = psd_square_root(R_);

    compensator_ = Vector::Zero(d);
    if (auto* cp = std::get_if<CompoundPoisson>(&jumps_)) {
        for (const auto& atom : cp->atoms) {
            if (!(atom.rate > 0.0) || !std::isfinite(atom.rate)) {
                throw DomainError("compound Poisson rates must be positive and finite");
            }
            if (atom.size.size() != d) {
                throw DomainError("compound Poisson atom has the wrong dimension");
            }
            if (!atom.size.allFinite() || atom.size.squaredNorm() == 0.0) {
                throw DomainError("Levy measure may not charge the origin");
            }
            compensator_ += atom.rate * atom.size / (1.0 + atom.size.squaredNorm());
        }
    } else if (auto* st = std::get_if<StableSymmetric>(&jumps_)) {
        if (!(st->alpha > 0.0 && st->alpha <= 2.0)) {
            throw DomainError("stable index alpha must lie in (0, 2]");
        }
        if (!(st->sigma > 0.0) || !std::isfinite(st->sigma)) {
            throw DomainError("stable scale sigma must be positive");
        }
        if (b_.cwiseAbs().maxCoeff() != 0.0 || R_.cwiseAbs().maxCoeff() != 0.0) {
            throw DomainError("stable noise is configured with b = 0 and R = 0");
        }
    }
}

LevyModel LevyModel::brownian(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return LevyModel(Vector::Zero(d), Matrix::Identity(d, d), NoJumps{});
}

LevyModel LevyModel::gaussian(Vector b, Matrix R) {
    return LevyModel(std::move(b), std::move(R), NoJumps{});
}

LevyModel LevyModel::compound_poisson(Vector b, Matrix R, std::vector<JumpAtom> atoms) {
    return LevyModel(std::move(b), std::move(R), CompoundPoisson{std::move(atoms)});
}

LevyModel LevyModel::stable(std::size_t dim, double alpha, double sigma) {
    const auto d = static_cast<Eigen::Index>(dim);
    return LevyModel(Vector::Zero(d), Matrix::Zero(d, d), StableSymmetric{alpha, sigma});
}

Matrix LevyModel::effective_covariance() const {
    if (const auto* st = std::get_if<StableSymmetric>(&jumps_); st != nullptr && st->alpha == 2.0) {
        const auto d = b_.size();
        return 2.0 * st->sigma * st->sigma * Matrix::Identity(d, d);
    }
    return R_;
}

bool LevyModel::has_levy_measure() const noexcept {
    if (const auto* st = std::get_if<StableSymmetric>(&jumps_)) {
        return st->alpha < 2.0;
    }
    if (const auto* cp = std::get_if<CompoundPoisson>(&jumps_)) {
        return !cp->atoms.empty();
    }
    return false;
}

Complex LevyModel::characteristic_exponent(std::span<const double> a) const {
    const auto d = static_cast<std::size_t>(b_.size());
    if (a.size() != d) {
        throw DomainError("characteristic exponent argument has the wrong dimension");
    }
    if (const auto* st = std::get_if<StableSymmetric>(&jumps_)) {
        double sq = 0.0;
        for (double v : a) {
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        double mag;
        if (st->alpha == 1.0) {
            mag = st->sigma * norm;
        } else if (st->alpha == 2.0) {
            mag = st->sigma * st->sigma * sq;
        } else {
            mag = std::pow(st->sigma * norm, st->alpha);
        }
        return {mag, 0.0};
    }

    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            row += R_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * a[j];
        }
        quad += a[i] * row;
    }
    double re = 0.5 * quad;
    double im = -dot(a, b_);

    if (const auto* cp = std::get_if<CompoundPoisson>(&jumps_)) {
        for (const auto& atom : cp->atoms) {
            const double ay = dot(a, atom.size);
            const double damp = 1.0 / (1.0 + atom.size.squaredNorm());
            // subtract lambda [e^{i ay} - 1 - i ay damp]
            re -= atom.rate * (std::cos(ay) - 1.0);
            im -= atom.rate * (std::sin(ay) - ay * damp);
        }
    }
    return {re, im};
}

Complex LevyModel::characteristic_exponent(const Vector& a) const {
    return characteristic_exponent(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
}

double standard_stable(double alpha, RngStream& rng) {
    const double V = std::numbers::pi * (rng.uniform() - 0.5);
    if (alpha == 1.0) {
        return std::tan(V);
    }
    const double W = rng.exponential();
    if (alpha == 2.0) {
        return 2.0 * std::sin(V) * std::sqrt(W);
    }
    const double cv = std::cos(V);
    return std::sin(alpha * V) / std::pow(cv, 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * V) / W, (1.0 - alpha) / alpha);
}

double stable_levy_density_constant(double alpha) {
    return std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0) / std::numbers::pi;
}

std::size_t LevyModel::sample_increment_into(double dt, RngStream& rng,
                                             std::span<double> out) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("increment length dt must be positive");
    }
    const auto d = static_cast<std::size_t>(b_.size());
    if (out.size() != d) {
        throw DomainError("increment buffer has the wrong dimension");
    }
    if (const auto* st = std::get_if<StableSymmetric>(&jumps_)) {
        if (d != 1) {
            throw Unsupported("stable increments can only be sampled in dimension 1");
        }
        out[0] = st->sigma * std::pow(dt, 1.0 / st->alpha) * standard_stable(st->alpha, rng);
        return 0;
    }

    for (std::size_t i = 0; i < d; ++i) {
        out[i] = b_(static_cast<Eigen::Index>(i)) * dt;
    }
    if (R_sqrt_.cwiseAbs().maxCoeff() > 0.0) {
        const double sd = std::sqrt(dt);
        double z[kMaxDim];
        for (std::size_t k = 0; k < d; ++k) {
            z[k] = rng.normal();
        }
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                acc += R_sqrt_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * z[k];
            }
            out[i] += sd * acc;
        }
    }
    std::size_t jumps = 0;
    if (const auto* cp = std::get_if<CompoundPoisson>(&jumps_)) {
        for (const auto& atom : cp->atoms) {
            const std::uint64_t count = rng.poisson(atom.rate * dt);
            jumps += count;
            for (std::size_t i = 0; i < d; ++i) {
                out[i] += static_cast<double>(count) * atom.size(static_cast<Eigen::Index>(i));
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            out[i] -= dt * compensator_(static_cast<Eigen::Index>(i));
        }
    }
    return jumps;
}

Vector LevyModel::sample_increment(double dt, RngStream& rng) const {
    Vector out(b_.size());
    sample_increment_into(dt, rng, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

double LevyModel::levy_measure_integral(const std::function<double(const Vector&)>& g) const {
    if (std::holds_alternative<StableSymmetric>(jumps_)) {
        throw Unsupported("stable Levy measure has no atom representation");
    }
    double total = 0.0;
    if (const auto* cp = std::get_if<CompoundPoisson>(&jumps_)) {
        for (const auto& atom : cp->atoms) {
            total += atom.rate * g(atom.size);
        }
    }
    return total;
}

Complex characteristic_exponent(const LevyModel& m, const Vector& a) {
    return m.characteristic_exponent(a);
}

Vector sample_increment(const LevyModel& m, double dt, RngStream& rng) {
    return m.sample_increment(dt, rng);
}

double levy_measure_integral(const LevyModel& m, const std::function<double(const Vector&)>& g) {
    return m.levy_measure_integral(g);
}

}  // namespace levyou
