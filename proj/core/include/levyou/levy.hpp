#pragma once

// Levy noise models and their characteristic exponents.
//
// Sign convention: the increment Z(t+dt) - Z(t) has characteristic function
// exp(-dt eta(a)) with
//
//   eta(a) = -i <b,a> + 1/2 <a,Ra>
//            - int [ e^{i<a,y>} - 1 - i<a,y>/(1+|y|^2) ] M(dy).
//
// M is either absent, a finite set of weighted atoms (compound Poisson) or the
// rotationally invariant symmetric alpha-stable measure with
// eta(a) = sigma^alpha |a|^alpha.

#include "levyou/linalg.hpp"
#include "levyou/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace levyou {

struct NoJumps {};

struct JumpAtom {
    double rate;  // lambda_i > 0
    Vector size;  // y_i != 0
};

struct CompoundPoisson {
    std::vector<JumpAtom> atoms;
};

struct StableSymmetric {
    double alpha;  // (0, 2]
    double sigma;  // > 0
};

using JumpPart = std::variant<NoJumps, CompoundPoisson, StableSymmetric>;

class LevyModel {
public:
    // Validates: R symmetric PSD, atoms nonzero with positive rates,
    // stable parameters in range with b = 0 and R = 0.
    LevyModel(Vector b, Matrix R, JumpPart jumps);

    static LevyModel brownian(std::size_t dim);
    static LevyModel gaussian(Vector b, Matrix R);
    static LevyModel compound_poisson(Vector b, Matrix R, std::vector<JumpAtom> atoms);
    static LevyModel stable(std::size_t dim, double alpha, double sigma);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(b_.size()); }
    const Vector& drift() const noexcept { return b_; }
    const Matrix& covariance() const noexcept { return R_; }
    const JumpPart& jumps() const noexcept { return jumps_; }

    bool has_jumps() const noexcept { return !std::holds_alternative<NoJumps>(jumps_); }
    bool is_stable() const noexcept { return std::holds_alternative<StableSymmetric>(jumps_); }
    bool is_compound_poisson() const noexcept {
        return std::holds_alternative<CompoundPoisson>(jumps_);
    }
    const StableSymmetric& stable_params() const { return std::get<StableSymmetric>(jumps_); }
    const CompoundPoisson& poisson_params() const { return std::get<CompoundPoisson>(jumps_); }

    // Gaussian covariance of the exponent. For alpha = 2 stable noise this is
    // 2 sigma^2 I, and the model carries no Levy measure.
    Matrix effective_covariance() const;
    // True when the jump part is a genuine Levy measure (atoms, or stable with alpha < 2).
    bool has_levy_measure() const noexcept;

    Complex characteristic_exponent(const Vector& a) const;
    Complex characteristic_exponent(std::span<const double> a) const;

    // Draws Z(t+dt) - Z(t) into out (length dim). Returns the number of jumps
    // realized (compound Poisson only; 0 otherwise).
    std::size_t sample_increment_into(double dt, RngStream& rng, std::span<double> out) const;
    Vector sample_increment(double dt, RngStream& rng) const;

    // sum_i lambda_i g(y_i). Compound Poisson only; a model without jumps gives 0.
    double levy_measure_integral(const std::function<double(const Vector&)>& g) const;

private:
    Vector b_;
    Matrix R_;
    Matrix R_sqrt_;  // R_sqrt_ R_sqrt_^T = R
    JumpPart jumps_;
    Vector compensator_;  // sum_i lambda_i y_i / (1 + |y_i|^2)
};

Complex characteristic_exponent(const LevyModel& m, const Vector& a);
Vector sample_increment(const LevyModel& m, double dt, RngStream& rng);
double levy_measure_integral(const LevyModel& m, const std::function<double(const Vector&)>& g);

// Standard symmetric alpha-stable draw with characteristic function
// exp(-|a|^alpha) (Chambers-Mallows-Stuck).
double standard_stable(double alpha, RngStream& rng);

// Constant c_alpha in the one-dimensional Levy density c_alpha sigma^alpha
// |y|^{-1-alpha} whose exponent is sigma^alpha |a|^alpha.
double stable_levy_density_constant(double alpha);

}  // namespace levyou
