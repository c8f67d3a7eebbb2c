#pragma once

#include "levyou/linalg.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levyou {

// Density sampled on y_i = y0 + i h, i = 0..n-1.
struct GridDensity {
    double y0 = 0.0;
    double h = 0.0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double y(std::size_t i) const noexcept { return y0 + static_cast<double>(i) * h; }
    double mass() const noexcept;
    // Linear interpolation; 0 outside the grid.
    double operator()(double y) const noexcept;
};

// Inverts a one-dimensional characteristic function on [-L, L) with n points
// (n a power of two, n >= 256) via the conjugate-grid FFT pairing
// y_k = -L + k (2L/n), a_j = (j - n/2) pi / L. If |cf| at the frequency edge
// exceeds 1e-8 the grid is refined once (n doubled) before giving up.
// Negative ripple is clipped and the mass renormalized; a pre-clip mass off
// by more than 1e-2 throws MassDeficit.
GridDensity invert_cf(const std::function<Complex(double)>& cf, double L, std::size_t n);

struct Window {
    double lo;
    double hi;
};

// max_i |p(y_i) - q(y_i)| over grid points (optionally restricted to a window).
double sup_distance(const GridDensity& p, const std::function<double(double)>& q,
                    std::optional<Window> window = std::nullopt);

// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic. Values closer than tie_tol are
// treated as equal.
double ks_two_sample(std::vector<double> a, std::vector<double> b, double tie_tol = 0.0);

// Writes "y,density" rows with 17 significant digits.
void write_csv(std::ostream& out, const GridDensity& p);

// %.17g rendering used by every CSV writer.
std::string format_double(double v);

double normal_pdf(double y, double mean, double variance);
double normal_cdf(double y, double mean, double variance);
double cauchy_pdf(double y, double location, double scale);
double cauchy_cdf(double y, double location, double scale);

}  // namespace levyou
