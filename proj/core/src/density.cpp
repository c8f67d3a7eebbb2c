#include "levyou/density.hpp"

#include "levyou/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <ostream>

namespace levyou {

namespace {

// fftw planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (data == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* data;
};

void forward_fft_inplace(FftwBuffer& buf, std::size_t n) {
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

double GridDensity::mass() const noexcept {
    double m = 0.0;
    for (double v : values) {
        m += v;
    }
    return m * h;
}

double GridDensity::operator()(double y) const noexcept {
    if (values.empty() || h <= 0.0) {
        return 0.0;
    }
    const double pos = (y - y0) / h;
    if (pos < 0.0 || pos > static_cast<double>(values.size() - 1)) {
        return 0.0;
    }
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= values.size()) {
        return values.back();
    }
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * values[i] + frac * values[i + 1];
}

GridDensity invert_cf(const std::function<Complex(double)>& cf, double L, std::size_t n) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw DomainError("half-width L must be positive");
    }
    if (n < 256 || !is_power_of_two(n)) {
        throw DomainError("grid size must be a power of two >= 256");
    }
    if (std::abs(cf(0.0) - Complex(1.0, 0.0)) > 1e-12) {
        throw DomainError("cf(0) must equal 1");
    }
    const auto edge = [&](std::size_t m) {
        return std::abs(cf(std::numbers::pi * static_cast<double>(m) / (2.0 * L)));
    };
    if (edge(n) > 1e-8) {
        n *= 2;
        if (edge(n) > 1e-8) {
            throw MassDeficit("characteristic function is not negligible at the frequency edge; "
                              "increase n");
        }
    }

    const double h = 2.0 * L / static_cast<double>(n);
    const double da = std::numbers::pi / L;
    FftwBuffer buf(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = (static_cast<double>(j) - static_cast<double>(n / 2)) * da;
        Complex c = cf(a);
        if (j % 2 == 1) {
            c = -c;
        }
        buf.data[j][0] = c.real();
        buf.data[j][1] = c.imag();
    }
    forward_fft_inplace(buf, n);

    GridDensity out;
    out.y0 = -L;
    out.h = h;
    out.values.resize(n);
    const double scale = da / (2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = scale * buf.data[k][0];
        out.values[k] = (k % 2 == 1) ? -v : v;
    }

    const double raw_mass = out.mass();
    if (std::fabs(raw_mass - 1.0) > 1e-2) {
        throw MassDeficit("inverted density has mass " + format_double(raw_mass) +
                          "; the grid is too small");
    }
    for (double& v : out.values) {
        v = std::max(v, 0.0);
    }
    const double clipped = out.mass();
    for (double& v : out.values) {
        v /= clipped;
    }
    return out;
}

double sup_distance(const GridDensity& p, const std::function<double(double)>& q,
                    std::optional<Window> window) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double y = p.y(i);
        if (window && (y < window->lo || y > window->hi)) {
            continue;
        }
        worst = std::max(worst, std::fabs(p.values[i] - q(y)));
    }
    return worst;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw DomainError("ks_statistic needs at least one sample");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, static_cast<double>(i + 1) / n - F);
        d = std::max(d, F - static_cast<double>(i) / n);
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b, double tie_tol) {
    if (a.empty() || b.empty()) {
        throw DomainError("ks_two_sample needs non-empty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        // advance past every value within tie_tol of the smallest remaining one
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x + tie_tol) {
            ++i;
        }
        while (j < b.size() && b[j] <= x + tie_tol) {
            ++j;
        }
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const GridDensity& p) {
    out << "y,density\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << format_double(p.y(i)) << ',' << format_double(p.values[i]) << '\n';
    }
}

double normal_pdf(double y, double mean, double variance) {
    const double z = y - mean;
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double normal_cdf(double y, double mean, double variance) {
    return 0.5 * std::erfc(-(y - mean) / std::sqrt(2.0 * variance));
}

double cauchy_pdf(double y, double location, double scale) {
    const double z = y - location;
    return scale / (std::numbers::pi * (z * z + scale * scale));
}

double cauchy_cdf(double y, double location, double scale) {
    return 0.5 + std::atan((y - location) / scale) / std::numbers::pi;
}

}  // namespace levyou
