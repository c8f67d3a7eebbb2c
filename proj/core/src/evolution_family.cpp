#include "levyou/evolution_family.hpp"

#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace levyou {

// --- EvolutionFamily --------------------------------------------------------

EvolutionFamily::EvolutionFamily(Scenario sc, ExistenceReport report)
    : sc_(std::move(sc)), report_(report) {}

std::shared_ptr<const IDLaw> EvolutionFamily::nu(double t) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(t); it != cache_.end()) {
            return it->second;
        }
    }
    TripleResult triple = limit_triple(sc_, t);
    auto slab = triple.slab;
    LevyModel noise = sc_.noise();
    std::function<Complex(const Vector&)> cf;
    if (const auto scale = triple.jumps.stable_scale()) {
        const double c = *scale;
        const double alpha = noise.stable_params().alpha;
        cf = [slab, c, alpha](const Vector& a) {
            if (a.size() != 1) {
                throw DomainError("argument has the wrong dimension");
            }
            const double phase = a.dot(slab->drift_integral());
            return std::exp(Complex(-std::pow(c * std::fabs(a(0)), alpha), phase));
        };
    } else {
        cf = [slab, noise](const Vector& a) {
            const double phase = a.dot(slab->drift_integral());
            const Complex expo = slab->exponent_integral(
                noise, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
            return std::exp(Complex(0.0, phase) - expo);
        };
    }
    auto law = std::make_shared<const IDLaw>(std::move(triple.b), std::move(triple.R),
                                             std::move(triple.jumps), std::move(cf));
    std::lock_guard lock(mutex_);
    return cache_.emplace(t, std::move(law)).first->second;
}

EvolutionFamily build_family(const Scenario& sc, double t_ref) {
    ExistenceReport report = check_existence_conditions(sc, t_ref);
    if (!report.cond_i.holds) {
        throw ConditionsFailed("condition (i) failed: sup_{s<t} tr R_{s,t} is not finite");
    }
    if (!report.cond_ii.holds) {
        throw ConditionsFailed(
            "condition (ii) failed: int (1 ^ |U(t,r)B(r)y|^2) M(dy) dr is not finite");
    }
    return EvolutionFamily(sc, report);
}

double verify_identity_cf(const EvolutionFamily& fam, double s, double t,
                          const std::vector<Vector>& a_grid) {
    if (s > t) {
        throw DomainError("verify_identity_cf requires s <= t");
    }
    const Scenario& sc = fam.scenario();
    const auto nu_s = fam.nu(s);
    const auto nu_t = fam.nu(t);
    const Matrix Ut = sc.evolution().evaluate(t, s).transpose();
    const TransitionLaw transition(sc, s, t);
    const Vector origin = Vector::Zero(static_cast<Eigen::Index>(sc.dim()));
    double worst = 0.0;
    for (const auto& a : a_grid) {
        const Complex lhs = nu_s->cf(Ut * a) * transition.cf(origin, a);
        worst = std::max(worst, std::abs(lhs - nu_t->cf(a)));
    }
    return worst;
}

double verify_identity_convolution(const EvolutionFamily& fam, double s, double t,
                                   std::size_t n_samples, RngStream& rng, std::size_t n_steps) {
    const Scenario& sc = fam.scenario();
    if (sc.dim() != 1) {
        throw Unsupported("the convolution identity is checked in dimension 1 only");
    }
    if (n_samples == 0) {
        throw DomainError("n_samples must be positive");
    }
    const Law1D nu_s = closed_form_law(fam, s);
    const Law1D nu_t = closed_form_law(fam, t);
    const double U = sc.evolution().evaluate(t, s)(0, 0);
    const ExactSimulator transition(sc, s, t, Vector::Zero(1), n_steps);

    std::vector<double> lhs(n_samples);
    std::vector<double> rhs(n_samples);
    double x = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        transition.sample_into(rng, std::span<double>(&x, 1));
        lhs[i] = U * nu_s.sample(rng) + x;
        rhs[i] = nu_t.sample(rng);
    }
    return ks_two_sample(std::move(lhs), std::move(rhs), 1e-8);
}

IDLaw gaussian_family_closed_form(const Scenario& sc, double t) {
    if (sc.noise().has_levy_measure()) {
        throw NotGaussian("noise has a jump part; nu_t is not Gaussian");
    }
    TripleResult triple = limit_triple(sc, t);
    Vector b = triple.b;
    Matrix R = triple.R;
    auto cf = [b, R](const Vector& a) {
        return std::exp(Complex(-0.5 * a.dot(R * a), a.dot(b)));
    };
    return IDLaw(std::move(triple.b), std::move(triple.R), std::move(triple.jumps),
                 std::move(cf));
}

// --- Law1D ------------------------------------------------------------------

Law1D::Law1D(Kind kind, double loc, double spread, double alpha)
    : kind_(kind), loc_(loc), spread_(spread), alpha_(alpha) {}

Law1D Law1D::point(double loc) { return Law1D(Kind::Point, loc, 0.0, 0.0); }

Law1D Law1D::gaussian(double mean, double variance) {
    if (!(variance >= 0.0)) {
        throw DomainError("variance must be nonnegative");
    }
    if (variance == 0.0) {
        return point(mean);
    }
    return Law1D(Kind::Gaussian, mean, variance, 2.0);
}

Law1D Law1D::stable(double alpha, double loc, double scale) {
    if (!(alpha > 0.0 && alpha <= 2.0) || !(scale >= 0.0)) {
        throw DomainError("stable law needs alpha in (0, 2] and scale >= 0");
    }
    if (scale == 0.0) {
        return point(loc);
    }
    if (alpha == 2.0) {
        return gaussian(loc, 2.0 * scale * scale);
    }
    return Law1D(Kind::Stable, loc, scale, alpha);
}

Complex Law1D::cf(double a) const {
    switch (kind_) {
    case Kind::Point:
        return std::exp(Complex(0.0, a * loc_));
    case Kind::Gaussian:
        return std::exp(Complex(-0.5 * spread_ * a * a, a * loc_));
    case Kind::Stable:
        break;
    }
    return std::exp(Complex(-std::pow(spread_ * std::fabs(a), alpha_), a * loc_));
}

double Law1D::cdf(double y) const {
    switch (kind_) {
    case Kind::Point:
        return y >= loc_ ? 1.0 : 0.0;
    case Kind::Gaussian:
        return normal_cdf(y, loc_, spread_);
    case Kind::Stable:
        break;
    }
    if (alpha_ != 1.0) {
        throw Unsupported("no closed-form cdf for stable index other than 1 or 2");
    }
    return cauchy_cdf(y, loc_, spread_);
}

double Law1D::sample(RngStream& rng) const {
    switch (kind_) {
    case Kind::Point:
        return loc_;
    case Kind::Gaussian:
        return loc_ + std::sqrt(spread_) * rng.normal();
    case Kind::Stable:
        break;
    }
    return loc_ + spread_ * standard_stable(alpha_, rng);
}

Law1D Law1D::scaled(double u) const {
    switch (kind_) {
    case Kind::Point:
        return point(u * loc_);
    case Kind::Gaussian:
        return gaussian(u * loc_, u * u * spread_);
    case Kind::Stable:
        break;
    }
    return stable(alpha_, u * loc_, std::fabs(u) * spread_);
}

double Law1D::quantile_radius(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    if (kind_ == Kind::Point) {
        return std::fabs(loc_);
    }
    const auto mass = [&](double r) { return cdf(r) - cdf(-r); };
    double hi = std::fabs(loc_) + (kind_ == Kind::Gaussian ? std::sqrt(spread_) : spread_);
    while (mass(hi) < p) {
        hi *= 2.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) < p ? lo : hi) = mid;
    }
    return hi;
}

Law1D closed_form_law(const EvolutionFamily& fam, double t) {
    const Scenario& sc = fam.scenario();
    if (sc.dim() != 1) {
        throw Unsupported("closed-form laws are one-dimensional");
    }
    const LevyModel& noise = sc.noise();
    if (noise.is_compound_poisson()) {
        throw Unsupported("compound Poisson families have no closed-form law");
    }
    const auto law = fam.nu(t);
    const double loc = law->b()(0);
    if (noise.has_levy_measure()) {
        return Law1D::stable(noise.stable_params().alpha, loc, *law->jumps().stable_scale());
    }
    return Law1D::gaussian(loc, law->R()(0, 0));
}

double empirical_tightness(const EvolutionFamily& fam, const std::vector<double>& t_grid,
                           double p) {
    double worst = 0.0;
    for (double t : t_grid) {
        worst = std::max(worst, closed_form_law(fam, t).quantile_radius(p));
    }
    return worst;
}

// --- Cauchy family ----------------------------------------------------------

namespace {

struct Probe {
    double lam_min = std::numeric_limits<double>::infinity();
    double sig_min = std::numeric_limits<double>::infinity();
    double sig_max = 0.0;
    double drift_max = 0.0;
};

Probe probe(const CoeffExpr& lam, const CoeffExpr& drift, const CoeffExpr& sig, double t0,
            double t1, double step) {
    Probe p;
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step)) + 1;
    for (std::size_t k = 0; k <= n; ++k) {
        const double r = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
        p.lam_min = std::min(p.lam_min, lam(r));
        const double s = sig(r);
        p.sig_min = std::min(p.sig_min, s);
        p.sig_max = std::max(p.sig_max, std::fabs(s));
        p.drift_max = std::max(p.drift_max, std::fabs(drift(r)));
    }
    if (!(p.lam_min > 0.0)) {
        throw DomainError("lambda must be bounded below by a positive constant on [" +
                          format_double(t0) + ", " + format_double(t1) + "]");
    }
    if (p.sig_min < 0.0) {
        throw DomainError("sigma must be nonnegative");
    }
    return p;
}

double tail_horizon(const Probe& p, double tol) {
    const double K = std::max(p.sig_max, p.drift_max);
    const double arg = K / (p.lam_min * tol);
    return arg > 1.0 ? std::log(arg) / p.lam_min : 0.0;
}

}  // namespace

CauchyParameters cauchy_parameters_from_drift(const CoeffExpr& lam, const CoeffExpr& drift,
                                              const CoeffExpr& sig, double t,
                                              CauchyOptions opts) {
    if (!std::isfinite(t)) {
        throw DomainError("t must be finite");
    }
    if (!(opts.quad_step > 0.0) || !(opts.tail_tol > 0.0) || !(opts.probe_window > 0.0)) {
        throw DomainError("quad_step, tail_tol and probe_window must be positive");
    }
    double window = opts.probe_window;
    double T = tail_horizon(probe(lam, drift, sig, t - window, t, opts.quad_step), opts.tail_tol);
    while (T > window) {
        window = T;
        T = tail_horizon(probe(lam, drift, sig, t - window, t, opts.quad_step), opts.tail_tol);
    }

    CauchyParameters out;
    out.horizon = T;
    if (T == 0.0) {
        return out;
    }
    auto n = static_cast<std::size_t>(2.0 * std::ceil(T / (2.0 * opts.quad_step)));
    n = std::max<std::size_t>(n, 2);
    const double h = T / static_cast<double>(n);
    const double s = t - T;

    // cumulative trapezoid of lambda from r_j to t
    std::vector<double> lam_v(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        lam_v[j] = lam(j == n ? t : s + static_cast<double>(j) * h);
    }
    double Lambda = 0.0;
    for (std::size_t j = n + 1; j-- > 0;) {
        if (j < n) {
            Lambda += 0.5 * h * (lam_v[j] + lam_v[j + 1]);
        }
        const double r = j == n ? t : s + static_cast<double>(j) * h;
        const double w = simpson_weight(j, n, h) * std::exp(-Lambda);
        out.scale += w * sig(r);
        out.location += w * drift(r);
    }
    return out;
}

CauchyParameters cauchy_family_parameters(const CoeffExpr& lam, const CoeffExpr& mu,
                                          const CoeffExpr& sig, double t, CauchyOptions opts) {
    return cauchy_parameters_from_drift(lam, lam * mu, sig, t, opts);
}

double cauchy_family_density(const CoeffExpr& lam, const CoeffExpr& mu, const CoeffExpr& sig,
                             double t, double y, CauchyOptions opts) {
    const CauchyParameters p = cauchy_family_parameters(lam, mu, sig, t, opts);
    if (!(p.scale > 0.0)) {
        throw DomainError("degenerate law (a(t) = 0) has no density");
    }
    return cauchy_pdf(y, p.location, p.scale);
}

}  // namespace levyou
