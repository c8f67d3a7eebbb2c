#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/evolution_family.hpp"
#include "levyou/simulate.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace levyou;

namespace {

Complex gaussian_cf(double a) { return std::exp(-a * a / 2.0); }
Complex cauchy_cf(double a) { return std::exp(-std::fabs(a)); }

double std_normal_pdf(double y) { return oracle::normal_pdf(y, 0.0, 1.0); }
double std_cauchy_pdf(double y) { return oracle::cauchy_pdf(y, 0.0, 1.0); }

}  // namespace

TEST_CASE("invert_cf examples") {
    SUBCASE("standard normal") {
        const GridDensity p = invert_cf(gaussian_cf, 20.0, 1 << 12);
        CHECK(p.size() == 1 << 12);
        CHECK(std::fabs(p(0.0) - 1.0 / std::sqrt(2.0 * oracle::pi)) < 1e-6);
        CHECK(std::fabs(p(0.0) - 0.3989423) < 1e-6);
        CHECK(sup_distance(p, std_normal_pdf) < 1e-4);
        CHECK(std::fabs(p.mass() - 1.0) < 1e-3);
        CHECK(p.y(0) == -20.0);
    }
    SUBCASE("standard Cauchy on a wide grid") {
        const GridDensity p = invert_cf(cauchy_cf, 400.0, 1 << 16);
        CHECK(std::fabs(p(0.0) - 1.0 / oracle::pi) < 1e-4);
        CHECK(sup_distance(p, std_cauchy_pdf) < 1e-4);
        CHECK(sup_distance(p, std_cauchy_pdf, Window{-10.0, 10.0}) < 1e-4);
    }
    SUBCASE("values are nonnegative") {
        const GridDensity p = invert_cf(cauchy_cf, 400.0, 1 << 16);
        for (double v : p.values) {
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("sup_distance examples") {
    const GridDensity normal = invert_cf(gaussian_cf, 20.0, 1 << 12);
    GridDensity copy = normal;
    CHECK(sup_distance(normal, [&](double y) { return copy(y); }) == 0.0);
    const double d = sup_distance(normal, std_cauchy_pdf);
    CHECK(d > 0.07);
    CHECK(d >= std::fabs(normal(0.0) - 1.0 / oracle::pi));
}

TEST_CASE("refining the grid does not degrade accuracy") {
    // Spectral accuracy: once the grid resolves the density the error sits at
    // round-off, so each doubling either improves or stays there.
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {256u, 512u, 1024u, 2048u}) {
        const double err = sup_distance(invert_cf(gaussian_cf, 12.0, n), std_normal_pdf);
        CHECK((err <= prev || err < 1e-14));
        prev = err;
    }
    CHECK(prev < 1e-12);
}

TEST_CASE("invert_cf guards") {
    SUBCASE("heavy tails on a coarse grid") {
        CHECK_THROWS_AS(invert_cf(cauchy_cf, 400.0, 256), MassDeficit);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(invert_cf(gaussian_cf, 20.0, 300), DomainError);
        CHECK_THROWS_AS(invert_cf(gaussian_cf, 20.0, 128), DomainError);
        CHECK_THROWS_AS(invert_cf(gaussian_cf, -1.0, 256), DomainError);
        CHECK_THROWS_AS(invert_cf([](double a) { return 0.5 * gaussian_cf(a); }, 20.0, 256),
                        DomainError);
    }
    SUBCASE("the edge guard widens once") {
        // |cf| at pi n / (2L) is above 1e-8 for n = 256 but not for 512
        const GridDensity p = invert_cf(gaussian_cf, 90.0, 256);
        CHECK(p.size() == 512);
    }
}

TEST_CASE("compound Poisson family density") {
    // A pure compound Poisson nu_t keeps atoms, so its cf does not decay; a
    // small Gaussian component makes the law absolutely continuous.
    const Scenario sc = fixtures::scalar(
        "-1", "1", "0",
        LevyModel::compound_poisson(Vector::Zero(1), Matrix::Constant(1, 1, 0.05),
                                    {JumpAtom{1.0, Vector::Constant(1, 0.5)}}));
    const EvolutionFamily fam = build_family(sc);
    const auto nu = fam.nu(0.0);
    const GridDensity p =
        invert_cf([&](double a) { return nu->cf(Vector::Constant(1, a)); }, 20.0, 1 << 12);
    CHECK(std::fabs(p.mass() - 1.0) < 1e-3);
    double mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.values[i] >= 0.0);
        mean += p.y(i) * p.values[i] * p.h;
    }
    // E Z(1) = lambda y |y|^2 / (1 + |y|^2) = 0.1 under the compensated exponent,
    // so E nu_t = int_0^inf e^{-r} 0.1 dr
    CHECK(std::fabs(mean - 0.1) < 1e-3);

    // cross-check against a Monte Carlo histogram of the exact representation
    const MonteCarloResult mc =
        terminal_samples(sc, -20.0, 0.0, Vector::Zero(1), 20000, 2000, Scheme::ExactRepr, 1);
    std::vector<double> xs;
    for (const auto& v : mc.terminal) {
        xs.push_back(v(0));
    }
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p.values[i] * p.h;
        cdf[i] = acc;
    }
    const double ks = ks_statistic(xs, [&](double y) {
        const double k = (y - p.y0) / p.h;
        if (k < 0) {
            return 0.0;
        }
        const auto i = static_cast<std::size_t>(k);
        return i + 1 < cdf.size() ? cdf[i] : 1.0;
    });
    CHECK(ks < 0.02);
}

TEST_CASE("ks_statistic examples") {
    CHECK(ks_statistic({0.0}, [](double y) { return oracle::normal_cdf(y, 0.0, 1.0); }) ==
          doctest::Approx(0.5));
    RngStream rng(123);
    std::vector<double> z(100000);
    for (auto& x : z) {
        x = rng.normal();
    }
    CHECK(ks_statistic(z, [](double y) { return oracle::normal_cdf(y, 0.0, 1.0); }) < 0.006);
    const Law1D law = Law1D::stable(1.0, 2.0, 0.5);
    for (auto& x : z) {
        x = law.sample(rng);
    }
    CHECK(ks_statistic(z, [](double y) { return oracle::cauchy_cdf(y, 2.0, 0.5); }) < 0.006);
    CHECK_THROWS_AS(ks_statistic({}, [](double) { return 0.0; }), DomainError);
}

TEST_CASE("ks_two_sample") {
    CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(ks_two_sample({0.0, 0.0}, {1.0, 1.0}) == 1.0);
    CHECK(ks_two_sample({1.0}, {1.0 + 1e-12}, 1e-9) == 0.0);
    CHECK(ks_two_sample({1.0}, {1.0 + 1e-12}) == 1.0);
    CHECK(ks_two_sample({0.0, 2.0}, {1.0}) == doctest::Approx(0.5));
}

TEST_CASE("closed-form helpers and csv") {
    CHECK(normal_pdf(0.0, 0.0, 1.0) == doctest::Approx(std_normal_pdf(0.0)));
    CHECK(normal_cdf(1.0, 1.0, 2.0) == doctest::Approx(0.5));
    CHECK(cauchy_pdf(3.0, 3.0, 0.5) == doctest::Approx(2.0 / oracle::pi));
    CHECK(cauchy_cdf(1.0, 0.0, 1.0) == doctest::Approx(0.75));
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");

    GridDensity p;
    p.y0 = -1.0;
    p.h = 0.5;
    p.values = {0.0, 1.0, 0.5};
    CHECK(p.mass() == doctest::Approx(0.75));
    CHECK(p(-0.25) == doctest::Approx(0.75));
    CHECK(p(5.0) == 0.0);
    std::ostringstream os;
    write_csv(os, p);
    CHECK(os.str() == "y,density\n-1,0\n-0.5,1\n0,0.5\n");
}
