#include <cmath>

#include "doctest.h"

#include "kac/grid.hpp"
#include "kac/maxwellian.hpp"
#include "kac/quadrature.hpp"

using namespace kac;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
} // namespace

TEST_CASE("closed forms at v = 0") {
    CHECK(equilibrium::mu(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(equilibrium::sqrt_mu(0.0) == doctest::Approx(std::pow(kTwoPi, -0.25)).epsilon(1e-14));
    CHECK(equilibrium::mu_quarter(0.0) == doctest::Approx(std::pow(kTwoPi, -0.125)).epsilon(1e-14));
    CHECK(equilibrium::mu_sq(0.0) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
}

TEST_CASE("gaussian tails vanish at the box edge") {
    CHECK(equilibrium::mu(10.0) < 1e-22);
    CHECK(equilibrium::mu(-10.0) < 1e-22);
}

TEST_CASE("mu integrates to one") {
    const double mass = adaptive_simpson([](double v) { return equilibrium::mu(v); },
                                         -12.0, 12.0, 1e-13);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fourier closed forms against quadrature") {
    // conventions: hat f(xi) = int f(v) e^{-i v xi} dv, checked on the real part
    for (double xi : {0.0, 0.4, 1.3, 2.7}) {
        const double direct = adaptive_simpson(
            [xi](double v) { return equilibrium::sqrt_mu(v) * std::cos(v * xi); }, -20.0, 20.0,
            1e-13);
        CHECK(equilibrium::sqrt_mu_hat(xi) == doctest::Approx(direct).epsilon(1e-11));
        const double direct_mu = adaptive_simpson(
            [xi](double v) { return equilibrium::mu(v) * std::cos(v * xi); }, -20.0, 20.0, 1e-13);
        CHECK(equilibrium::mu_hat(xi) == doctest::Approx(direct_mu).epsilon(1e-11));
        const double direct_q = adaptive_simpson(
            [xi](double v) { return equilibrium::mu_quarter(v) * std::cos(v * xi); }, -24.0, 24.0,
            1e-13);
        CHECK(equilibrium::mu_quarter_hat(xi) == doctest::Approx(direct_q).epsilon(1e-11));
    }
}

TEST_CASE("sampled mu^2 matches the Hermite weight pointwise") {
    const GridSpec spec(8, 64, kPi, 10.0);
    const std::vector<double> m2 = sample_profile(ProfileKind::MuSq, spec);
    for (int l = 0; l < spec.Nv; ++l) {
        const double v = spec.v(l);
        CHECK(m2[l] == doctest::Approx(std::exp(-v * v) / kTwoPi).epsilon(1e-14));
    }
}

TEST_CASE("raw profile inner products") {
    const GridSpec spec(8, 256, kPi, 12.0);
    const std::vector<double> r = sample_profile(ProfileKind::SqrtMu, spec);
    // <sqrt(mu), v^2 sqrt(mu)> = int v^2 mu dv = 1 (unit temperature)
    double ip = 0.0;
    for (int l = 0; l < spec.Nv; ++l) {
        const double v = spec.v(l);
        ip += r[l] * (v * v * r[l]);
    }
    ip *= spec.hv();
    const double oracle = adaptive_simpson(
        [](double v) { return v * v * equilibrium::mu(v); }, -12.0, 12.0, 1e-13);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(ip == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("kernel basis is normalized, independent, with odd middle element") {
    // Lv = 12 puts the unpaired boundary node of the half-open grid at
    // sqrt(mu)(12) ~ 1e-16, below the 1e-12 oddness tolerance
    const GridSpec spec(8, 64, kPi, 12.0);
    const KernelBasis basis = kernel_basis(spec);
    const double h = spec.hv();
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int l = 0; l < spec.Nv; ++l) s += a[l] * b[l];
        return s * h;
    };
    CHECK(dot(basis.phi0, basis.phi0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dot(basis.phi1, basis.phi1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dot(basis.phi2, basis.phi2) == doctest::Approx(1.0).epsilon(1e-13));
    // v sqrt(mu) is odd: plain grid sum vanishes
    double sum1 = 0.0;
    for (double x : basis.phi1) sum1 += x;
    CHECK(std::abs(sum1 * h) <= 1e-12);
    // Gram matrix nonsingular (the odd element decouples; only phi0-phi2 mix)
    const double g02 = dot(basis.phi0, basis.phi2);
    const double det = 1.0 - g02 * g02;
    CHECK(std::abs(g02) < 1.0);
    CHECK(det > 0.1);
}
