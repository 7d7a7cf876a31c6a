#include <cmath>

#include "doctest.h"

#include "kac/quadrature.hpp"
#include "kac/rng.hpp"

using namespace kac;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const QuadratureRule gl = gauss_legendre(8, 0.0, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
        const double x = gl.nodes[i];
        acc += gl.weights[i] * (x * x * x * x * x * x * x); // x^7
    }
    CHECK(acc == doctest::Approx(std::pow(2.0, 8) / 8.0).epsilon(1e-13));
}

TEST_CASE("gauss-legendre high order vs smooth integral") {
    const QuadratureRule gl = gauss_legendre(32, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) acc += gl.weights[i] * std::exp(gl.nodes[i]);
    CHECK(acc == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("gauss-hermite moments of exp(-u^2)") {
    const QuadratureRule gh = gauss_hermite(40);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
        const double u = gh.nodes[i];
        m0 += gh.weights[i];
        m2 += gh.weights[i] * u * u;
        m4 += gh.weights[i] * u * u * u * u;
    }
    const double sp = std::sqrt(3.14159265358979323846);
    CHECK(m0 == doctest::Approx(sp).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(0.5 * sp).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(0.75 * sp).epsilon(1e-13));
}

TEST_CASE("gauss-hermite nodes are symmetric") {
    const QuadratureRule gh = gauss_hermite(33);
    const int n = static_cast<int>(gh.size());
    for (int i = 0; i < n; ++i) {
        CHECK(gh.nodes[i] == doctest::Approx(-gh.nodes[n - 1 - i]).epsilon(1e-14));
        CHECK(gh.weights[i] == doctest::Approx(gh.weights[n - 1 - i]).epsilon(1e-13));
    }
}

TEST_CASE("adaptive simpson on a gaussian") {
    const double val = adaptive_simpson([](double x) { return std::exp(-0.5 * x * x); },
                                        -10.0, 10.0, 1e-12);
    CHECK(val == doctest::Approx(std::sqrt(2.0 * 3.14159265358979323846)).epsilon(1e-11));
}

TEST_CASE("rng determinism") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42);
    double mean = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) mean += c.normal();
    mean /= n;
    CHECK(std::abs(mean) < 0.03);
}
