#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "doctest.h"

#include "kac/grid.hpp"
#include "kac/rng.hpp"

using namespace kac;

namespace {

constexpr double kPi = 3.14159265358979323846;

PhaseField random_field(const GridSpec& spec, std::uint64_t seed) {
    PhaseField f(spec);
    Rng rng(seed);
    for (double& x : f.data()) x = rng.normal();
    return f;
}

// O(N^2) direct DFT oracle matching the documented convention
SpectralField direct_dft(const PhaseField& f) {
    const GridSpec& spec = f.spec();
    SpectralField out(spec);
    for (int r = 0; r < spec.Nx; ++r) {
        const double eta = spec.eta(GridSpec::freq_index(r, spec.Nx));
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            cplx acc(0.0, 0.0);
            for (int j = 0; j < spec.Nx; ++j)
                for (int l = 0; l < spec.Nv; ++l) {
                    const double ph = -(spec.x(j) * eta + spec.v(l) * xi);
                    acc += f.at(j, l) * cplx(std::cos(ph), std::sin(ph));
                }
            out.at(r, c) = acc * (spec.hx() * spec.hv());
        }
    }
    return out;
}

} // namespace

TEST_CASE("grid spec validation") {
    CHECK_THROWS(GridSpec(7, 64, kPi, 10.0));
    CHECK_THROWS(GridSpec(32, 48, kPi, 10.0));
    CHECK_THROWS(GridSpec(32, 64, kPi, 4.0));
    CHECK_NOTHROW(GridSpec(8, 8, kPi, 8.0));
}

TEST_CASE("forward of constant field concentrates at zero mode") {
    const GridSpec spec(16, 16, kPi, 10.0);
    const Transform tr(spec);
    const PhaseField one(spec, 1.0);
    const SpectralField sf = tr.forward(one);
    // DC value = box measure under the continuous-FT scaling
    CHECK(sf.at_freq(0, 0).real() == doctest::Approx(4.0 * spec.Lx * spec.Lv).epsilon(1e-13));
    for (int r = 0; r < spec.Nx; ++r)
        for (int c = 0; c < spec.Nv; ++c) {
            if (r == 0 && c == 0) continue;
            CHECK(std::abs(sf.at(r, c)) <= 1e-13 * std::abs(sf.at_freq(0, 0)));
        }
}

TEST_CASE("single cosine mode lands on two symmetric modes") {
    const GridSpec spec(16, 16, kPi, 10.0);
    const Transform tr(spec);
    PhaseField f(spec);
    for (int j = 0; j < spec.Nx; ++j)
        for (int l = 0; l < spec.Nv; ++l) f.at(j, l) = std::cos(kPi * spec.x(j) / spec.Lx);
    const SpectralField sf = tr.forward(f);
    const double expected = 2.0 * spec.Lx * spec.Lv; // half the box measure per mode
    CHECK(sf.at_freq(1, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sf.at_freq(-1, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    double rest = 0.0;
    for (int r = 0; r < spec.Nx; ++r)
        for (int c = 0; c < spec.Nv; ++c) {
            if (c == 0 && (r == 1 || r == spec.Nx - 1)) continue;
            rest = std::max(rest, std::abs(sf.at(r, c)));
        }
    CHECK(rest <= 1e-12 * expected);
}

TEST_CASE("forward matches the direct DFT oracle and Plancherel holds") {
    const GridSpec spec(8, 8, kPi, 8.0);
    const Transform tr(spec);
    const PhaseField f = random_field(spec, 7);
    const SpectralField fast = tr.forward(f);
    const SpectralField slow = direct_dft(f);
    for (int r = 0; r < spec.Nx; ++r)
        for (int c = 0; c < spec.Nv; ++c)
            CHECK(std::abs(fast.at(r, c) - slow.at(r, c)) <= 1e-11 * (1.0 + std::abs(slow.at(r, c))));
    CHECK(fast.l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-12));
}

TEST_CASE("plancherel and round trip across grid sizes") {
    for (int n : {8, 16, 32, 64, 128, 256}) {
        const GridSpec spec(n, n, kPi, 10.0);
        const Transform tr(spec);
        const PhaseField f = random_field(spec, 1000 + n);
        const SpectralField sf = tr.forward(f);
        CHECK(sf.l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-12));
        const PhaseField back = tr.inverse(sf);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < f.data().size(); ++i) {
            err += (back.data()[i] - f.data()[i]) * (back.data()[i] - f.data()[i]);
            scale += f.data()[i] * f.data()[i];
        }
        CHECK(std::sqrt(err / scale) <= 1e-12);
    }
}

TEST_CASE("inverse of a unit DC coefficient is a constant field") {
    const GridSpec spec(16, 16, kPi, 10.0);
    const Transform tr(spec);
    SpectralField sf(spec);
    sf.at(0, 0) = cplx(1.0, 0.0);
    const PhaseField f = tr.inverse(sf);
    const double expected = 1.0 / (4.0 * spec.Lx * spec.Lv);
    for (double v : f.data()) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("conjugate-symmetric coefficients invert to a real field") {
    const GridSpec spec(16, 32, kPi, 10.0);
    const Transform tr(spec);
    const PhaseField f = random_field(spec, 11);
    const SpectralField sf = tr.forward(f);
    // symmetry check on representative pairs
    for (int k = 1; k < spec.Nx / 2; k += 3)
        for (int m = 1; m < spec.Nv / 2; m += 5) {
            const cplx a = sf.at_freq(k, m);
            const cplx b = sf.at_freq(-k, -m);
            CHECK(std::abs(a - std::conj(b)) <= 1e-10 * (1.0 + std::abs(a)));
        }
    const PhaseField back = tr.inverse(sf);
    (void)back; // inverse() returns the real part; reality is its construction
}

TEST_CASE("forward rejects non-finite input") {
    const GridSpec spec(8, 8, kPi, 10.0);
    const Transform tr(spec);
    PhaseField f(spec);
    f.at(3, 4) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(tr.forward(f));
}

TEST_CASE("off-grid evaluation: on-grid points return stored coefficients") {
    const GridSpec spec(8, 32, kPi, 10.0);
    const Transform tr(spec);
    const PhaseField f = random_field(spec, 5);
    const SpectralField sf = tr.forward(f);
    std::vector<cplx> line(spec.Nv);
    for (int c = 0; c < spec.Nv; ++c) line[c] = sf.at(2, c);
    for (int m = -spec.Nv / 2; m < spec.Nv / 2; ++m) {
        const cplx v = eval_offgrid_v(spec, line, spec.xi(m));
        const cplx expect = sf.at_freq(2, m);
        CHECK(std::abs(v - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("off-grid evaluation matches the Gaussian closed form") {
    // e^{-v^2/4} has continuous transform sqrt(4 pi) e^{-xi^2}
    const GridSpec spec(8, 128, kPi, 10.0);
    const Transform tr(spec);
    PhaseField f(spec);
    for (int j = 0; j < spec.Nx; ++j)
        for (int l = 0; l < spec.Nv; ++l) f.at(j, l) = std::exp(-0.25 * spec.v(l) * spec.v(l));
    const SpectralField sf = tr.forward(f);
    std::vector<cplx> line(spec.Nv);
    for (int c = 0; c < spec.Nv; ++c) line[c] = sf.at(0, c) / (2.0 * spec.Lx); // strip the x-DC box factor
    Rng rng(3);
    for (int q = 0; q < 40; ++q) {
        const double xs = rng.uniform(-3.0, 3.0);
        const cplx v = eval_offgrid_v(spec, line, xs);
        const double expect = std::sqrt(4.0 * kPi) * std::exp(-xs * xs);
        CHECK(std::abs(v - expect) <= 1e-8);
    }
}

TEST_CASE("off-grid evaluation is linear and matches an upsampled quadrature") {
    const GridSpec spec(8, 64, kPi, 10.0);
    const Transform tr(spec);
    const PhaseField fa = random_field(spec, 21);
    const PhaseField fb = random_field(spec, 22);
    std::vector<cplx> la(spec.Nv), lb(spec.Nv), lc(spec.Nv);
    const SpectralField sa = tr.forward(fa), sb = tr.forward(fb);
    for (int c = 0; c < spec.Nv; ++c) {
        la[c] = sa.at(1, c);
        lb[c] = sb.at(1, c);
        lc[c] = 2.0 * la[c] - 0.5 * lb[c];
    }
    Rng rng(9);
    for (int q = 0; q < 20; ++q) {
        const double xs = rng.uniform(-8.0, 8.0);
        const cplx v = eval_offgrid_v(spec, lc, xs);
        const cplx w = 2.0 * eval_offgrid_v(spec, la, xs) - 0.5 * eval_offgrid_v(spec, lb, xs);
        CHECK(std::abs(v - w) <= 1e-12 * (1.0 + std::abs(w)));
    }

    // independent route: dense physical sampling of the interpolant plus
    // trapezoid quadrature of its windowed transform.  Uses a smooth real
    // profile (eta = 0 line) so the interpolant reconstruction applies.
    PhaseField smooth(spec);
    for (int j = 0; j < spec.Nx; ++j)
        for (int l = 0; l < spec.Nv; ++l) {
            const double v = spec.v(l);
            smooth.at(j, l) = std::exp(-0.3 * v * v) * (1.0 + 0.5 * std::sin(1.7 * v));
        }
    const SpectralField ss = tr.forward(smooth);
    std::vector<cplx> ls(spec.Nv);
    for (int c = 0; c < spec.Nv; ++c) ls[c] = ss.at(0, c) / (2.0 * spec.Lx);
    const int up = 1 << 15;
    const double h = 2.0 * spec.Lv / up;
    Rng rng2(10);
    for (int q = 0; q < 4; ++q) {
        const double xs = rng2.uniform(-4.0, 4.0);
        cplx acc(0.0, 0.0);
        for (int i = 0; i <= up; ++i) {
            const double v = -spec.Lv + i * h;
            const double w = (i == 0 || i == up) ? 0.5 : 1.0;
            const double pv = eval_physical_v(spec, ls, v);
            const double ph = -v * xs;
            acc += w * pv * cplx(std::cos(ph), std::sin(ph));
        }
        acc *= h;
        const cplx direct = eval_offgrid_v(spec, ls, xs);
        CHECK(std::abs(acc - direct) <= 1e-7 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("eval_offgrid agrees with direct summation for random lines") {
    const GridSpec spec(8, 32, kPi, 10.0);
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<cplx> line(spec.Nv);
        for (auto& z : line) z = cplx(rng.normal(), rng.normal());
        const double xs = rng.uniform(-12.0, 12.0);
        // direct summation with explicit sinc weights
        cplx acc(0.0, 0.0);
        for (int c = 0; c < spec.Nv; ++c) {
            const double d = (spec.xi(GridSpec::freq_index(c, spec.Nv)) - xs) * spec.Lv;
            acc += line[c] * sinc(d);
        }
        const cplx v = eval_offgrid_v(spec, line, xs);
        CHECK(std::abs(v - acc) <= 1e-12 * (1.0 + std::abs(acc)));
    }
}

TEST_CASE("KACFIELD round trip") {
    const GridSpec spec(16, 32, kPi, 10.0);
    const PhaseField f = random_field(spec, 123);
    const std::string path = "test_field.kacfield";
    write_field(path, f, 0.375);
    double t = 0.0;
    const PhaseField g = read_field(path, &t);
    CHECK(t == 0.375);
    CHECK(g.spec() == spec);
    for (std::size_t i = 0; i < f.data().size(); ++i) CHECK(g.data()[i] == f.data()[i]);
    // header starts with the 24-byte magic
    FILE* fp = std::fopen(path.c_str(), "rb");
    char magic[24];
    REQUIRE(std::fread(magic, 1, 24, fp) == 24);
    std::fclose(fp);
    CHECK(std::string(magic, 11) == "KACFIELD-v1");
    CHECK(magic[23] == '\n');
    std::remove(path.c_str());
}
