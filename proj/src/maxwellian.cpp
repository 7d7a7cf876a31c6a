#include "kac/maxwellian.hpp"

#include <cmath>
#include <stdexcept>

namespace kac {

namespace equilibrium {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
} // namespace

double mu(double v) { return std::exp(-0.5 * v * v) / std::sqrt(kTwoPi); }

double sqrt_mu(double v) { return std::exp(-0.25 * v * v) / std::pow(kTwoPi, 0.25); }

double mu_quarter(double v) { return std::exp(-0.125 * v * v) / std::pow(kTwoPi, 0.125); }

double mu_sq(double v) { return std::exp(-v * v) / kTwoPi; }

double mu_pow(double alpha, double v) {
    return std::pow(kTwoPi, -0.5 * alpha) * std::exp(-0.5 * alpha * v * v);
}

double mu_hat(double xi) { return std::exp(-0.5 * xi * xi); }

double sqrt_mu_hat(double xi) {
    static const double c = std::pow(2.0, 0.75) * std::pow(kPi, 0.25);
    return c * std::exp(-xi * xi);
}

double mu_quarter_hat(double xi) {
    static const double c = std::pow(kTwoPi, -0.125) * std::sqrt(8.0 * kPi);
    return c * std::exp(-2.0 * xi * xi);
}

double mu_sq_hat(double xi) {
    static const double c = std::sqrt(kPi) / kTwoPi;
    return c * std::exp(-0.25 * xi * xi);
}

} // namespace equilibrium

std::vector<double> sample_profile(ProfileKind which, const GridSpec& spec) {
    std::vector<double> out(spec.Nv);
    for (int l = 0; l < spec.Nv; ++l) {
        const double v = spec.v(l);
        switch (which) {
            case ProfileKind::Mu: out[l] = equilibrium::mu(v); break;
            case ProfileKind::SqrtMu: out[l] = equilibrium::sqrt_mu(v); break;
            case ProfileKind::MuSq: out[l] = equilibrium::mu_sq(v); break;
            case ProfileKind::MuQuarter: out[l] = equilibrium::mu_quarter(v); break;
        }
    }
    return out;
}

KernelBasis kernel_basis(const GridSpec& spec) {
    KernelBasis basis;
    basis.spec = spec;
    basis.phi0.resize(spec.Nv);
    basis.phi1.resize(spec.Nv);
    basis.phi2.resize(spec.Nv);
    for (int l = 0; l < spec.Nv; ++l) {
        const double v = spec.v(l);
        const double r = equilibrium::sqrt_mu(v);
        basis.phi0[l] = r;
        basis.phi1[l] = v * r;
        basis.phi2[l] = v * v * r;
    }
    const double h = spec.hv();
    auto normalize = [h](std::vector<double>& f) {
        double s = 0.0;
        for (double x : f) s += x * x;
        s = std::sqrt(s * h);
        if (s == 0.0) throw std::runtime_error("kernel_basis: zero function");
        for (double& x : f) x /= s;
    };
    normalize(basis.phi0);
    normalize(basis.phi1);
    normalize(basis.phi2);
    return basis;
}

} // namespace kac
