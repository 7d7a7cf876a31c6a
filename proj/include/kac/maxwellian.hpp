#pragma once

#include <vector>

#include "kac/grid.hpp"

namespace kac {

/// Closed forms for the Maxwellian equilibrium mu(v) = (2 pi)^{-1/2} e^{-v^2/2},
/// its roots and powers, and their continuous Fourier transforms under the
/// kernel e^{-i v xi}.
namespace equilibrium {

double mu(double v);
double sqrt_mu(double v);
double mu_quarter(double v);
double mu_sq(double v);
/// mu^alpha(v) = (2 pi)^{-alpha/2} e^{-alpha v^2/2}
double mu_pow(double alpha, double v);

/// hat{mu}(xi) = e^{-xi^2/2}
double mu_hat(double xi);
/// hat{mu^{1/2}}(xi) = 2^{3/4} pi^{1/4} e^{-xi^2}
double sqrt_mu_hat(double xi);
/// hat{mu^{1/4}}(xi) = (2 pi)^{-1/8} sqrt(8 pi) e^{-2 xi^2}
double mu_quarter_hat(double xi);
/// hat{mu^2}(xi) = sqrt(pi)/(2 pi) e^{-xi^2/4}
double mu_sq_hat(double xi);

} // namespace equilibrium

enum class ProfileKind { Mu, SqrtMu, MuSq, MuQuarter };

/// Pointwise closed-form samples of the selected profile on the v-grid.
std::vector<double> sample_profile(ProfileKind which, const GridSpec& spec);

/// The kernel N = span{sqrt(mu), v sqrt(mu), |v|^2 sqrt(mu)} of the linearized
/// operator, sampled on the v-grid and L2-normalized.
struct KernelBasis {
    GridSpec spec;
    std::vector<double> phi0; // sqrt(mu), normalized
    std::vector<double> phi1; // v sqrt(mu), normalized
    std::vector<double> phi2; // v^2 sqrt(mu), normalized
};

KernelBasis kernel_basis(const GridSpec& spec);

} // namespace kac
