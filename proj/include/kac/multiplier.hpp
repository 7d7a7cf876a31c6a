#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kac/quadrature.hpp"

namespace kac {

/// Parameters of the exponential weights: Psi_s(t,eta,xi), the bounded
/// Fourier multiplier M_delta and the velocity weight G_delta.
struct MultiplierParams {
    double s = 0.25;       // cross-section singularity exponent, in (0,1)
    double s_tilde = 0.25; // min(s, 1/2); always recomputed from s
    double c0 = 0.25;      // radius constant, > 0
    double delta = 1e-2;   // regularization, in (0,1)
    double r = 1.0;        // Sobolev index in x, > 1/2

    MultiplierParams() = default;
    MultiplierParams(double s_, double c0_, double delta_, double r_);

    MultiplierParams with_delta(double d) const;
};

/// angle bracket <x> = sqrt(1+x^2)
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

/// int_0^t (1 + (xi + rho eta)^2)^p d rho for p in (0, 1].
///
/// A single Gauss-Legendre rule keeps <= 1e-10 relative error only while the
/// swept range |t eta| stays moderate (the integrand's complex singularities
/// at distance 1 from the axis shrink the Bernstein ellipse as the interval
/// grows), so wide ranges go through the antiderivative of <w>^{2p}: GL on
/// |w| <= 2 plus a binomial tail series in w^{-2}.
double bracket_integral(double p, double t, double eta, double xi, int gl_order = 32);

/// Evaluator of Psi_s(t,eta,xi) = c0 * int_0^t <xi + rho eta>^{2 s~} d rho by
/// fixed-order Gauss-Legendre in rho (smooth integrand; order 32 gives
/// <= 1e-10 relative error, validated against the s~=1/2 closed form).
class PsiEvaluator {
public:
    explicit PsiEvaluator(const MultiplierParams& params, int rho_quadrature_order = 32);

    const MultiplierParams& params() const { return params_; }

    double psi(double t, double eta, double xi) const;
    /// M_delta = e^Psi / (1 + delta e^Psi), computed as 1/(delta + e^{-Psi})
    /// so that Psi beyond the overflow threshold saturates cleanly at 1/delta.
    double m_delta(double t, double eta, double xi) const;
    double m_delta_of_psi(double psi_value) const;
    /// G_delta(t,v) with exponent c0 t <v>^{2 s~}.
    double g_delta(double t, double v) const;

private:
    MultiplierParams params_;
    QuadratureRule rho_rule_; // on [-1,1], mapped per call
};

/// Closed form of int_0^t <xi + rho eta>^{2 s~} d rho at s~ = 1/2
/// (antiderivative of sqrt(1+z^2)); test oracle.
double psi_closed_form_half(double c0, double t, double eta, double xi);

struct CheckReport {
    std::string lemma;
    std::int64_t n_samples = 0;
    double sup_ratio = 0.0;
    double aux = 0.0; // second statistic where one is reported (e.g. c_low)
    bool pass = false;
    std::string detail;
};

/// (d_t - eta d_xi) Psi = c0 <xi>^{2 s~}, checked by Richardson-extrapolated
/// central differences on a sample set; sup_ratio holds the max relative
/// deviation.
CheckReport check_transport_identity(const PsiEvaluator& p, std::uint64_t seed,
                                     int n_samples, double tol = 1e-6);

struct UkaiBand {
    double c_low = 0.0;
    double c_high = 0.0;
};

/// Empirical band of int_0^t <xi + rho eta>^alpha drho / (t {1 + |xi|^alpha +
/// t^alpha |eta|^alpha}) over positive log-grids of (t, |xi|, |eta|) spanning
/// [range_lo, range_hi].
UkaiBand ukai_band(double alpha, double range_lo, double range_hi, int n_per_axis);

/// Band plus the 10x-widened band; pass iff c_low > 0 and both endpoints move
/// by less than rel_stability.
CheckReport check_ukai(double alpha, double range_lo = 1e-3, double range_hi = 1e3,
                       int n_per_axis = 24, double rel_stability = 0.05);

/// sup over samples of |d_xi M|/M and |d^2_xi M|/M (finite differences);
/// pass iff finite and stable across the delta sweep.
CheckReport check_mdelta_derivatives(const MultiplierParams& base, std::uint64_t seed,
                                     int n_samples, const std::vector<double>& deltas);

/// sup of |d_v G|/(<v>^{2s~-1} G) and |d^2_v G|/(<v>^{4s~-2} G).
CheckReport check_gdelta_derivatives(const MultiplierParams& base, std::uint64_t seed,
                                     int n_samples);

/// M_delta(t,eta,xi_tau) <= 9 M_delta(t,eta1,xi') max{M_delta(t,eta-eta1,+-u')}
/// e^{max(c0 t,1) <u>^{2s~}} over random (t,eta,eta1,xi,u,theta,tau).
CheckReport check_factorization_lemma(const MultiplierParams& base, std::uint64_t seed,
                                      int n_samples, double t_max);

/// 2^{s-1} <= (<v*>^{2s}+<v>^{2s}) / (<v*'>^{2s}+<v'>^{2s}) <= 2^{1-s} for the
/// collision rotation; at s=1 the ratio equals 1 to 1e-12.
CheckReport check_bd_lemma(double s, std::uint64_t seed, std::int64_t n_samples);

} // namespace kac
