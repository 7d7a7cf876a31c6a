#include "kac/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kac/rng.hpp"

namespace kac {

MultiplierParams::MultiplierParams(double s_, double c0_, double delta_, double r_)
    : s(s_), s_tilde(std::min(s_, 0.5)), c0(c0_), delta(delta_), r(r_) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("MultiplierParams: s must be in (0,1)");
    if (!(c0 > 0.0)) throw std::invalid_argument("MultiplierParams: c0 must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("MultiplierParams: delta must be in (0,1)");
    if (!(r > 0.5)) throw std::invalid_argument("MultiplierParams: r must exceed 1/2");
}

MultiplierParams MultiplierParams::with_delta(double d) const {
    return MultiplierParams(s, c0, d, r);
}

namespace {

// antiderivative int_0^z (1+w^2)^p dw: GL on [0, min(|z|,2)] plus, beyond
// |w| = 2, the binomial expansion of w^{2p} (1 + w^{-2})^p integrated term
// by term (the exponent-zero term degenerates to a logarithm)
double bracket_antiderivative(double p, double z, const QuadratureRule& gl) {
    const double a = std::abs(z);
    const double cut = std::min(a, 2.0);
    double base = 0.0;
    const double half = 0.5 * cut;
    for (std::size_t q = 0; q < gl.size(); ++q) {
        const double w = half * (gl.nodes[q] + 1.0);
        base += gl.weights[q] * std::pow(1.0 + w * w, p);
    }
    base *= half;
    double tail = 0.0;
    if (a > 2.0) {
        double binom = 1.0;
        for (int k = 0; k < 60; ++k) {
            if (k > 0) binom *= (p - (k - 1)) / k;
            const double e = 2.0 * p - 2.0 * k + 1.0;
            double term;
            if (std::abs(e) < 1e-9) {
                term = binom * std::log(0.5 * a);
            } else {
                term = binom * (std::pow(a, e) - std::pow(2.0, e)) / e;
            }
            tail += term;
            if (k > 0 && std::abs(term) < 1e-17 * (std::abs(tail) + 1.0)) break;
        }
    }
    return std::copysign(base + tail, z);
}

} // namespace

double bracket_integral(double p, double t, double eta, double xi, int gl_order) {
    if (t < 0.0) throw std::invalid_argument("bracket_integral: t must be nonnegative");
    if (t == 0.0) return 0.0;
    static const QuadratureRule gl32 = gauss_legendre(32);
    const QuadratureRule* gl = &gl32;
    QuadratureRule local;
    if (gl_order != 32) {
        local = gauss_legendre(gl_order);
        gl = &local;
    }
    if (std::abs(eta) * t <= 0.5) {
        const double half = 0.5 * t;
        double acc = 0.0;
        for (std::size_t q = 0; q < gl->size(); ++q) {
            const double z = xi + half * (gl->nodes[q] + 1.0) * eta;
            acc += gl->weights[q] * std::pow(1.0 + z * z, p);
        }
        return half * acc;
    }
    return (bracket_antiderivative(p, xi + t * eta, *gl) - bracket_antiderivative(p, xi, *gl)) /
           eta;
}

PsiEvaluator::PsiEvaluator(const MultiplierParams& params, int rho_quadrature_order)
    : params_(params), rho_rule_(gauss_legendre(rho_quadrature_order)) {}

double PsiEvaluator::psi(double t, double eta, double xi) const {
    if (t < 0.0) throw std::invalid_argument("psi: t must be nonnegative");
    if (t == 0.0) return 0.0;
    return params_.c0 *
           bracket_integral(params_.s_tilde, t, eta, xi, static_cast<int>(rho_rule_.size()));
}

double PsiEvaluator::m_delta_of_psi(double psi_value) const {
    // e^Psi/(1+delta e^Psi) = 1/(delta + e^{-Psi}); e^{-Psi} underflows to 0
    // for large Psi, giving the exact saturation value 1/delta.
    return 1.0 / (params_.delta + std::exp(-psi_value));
}

double PsiEvaluator::m_delta(double t, double eta, double xi) const {
    return m_delta_of_psi(psi(t, eta, xi));
}

double PsiEvaluator::g_delta(double t, double v) const {
    if (t < 0.0) throw std::invalid_argument("g_delta: t must be nonnegative");
    const double e = params_.c0 * t * std::pow(1.0 + v * v, params_.s_tilde);
    return 1.0 / (params_.delta + std::exp(-e));
}

double psi_closed_form_half(double c0, double t, double eta, double xi) {
    // antiderivative of sqrt(1+z^2): (z sqrt(1+z^2) + asinh z)/2
    auto F = [](double z) { return 0.5 * (z * std::sqrt(1.0 + z * z) + std::asinh(z)); };
    if (eta == 0.0) return c0 * t * std::sqrt(1.0 + xi * xi);
    return c0 * (F(xi + t * eta) - F(xi)) / eta;
}

namespace {

// Richardson-extrapolated central difference, h chosen as eps^{1/3} * scale.
template <class F>
double deriv1(F&& f, double x, double scale) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(scale, 1.0);
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

template <class F>
double deriv2(F&& f, double x, double scale) {
    const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(scale, 1.0);
    const double fx = f(x);
    const double d1 = (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    const double d2 = (f(x + 0.5 * h) - 2.0 * fx + f(x - 0.5 * h)) / (0.25 * h * h);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

CheckReport check_transport_identity(const PsiEvaluator& p, std::uint64_t seed,
                                     int n_samples, double tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = rng.uniform(0.05, 2.0);
        const double eta = rng.uniform(-8.0, 8.0);
        const double xi = rng.uniform(-8.0, 8.0);
        const double dt = deriv1([&](double tt) { return p.psi(tt, eta, xi); }, t, t);
        const double dxi = deriv1([&](double xx) { return p.psi(t, eta, xx); }, xi,
                                  std::abs(xi) + 1.0);
        const double lhs = dt - eta * dxi;
        const double rhs = p.params().c0 * std::pow(1.0 + xi * xi, p.params().s_tilde);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    CheckReport rep;
    rep.lemma = "transport_identity";
    rep.n_samples = n_samples;
    rep.sup_ratio = worst;
    rep.pass = worst <= tol;
    return rep;
}

UkaiBand ukai_band(double alpha, double range_lo, double range_hi, int n_per_axis) {
    if (!(alpha > 0.0)) throw std::invalid_argument("ukai_band: alpha must be positive");
    if (!(range_lo > 0.0 && range_hi > range_lo))
        throw std::invalid_argument("ukai_band: degenerate sample range");
    const double lr = std::log(range_hi / range_lo);
    UkaiBand band{std::numeric_limits<double>::infinity(), 0.0};
    auto axis = [&](int i) {
        return range_lo * std::exp(lr * i / std::max(1, n_per_axis - 1));
    };
    for (int it = 0; it < n_per_axis; ++it) {
        const double t = axis(it);
        for (int ix = -1; ix < n_per_axis; ++ix) {
            const double xi = ix < 0 ? 0.0 : axis(ix);
            for (int ie = -1; ie < n_per_axis; ++ie) {
                const double eta = ie < 0 ? 0.0 : axis(ie);
                const double lhs = bracket_integral(0.5 * alpha, t, eta, xi);
                const double rhs = t * (1.0 + std::pow(xi, alpha) + std::pow(t * eta, alpha));
                const double ratio = lhs / rhs;
                band.c_low = std::min(band.c_low, ratio);
                band.c_high = std::max(band.c_high, ratio);
            }
        }
    }
    return band;
}

CheckReport check_ukai(double alpha, double range_lo, double range_hi, int n_per_axis,
                       double rel_stability) {
    const UkaiBand b = ukai_band(alpha, range_lo, range_hi, n_per_axis);
    const UkaiBand bw = ukai_band(alpha, range_lo / std::sqrt(10.0), range_hi * std::sqrt(10.0),
                                  n_per_axis + n_per_axis / 3);
    CheckReport rep;
    rep.lemma = "ukai";
    rep.n_samples = static_cast<std::int64_t>(n_per_axis) * (n_per_axis + 1) * (n_per_axis + 1);
    rep.sup_ratio = b.c_high;
    rep.aux = b.c_low;
    const double drift_lo = std::abs(bw.c_low - b.c_low) / b.c_low;
    const double drift_hi = std::abs(bw.c_high - b.c_high) / b.c_high;
    rep.pass = b.c_low > 0.0 && std::isfinite(b.c_high) && drift_lo < rel_stability &&
               drift_hi < rel_stability;
    rep.detail = "c_low=" + std::to_string(b.c_low) + " c_high=" + std::to_string(b.c_high) +
                 " drift_lo=" + std::to_string(drift_lo) + " drift_hi=" + std::to_string(drift_hi);
    return rep;
}

CheckReport check_mdelta_derivatives(const MultiplierParams& base, std::uint64_t seed,
                                     int n_samples, const std::vector<double>& deltas) {
    CheckReport rep;
    rep.lemma = "mdelta_derivatives";
    rep.n_samples = n_samples;
    double overall = 0.0;
    std::vector<double> per_delta;
    for (double d : deltas) {
        const PsiEvaluator p(base.with_delta(d));
        Rng rng(seed);
        double sup1 = 0.0, sup2 = 0.0;
        for (int i = 0; i < n_samples; ++i) {
            const double t = rng.uniform(0.0, 1.0);
            const double eta = rng.uniform(-8.0, 8.0);
            const double xi = rng.uniform(-10.0, 10.0);
            const double m = p.m_delta(t, eta, xi);
            auto f = [&](double xx) { return p.m_delta(t, eta, xx); };
            const double scale = std::abs(xi) + 1.0;
            sup1 = std::max(sup1, std::abs(deriv1(f, xi, scale)) / m);
            sup2 = std::max(sup2, std::abs(deriv2(f, xi, scale)) / m);
        }
        per_delta.push_back(std::max(sup1, sup2));
        overall = std::max(overall, std::max(sup1, sup2));
    }
    // The Lemma's constant is delta-uniform; the realized sup ratio grows
    // monotonically as delta -> 0 and converges.  Stability: nonincreasing in
    // delta plus <10% agreement between the two smallest deltas (the largest
    // delta keeps an O(delta e^Psi) offset by construction).
    std::vector<std::size_t> order(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return deltas[a] > deltas[b]; });
    bool monotone = true;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (per_delta[order[i]] < per_delta[order[i - 1]] * (1.0 - 1e-9)) monotone = false;
    double tail_spread = 0.0;
    if (order.size() >= 2) {
        const double a = per_delta[order[order.size() - 1]];
        const double b = per_delta[order[order.size() - 2]];
        tail_spread = a > 0.0 ? std::abs(a - b) / a : 0.0;
    }
    rep.sup_ratio = overall;
    rep.aux = tail_spread;
    rep.pass = std::isfinite(overall) && monotone && tail_spread < 0.10;
    return rep;
}

CheckReport check_gdelta_derivatives(const MultiplierParams& base, std::uint64_t seed,
                                     int n_samples) {
    const PsiEvaluator p(base);
    Rng rng(seed);
    const double st = base.s_tilde;
    double sup1 = 0.0, sup2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        const double v = rng.uniform(-20.0, 20.0);
        const double g = p.g_delta(t, v);
        auto f = [&](double vv) { return p.g_delta(t, vv); };
        const double scale = std::abs(v) + 1.0;
        const double w1 = std::pow(1.0 + v * v, st - 0.5);       // <v>^{2s~-1}
        const double w2 = std::pow(1.0 + v * v, 2.0 * st - 1.0); // <v>^{4s~-2}
        sup1 = std::max(sup1, std::abs(deriv1(f, v, scale)) / (w1 * g));
        sup2 = std::max(sup2, std::abs(deriv2(f, v, scale)) / (w2 * g));
    }
    CheckReport rep;
    rep.lemma = "gdelta_derivatives";
    rep.n_samples = n_samples;
    rep.sup_ratio = std::max(sup1, sup2);
    rep.pass = std::isfinite(rep.sup_ratio);
    rep.detail = "sup1=" + std::to_string(sup1) + " sup2=" + std::to_string(sup2);
    return rep;
}

CheckReport check_factorization_lemma(const MultiplierParams& base, std::uint64_t seed,
                                      int n_samples, double t_max) {
    const PsiEvaluator p(base);
    Rng rng(seed);
    double sup = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = rng.uniform(0.0, t_max);
        const double eta = rng.uniform(-6.0, 6.0);
        const double eta1 = rng.uniform(-6.0, 6.0);
        const double xi = rng.uniform(-10.0, 10.0);
        const double u = rng.uniform(-6.0, 6.0);
        const double theta = rng.uniform(-1.5707963267948966, 1.5707963267948966);
        const double tau = rng.uniform();
        const double xi_p = xi * std::cos(theta) - u * std::sin(theta);
        const double u_p = xi * std::sin(theta) + u * std::cos(theta);
        const double xi_tau = xi_p - tau * (xi_p - xi);
        const double lhs = p.m_delta(t, eta, xi_tau);
        const double guard =
            std::exp(std::max(base.c0 * t, 1.0) * std::pow(1.0 + u * u, base.s_tilde));
        const double rhs = p.m_delta(t, eta1, xi_p) *
                           std::max(p.m_delta(t, eta - eta1, u_p), p.m_delta(t, eta - eta1, -u_p)) *
                           guard;
        sup = std::max(sup, lhs / rhs);
    }
    CheckReport rep;
    rep.lemma = "factorization";
    rep.n_samples = n_samples;
    rep.sup_ratio = sup;
    rep.pass = sup <= 9.0;
    return rep;
}

CheckReport check_bd_lemma(double s, std::uint64_t seed, std::int64_t n_samples) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("check_bd_lemma: s must be in (0,1]");
    Rng rng(seed);
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double v = rng.uniform(-30.0, 30.0);
        const double vs = rng.uniform(-30.0, 30.0);
        const double theta = rng.uniform(0.0, 6.283185307179586);
        const double vp = v * std::cos(theta) - vs * std::sin(theta);
        const double vsp = v * std::sin(theta) + vs * std::cos(theta);
        const double num = std::pow(1.0 + vs * vs, s) + std::pow(1.0 + v * v, s);
        const double den = std::pow(1.0 + vsp * vsp, s) + std::pow(1.0 + vp * vp, s);
        const double ratio = num / den;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    CheckReport rep;
    rep.lemma = "bd";
    rep.n_samples = n_samples;
    rep.sup_ratio = rmax;
    rep.aux = rmin;
    const double lo = std::pow(2.0, s - 1.0), hi = std::pow(2.0, 1.0 - s);
    if (s == 1.0) {
        rep.pass = std::max(std::abs(rmax - 1.0), std::abs(rmin - 1.0)) <= 1e-12;
    } else {
        rep.pass = rmin >= lo && rmax <= hi;
    }
    rep.detail = "min=" + std::to_string(rmin) + " max=" + std::to_string(rmax);
    return rep;
}

} // namespace kac
