#include "kac/collision.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <thread>

#include "kac/maxwellian.hpp"

namespace kac {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

// prefactor of the refined Bobylev formula for the u-weight e^{-u^2/(2 alpha)}
double bobylev_constant(double alpha) {
    return std::pow(kTwoPi, -0.5 * alpha) / std::sqrt(kTwoPi * alpha);
}

// Per-x slices are independent; each worker gets its own Transform because
// FFTW plans carry scratch buffers.  Plans are created serially (FFTW plan
// creation is not thread-safe), outputs land in disjoint slots.
void run_sliced(const GridSpec& spec, const Transform& tr, int n, int workers,
                const std::function<void(int, const Transform&)>& body) {
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i, tr);
        return;
    }
    const int nw = std::min(workers, n);
    std::vector<std::unique_ptr<Transform>> locals;
    locals.reserve(nw);
    for (int w = 0; w < nw; ++w) locals.emplace_back(new Transform(spec));
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += nw) body(i, *locals[w]);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

CrossSection::CrossSection(double s_, double C0_) : s(s_), C0(C0_) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("CrossSection: s must be in (0,1)");
    if (!(C0 > 0.0)) throw std::invalid_argument("CrossSection: C0 must be positive");
}

double CrossSection::beta(double theta) const {
    const double st = std::abs(std::sin(theta));
    return C0 * std::abs(std::cos(theta)) / std::pow(st, 1.0 + 2.0 * s);
}

CollisionQuadrature::CollisionQuadrature(const CollisionQuadratureConfig& cfg) : cfg_(cfg) {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw std::invalid_argument("CollisionQuadrature: eps out of range");
    if (cfg.hermite_order < 4) throw std::invalid_argument("CollisionQuadrature: hermite_order too small");
    int n_panels = cfg.panels;
    if (n_panels <= 0) {
        n_panels = static_cast<int>(std::ceil(std::log(0.5 * kPi / cfg.eps) / std::log(cfg.panel_ratio)));
        n_panels = std::max(n_panels, 2);
    }
    // geometric boundaries eps = b_0 < b_1 < ... < b_n = pi/2
    std::vector<double> bounds(n_panels + 1);
    const double grow = std::pow(0.5 * kPi / cfg.eps, 1.0 / n_panels);
    bounds[0] = cfg.eps;
    for (int j = 1; j <= n_panels; ++j) bounds[j] = bounds[j - 1] * grow;
    bounds[n_panels] = 0.5 * kPi;
    const QuadratureRule base = gauss_legendre(cfg.gl_per_panel);
    for (int j = 0; j < n_panels; ++j) {
        const double mid = 0.5 * (bounds[j] + bounds[j + 1]);
        const double half = 0.5 * (bounds[j + 1] - bounds[j]);
        for (std::size_t q = 0; q < base.size(); ++q) {
            theta_.push_back(mid + half * base.nodes[q]);
            wtheta_.push_back(half * base.weights[q]);
        }
    }
    hermite_ = gauss_hermite(cfg.hermite_order);
}

CollisionQuadrature CollisionQuadrature::refined() const {
    CollisionQuadratureConfig cfg = cfg_;
    cfg.eps *= 0.5;
    cfg.panels = static_cast<int>(theta_.size()) / cfg_.gl_per_panel * 2;
    cfg.hermite_order += cfg.hermite_order / 2;
    return CollisionQuadrature(cfg);
}

KacOperator::KacOperator(const GridSpec& spec, const CrossSection& cs,
                         const CollisionQuadrature& quad, double alpha)
    : spec_(spec), cs_(cs), alpha_(alpha) {
    if (!(alpha > 0.25)) throw std::invalid_argument("KacOperator: alpha must exceed 1/4");
    const int nv = spec.Nv;
    const double c_alpha = bobylev_constant(alpha);
    const double uscale = std::sqrt(2.0 * alpha); // e^{-u^2/(2a)} via Hermite substitution
    const auto& th = quad.theta_nodes();
    const auto& wth = quad.theta_weights();
    const auto& gh = quad.hermite();
    const int nth = static_cast<int>(th.size());
    const int nh = static_cast<int>(gh.size());
    const int rows = 2 * nth * nh;

    B_.assign(nv, Eigen::MatrixXd::Zero(nv, nv));
    Eigen::MatrixXd U(rows, nv), V(rows, nv);
    std::vector<double> su(nv), sx(nv);
    // loss vector: sum over (theta, u) of w * S_a(u); independent of the
    // output mode, subtracted from column m of B[m].
    Eigen::VectorXd loss = Eigen::VectorXd::Zero(nv);
    for (int k = 0; k < nth; ++k) {
        const double wb = 2.0 * wth[k] * cs_.beta(th[k]) * c_alpha; // both theta signs
        for (int h = 0; h < nh; ++h) {
            const double u = uscale * gh.nodes[h];
            const double w = wb * uscale * gh.weights[h];
            offgrid_weights_v(spec_, u, su.data());
            for (int a = 0; a < nv; ++a) loss[a] += w * su[a];
        }
    }

    for (int m = 0; m < nv; ++m) {
        const double xi = spec.xi(GridSpec::freq_index(m, nv));
        int row = 0;
        for (int k = 0; k < nth; ++k) {
            const double ct = std::cos(th[k]);
            const double st = std::sin(th[k]);
            const double wb = wth[k] * cs_.beta(th[k]) * c_alpha;
            for (int h = 0; h < nh; ++h) {
                const double u = uscale * gh.nodes[h];
                const double w = wb * uscale * gh.weights[h];
                const double sw = std::sqrt(w);
                // +theta
                offgrid_weights_v(spec_, xi * st + u * ct, su.data());
                offgrid_weights_v(spec_, xi * ct - u * st, sx.data());
                for (int a = 0; a < nv; ++a) U(row, a) = sw * su[a];
                for (int b = 0; b < nv; ++b) V(row, b) = sw * sx[b];
                ++row;
                // -theta
                offgrid_weights_v(spec_, -xi * st + u * ct, su.data());
                offgrid_weights_v(spec_, xi * ct + u * st, sx.data());
                for (int a = 0; a < nv; ++a) U(row, a) = sw * su[a];
                for (int b = 0; b < nv; ++b) V(row, b) = sw * sx[b];
                ++row;
            }
        }
        B_[m].noalias() = U.transpose() * V;
        B_[m].col(m) -= loss;
    }
}

std::vector<cplx> KacOperator::apply(const std::vector<cplx>& fhat,
                                     const std::vector<cplx>& ghat) const {
    const int nv = spec_.Nv;
    if (static_cast<int>(fhat.size()) != nv || static_cast<int>(ghat.size()) != nv)
        throw std::invalid_argument("KacOperator::apply: line length mismatch");
    Eigen::VectorXd fr(nv), fi(nv), gr(nv), gi(nv);
    for (int i = 0; i < nv; ++i) {
        fr[i] = fhat[i].real();
        fi[i] = fhat[i].imag();
        gr[i] = ghat[i].real();
        gi[i] = ghat[i].imag();
    }
    std::vector<cplx> out(nv);
    Eigen::VectorXd tr(nv), ti(nv);
    for (int m = 0; m < nv; ++m) {
        tr.noalias() = B_[m] * gr;
        ti.noalias() = B_[m] * gi;
        const double rr = fr.dot(tr) - fi.dot(ti);
        const double ii = fr.dot(ti) + fi.dot(tr);
        out[m] = cplx(rr, ii);
    }
    return out;
}

Eigen::MatrixXcd KacOperator::contract_f(const std::vector<cplx>& fhat) const {
    const int nv = spec_.Nv;
    Eigen::VectorXd fr(nv), fi(nv);
    for (int i = 0; i < nv; ++i) {
        fr[i] = fhat[i].real();
        fi[i] = fhat[i].imag();
    }
    Eigen::MatrixXcd K(nv, nv);
    for (int m = 0; m < nv; ++m) {
        const Eigen::VectorXd kr = B_[m].transpose() * fr;
        const Eigen::VectorXd ki = B_[m].transpose() * fi;
        for (int b = 0; b < nv; ++b) K(m, b) = cplx(kr[b], ki[b]);
    }
    return K;
}

Eigen::MatrixXd KacOperator::contract_f(const std::vector<double>& fhat_real) const {
    const int nv = spec_.Nv;
    Eigen::VectorXd f(nv);
    for (int i = 0; i < nv; ++i) f[i] = fhat_real[i];
    Eigen::MatrixXd K(nv, nv);
    for (int m = 0; m < nv; ++m) K.row(m) = (B_[m].transpose() * f).transpose();
    return K;
}

Eigen::MatrixXd KacOperator::contract_g(const std::vector<double>& ghat_real) const {
    const int nv = spec_.Nv;
    Eigen::VectorXd g(nv);
    for (int i = 0; i < nv; ++i) g[i] = ghat_real[i];
    Eigen::MatrixXd K(nv, nv);
    for (int m = 0; m < nv; ++m) K.row(m) = (B_[m] * g).transpose();
    return K;
}

LinearizedOperator::LinearizedOperator(const GridSpec& spec, const CrossSection& cs,
                                       const CollisionQuadrature& quad)
    : spec_(spec) {
    const KacOperator op(spec, cs, quad, 0.5);
    const int nv = spec.Nv;
    std::vector<double> mhat(nv);
    for (int c = 0; c < nv; ++c)
        mhat[c] = equilibrium::sqrt_mu_hat(spec.xi(GridSpec::freq_index(c, nv)));
    // L g = -K(sqrt_mu, g) - K(g, sqrt_mu)
    L_ = -(op.contract_f(mhat) + op.contract_g(mhat));
}

std::vector<cplx> LinearizedOperator::apply(const std::vector<cplx>& ghat) const {
    const int nv = spec_.Nv;
    if (static_cast<int>(ghat.size()) != nv)
        throw std::invalid_argument("LinearizedOperator::apply: line length mismatch");
    Eigen::VectorXd gr(nv), gi(nv);
    for (int i = 0; i < nv; ++i) {
        gr[i] = ghat[i].real();
        gi[i] = ghat[i].imag();
    }
    const Eigen::VectorXd yr = L_ * gr;
    const Eigen::VectorXd yi = L_ * gi;
    std::vector<cplx> out(nv);
    for (int i = 0; i < nv; ++i) out[i] = cplx(yr[i], yi[i]);
    return out;
}

double LinearizedOperator::spectral_radius_estimate(int iters) const {
    const int nv = spec_.Nv;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(nv);
    for (int i = 0; i < nv; ++i) x[i] += 0.01 * std::sin(3.7 * i);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd y = L_ * x;
        lambda = y.norm();
        if (lambda == 0.0) return 0.0;
        x = y / lambda;
    }
    return lambda;
}

namespace {

// physical-space direct quadrature of T(f,g,omega), omega(v*) given pointwise
std::vector<double> apply_oracle_weighted(const GridSpec& spec, const CrossSection& cs,
                                          const CollisionQuadrature& quad,
                                          const std::vector<double>& f,
                                          const std::vector<double>& g,
                                          const std::vector<double>& omega) {
    const int nv = spec.Nv;
    if (static_cast<int>(f.size()) != nv || static_cast<int>(g.size()) != nv)
        throw std::invalid_argument("apply_oracle: grid mismatch");
    // spectral lines for off-grid interpolation, by direct DFT (oracle path
    // stays independent of the FFT engine)
    std::vector<cplx> fhat(nv), ghat(nv);
    const double hv = spec.hv();
    for (int c = 0; c < nv; ++c) {
        const double xi = spec.xi(GridSpec::freq_index(c, nv));
        cplx af(0.0, 0.0), ag(0.0, 0.0);
        for (int l = 0; l < nv; ++l) {
            const double ph = -xi * spec.v(l);
            const cplx e(std::cos(ph), std::sin(ph));
            af += f[l] * e;
            ag += g[l] * e;
        }
        fhat[c] = hv * af;
        ghat[c] = hv * ag;
    }
    const auto& th = quad.theta_nodes();
    const auto& wth = quad.theta_weights();
    std::vector<double> out(nv, 0.0);
    for (int j = 0; j < nv; ++j) {
        const double v = spec.v(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < th.size(); ++k) {
            const double ct = std::cos(th[k]);
            const double st = std::sin(th[k]);
            const double wb = wth[k] * cs.beta(th[k]);
            double inner = 0.0;
            for (int l = 0; l < nv; ++l) {
                const double vs = spec.v(l);
                const double lossv = f[l] * g[j];
                // +theta
                double vp = v * ct - vs * st;
                double vsp = v * st + vs * ct;
                inner += omega[l] * (eval_physical_v(spec, fhat, vsp) * eval_physical_v(spec, ghat, vp) - lossv);
                // -theta
                vp = v * ct + vs * st;
                vsp = -v * st + vs * ct;
                inner += omega[l] * (eval_physical_v(spec, fhat, vsp) * eval_physical_v(spec, ghat, vp) - lossv);
            }
            acc += wb * inner * hv;
        }
        out[j] = acc;
    }
    return out;
}

} // namespace

std::vector<double> apply_K_oracle(const GridSpec& spec, const CrossSection& cs,
                                   const CollisionQuadrature& quad,
                                   const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> ones(spec.Nv, 1.0);
    return apply_oracle_weighted(spec, cs, quad, f, g, ones);
}

std::vector<double> apply_T_oracle(const GridSpec& spec, const CrossSection& cs,
                                   const CollisionQuadrature& quad, double alpha,
                                   const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> omega(spec.Nv);
    for (int l = 0; l < spec.Nv; ++l) omega[l] = equilibrium::mu_pow(alpha, spec.v(l));
    return apply_oracle_weighted(spec, cs, quad, f, g, omega);
}

PhaseField apply_calK_full(const Transform& tr, const KacOperator& op, const PhaseField& f,
                           const PhaseField& g, int workers) {
    const GridSpec& spec = tr.spec();
    if (!(f.spec() == spec) || !(g.spec() == spec))
        throw std::invalid_argument("apply_calK_full: grid mismatch");
    PhaseField out(spec);
    const int nv = spec.Nv;
    run_sliced(spec, tr, spec.Nx, workers, [&](int j, const Transform& t) {
        const std::vector<cplx> fhat = t.forward_v(&f.data()[static_cast<std::size_t>(j) * nv]);
        const std::vector<cplx> ghat = t.forward_v(&g.data()[static_cast<std::size_t>(j) * nv]);
        const std::vector<cplx> line = op.apply(fhat, ghat);
        const std::vector<cplx> phys = t.inverse_v(line);
        for (int l = 0; l < nv; ++l) out.at(j, l) = phys[l].real();
    });
    return out;
}

PhaseField apply_L_full(const Transform& tr, const LinearizedOperator& L, const PhaseField& g,
                        int workers) {
    const GridSpec& spec = tr.spec();
    if (!(g.spec() == spec)) throw std::invalid_argument("apply_L_full: grid mismatch");
    PhaseField out(spec);
    const int nv = spec.Nv;
    run_sliced(spec, tr, spec.Nx, workers, [&](int j, const Transform& t) {
        const std::vector<cplx> ghat = t.forward_v(&g.data()[static_cast<std::size_t>(j) * nv]);
        const std::vector<cplx> line = L.apply(ghat);
        const std::vector<cplx> phys = t.inverse_v(line);
        for (int l = 0; l < nv; ++l) out.at(j, l) = phys[l].real();
    });
    return out;
}

ConvergenceReport collision_convergence(const GridSpec& spec, const CrossSection& cs,
                                        const CollisionQuadrature& quad, double alpha,
                                        const std::vector<cplx>& fhat,
                                        const std::vector<cplx>& ghat, double tol) {
    const KacOperator op(spec, cs, quad, alpha);
    const KacOperator op_ref(spec, cs, quad.refined(), alpha);
    const std::vector<cplx> a = op.apply(fhat, ghat);
    const std::vector<cplx> b = op_ref.apply(fhat, ghat);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    ConvergenceReport rep;
    rep.op = alpha == 0.5 ? "calK" : "T";
    rep.eps = quad.config().eps;
    rep.delta_refine = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    rep.tol = tol;
    rep.pass = rep.delta_refine <= tol;
    return rep;
}

double grazing_band_norm(const GridSpec& spec, const CrossSection& cs, double alpha,
                         const std::vector<cplx>& fhat, const std::vector<cplx>& ghat,
                         double band_lo, double band_hi, bool one_sided, int hermite_order) {
    const int nv = spec.Nv;
    const double c_alpha = bobylev_constant(alpha);
    const double uscale = std::sqrt(2.0 * alpha);
    const QuadratureRule gh = gauss_hermite(hermite_order);
    const QuadratureRule gl = gauss_legendre(64, band_lo, band_hi);
    double acc = 0.0;
    for (int m = 0; m < nv; ++m) {
        const double xi = spec.xi(GridSpec::freq_index(m, nv));
        cplx val(0.0, 0.0);
        for (std::size_t k = 0; k < gl.size(); ++k) {
            const double ct = std::cos(gl.nodes[k]);
            const double st = std::sin(gl.nodes[k]);
            const double wb = gl.weights[k] * cs.beta(gl.nodes[k]) * c_alpha;
            for (std::size_t h = 0; h < gh.size(); ++h) {
                const double u = uscale * gh.nodes[h];
                const double w = wb * uscale * gh.weights[h];
                const cplx lossv = eval_offgrid_v(spec, fhat, u) * ghat[m];
                cplx gain = eval_offgrid_v(spec, fhat, xi * st + u * ct) *
                            eval_offgrid_v(spec, ghat, xi * ct - u * st);
                if (one_sided) {
                    val += w * (gain - lossv);
                } else {
                    gain += eval_offgrid_v(spec, fhat, -xi * st + u * ct) *
                            eval_offgrid_v(spec, ghat, xi * ct + u * st);
                    val += w * (gain - 2.0 * lossv);
                }
            }
        }
        acc += std::norm(val);
    }
    return std::sqrt(acc * spec.dxi() / kTwoPi);
}

} // namespace kac
