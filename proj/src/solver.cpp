#include "kac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kac {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

double dual_measure(const GridSpec& spec) {
    return spec.deta() * spec.dxi() / (kTwoPi * kTwoPi);
}

} // namespace

SpectralField solve_kolmogorov_exact_hat(const Transform& tr, const SpectralField& f0_hat,
                                         double s, double t) {
    if (t < 0.0) throw std::invalid_argument("solve_kolmogorov_exact: t must be nonnegative");
    const GridSpec& spec = tr.spec();
    SpectralField out(spec);
    std::vector<cplx> line(spec.Nv);
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        for (int c = 0; c < spec.Nv; ++c) line[c] = f0_hat.at(row, c);
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            const double integral = bracket_integral(s, t, eta, xi);
            const cplx shifted = (t == 0.0 || eta == 0.0)
                                     ? line[c]
                                     : eval_offgrid_v(spec, line, xi + t * eta);
            out.at(row, c) = std::exp(-integral) * shifted;
        }
    }
    return out;
}

PhaseField solve_kolmogorov_exact(const Transform& tr, const PhaseField& f0, double s, double t) {
    return tr.inverse(solve_kolmogorov_exact_hat(tr, tr.forward(f0), s, t));
}

PhaseField mollify_initial(const Transform& tr, const PhaseField& g0, double t_moll) {
    if (t_moll < 0.0) throw std::invalid_argument("mollify_initial: t_moll must be nonnegative");
    const GridSpec& spec = tr.spec();
    SpectralField ghat = tr.forward(g0);
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            ghat.at(row, c) *= std::exp(-t_moll * (1.0 + eta * eta + xi * xi));
        }
    }
    return tr.inverse(ghat);
}

PhaseField step_transport(const Transform& tr, const PhaseField& g, double dt) {
    const GridSpec& spec = g.spec();
    std::vector<cplx> mixed = tr.forward_x(g);
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        for (int l = 0; l < spec.Nv; ++l) {
            const double ph = -eta * spec.v(l) * dt;
            mixed[static_cast<std::size_t>(row) * spec.Nv + l] *= cplx(std::cos(ph), std::sin(ph));
        }
    }
    return tr.inverse_x(mixed);
}

KacSolver::KacSolver(const SolverConfig& cfg) : cfg_(cfg) {
    if (cfg.mult.s != cfg.cs.s)
        throw std::invalid_argument("KacSolver: multiplier s must match the cross-section s");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("KacSolver: T must be positive");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("KacSolver: dt must be positive");
    if (!(cfg.picard_tol > 0.0)) throw std::invalid_argument("KacSolver: picard_tol must be positive");
    tr_.reset(new Transform(cfg.grid));
    const CollisionQuadrature quad(cfg.quad);
    op_.reset(new KacOperator(cfg.grid, cfg.cs, quad, 0.5));
    lin_.reset(new LinearizedOperator(cfg.grid, cfg.cs, quad));
    tn_.reset(new TripleNorm(cfg.grid, cfg.cs, quad));
    Lc_ = lin_->matrix().cast<cplx>();
}

double KacSolver::stability_margin() const {
    return cfg_.dt * lin_->spectral_radius_estimate();
}

namespace {

using LineVec = Eigen::VectorXcd;

LineVec to_eigen(const std::vector<cplx>& v) {
    LineVec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::vector<cplx> from_eigen(const LineVec& v) {
    std::vector<cplx> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v[i];
    return out;
}

} // namespace

PhaseField KacSolver::step_collision_linear(const PhaseField& g, const PhaseField* gn_frozen,
                                            double dt) const {
    const GridSpec& spec = cfg_.grid;
    const int nv = spec.Nv;
    PhaseField out(spec);
    for (int j = 0; j < spec.Nx; ++j) {
        LineVec y = to_eigen(tr_->forward_v(&g.data()[static_cast<std::size_t>(j) * nv]));
        Eigen::MatrixXcd Kf;
        bool nonlinear = gn_frozen == nullptr;
        if (!nonlinear) {
            Kf = op_->contract_f(tr_->forward_v(&gn_frozen->data()[static_cast<std::size_t>(j) * nv]));
        }
        auto rhs = [&](const LineVec& u) -> LineVec {
            LineVec r = -(Lc_ * u);
            if (nonlinear) {
                const std::vector<cplx> uu = from_eigen(u);
                r += to_eigen(op_->apply(uu, uu));
            } else {
                r += Kf * u;
            }
            return r;
        };
        const LineVec k1 = rhs(y);
        const LineVec k2 = rhs(y + 0.5 * dt * k1);
        const LineVec k3 = rhs(y + 0.5 * dt * k2);
        const LineVec k4 = rhs(y + dt * k3);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const std::vector<cplx> phys = tr_->inverse_v(from_eigen(y));
        for (int l = 0; l < nv; ++l) out.at(j, l) = phys[l].real();
    }
    if (!out.finite()) throw NumericalError("step_collision_linear: non-finite state");
    return out;
}

PhaseField KacSolver::strang_step(const PhaseField& g, double t, double dt,
                                  const Trajectory* frozen, bool nonlinear) const {
    const GridSpec& spec = cfg_.grid;
    const int nv = spec.Nv;
    PhaseField cur = step_transport(*tr_, g, 0.5 * dt);

    // frozen slices at the bracketing snapshot times, linear in t at RK stages
    std::vector<std::vector<cplx>> f0_hat, f1_hat;
    double w0t = 0.0, inv_span = 0.0;
    if (frozen) {
        const auto& times = frozen->times;
        const std::size_t n = times.size();
        std::size_t k1 = 0;
        while (k1 + 1 < n && times[k1 + 1] < t + 0.5 * dt) ++k1;
        const std::size_t k2 = std::min(k1 + 1, n - 1);
        const double t0 = times[k1], t1 = times[k2];
        inv_span = (t1 > t0) ? 1.0 / (t1 - t0) : 0.0;
        w0t = t0;
        f0_hat.resize(spec.Nx);
        f1_hat.resize(spec.Nx);
        for (int j = 0; j < spec.Nx; ++j) {
            f0_hat[j] = tr_->forward_v(&frozen->fields[k1].data()[static_cast<std::size_t>(j) * nv]);
            f1_hat[j] = tr_->forward_v(&frozen->fields[k2].data()[static_cast<std::size_t>(j) * nv]);
        }
    }

    PhaseField next(spec);
    std::vector<cplx> fstage(nv);
    for (int j = 0; j < spec.Nx; ++j) {
        LineVec y = to_eigen(tr_->forward_v(&cur.data()[static_cast<std::size_t>(j) * nv]));
        auto rhs = [&](double tau, const LineVec& u) -> LineVec {
            LineVec r = -(Lc_ * u);
            if (nonlinear) {
                const std::vector<cplx> uu = from_eigen(u);
                r += to_eigen(op_->apply(uu, uu));
            } else if (frozen) {
                const double w = std::clamp((tau - w0t) * inv_span, 0.0, 1.0);
                for (int c = 0; c < nv; ++c)
                    fstage[c] = (1.0 - w) * f0_hat[j][c] + w * f1_hat[j][c];
                r += to_eigen(op_->apply(fstage, from_eigen(u)));
            }
            return r;
        };
        const LineVec k1 = rhs(t, y);
        const LineVec k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        const LineVec k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        const LineVec k4 = rhs(t + dt, y + dt * k3);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const std::vector<cplx> phys = tr_->inverse_v(from_eigen(y));
        for (int l = 0; l < nv; ++l) next.at(j, l) = phys[l].real();
    }

    return step_transport(*tr_, next, 0.5 * dt);
}

Trajectory KacSolver::solve_linear(const PhaseField& g0, const Trajectory* frozen) const {
    const int n_steps = static_cast<int>(std::llround(cfg_.T / cfg_.dt));
    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.fields.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.fields.push_back(g0);
    PhaseField cur = g0;
    for (int k = 0; k < n_steps; ++k) {
        const double t = k * cfg_.dt;
        cur = strang_step(cur, t, cfg_.dt, frozen, false);
        if (!cur.finite())
            throw NumericalError("solve_linear: non-finite state at step " + std::to_string(k + 1));
        traj.times.push_back((k + 1) * cfg_.dt);
        traj.fields.push_back(cur);
    }
    return traj;
}

Trajectory KacSolver::run_picard(const PhaseField& g0_in) const {
    const double margin = stability_margin();
    if (margin > cfg_.stability_constant)
        throw StabilityError("run_picard: dt * ||L|| = " + std::to_string(margin) +
                             " exceeds the RK4 stability margin");
    // scale the initial field to eps0 in H^r
    PhaseField g0 = g0_in;
    const double n0 = norm_hr_l2(*tr_, g0, cfg_.mult.r);
    if (n0 > 0.0) g0 *= cfg_.eps0 / n0;

    const int n_steps = static_cast<int>(std::llround(cfg_.T / cfg_.dt));
    // g^0 trajectory: the mollifier flow of the initial data
    Trajectory frozen;
    frozen.times.reserve(n_steps + 1);
    frozen.fields.reserve(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) {
        const double t = k * cfg_.dt;
        frozen.times.push_back(t);
        frozen.fields.push_back(mollify_initial(*tr_, g0, t));
    }

    Trajectory traj;
    bool converged = false;
    std::vector<double> deltas;
    int n_iter = 0;
    for (int n = 0; n < cfg_.picard_max_iter; ++n) {
        traj = solve_linear(g0, &frozen);
        double sup = 0.0;
        for (std::size_t k = 0; k < traj.fields.size(); ++k) {
            PhaseField diff = traj.fields[k];
            diff -= frozen.fields[k];
            sup = std::max(sup, norm_hr_l2(*tr_, diff, cfg_.mult.r));
        }
        deltas.push_back(sup);
        n_iter = n + 1;
        frozen = traj;
        if (sup < cfg_.picard_tol) {
            converged = true;
            break;
        }
    }
    traj.picard_deltas = deltas;
    traj.picard_iters = n_iter;
    traj.converged = converged;
    if (!converged) {
        const std::size_t nd = deltas.size();
        const double last = nd > 0 ? deltas[nd - 1] : 0.0;
        const double prev = nd > 1 ? deltas[nd - 2] : 0.0;
        throw PicardDivergence("run_picard: no convergence after " +
                               std::to_string(cfg_.picard_max_iter) + " iterations (last deltas " +
                               std::to_string(prev) + ", " + std::to_string(last) + ")");
    }
    if (cfg_.compute_norms) fill_norms(traj);
    return traj;
}

Trajectory KacSolver::run_direct(const PhaseField& g0_in) const {
    const double margin = stability_margin();
    if (margin > cfg_.stability_constant)
        throw StabilityError("run_direct: dt * ||L|| = " + std::to_string(margin) +
                             " exceeds the RK4 stability margin");
    PhaseField g0 = g0_in;
    const double n0 = norm_hr_l2(*tr_, g0, cfg_.mult.r);
    if (n0 > 0.0) g0 *= cfg_.eps0 / n0;
    const int n_steps = static_cast<int>(std::llround(cfg_.T / cfg_.dt));
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.fields.push_back(g0);
    PhaseField cur = g0;
    for (int k = 0; k < n_steps; ++k) {
        cur = strang_step(cur, k * cfg_.dt, cfg_.dt, nullptr, true);
        if (!cur.finite())
            throw NumericalError("run_direct: non-finite state at step " + std::to_string(k + 1));
        traj.times.push_back((k + 1) * cfg_.dt);
        traj.fields.push_back(cur);
    }
    traj.converged = true;
    if (cfg_.compute_norms) fill_norms(traj);
    return traj;
}

Trajectory KacSolver::run(const PhaseField& g0) const {
    return cfg_.scheme == SolverConfig::Scheme::Picard ? run_picard(g0) : run_direct(g0);
}

void KacSolver::fill_norms(Trajectory& traj) const {
    traj.norms.clear();
    traj.norms.reserve(traj.fields.size());
    for (std::size_t k = 0; k < traj.fields.size(); ++k) {
        traj.norms.push_back(compute_norm_report(*tr_, *tn_, traj.fields[k], traj.times[k],
                                                 cfg_.mult, cfg_.delta_sweep));
    }
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct MarginSeries {
    double c1 = 0.0, C1 = 0.0, fraction = 0.0;
    std::vector<double> margin;
    std::vector<double> times;
};

MarginSeries margins_from_series(const std::vector<double>& times, const std::vector<double>& Nsq,
                                 const std::vector<double>& Rsq) {
    MarginSeries out;
    out.c1 = 0.05;
    const std::size_t n = times.size();
    std::vector<double> lambda;
    std::vector<double> D(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dtv = times[k + 1] - times[k - 1];
        D[k] = (Nsq[k + 1] - Nsq[k - 1]) / dtv;
        if (Nsq[k] > 0.0) {
            const double l = (D[k] + out.c1 * Rsq[k]) / Nsq[k];
            if (l > 0.0) lambda.push_back(l);
        }
    }
    out.C1 = 1.25 * median_of(lambda);
    int good = 0, total = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double m = out.C1 * Nsq[k] - D[k] - out.c1 * Rsq[k];
        out.margin.push_back(m);
        out.times.push_back(times[k]);
        // tolerance floor keeps rounding of near-zero series from flipping signs
        if (m >= -1e-14 * (std::abs(Nsq[k]) + 1e-300)) ++good;
        ++total;
    }
    out.fraction = total > 0 ? static_cast<double>(good) / total : 1.0;
    return out;
}

} // namespace

EnergyAuditReport energy_audit(const KacSolver& solver, const Trajectory& traj) {
    if (traj.norms.size() != traj.fields.size())
        throw std::invalid_argument("energy_audit: trajectory lacks norm reports");
    if (traj.times.size() < 5)
        throw std::invalid_argument("energy_audit: snapshot spacing too coarse");
    const std::size_t n = traj.times.size();
    std::vector<double> Nsq(n), Rsq(n), NsqG(n), RsqG(n);
    for (std::size_t k = 0; k < n; ++k) {
        Nsq[k] = traj.norms[k].weighted_m_audit * traj.norms[k].weighted_m_audit;
        Rsq[k] = traj.norms[k].triple_r0_m_audit * traj.norms[k].triple_r0_m_audit;
        NsqG[k] = traj.norms[k].weighted_g_audit * traj.norms[k].weighted_g_audit;
        RsqG[k] = traj.norms[k].triple_r0_g_audit * traj.norms[k].triple_r0_g_audit;
    }
    const MarginSeries m = margins_from_series(traj.times, Nsq, Rsq);
    const MarginSeries mg = margins_from_series(traj.times, NsqG, RsqG);

    EnergyAuditReport rep;
    rep.c1 = m.c1;
    rep.C1_tilde = m.C1;
    rep.times = m.times;
    rep.margin = m.margin;
    rep.margin_fraction = m.fraction;
    rep.c1_g = mg.c1;
    rep.C1_tilde_g = mg.C1;
    rep.margin_g = mg.margin;
    rep.margin_fraction_g = mg.fraction;

    // residual of the weighted weak form ((d_t + v d_x) g + L g - K(g,g), M^2 g)
    const Transform& tr = solver.transform();
    const GridSpec& spec = tr.spec();
    const MultiplierParams& mp = solver.config().mult;
    const PsiEvaluator pe(mp);
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, n / 8);
    for (std::size_t k = 1; k + 1 < n; k += stride) {
        PhaseField dgdt = traj.fields[k + 1];
        dgdt -= traj.fields[k - 1];
        dgdt *= 1.0 / (traj.times[k + 1] - traj.times[k - 1]);
        // v * d_x g, spectrally in x
        const std::vector<cplx> mixed = tr.forward_x(traj.fields[k]);
        std::vector<cplx> dx(mixed.size());
        for (int row = 0; row < spec.Nx; ++row) {
            const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
            for (int l = 0; l < spec.Nv; ++l)
                dx[static_cast<std::size_t>(row) * spec.Nv + l] =
                    cplx(0.0, eta) * mixed[static_cast<std::size_t>(row) * spec.Nv + l];
        }
        PhaseField vdx = tr.inverse_x(dx);
        for (int j = 0; j < spec.Nx; ++j)
            for (int l = 0; l < spec.Nv; ++l) vdx.at(j, l) *= spec.v(l);
        PhaseField lhs = dgdt;
        lhs += vdx;
        lhs += apply_L_full(tr, solver.linearized(), traj.fields[k]);
        PhaseField rhs = apply_calK_full(tr, solver.collision(), traj.fields[k], traj.fields[k]);
        lhs -= rhs;
        // pair with M^2 g in the H^r dual metric
        const SpectralField lhat = tr.forward(lhs);
        const SpectralField ghat = tr.forward(traj.fields[k]);
        const std::vector<double> mtab = mdelta_table(spec, pe, traj.times[k]);
        double ip = 0.0, scale = 0.0;
        for (int row = 0; row < spec.Nx; ++row) {
            const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
            const double wx = std::pow(1.0 + eta * eta, mp.r);
            for (int c = 0; c < spec.Nv; ++c) {
                const double m2 = mtab[static_cast<std::size_t>(row) * spec.Nv + c];
                const cplx a = lhat.at(row, c);
                const cplx b = ghat.at(row, c);
                ip += wx * m2 * m2 * (a.real() * b.real() + a.imag() * b.imag());
                scale += wx * m2 * m2 * std::norm(b);
            }
        }
        // FD of d_t g dominates this residual; report relative to the energy scale
        const double res = std::abs(ip) / std::max(scale, 1e-300);
        worst = std::max(worst, res);
    }
    rep.max_equation_residual = worst;
    rep.pass = rep.margin_fraction >= 0.95;
    return rep;
}

KineticIdentityReport check_kolmogorov_kinetic_identity(const Transform& tr,
                                                        const PhaseField& f0, double s,
                                                        const MultiplierParams& mp, double t,
                                                        double tol) {
    const GridSpec& spec = tr.spec();
    const PsiEvaluator pe(mp);
    const SpectralField f0_hat = tr.forward(f0);
    const auto solve_hat = [&](double tt) {
        return solve_kolmogorov_exact_hat(tr, f0_hat, s, tt);
    };
    const SpectralField fhat = solve_hat(t);

    // Kinetic term through the solution's spectral representation: the
    // analytic (d_t - eta d_xi) applied to the exact solution collapses by
    // the transport identity to -<xi>^{2s} fhat, so only d/dt of the
    // weighted norm needs finite differences (Richardson).  Realizing
    // v d_x g by grid multiplication instead would inject the periodic
    // spectral derivative of the non-periodic symbol M^2 (Gibbs error
    // ~1e-3), which belongs to the surrogate, not to the identity.
    const double h = 1e-3 * std::max(t, 1.0);
    const SpectralField fp = solve_hat(t + h), fm = solve_hat(t - h);
    const SpectralField fp2 = solve_hat(t + 0.5 * h), fm2 = solve_hat(t - 0.5 * h);
    auto wnorm_sq = [&](const SpectralField& sfd, double tt) {
        const double v = weighted_norm_m(sfd, pe, tt);
        return v * v;
    };
    const double d1 = (wnorm_sq(fp, t + h) - wnorm_sq(fm, t - h)) / (2.0 * h);
    const double d2 = (wnorm_sq(fp2, t + 0.5 * h) - wnorm_sq(fm2, t - 0.5 * h)) / h;
    const double dnorm = (4.0 * d2 - d1) / 3.0;

    const double meas = dual_measure(spec);
    double lhs = 0.0, corr = 0.0, scale = 0.0;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        const double wx = std::pow(1.0 + eta * eta, mp.r);
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            const double psi = pe.psi(t, eta, xi);
            const double m = pe.m_delta_of_psi(psi);
            const double fv2 = std::norm(fhat.at(row, c));
            lhs -= wx * m * m * std::pow(1.0 + xi * xi, s) * fv2;
            const double sat = 1.0 / (1.0 + mp.delta * std::exp(std::min(psi, 700.0)));
            corr += wx * m * m * sat * mp.c0 * std::pow(1.0 + xi * xi, mp.s_tilde) * fv2;
            scale += wx * m * m * fv2;
        }
    }
    lhs *= meas;
    corr *= meas;
    scale *= meas;

    KineticIdentityReport rep;
    rep.lhs = lhs;
    rep.rhs = 0.5 * dnorm - corr;
    rep.residual = std::abs(rep.lhs - rep.rhs) / std::max(scale, 1e-300);
    rep.pass = rep.residual <= tol;
    return rep;
}

} // namespace kac
