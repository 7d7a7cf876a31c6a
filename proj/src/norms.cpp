#include "kac/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "kac/maxwellian.hpp"

namespace kac {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

double dual_measure(const GridSpec& spec) {
    return spec.deta() * spec.dxi() / (kTwoPi * kTwoPi);
}

} // namespace

double norm_hr_l2(const SpectralField& ghat, double r) {
    const GridSpec& spec = ghat.spec();
    double acc = 0.0;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        const double w = std::pow(1.0 + eta * eta, r);
        for (int c = 0; c < spec.Nv; ++c) acc += w * std::norm(ghat.at(row, c));
    }
    return std::sqrt(acc * dual_measure(spec));
}

double norm_hr_l2(const Transform& tr, const PhaseField& g, double r) {
    return norm_hr_l2(tr.forward(g), r);
}

double norm_hr_hs(const SpectralField& ghat, double r, double s) {
    const GridSpec& spec = ghat.spec();
    double acc = 0.0;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        const double wx = std::pow(1.0 + eta * eta, r);
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            acc += wx * std::pow(1.0 + xi * xi, s) * std::norm(ghat.at(row, c));
        }
    }
    return std::sqrt(acc * dual_measure(spec));
}

double norm_vweight(const Transform& tr, const PhaseField& g, double r, double s) {
    const GridSpec& spec = g.spec();
    PhaseField weighted = g;
    for (int j = 0; j < spec.Nx; ++j)
        for (int l = 0; l < spec.Nv; ++l) {
            const double v = spec.v(l);
            weighted.at(j, l) *= std::pow(1.0 + v * v, 0.5 * s);
        }
    return norm_hr_l2(tr, weighted, r);
}

std::vector<double> mdelta_table(const GridSpec& spec, const PsiEvaluator& p, double t) {
    std::vector<double> table(static_cast<std::size_t>(spec.Nx) * spec.Nv);
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        for (int c = 0; c < spec.Nv; ++c) {
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            table[static_cast<std::size_t>(row) * spec.Nv + c] = p.m_delta(t, eta, xi);
        }
    }
    return table;
}

SpectralField apply_multiplier_m(const SpectralField& ghat, const std::vector<double>& table) {
    SpectralField out = ghat;
    for (std::size_t i = 0; i < out.coef().size(); ++i) out.coef()[i] *= table[i];
    return out;
}

SpectralField apply_multiplier_m(const SpectralField& ghat, const PsiEvaluator& p, double t) {
    return apply_multiplier_m(ghat, mdelta_table(ghat.spec(), p, t));
}

PhaseField apply_weight_g(const PhaseField& g, const PsiEvaluator& p, double t) {
    const GridSpec& spec = g.spec();
    PhaseField out = g;
    for (int l = 0; l < spec.Nv; ++l) {
        const double w = p.g_delta(t, spec.v(l));
        for (int j = 0; j < spec.Nx; ++j) out.at(j, l) *= w;
    }
    return out;
}

double weighted_norm_m(const SpectralField& ghat, const PsiEvaluator& p, double t) {
    return norm_hr_l2(apply_multiplier_m(ghat, p, t), p.params().r);
}

double weighted_norm_m(const Transform& tr, const PhaseField& g, const PsiEvaluator& p, double t) {
    return weighted_norm_m(tr.forward(g), p, t);
}

double weighted_norm_g(const Transform& tr, const PhaseField& g, const PsiEvaluator& p, double t) {
    const GridSpec& spec = g.spec();
    const PhaseField gg = apply_weight_g(g, p, t);
    const std::vector<cplx> mixed = tr.forward_x(gg);
    const double r = p.params().r;
    double acc = 0.0;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        const double w = std::pow(1.0 + eta * eta, r);
        for (int l = 0; l < spec.Nv; ++l)
            acc += w * std::norm(mixed[static_cast<std::size_t>(row) * spec.Nv + l]);
    }
    return std::sqrt(acc * spec.deta() / kTwoPi * spec.hv());
}

namespace {

// real trigonometric interpolation weights: p(y) = sum_a K(y - v_a) g_a with
// the classic even-N kernel sin(N u/2) cot(u/2) / N, u = pi (y - v_a)/Lv
// (cos-convention Nyquist; identical to eval_physical_v for N divisible by 4)
void interp_row(const GridSpec& spec, double y, double* row) {
    const int nv = spec.Nv;
    const double piL = 3.14159265358979323846 / spec.Lv;
    for (int a = 0; a < nv; ++a) {
        const double u = piL * (y - spec.v(a));
        const double su2 = std::sin(0.5 * u);
        if (std::abs(su2) < 1e-12) {
            row[a] = 1.0;
        } else {
            row[a] = std::sin(0.5 * nv * u) * std::cos(0.5 * u) / (nv * su2);
        }
    }
}

} // namespace

TripleNorm::TripleNorm(const GridSpec& spec, const CrossSection& cs,
                       const CollisionQuadrature& quad)
    : spec_(spec), cs_(cs), theta_(quad.theta_nodes()), wtheta_(quad.theta_weights()),
      hermite_(quad.hermite()) {
    const int nv = spec.Nv;
    const double hv = spec.hv();
    // W(v*) = int int beta (sqrt(mu)(v cos - v* sin) - sqrt(mu)(v))^2 dv dtheta,
    // closed-form integrand, so only the grid rectangle rule enters.
    term2_weight_.assign(nv, 0.0);
    for (int l = 0; l < nv; ++l) {
        const double vs = spec.v(l);
        double acc = 0.0;
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double ct = std::cos(theta_[k]);
            const double st = std::sin(theta_[k]);
            const double wb = 2.0 * wtheta_[k] * cs_.beta(theta_[k]); // fold +-theta
            double inner = 0.0;
            for (int j = 0; j < nv; ++j) {
                const double v = spec.v(j);
                const double d = equilibrium::sqrt_mu(v * ct - vs * st) - equilibrium::sqrt_mu(v);
                inner += d * d;
            }
            acc += wb * inner * hv;
        }
        term2_weight_[l] = acc;
    }

    // term 1 as sum_points w (row(v') - e_j)^T x outer square, accumulated in
    // GEMM-sized blocks
    Q_ = Eigen::MatrixXd::Zero(nv, nv);
    const double vs_scale = std::sqrt(2.0);
    const double vs_wscale = 1.0 / std::sqrt(3.14159265358979323846);
    const int block = 128;
    Eigen::MatrixXd U(block, nv);
    int fill = 0;
    std::vector<double> row(nv);
    auto flush = [&]() {
        if (fill == 0) return;
        Q_.selfadjointView<Eigen::Lower>().rankUpdate(U.topRows(fill).transpose(), 1.0);
        fill = 0;
    };
    for (std::size_t k = 0; k < theta_.size(); ++k) {
        const double ct = std::cos(theta_[k]);
        const double st = std::sin(theta_[k]);
        const double wb = wtheta_[k] * cs_.beta(theta_[k]);
        for (std::size_t h = 0; h < hermite_.size(); ++h) {
            const double vs = vs_scale * hermite_.nodes[h];
            const double w = wb * vs_wscale * hermite_.weights[h] * hv;
            for (int j = 0; j < nv; ++j) {
                const double v = spec.v(j);
                for (int sgn = 0; sgn < 2; ++sgn) {
                    const double vp = sgn == 0 ? v * ct - vs * st : v * ct + vs * st;
                    interp_row(spec, vp, row.data());
                    row[j] -= 1.0;
                    const double sw = std::sqrt(w);
                    for (int a = 0; a < nv; ++a) U(fill, a) = sw * row[a];
                    if (++fill == block) flush();
                }
            }
        }
    }
    flush();
    Q_ = Q_.selfadjointView<Eigen::Lower>();
    for (int l = 0; l < nv; ++l) Q_(l, l) += hv * term2_weight_[l];
}

double TripleNorm::squared(const std::vector<double>& v_slice) const {
    const int nv = spec_.Nv;
    if (static_cast<int>(v_slice.size()) != nv)
        throw std::invalid_argument("TripleNorm::squared: line length mismatch");
    Eigen::Map<const Eigen::VectorXd> g(v_slice.data(), nv);
    return g.dot(Q_ * g);
}

double TripleNorm::squared_quadrature(const std::vector<double>& v_slice,
                                      const std::vector<cplx>& vhat) const {
    const int nv = spec_.Nv;
    const double hv = spec_.hv();
    // term 1: v* by the Hermite rule against mu(v*) (substitution v* = sqrt(2) u)
    const double vs_scale = std::sqrt(2.0);
    const double vs_wscale = 1.0 / std::sqrt(3.14159265358979323846);
    double term1 = 0.0;
    for (std::size_t k = 0; k < theta_.size(); ++k) {
        const double ct = std::cos(theta_[k]);
        const double st = std::sin(theta_[k]);
        const double wb = wtheta_[k] * cs_.beta(theta_[k]);
        double inner = 0.0;
        for (std::size_t h = 0; h < hermite_.size(); ++h) {
            const double vs = vs_scale * hermite_.nodes[h];
            const double wh = vs_wscale * hermite_.weights[h];
            for (int j = 0; j < nv; ++j) {
                const double v = spec_.v(j);
                const double dp = eval_physical_v(spec_, vhat, v * ct - vs * st) - v_slice[j];
                const double dm = eval_physical_v(spec_, vhat, v * ct + vs * st) - v_slice[j];
                inner += wh * (dp * dp + dm * dm);
            }
        }
        term1 += wb * inner * hv;
    }
    double term2 = 0.0;
    for (int l = 0; l < nv; ++l) term2 += v_slice[l] * v_slice[l] * term2_weight_[l];
    term2 *= hv;
    return term1 + term2;
}

double TripleNorm::r0_squared(const Transform& tr, const SpectralField& ghat, double r) const {
    const GridSpec& spec = ghat.spec();
    // <D_x>^r in eta, back to (x, v)-physical, then per-slice triple norms.
    SpectralField weighted = ghat;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        const double w = std::pow(1.0 + eta * eta, 0.5 * r);
        for (int c = 0; c < spec.Nv; ++c) weighted.at(row, c) *= w;
    }
    const PhaseField gphys = tr.inverse(weighted);
    double acc = 0.0;
    std::vector<double> slice(spec.Nv);
    for (int j = 0; j < spec.Nx; ++j) {
        for (int l = 0; l < spec.Nv; ++l) slice[l] = gphys.at(j, l);
        acc += squared(slice);
    }
    return acc * spec.hx();
}

double TripleNorm::r0_squared(const Transform& tr, const PhaseField& g, double r) const {
    return r0_squared(tr, tr.forward(g), r);
}

NormReport compute_norm_report(const Transform& tr, const TripleNorm& tn, const PhaseField& g,
                               double t, const MultiplierParams& base,
                               const std::vector<double>& delta_sweep) {
    NormReport rep;
    rep.t = t;
    const SpectralField ghat = tr.forward(g);
    rep.h_r_l2 = norm_hr_l2(ghat, base.r);
    rep.triple_r0 = std::sqrt(std::max(0.0, tn.r0_squared(tr, ghat, base.r)));
    rep.sobolev_hs = norm_hr_hs(ghat, base.r, base.s);
    rep.vweight = norm_vweight(tr, g, base.r, base.s);
    for (double d : delta_sweep) {
        const PsiEvaluator p(base.with_delta(d));
        rep.weighted_m.push_back(weighted_norm_m(ghat, p, t));
        rep.weighted_g.push_back(weighted_norm_g(tr, g, p, t));
    }
    const PsiEvaluator pa(base);
    rep.weighted_m_audit = weighted_norm_m(ghat, pa, t);
    rep.weighted_g_audit = weighted_norm_g(tr, g, pa, t);
    rep.triple_r0_m_audit =
        std::sqrt(std::max(0.0, tn.r0_squared(tr, apply_multiplier_m(ghat, pa, t), base.r)));
    const SpectralField gw_hat = tr.forward(apply_weight_g(g, pa, t));
    rep.triple_r0_g_audit = std::sqrt(std::max(0.0, tn.r0_squared(tr, gw_hat, base.r)));
    return rep;
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};

LineFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    f.n = static_cast<int>(x.size());
    if (f.n < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < f.n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double det = f.n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return f;
    f.slope = (f.n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / f.n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ym = sy / f.n;
    for (int i = 0; i < f.n; ++i) {
        const double pred = f.slope * x[i] + f.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

FitReport fit_gevrey_radius(const std::vector<double>& times,
                            const std::vector<SpectralField>& snaps, FitDirection dir,
                            double s_tilde, const Transform* tr) {
    if (times.size() != snaps.size() || times.size() < 3)
        throw std::invalid_argument("fit_gevrey_radius: need >= 3 snapshots");
    const GridSpec& spec = snaps.front().spec();
    FitReport rep;
    rep.direction = dir == FitDirection::X ? "x" : (dir == FitDirection::V ? "v" : "velocity-decay");

    // value matrix: vals[sidx][q] = |amplitude| of candidate mode q in snapshot sidx
    const std::size_t nsnap = snaps.size();
    std::vector<std::vector<double>> vals(nsnap);
    std::vector<double> weights;

    std::vector<PhaseField> phys;
    int nmode_half = 0;
    std::function<double(std::size_t, int)> value_at;
    std::function<double(int)> coord_of;
    if (dir == FitDirection::X) {
        nmode_half = spec.Nx / 2;
        value_at = [&](std::size_t sidx, int k) { return std::abs(snaps[sidx].at_freq(k, 0)); };
        coord_of = [&](int k) { return spec.eta(k); };
    } else if (dir == FitDirection::V) {
        nmode_half = spec.Nv / 2;
        value_at = [&](std::size_t sidx, int m) { return std::abs(snaps[sidx].at_freq(0, m)); };
        coord_of = [&](int m) { return spec.xi(m); };
    } else {
        if (!tr) throw std::invalid_argument("fit_gevrey_radius: velocity-decay needs a Transform");
        phys.reserve(nsnap);
        for (const auto& s : snaps) phys.push_back(tr->inverse(s));
        // column of largest |g| at t=0; decay measured along v >= 0 at that x
        int j0 = 0;
        double best = -1.0;
        for (int j = 0; j < spec.Nx; ++j) {
            double a = 0.0;
            for (int l = 0; l < spec.Nv; ++l) a += std::abs(phys[0].at(j, l));
            if (a > best) { best = a; j0 = j; }
        }
        nmode_half = spec.Nv / 2;
        value_at = [&, j0](std::size_t sidx, int l) {
            return std::abs(phys[sidx].at(j0, spec.Nv / 2 + l));
        };
        coord_of = [&](int l) { return spec.v(spec.Nv / 2 + l); };
    }

    double vmax = 0.0;
    for (int i = 0; i < nmode_half; ++i) vmax = std::max(vmax, value_at(0, i));
    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * vmax;
    for (int i = 1; i < nmode_half / 2; ++i) { // skip DC and the top octave
        bool ok = true;
        for (std::size_t sidx = 0; sidx < nsnap; ++sidx)
            if (value_at(sidx, i) <= floor) { ok = false; break; }
        if (!ok) continue;
        const double c = coord_of(i);
        weights.push_back(std::pow(1.0 + c * c, s_tilde));
        for (std::size_t sidx = 0; sidx < nsnap; ++sidx)
            vals[sidx].push_back(value_at(sidx, i));
    }

    if (weights.size() < 8)
        throw std::runtime_error("fit_gevrey_radius: fewer than 8 usable modes above the noise floor");

    // The x-radius reaches its asymptotic power only for t|eta| >> 1; keep
    // the top half of the usable band (at least 8 modes) for that direction.
    std::string window_note = "(DC and top octave excluded)";
    const std::size_t keep = std::max<std::size_t>(8, weights.size() / 2);
    if (dir == FitDirection::X && weights.size() > keep) {
        const std::size_t drop = weights.size() - keep;
        weights.erase(weights.begin(), weights.begin() + drop);
        for (auto& v : vals)
            if (!v.empty()) v.erase(v.begin(), v.begin() + drop);
        window_note = "(sub-asymptotic lower modes excluded)";
    }
    rep.window = "modes=" + std::to_string(weights.size()) + " " + window_note;

    // rho(t): slope of log|ghat(t)| - log|ghat(t0)| against the weight
    for (std::size_t sidx = 1; sidx < nsnap; ++sidx) {
        std::vector<double> y(weights.size());
        for (std::size_t q = 0; q < weights.size(); ++q)
            y[q] = std::log(vals[sidx][q]) - std::log(vals[0][q]);
        const LineFit f = linfit(weights, y);
        rep.times.push_back(times[sidx]);
        rep.rho.push_back(-f.slope);
    }

    // exponent from log rho vs log t over the positive part
    std::vector<double> lt, lr;
    for (std::size_t i = 0; i < rep.rho.size(); ++i) {
        if (rep.rho[i] > 1e-12 && rep.times[i] > 0.0) {
            lt.push_back(std::log(rep.times[i]));
            lr.push_back(std::log(rep.rho[i]));
        }
    }
    if (lt.size() >= 2) {
        const LineFit f = linfit(lt, lr);
        rep.exponent_estimate = f.slope;
        rep.radius_estimate = std::exp(f.intercept);
        rep.r2 = f.r2;
    } else {
        rep.exponent_estimate = 0.0;
        rep.radius_estimate = 0.0;
        rep.r2 = 1.0;
    }
    return rep;
}

} // namespace kac
