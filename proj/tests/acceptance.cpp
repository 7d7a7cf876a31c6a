// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion.  The one known-unattainable
// sub-check (the v sqrt(mu) kernel claim; momentum is not a Kac collision
// invariant) is reported as XFAIL with the verified eigenvalue relation in
// its place, and does not count toward the exit code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "kac/cli.hpp"
#include "kac/collision.hpp"
#include "kac/config.hpp"
#include "kac/grid.hpp"
#include "kac/maxwellian.hpp"
#include "kac/multiplier.hpp"
#include "kac/norms.hpp"
#include "kac/rng.hpp"
#include "kac/solver.hpp"
#include "kac/verify.hpp"

using namespace kac;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Harness {
    int failed = 0;

    void result(const std::string& name, bool pass, const std::string& detail) {
        std::printf("%s %-34s %s\n", pass ? "PASS " : "FAIL ", name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failed;
    }
    void xfail(const std::string& name, bool failed_as_expected, const std::string& detail) {
        std::printf("%s %-34s %s\n", failed_as_expected ? "XFAIL" : "FAIL ", name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!failed_as_expected) ++failed;
    }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string write_tmp_cfg(const std::string& name, const std::string& text) {
    fs::create_directories("acceptance_out");
    const std::string path = "acceptance_out/" + name;
    std::ofstream os(path);
    os << text;
    return path;
}

char buf[512];

// ---------------------------------------------------------------- criterion 1
void criterion_kolmogorov_exactness(Harness& h) {
    const GridSpec spec(64, 128, kPi, 10.0);
    const Transform tr(spec);
    Rng rng(7);
    SpectralField f0(spec);
    for (int q = 0; q < 1000; ++q) {
        const int k = static_cast<int>(rng.uniform(0, spec.Nx / 4)) - spec.Nx / 8;
        const int m = static_cast<int>(rng.uniform(0, spec.Nv / 4)) - spec.Nv / 8;
        f0.at((k + spec.Nx) % spec.Nx, (m + spec.Nv) % spec.Nv) += cplx(rng.normal(), rng.normal());
    }
    const auto t0 = std::chrono::steady_clock::now();
    const double t = 0.9;
    const SpectralField ft = solve_kolmogorov_exact_hat(tr, f0, 0.5, t);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    long checked = 0;
    for (int row = 0; row < spec.Nx; ++row) {
        const double eta = spec.eta(GridSpec::freq_index(row, spec.Nx));
        std::vector<cplx> line(spec.Nv);
        for (int c = 0; c < spec.Nv; ++c) line[c] = f0.at(row, c);
        for (int c = 0; c < spec.Nv; ++c) {
            if (std::abs(f0.at(row, c)) == 0.0 && std::abs(ft.at(row, c)) == 0.0) continue;
            const double xi = spec.xi(GridSpec::freq_index(c, spec.Nv));
            const double integral = psi_closed_form_half(1.0, t, eta, xi);
            const cplx shifted = eta == 0.0 ? line[c] : eval_offgrid_v(spec, line, xi + t * eta);
            const cplx expect = std::exp(-integral) * shifted;
            worst = std::max(worst, std::abs(ft.at(row, c) - expect) / (1.0 + std::abs(expect)));
            ++checked;
        }
    }
    std::snprintf(buf, sizeof(buf), "rel err %.2e (tol 1e-10), %ld modes, %.2f s (budget 5 s)",
                  worst, checked, elapsed);
    h.result("1 kolmogorov-exactness", worst <= 1e-10 && checked >= 1000 && elapsed < 5.0, buf);
}

// ---------------------------------------------------------------- criterion 2
void criterion_gevrey_exponents(Harness& h) {
    bool pass = true;
    std::string detail;
    for (double s : {0.25, 0.5}) {
        CliOptions opt;
        std::snprintf(buf, sizeof(buf), "accept_kol_s%02d.cfg", static_cast<int>(100 * s));
        opt.config_path = write_tmp_cfg(buf, "grid.Nx = 64\ngrid.Nv = 128\nkolmogorov.s = " +
                                                 std::to_string(s) +
                                                 "\nkolmogorov.T = 1.0\nkolmogorov.snapshots = 8\n"
                                                 "cross_section.s = " +
                                                 std::to_string(s) + "\n");
        std::snprintf(buf, sizeof(buf), "acceptance_out/kol_s%02d", static_cast<int>(100 * s));
        opt.out_dir = buf;
        const auto t0 = std::chrono::steady_clock::now();
        const int rc = cmd_kolmogorov(opt);
        const double elapsed = seconds_since(t0);
        if (rc != 0) {
            pass = false;
            detail += " rc=" + std::to_string(rc);
            continue;
        }
        const json fits = json::parse(slurp(std::string(buf) + "/fits.json"));
        const double ev = fits.at("v").at("exponent").get<double>();
        const double ex = fits.at("x").at("exponent").get<double>();
        const double st = std::min(s, 0.5);
        const bool okv = std::abs(ev - 1.0) <= 0.1;
        const bool okx = std::abs(ex - (1.0 + 2.0 * st)) <= 0.15;
        pass = pass && okv && okx && elapsed < 60.0;
        std::snprintf(buf, sizeof(buf), " [s=%.2f: v %.3f (1.0+-0.1) x %.3f (%.1f+-0.15) %.0fs]",
                      s, ev, ex, 1.0 + 2.0 * st, elapsed);
        detail += buf;
    }
    h.result("2 gevrey-exponents", pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_bd_lemma(Harness& h) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double s : {0.3, 0.7, 1.0}) {
        const CheckReport rep = check_bd_lemma(s, 1234, 1000000);
        bool ok;
        if (s == 1.0) {
            ok = std::max(std::abs(rep.sup_ratio - 1.0), std::abs(rep.aux - 1.0)) <= 1e-12;
        } else {
            ok = rep.aux >= std::pow(2.0, s - 1.0) && rep.sup_ratio <= std::pow(2.0, 1.0 - s);
        }
        pass = pass && ok;
        std::snprintf(buf, sizeof(buf), " [s=%.1f: %.6f..%.6f]", s, rep.aux, rep.sup_ratio);
        detail += buf;
    }
    const double elapsed = seconds_since(t0);
    std::snprintf(buf, sizeof(buf), " %.1f s (budget 10 s)", elapsed);
    detail += buf;
    h.result("3 bd-lemma-bounds", pass && elapsed < 10.0, detail);
}

// ---------------------------------------------------------------- criterion 4
void criterion_ukai(Harness& h) {
    bool pass = true;
    std::string detail;
    for (double alpha : {0.5, 1.0}) {
        const CheckReport rep = check_ukai(alpha);
        pass = pass && rep.pass && rep.aux > 0.0;
        std::snprintf(buf, sizeof(buf), " [a=%.1f: band %.3f..%.3f %s]", alpha, rep.aux,
                      rep.sup_ratio, rep.pass ? "stable" : "UNSTABLE");
        detail += buf;
    }
    h.result("4 ukai-band", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_collision(Harness& h) {
    const auto t0 = std::chrono::steady_clock::now();
    // (a) spectral vs physical-space oracle through the KKK mapping, Nv=32
    double oracle_err = 0.0;
    {
        const GridSpec spec(8, 32, kPi, 8.0);
        const CrossSection cs(0.25, 1.0);
        CollisionQuadratureConfig qc;
        qc.eps = 1e-5;
        const CollisionQuadrature quad(qc);
        const Transform tr(spec);
        const KacOperator op(spec, cs, quad, 0.5);
        std::vector<double> f(spec.Nv), g(spec.Nv), root(spec.Nv);
        for (int l = 0; l < spec.Nv; ++l) {
            const double v = spec.v(l);
            f[l] = std::exp(-0.25 * v * v) * (1.0 + 0.3 * std::sin(1.1 * v));
            g[l] = std::exp(-0.25 * v * v) * (1.0 - 0.2 * std::cos(0.7 * v));
            root[l] = equilibrium::sqrt_mu(v);
        }
        const std::vector<cplx> out = op.apply(tr.forward_v(f.data()), tr.forward_v(g.data()));
        const std::vector<cplx> phys = tr.inverse_v(out);
        std::vector<double> fw(spec.Nv), gw(spec.Nv);
        for (int l = 0; l < spec.Nv; ++l) {
            fw[l] = root[l] * f[l];
            gw[l] = root[l] * g[l];
        }
        CollisionQuadratureConfig strong = qc;
        strong.gl_per_panel = 16;
        const std::vector<double> want =
            apply_K_oracle(spec, cs, CollisionQuadrature(strong), fw, gw);
        double num = 0.0, den = 0.0;
        for (int l = 0; l < spec.Nv; ++l) {
            const double got = root[l] * phys[l].real();
            num += (got - want[l]) * (got - want[l]);
            den += want[l] * want[l];
        }
        oracle_err = std::sqrt(num / den);
    }
    // (b) K(mu, mu) residual and (c) kernel residuals at Nv=64; Lv=10 keeps
    // the box-edge value of v^2 sqrt(mu) (the slowest-decaying invariant)
    // below the 1e-6 target
    const GridSpec spec(8, 64, kPi, 10.0);
    const CrossSection cs(0.25, 1.0);
    CollisionQuadratureConfig qc;
    qc.eps = 1e-5;
    const CollisionQuadrature quad(qc);
    const Transform tr(spec);
    double kmm_rel = 0.0;
    {
        const std::vector<double> mu = sample_profile(ProfileKind::Mu, spec);
        const std::vector<double> kmm = apply_K_oracle(spec, cs, quad, mu, mu);
        double nk = 0.0, nm = 0.0;
        for (int l = 0; l < spec.Nv; ++l) {
            nk += kmm[l] * kmm[l];
            nm += mu[l] * mu[l];
        }
        kmm_rel = std::sqrt(nk / nm);
    }
    const LinearizedOperator lin(spec, cs, quad);
    const KernelBasis basis = kernel_basis(spec);
    auto residual = [&](const std::vector<double>& phi, double lambda) {
        const std::vector<cplx> phat = tr.forward_v(phi.data());
        const std::vector<cplx> lphi = lin.apply(phat);
        double num = 0.0, den = 0.0;
        for (int c = 0; c < spec.Nv; ++c) {
            num += std::norm(lphi[c] - lambda * phat[c]);
            den += std::norm(phat[c]);
        }
        return std::sqrt(num / den);
    };
    const double r0 = residual(basis.phi0, 0.0);
    const double r2 = residual(basis.phi2, 0.0);
    const double r1_as_stated = residual(basis.phi1, 0.0);
    double lambda1 = 0.0;
    for (std::size_t k = 0; k < quad.theta_nodes().size(); ++k)
        lambda1 += 2.0 * quad.theta_weights()[k] * cs.beta(quad.theta_nodes()[k]) *
                   (1.0 - std::cos(quad.theta_nodes()[k]));
    const double r1_eigen = residual(basis.phi1, lambda1);
    const double elapsed = seconds_since(t0);

    std::snprintf(buf, sizeof(buf),
                  "oracle rel %.2e (tol 1e-4), K(mu,mu) %.2e (tol 1e-6), L kernel: sqrt(mu) %.2e, "
                  "v^2 %.2e (tol 1e-6), %.0f s (budget 120 s)",
                  oracle_err, kmm_rel, r0, r2, elapsed);
    h.result("5 collision-correctness",
             oracle_err <= 1e-4 && kmm_rel <= 1e-6 && r0 <= 1e-6 && r2 <= 1e-6 && elapsed < 120.0,
             buf);
    std::snprintf(buf, sizeof(buf),
                  "residual %.3f vs tol 1e-6: momentum is not a Kac collision invariant; "
                  "L(v sqrt mu) = lambda1 v sqrt(mu) verified, lambda1 %.4f, eigen-residual %.2e",
                  r1_as_stated, lambda1, r1_eigen);
    h.xfail("5c kernel-claim-v-sqrt-mu", r1_as_stated > 1e-6 && r1_eigen <= 1e-6, buf);
}

// ------------------------------------------------------- criteria 6 and 7
void criteria_reference_run(Harness& h) {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig sc;
    sc.grid = GridSpec(32, 64, kPi, 10.0);
    sc.cs = CrossSection(0.25, 1.0);
    sc.mult = MultiplierParams(0.25, 0.15, 1e-2, 1.0);
    sc.dt = 0.01;
    sc.T = 0.5;
    sc.eps0 = 1e-3;
    sc.compute_norms = true;
    const KacSolver solver(sc);
    PhaseField g0 = make_corpus(solver.transform(), 1, 1).front();
    for (int j = 0; j < sc.grid.Nx; ++j)
        for (int l = 0; l < sc.grid.Nv; ++l) {
            const double v = sc.grid.v(l);
            g0.at(j, l) *= std::exp(-v * v / 8.0);
        }
    const Trajectory traj = solver.run_picard(g0);
    std::vector<double> sups(sc.delta_sweep.size(), 0.0);
    for (const NormReport& n : traj.norms)
        for (std::size_t i = 0; i < sups.size(); ++i)
            sups[i] = std::max(sups[i], n.weighted_m[i]);
    const double hi = *std::max_element(sups.begin(), sups.end());
    const double lo = *std::min_element(sups.begin(), sups.end());
    const double spread = (hi - lo) / hi;
    const double elapsed = seconds_since(t0);
    std::snprintf(buf, sizeof(buf),
                  "sup_t ||M_delta g|| spread %.2f%% over delta 1e-1..1e-4 (tol 10%%), %.0f s "
                  "(budget 600 s), picard iters %d",
                  100.0 * spread, elapsed, traj.picard_iters);
    h.result("6 delta-uniformity", spread < 0.10 && elapsed < 600.0, buf);

    const EnergyAuditReport audit = energy_audit(solver, traj);
    // Kolmogorov control for the kinetic-part identity
    const GridSpec cspec(16, 64, kPi, 8.0);
    const Transform ctr(cspec);
    PhaseField c0 = make_corpus(ctr, 1, 66).front();
    for (int j = 0; j < cspec.Nx; ++j)
        for (int l = 0; l < cspec.Nv; ++l) {
            const double v = cspec.v(l);
            c0.at(j, l) *= std::exp(-0.25 * v * v);
        }
    const KineticIdentityReport kin =
        check_kolmogorov_kinetic_identity(ctr, c0, 0.25, sc.mult, 0.5);
    std::snprintf(buf, sizeof(buf),
                  "margin fraction %.3f (need >=0.95, c1 %.2f C~1 %.3f), kinetic identity "
                  "residual %.2e (tol 1e-6)",
                  audit.margin_fraction, audit.c1, audit.C1_tilde, kin.residual);
    h.result("7 energy-audit", audit.margin_fraction >= 0.95 && kin.residual <= 1e-6, buf);
}

// ---------------------------------------------------------------- criterion 8
void criterion_commutators(Harness& h) {
    bool pass = true;
    std::string detail;
    for (double s : {0.25, 0.75}) {
        double sup_small = 0.0;
        for (int doubled = 0; doubled < 2; ++doubled) {
            VerifyConfig vc;
            vc.grid = doubled ? GridSpec(64, 128, kPi, 10.0) : GridSpec(32, 64, kPi, 10.0);
            vc.cs = CrossSection(s, 1.0);
            vc.mult = MultiplierParams(s, 0.1, 1e-2, 1.0);
            vc.t = 0.3;
            vc.corpus = 8;
            vc.seed = 20240808;
            vc.corpus_kx = 8; // continuum corpus fixed across the doubling
            vc.corpus_kv = 16;
            const RatioSuite m = check_commutator_L_M(vc, {1e-1, 1e-2, 1e-3, 1e-4});
            if (!doubled) {
                const RatioSuite g = check_commutator_L_G(vc, {1e-1, 1e-2, 1e-3, 1e-4});
                pass = pass && g.pass && std::isfinite(g.sup_ratio);
                std::snprintf(buf, sizeof(buf), " [s=%.2f G-sup %.3f]", s, g.sup_ratio);
                detail += buf;
                sup_small = m.sup_ratio;
                pass = pass && m.pass && m.stat("delta_spread", 1.0) < 0.10;
                std::snprintf(buf, sizeof(buf), " [s=%.2f M-sup %.4f spread %.1f%%]", s,
                              m.sup_ratio, 100.0 * m.stat("delta_spread", 1.0));
                detail += buf;
            } else {
                const double drift = std::abs(m.sup_ratio - sup_small) / sup_small;
                pass = pass && drift < 0.20;
                std::snprintf(buf, sizeof(buf), " [s=%.2f grid-drift %.1f%%]", s, 100.0 * drift);
                detail += buf;
            }
        }
    }
    h.result("8 commutator-suites", pass, detail);
}

// ---------------------------------------------------------------- criterion 9
void criterion_a_decomposition(Harness& h) {
    VerifyConfig vc;
    vc.grid = GridSpec(16, 32, kPi, 8.0);
    vc.cs = CrossSection(0.25, 1.0);
    vc.mult = MultiplierParams(0.25, 0.15, 1e-2, 1.0);
    vc.t = 0.5;
    vc.corpus = 3;
    vc.seed = 424242;
    const RatioSuite suite = check_A_decomposition(vc);
    VerifyConfig v0 = vc;
    v0.t = 0.0;
    v0.corpus = 1;
    const RatioSuite at0 = check_A_decomposition(v0);
    std::snprintf(buf, sizeof(buf),
                  "identity residual %.2e (tol 1e-8), A1 at t=0: %.2e, majorant sups %.3f/%.3f/%.3f",
                  suite.stat("identity_residual", 1.0), at0.stat("sup_A1", 1.0),
                  suite.stat("sup_A1"), suite.stat("sup_A2"), suite.stat("sup_A3"));
    h.result("9 a-decomposition",
             suite.stat("identity_residual", 1.0) <= 1e-8 && at0.stat("sup_A1", 1.0) <= 1e-13 &&
                 suite.pass,
             buf);
}

// --------------------------------------------------------------- criterion 10
void criterion_splitting_order(Harness& h) {
    SolverConfig sc;
    sc.grid = GridSpec(16, 32, kPi, 8.0);
    sc.cs = CrossSection(0.25, 1.0);
    sc.mult = MultiplierParams(0.25, 0.15, 1e-2, 1.0);
    sc.T = 0.24;
    sc.eps0 = 1e-3;
    sc.compute_norms = false;
    sc.dt = 0.0015; // reference: finest tested step / 8
    const KacSolver ref(sc);
    PhaseField g0 = make_corpus(ref.transform(), 1, 77).front();
    g0 *= sc.eps0 / norm_hr_l2(ref.transform(), g0, sc.mult.r);
    SolverConfig rc = sc;
    rc.dt = 0.01 / 8.0;
    const Trajectory tref = KacSolver(rc).solve_linear(g0, nullptr);
    std::vector<double> lx, ly;
    for (double dt : {0.04, 0.02, 0.01}) {
        SolverConfig s2 = sc;
        s2.dt = dt;
        const Trajectory t2 = KacSolver(s2).solve_linear(g0, nullptr);
        PhaseField diff = t2.fields.back();
        diff -= tref.fields.back();
        lx.push_back(std::log(dt));
        ly.push_back(std::log(diff.l2_norm()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(lx.size());
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::snprintf(buf, sizeof(buf), "dt-exponent %.3f (2.0 +- 0.2)", slope);
    h.result("10 splitting-order", std::abs(slope - 2.0) <= 0.2, buf);
}

// --------------------------------------------------------------- criterion 11
void criterion_determinism(Harness& h) {
    const std::string sim_cfg = write_tmp_cfg("accept_sim.cfg", R"(
grid.Nx = 16
grid.Nv = 32
grid.Lv = 8.0
cross_section.s = 0.25
multiplier.c0 = 0.15
solver.dt = 0.02
solver.T = 0.2
solver.eps0 = 1e-3
initial.kind = random_band
initial.seed = 9
output.convergence_report = false
)");
    std::string csv[2];
    for (int run = 0; run < 2; ++run) {
        CliOptions opt;
        opt.config_path = sim_cfg;
        opt.out_dir = "acceptance_out/det_sim_" + std::to_string(run);
        fs::remove_all(opt.out_dir);
        if (cmd_simulate(opt) != 0) {
            h.result("11 determinism", false, "simulate failed");
            return;
        }
        csv[run] = slurp(opt.out_dir + "/norms.csv");
    }
    // fits.json from two identical kolmogorov runs
    const std::string kol_cfg = write_tmp_cfg("accept_det_kol.cfg", R"(
grid.Nx = 64
grid.Nv = 128
kolmogorov.s = 0.5
kolmogorov.snapshots = 5
cross_section.s = 0.5
)");
    std::string fits[2];
    for (int run = 0; run < 2; ++run) {
        CliOptions opt;
        opt.config_path = kol_cfg;
        opt.out_dir = "acceptance_out/det_kol_" + std::to_string(run);
        fs::remove_all(opt.out_dir);
        if (cmd_kolmogorov(opt) != 0) {
            h.result("11 determinism", false, "kolmogorov failed");
            return;
        }
        fits[run] = slurp(opt.out_dir + "/fits.json");
    }
    const bool same_csv = !csv[0].empty() && csv[0] == csv[1];
    const bool same_fits = !fits[0].empty() && fits[0] == fits[1];
    std::snprintf(buf, sizeof(buf), "norms.csv byte-identical: %s, fits.json byte-identical: %s",
                  same_csv ? "yes" : "NO", same_fits ? "yes" : "NO");
    h.result("11 determinism", same_csv && same_fits, buf);
}

} // namespace

int main() {
    Harness h;
    criterion_kolmogorov_exactness(h);
    criterion_gevrey_exponents(h);
    criterion_bd_lemma(h);
    criterion_ukai(h);
    criterion_collision(h);
    criteria_reference_run(h);
    criterion_commutators(h);
    criterion_a_decomposition(h);
    criterion_splitting_order(h);
    criterion_determinism(h);
    if (h.failed) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", h.failed);
        return 1;
    }
    std::printf("ACCEPTANCE: all criteria satisfied\n");
    return 0;
}
