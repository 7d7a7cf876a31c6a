#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kac/grid.hpp"
#include "kac/quadrature.hpp"

namespace kac {

/// Non-cutoff cross section beta(theta) = C0 |cos theta| / |sin theta|^{1+2s}
/// on [-pi/2, pi/2], 0 < s < 1.
struct CrossSection {
    double s = 0.25;
    double C0 = 1.0;

    CrossSection() = default;
    CrossSection(double s_, double C0_);

    double beta(double theta) const;
};

struct CollisionQuadratureConfig {
    double eps = 1e-4;       // small-angle cutoff
    int panels = 0;          // 0 => derived from panel_ratio
    double panel_ratio = 2.0;
    int hermite_order = 40;
    int gl_per_panel = 8;
};

/// Theta rule: composite Gauss-Legendre panels on [eps, pi/2], graded
/// geometrically toward eps, used with exact +-theta mirroring (only the
/// positive half is stored).  Hermite rule for the Gaussian-weighted u
/// integral of the refined Bobylev formula.
class CollisionQuadrature {
public:
    explicit CollisionQuadrature(const CollisionQuadratureConfig& cfg = {});

    const CollisionQuadratureConfig& config() const { return cfg_; }
    const std::vector<double>& theta_nodes() const { return theta_; }    // positive half
    const std::vector<double>& theta_weights() const { return wtheta_; }
    const QuadratureRule& hermite() const { return hermite_; }

    /// Halved eps, doubled panel count, +50% Hermite order.
    CollisionQuadrature refined() const;

private:
    CollisionQuadratureConfig cfg_;
    std::vector<double> theta_;
    std::vector<double> wtheta_;
    QuadratureRule hermite_;
};

/// Spectral collision operator on v-lines via the refined Bobylev formula,
///   F(T(f,g,mu^alpha))(xi) = c_alpha int int beta(theta) e^{-u^2/(2 alpha)}
///       { fhat(u') ghat(xi') - fhat(u) ghat(xi) } du dtheta,
///   u' = xi sin theta + u cos theta,  xi' = xi cos theta - u sin theta,
///   c_alpha = (2 pi)^{-alpha/2} (2 pi alpha)^{-1/2};
/// alpha = 1/2 is K itself.  Off-grid values come from the sinc interpolation
/// basis, which makes the whole bilinear map a real 3-tensor B[m](a,b); the
/// tensor is assembled once (loss and gain under the same theta nodes, +-theta
/// accumulated together so the grazing cancellation is exact at paired nodes)
/// and each application is a pair of mat-vecs per output mode.
class KacOperator {
public:
    KacOperator(const GridSpec& spec, const CrossSection& cs, const CollisionQuadrature& quad,
                double alpha = 0.5);

    const GridSpec& spec() const { return spec_; }
    const CrossSection& cross_section() const { return cs_; }
    double alpha() const { return alpha_; }

    /// Bilinear application to spectral v-lines (storage order).
    std::vector<cplx> apply(const std::vector<cplx>& fhat, const std::vector<cplx>& ghat) const;

    /// Freeze the first slot: matrix acting on ghat.
    Eigen::MatrixXcd contract_f(const std::vector<cplx>& fhat) const;
    Eigen::MatrixXd contract_f(const std::vector<double>& fhat_real) const;
    /// Freeze the second slot: matrix acting on fhat.
    Eigen::MatrixXd contract_g(const std::vector<double>& ghat_real) const;

    const Eigen::MatrixXd& tensor(int m) const { return B_[m]; }

private:
    GridSpec spec_;
    CrossSection cs_;
    double alpha_;
    std::vector<Eigen::MatrixXd> B_;
};

/// Linearized operator L g = -K(sqrt(mu), g) - K(g, sqrt(mu)) as a real
/// matrix on spectral v-lines; the frozen sqrt(mu) transform is the closed
/// form from the maxwellian module.
class LinearizedOperator {
public:
    LinearizedOperator(const GridSpec& spec, const CrossSection& cs,
                       const CollisionQuadrature& quad);

    const Eigen::MatrixXd& matrix() const { return L_; }
    std::vector<cplx> apply(const std::vector<cplx>& ghat) const;

    /// Power-iteration estimate of the spectral radius (stability check).
    double spectral_radius_estimate(int iters = 50) const;

private:
    GridSpec spec_;
    Eigen::MatrixXd L_;
};

/// Slow physical-space oracles by direct quadrature (theta rule shared with
/// the spectral path, v* by the grid rectangle rule, off-grid samples by
/// trigonometric interpolation).  Intended for Nv <= 64.
std::vector<double> apply_K_oracle(const GridSpec& spec, const CrossSection& cs,
                                   const CollisionQuadrature& quad,
                                   const std::vector<double>& f, const std::vector<double>& g);

/// T(f,g,mu^alpha) in physical space.
std::vector<double> apply_T_oracle(const GridSpec& spec, const CrossSection& cs,
                                   const CollisionQuadrature& quad, double alpha,
                                   const std::vector<double>& f, const std::vector<double>& g);

/// K(f,g) applied per x-slice of full phase-space fields (collision is local
/// in x).
PhaseField apply_calK_full(const Transform& tr, const KacOperator& op, const PhaseField& f,
                           const PhaseField& g, int workers = 1);

PhaseField apply_L_full(const Transform& tr, const LinearizedOperator& L, const PhaseField& g,
                        int workers = 1);

struct ConvergenceReport {
    std::string op;
    double eps = 0.0;
    double delta_refine = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Relative change of apply(f,g) under quadrature refinement.
ConvergenceReport collision_convergence(const GridSpec& spec, const CrossSection& cs,
                                        const CollisionQuadrature& quad, double alpha,
                                        const std::vector<cplx>& fhat,
                                        const std::vector<cplx>& ghat, double tol);

/// L2 norm of the contribution of the theta band [band_lo, band_hi] to
/// apply(f,g); one_sided restricts to positive theta (grazing-tail scaling
/// measurements).
double grazing_band_norm(const GridSpec& spec, const CrossSection& cs, double alpha,
                         const std::vector<cplx>& fhat, const std::vector<cplx>& ghat,
                         double band_lo, double band_hi, bool one_sided, int hermite_order = 40);

} // namespace kac
