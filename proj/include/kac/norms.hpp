#pragma once

#include <string>
#include <vector>

#include "kac/collision.hpp"
#include "kac/grid.hpp"
#include "kac/multiplier.hpp"

namespace kac {

/// ||g||_{H^r_x(L^2_v)} via Plancherel: weight <eta>^r on the 2D transform.
double norm_hr_l2(const Transform& tr, const PhaseField& g, double r);
double norm_hr_l2(const SpectralField& ghat, double r);

/// ||g||_{H^r_x(H^s_v)}: weights <eta>^r <xi>^s.
double norm_hr_hs(const SpectralField& ghat, double r, double s);

/// ||<v>^s g||_{H^r_x(L^2_v)}.
double norm_vweight(const Transform& tr, const PhaseField& g, double r, double s);

/// Pointwise M_delta(t,eta,xi) on the dual grid (storage order).
std::vector<double> mdelta_table(const GridSpec& spec, const PsiEvaluator& p, double t);

/// ghat multiplied by M_delta(t, eta, xi).
SpectralField apply_multiplier_m(const SpectralField& ghat, const PsiEvaluator& p, double t);
SpectralField apply_multiplier_m(const SpectralField& ghat, const std::vector<double>& table);

/// g multiplied by G_delta(t, v) in physical space.
PhaseField apply_weight_g(const PhaseField& g, const PsiEvaluator& p, double t);

/// ||M_delta g||_{H^r_x(L^2_v)}.
double weighted_norm_m(const Transform& tr, const PhaseField& g, const PsiEvaluator& p, double t);
double weighted_norm_m(const SpectralField& ghat, const PsiEvaluator& p, double t);

/// ||G_delta g||_{H^r_x(L^2_v)} (weight applied in physical v, <eta>^r in x).
double weighted_norm_g(const Transform& tr, const PhaseField& g, const PsiEvaluator& p, double t);

/// Anisotropic norm of the linearized operator,
///   |||g|||^2 = int beta mu_* (g'-g)^2 + int beta g_*^2 (sqrt(mu)'-sqrt(mu))^2,
/// discretized exactly as defined: v on the grid, v* by the Hermite rule
/// against mu(v*), theta by the shared symmetric graded rule, g(v') by
/// trigonometric interpolation.  The whole sum is a positive-semidefinite
/// quadratic form in the slice values; the matrix is assembled once per
/// (grid, cross-section, rule), so an evaluation is a single mat-vec and
/// constants are annihilated exactly.  `squared_quadrature` re-evaluates the
/// defining sums point by point as an independent oracle for the assembly.
class TripleNorm {
public:
    TripleNorm(const GridSpec& spec, const CrossSection& cs, const CollisionQuadrature& quad);

    const GridSpec& spec() const { return spec_; }

    /// |||g|||^2 for one v-line of physical samples.
    double squared(const std::vector<double>& v_slice) const;

    /// Defining sums evaluated directly (slow; oracle for the matrix build).
    double squared_quadrature(const std::vector<double>& v_slice,
                              const std::vector<cplx>& vhat) const;

    /// |||g|||_{(r,0)}^2 = int ||| <D_x>^r g |||^2 dx, from the 2D transform.
    double r0_squared(const Transform& tr, const SpectralField& ghat, double r) const;
    double r0_squared(const Transform& tr, const PhaseField& g, double r) const;

private:
    GridSpec spec_;
    CrossSection cs_;
    std::vector<double> theta_;  // positive half
    std::vector<double> wtheta_;
    QuadratureRule hermite_;
    std::vector<double> term2_weight_; // W(v) for the second term
    Eigen::MatrixXd Q_;                // full quadratic form, term 2 folded in
};

struct NormReport {
    double t = 0.0;
    double h_r_l2 = 0.0;
    double triple_r0 = 0.0;
    std::vector<double> weighted_m; // aligned with the delta sweep
    std::vector<double> weighted_g;
    double sobolev_hs = 0.0;
    double vweight = 0.0;
    // audit quantities at the audit delta
    double weighted_m_audit = 0.0;
    double triple_r0_m_audit = 0.0;
    double weighted_g_audit = 0.0;
    double triple_r0_g_audit = 0.0;
};

NormReport compute_norm_report(const Transform& tr, const TripleNorm& tn, const PhaseField& g,
                               double t, const MultiplierParams& base,
                               const std::vector<double>& delta_sweep);

enum class FitDirection { X, V, VelocityDecay };

struct FitReport {
    std::string direction;
    double radius_estimate = 0.0;   // c in rho(t) ~ c t^p
    double exponent_estimate = 0.0; // p
    double r2 = 0.0;
    std::string window;
    std::vector<double> times;
    std::vector<double> rho;
};

/// Fits the decay radius series rho(t) from spectra relative to the first
/// snapshot (baseline differencing removes the initial-data profile), then
/// the growth exponent from log rho vs log t.  Modes below the noise floor
/// 10*eps*max|ghat| and the top frequency octave are excluded.
FitReport fit_gevrey_radius(const std::vector<double>& times,
                            const std::vector<SpectralField>& snaps, FitDirection dir,
                            double s_tilde, const Transform* tr = nullptr);

} // namespace kac
