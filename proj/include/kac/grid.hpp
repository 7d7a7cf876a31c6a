#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace kac {

using cplx = std::complex<double>;

/// Uniform periodic phase-space grid on [-Lx,Lx) x [-Lv,Lv).
///
/// Transform convention: stored spectral coefficients are samples of the
/// continuous Fourier transform of the band-limited interpolant,
///   ghat(eta_k, xi_m) = hx*hv * sum_{j,l} g(x_j, v_l) e^{-i(x_j eta_k + v_l xi_m)},
/// with eta_k = pi k / Lx, xi_m = pi m / Lv, k in [-Nx/2, Nx/2).  The matching
/// dual measure is d_eta d_xi / (2 pi)^2, under which the discrete Plancherel
/// identity ||ghat|| = ||g|| holds to rounding.  Stray 2*pi factors relative
/// to the usual unitary-DFT notation are absorbed here once and for all.
struct GridSpec {
    int Nx = 0;
    int Nv = 0;
    double Lx = 3.14159265358979323846;
    double Lv = 10.0;

    GridSpec() = default;
    GridSpec(int nx, int nv, double lx, double lv);

    double hx() const { return 2.0 * Lx / Nx; }
    double hv() const { return 2.0 * Lv / Nv; }
    double deta() const { return 3.14159265358979323846 / Lx; }
    double dxi() const { return 3.14159265358979323846 / Lv; }

    double x(int j) const { return -Lx + j * hx(); }
    double v(int l) const { return -Lv + l * hv(); }
    /// Frequency of logical index k in [-N/2, N/2).
    double eta(int k) const { return deta() * k; }
    double xi(int m) const { return dxi() * m; }

    /// Logical frequency index of row r in storage order (r = (k + N) mod N).
    static int freq_index(int r, int n) { return r < n / 2 ? r : r - n; }

    bool operator==(const GridSpec& o) const {
        return Nx == o.Nx && Nv == o.Nv && Lx == o.Lx && Lv == o.Lv;
    }
};

class SpectralField;

/// Real-valued field g(x_j, v_l), row-major with x as the slow index.
class PhaseField {
public:
    PhaseField() = default;
    PhaseField(const GridSpec& spec, double fill = 0.0);
    PhaseField(const GridSpec& spec, std::vector<double> data);

    const GridSpec& spec() const { return spec_; }
    double& at(int j, int l) { return data_[static_cast<std::size_t>(j) * spec_.Nv + l]; }
    double at(int j, int l) const { return data_[static_cast<std::size_t>(j) * spec_.Nv + l]; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool finite() const;
    /// L2 norm with the physical measure hx*hv.
    double l2_norm() const;

    PhaseField& operator+=(const PhaseField& o);
    PhaseField& operator-=(const PhaseField& o);
    PhaseField& operator*=(double a);

private:
    GridSpec spec_;
    std::vector<double> data_;
};

/// Complex spectral coefficients on the dual grid, indexed storage-order
/// (row r <-> eta index k = freq_index(r, Nx), column c <-> xi index m).
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    cplx& at(int r, int c) { return coef_[static_cast<std::size_t>(r) * spec_.Nv + c]; }
    cplx at(int r, int c) const { return coef_[static_cast<std::size_t>(r) * spec_.Nv + c]; }
    std::vector<cplx>& coef() { return coef_; }
    const std::vector<cplx>& coef() const { return coef_; }

    /// Coefficient at logical frequency indices (k, m), k in [-Nx/2, Nx/2).
    cplx at_freq(int k, int m) const {
        const int r = k >= 0 ? k : k + spec_.Nx;
        const int c = m >= 0 ? m : m + spec_.Nv;
        return at(r, c);
    }

    bool finite() const;
    /// L2 norm with the dual measure deta*dxi/(2 pi)^2; equals the physical
    /// L2 norm of the corresponding field (Plancherel).
    double l2_norm() const;

private:
    GridSpec spec_;
    std::vector<cplx> coef_;
};

/// FFT engine bound to one GridSpec; owns FFTW plans (FFTW_ESTIMATE for
/// reproducible plans).  All transforms carry the physical/dual measure
/// scalings described on GridSpec.
class Transform {
public:
    explicit Transform(const GridSpec& spec);
    ~Transform();
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;

    const GridSpec& spec() const { return spec_; }

    SpectralField forward(const PhaseField& f) const;
    PhaseField inverse(const SpectralField& sf) const;

    /// x-direction only: rows indexed by eta (storage order), columns physical v.
    std::vector<cplx> forward_x(const PhaseField& f) const;
    PhaseField inverse_x(const std::vector<cplx>& mixed) const;

    /// v-direction only on one x-slice: input Nv physical samples, output Nv
    /// spectral samples in storage order.
    std::vector<cplx> forward_v(const double* slice) const;
    std::vector<cplx> forward_v(const std::vector<cplx>& slice) const;
    std::vector<cplx> inverse_v(const std::vector<cplx>& line) const;

private:
    struct Impl;
    GridSpec spec_;
    std::unique_ptr<Impl> impl_;
};

/// Value at xi_star of the continuous Fourier transform of the band-limited
/// interpolant represented by a spectral line (length Nv, storage order).
/// Exactly the stored coefficient when xi_star is a grid frequency.
cplx eval_offgrid_v(const GridSpec& spec, const cplx* line, double xi_star);
cplx eval_offgrid_v(const GridSpec& spec, const std::vector<cplx>& line, double xi_star);

/// Interpolation weights S_a(xi_star) = sinc((xi_a - xi_star) Lv) in storage
/// order, so that eval = sum_a line[a] * w[a].
void offgrid_weights_v(const GridSpec& spec, double xi_star, double* w);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Trigonometric interpolation of a real periodic v-line at an arbitrary
/// point (Nyquist mode treated as cos so the interpolant is real).
double eval_physical_v(const GridSpec& spec, const std::vector<cplx>& line, double v_star);

/// KACFIELD-v1 snapshot file (24-byte magic, one-line JSON header, raw
/// little-endian float64 row-major payload).
void write_field(const std::string& path, const PhaseField& f, double t);
PhaseField read_field(const std::string& path, double* t_out = nullptr);

} // namespace kac
