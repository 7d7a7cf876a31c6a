#include "kac/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace kac {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kPi = 3.14159265358979323846;

} // namespace

GridSpec::GridSpec(int nx, int nv, double lx, double lv) : Nx(nx), Nv(nv), Lx(lx), Lv(lv) {
    if (!power_of_two(Nx) || Nx < 8) throw std::invalid_argument("GridSpec: Nx must be a power of two >= 8");
    if (!power_of_two(Nv) || Nv < 8) throw std::invalid_argument("GridSpec: Nv must be a power of two >= 8");
    if (!(Lx > 0.0)) throw std::invalid_argument("GridSpec: Lx must be positive");
    if (!(Lv >= 8.0)) throw std::invalid_argument("GridSpec: Lv must be >= 8 (equilibrium tail below 1e-13)");
}

PhaseField::PhaseField(const GridSpec& spec, double fill)
    : spec_(spec), data_(static_cast<std::size_t>(spec.Nx) * spec.Nv, fill) {}

PhaseField::PhaseField(const GridSpec& spec, std::vector<double> data)
    : spec_(spec), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(spec.Nx) * spec.Nv)
        throw std::invalid_argument("PhaseField: data size does not match grid");
}

bool PhaseField::finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

double PhaseField::l2_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s * spec_.hx() * spec_.hv());
}

PhaseField& PhaseField::operator+=(const PhaseField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

PhaseField& PhaseField::operator-=(const PhaseField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

PhaseField& PhaseField::operator*=(double a) {
    for (double& x : data_) x *= a;
    return *this;
}

SpectralField::SpectralField(const GridSpec& spec)
    : spec_(spec), coef_(static_cast<std::size_t>(spec.Nx) * spec.Nv, cplx(0.0, 0.0)) {}

bool SpectralField::finite() const {
    for (const cplx& z : coef_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double SpectralField::l2_norm() const {
    double s = 0.0;
    for (const cplx& z : coef_) s += std::norm(z);
    const double meas = spec_.deta() * spec_.dxi() / (4.0 * kPi * kPi);
    return std::sqrt(s * meas);
}

struct Transform::Impl {
    fftw_plan fwd2 = nullptr, bwd2 = nullptr;
    fftw_plan fwd_x = nullptr, bwd_x = nullptr;
    fftw_plan fwd_v = nullptr, bwd_v = nullptr;
    fftw_complex* buf_a = nullptr;
    fftw_complex* buf_b = nullptr;
    fftw_complex* line_a = nullptr;
    fftw_complex* line_b = nullptr;
};

Transform::Transform(const GridSpec& spec) : spec_(spec), impl_(new Impl) {
    const int nx = spec.Nx, nv = spec.Nv;
    impl_->buf_a = fftw_alloc_complex(static_cast<std::size_t>(nx) * nv);
    impl_->buf_b = fftw_alloc_complex(static_cast<std::size_t>(nx) * nv);
    impl_->line_a = fftw_alloc_complex(nv);
    impl_->line_b = fftw_alloc_complex(nv);
    impl_->fwd2 = fftw_plan_dft_2d(nx, nv, impl_->buf_a, impl_->buf_b, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd2 = fftw_plan_dft_2d(nx, nv, impl_->buf_a, impl_->buf_b, FFTW_BACKWARD, FFTW_ESTIMATE);
    // x-only transform: nx points with stride nv, nv such lines.
    const int n[1] = {nx};
    impl_->fwd_x = fftw_plan_many_dft(1, n, nv, impl_->buf_a, nullptr, nv, 1, impl_->buf_b,
                                      nullptr, nv, 1, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd_x = fftw_plan_many_dft(1, n, nv, impl_->buf_a, nullptr, nv, 1, impl_->buf_b,
                                      nullptr, nv, 1, FFTW_BACKWARD, FFTW_ESTIMATE);
    impl_->fwd_v = fftw_plan_dft_1d(nv, impl_->line_a, impl_->line_b, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd_v = fftw_plan_dft_1d(nv, impl_->line_a, impl_->line_b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Transform::~Transform() {
    if (!impl_) return;
    fftw_destroy_plan(impl_->fwd2);
    fftw_destroy_plan(impl_->bwd2);
    fftw_destroy_plan(impl_->fwd_x);
    fftw_destroy_plan(impl_->bwd_x);
    fftw_destroy_plan(impl_->fwd_v);
    fftw_destroy_plan(impl_->bwd_v);
    fftw_free(impl_->buf_a);
    fftw_free(impl_->buf_b);
    fftw_free(impl_->line_a);
    fftw_free(impl_->line_b);
}

namespace {

// e^{-i x_j eta_k} with x_j = -L + j h equals (-1)^k e^{-2 pi i jk/N}; the
// sign flips convert FFTW bin phases to the centred-grid convention.
inline double parity(int storage_row, int n) {
    const int k = GridSpec::freq_index(storage_row, n);
    return (k & 1) ? -1.0 : 1.0;
}

} // namespace

SpectralField Transform::forward(const PhaseField& f) const {
    if (!(f.spec() == spec_)) throw std::invalid_argument("Transform::forward: grid mismatch");
    if (!f.finite()) throw std::invalid_argument("Transform::forward: non-finite input field");
    const int nx = spec_.Nx, nv = spec_.Nv;
    for (int j = 0; j < nx; ++j)
        for (int l = 0; l < nv; ++l) {
            impl_->buf_a[static_cast<std::size_t>(j) * nv + l][0] = f.at(j, l);
            impl_->buf_a[static_cast<std::size_t>(j) * nv + l][1] = 0.0;
        }
    fftw_execute(impl_->fwd2);
    SpectralField out(spec_);
    const double scale = spec_.hx() * spec_.hv();
    for (int r = 0; r < nx; ++r) {
        const double px = parity(r, nx);
        for (int c = 0; c < nv; ++c) {
            const double p = px * parity(c, nv) * scale;
            const fftw_complex& z = impl_->buf_b[static_cast<std::size_t>(r) * nv + c];
            out.at(r, c) = cplx(p * z[0], p * z[1]);
        }
    }
    return out;
}

PhaseField Transform::inverse(const SpectralField& sf) const {
    if (!(sf.spec() == spec_)) throw std::invalid_argument("Transform::inverse: grid mismatch");
    if (!sf.finite()) throw std::invalid_argument("Transform::inverse: non-finite input field");
    const int nx = spec_.Nx, nv = spec_.Nv;
    for (int r = 0; r < nx; ++r) {
        const double px = parity(r, nx);
        for (int c = 0; c < nv; ++c) {
            const double p = px * parity(c, nv);
            const cplx z = sf.at(r, c);
            impl_->buf_a[static_cast<std::size_t>(r) * nv + c][0] = p * z.real();
            impl_->buf_a[static_cast<std::size_t>(r) * nv + c][1] = p * z.imag();
        }
    }
    fftw_execute(impl_->bwd2);
    PhaseField out(spec_);
    const double scale = 1.0 / (4.0 * spec_.Lx * spec_.Lv);
    for (int j = 0; j < nx; ++j)
        for (int l = 0; l < nv; ++l)
            out.at(j, l) = scale * impl_->buf_b[static_cast<std::size_t>(j) * nv + l][0];
    return out;
}

std::vector<cplx> Transform::forward_x(const PhaseField& f) const {
    if (!(f.spec() == spec_)) throw std::invalid_argument("Transform::forward_x: grid mismatch");
    const int nx = spec_.Nx, nv = spec_.Nv;
    for (std::size_t i = 0; i < static_cast<std::size_t>(nx) * nv; ++i) {
        impl_->buf_a[i][0] = f.data()[i];
        impl_->buf_a[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd_x);
    std::vector<cplx> out(static_cast<std::size_t>(nx) * nv);
    const double scale = spec_.hx();
    for (int r = 0; r < nx; ++r) {
        const double p = parity(r, nx) * scale;
        for (int l = 0; l < nv; ++l) {
            const fftw_complex& z = impl_->buf_b[static_cast<std::size_t>(r) * nv + l];
            out[static_cast<std::size_t>(r) * nv + l] = cplx(p * z[0], p * z[1]);
        }
    }
    return out;
}

PhaseField Transform::inverse_x(const std::vector<cplx>& mixed) const {
    const int nx = spec_.Nx, nv = spec_.Nv;
    if (mixed.size() != static_cast<std::size_t>(nx) * nv)
        throw std::invalid_argument("Transform::inverse_x: size mismatch");
    for (int r = 0; r < nx; ++r) {
        const double p = parity(r, nx);
        for (int l = 0; l < nv; ++l) {
            const cplx z = mixed[static_cast<std::size_t>(r) * nv + l];
            impl_->buf_a[static_cast<std::size_t>(r) * nv + l][0] = p * z.real();
            impl_->buf_a[static_cast<std::size_t>(r) * nv + l][1] = p * z.imag();
        }
    }
    fftw_execute(impl_->bwd_x);
    PhaseField out(spec_);
    const double scale = 1.0 / (2.0 * spec_.Lx);
    for (std::size_t i = 0; i < static_cast<std::size_t>(nx) * nv; ++i)
        out.data()[i] = scale * impl_->buf_b[i][0];
    return out;
}

std::vector<cplx> Transform::forward_v(const double* slice) const {
    const int nv = spec_.Nv;
    for (int l = 0; l < nv; ++l) {
        impl_->line_a[l][0] = slice[l];
        impl_->line_a[l][1] = 0.0;
    }
    fftw_execute(impl_->fwd_v);
    std::vector<cplx> out(nv);
    const double scale = spec_.hv();
    for (int c = 0; c < nv; ++c) {
        const double p = parity(c, nv) * scale;
        out[c] = cplx(p * impl_->line_b[c][0], p * impl_->line_b[c][1]);
    }
    return out;
}

std::vector<cplx> Transform::forward_v(const std::vector<cplx>& slice) const {
    const int nv = spec_.Nv;
    if (static_cast<int>(slice.size()) != nv)
        throw std::invalid_argument("Transform::forward_v: size mismatch");
    for (int l = 0; l < nv; ++l) {
        impl_->line_a[l][0] = slice[l].real();
        impl_->line_a[l][1] = slice[l].imag();
    }
    fftw_execute(impl_->fwd_v);
    std::vector<cplx> out(nv);
    const double scale = spec_.hv();
    for (int c = 0; c < nv; ++c) {
        const double p = parity(c, nv) * scale;
        out[c] = cplx(p * impl_->line_b[c][0], p * impl_->line_b[c][1]);
    }
    return out;
}

std::vector<cplx> Transform::inverse_v(const std::vector<cplx>& line) const {
    const int nv = spec_.Nv;
    if (static_cast<int>(line.size()) != nv)
        throw std::invalid_argument("Transform::inverse_v: size mismatch");
    for (int c = 0; c < nv; ++c) {
        const double p = parity(c, nv);
        impl_->line_a[c][0] = p * line[c].real();
        impl_->line_a[c][1] = p * line[c].imag();
    }
    fftw_execute(impl_->bwd_v);
    std::vector<cplx> out(nv);
    const double scale = 1.0 / (2.0 * spec_.Lv);
    for (int l = 0; l < nv; ++l)
        out[l] = cplx(scale * impl_->line_b[l][0], scale * impl_->line_b[l][1]);
    return out;
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

void offgrid_weights_v(const GridSpec& spec, double xi_star, double* w) {
    const int nv = spec.Nv;
    // sinc((xi_a - xi*)Lv) = sin(pi a - xi* Lv)/(pi a - xi* Lv); the sine
    // alternates sign with a, so one sin evaluation serves the whole line.
    const double z = xi_star * spec.Lv;
    const double s = std::sin(-z);
    for (int c = 0; c < nv; ++c) {
        const int a = GridSpec::freq_index(c, nv);
        const double arg = kPi * a - z;
        if (std::abs(arg) < 1e-8) {
            w[c] = sinc(arg);
        } else {
            w[c] = ((a & 1) ? -s : s) / arg;
        }
    }
}

cplx eval_offgrid_v(const GridSpec& spec, const cplx* line, double xi_star) {
    const int nv = spec.Nv;
    const double z = xi_star * spec.Lv;
    const double s = std::sin(-z);
    cplx acc(0.0, 0.0);
    for (int c = 0; c < nv; ++c) {
        const int a = GridSpec::freq_index(c, nv);
        const double arg = kPi * a - z;
        double w;
        if (std::abs(arg) < 1e-8) {
            w = sinc(arg);
        } else {
            w = ((a & 1) ? -s : s) / arg;
        }
        acc += w * line[c];
    }
    return acc;
}

cplx eval_offgrid_v(const GridSpec& spec, const std::vector<cplx>& line, double xi_star) {
    if (static_cast<int>(line.size()) != spec.Nv)
        throw std::invalid_argument("eval_offgrid_v: line length mismatch");
    return eval_offgrid_v(spec, line.data(), xi_star);
}

double eval_physical_v(const GridSpec& spec, const std::vector<cplx>& line, double v_star) {
    if (static_cast<int>(line.size()) != spec.Nv)
        throw std::invalid_argument("eval_physical_v: line length mismatch");
    const int nv = spec.Nv;
    const double inv_box = 1.0 / (2.0 * spec.Lv);
    double acc = 0.0;
    for (int c = 0; c < nv; ++c) {
        const int m = GridSpec::freq_index(c, nv);
        const double ph = spec.xi(m) * v_star;
        const cplx z = line[c];
        if (m == -nv / 2) {
            // unpaired Nyquist mode enters as a cosine to keep the interpolant real
            acc += z.real() * std::cos(ph);
        } else {
            acc += z.real() * std::cos(ph) - z.imag() * std::sin(ph);
        }
    }
    return acc * inv_box;
}

namespace {

constexpr char kMagic[25] = "KACFIELD-v1            \n"; // 24 bytes + NUL

} // namespace

void write_field(const std::string& path, const PhaseField& f, double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_field: cannot open " + path);
    os.write(kMagic, 24);
    nlohmann::json hdr;
    hdr["Nx"] = f.spec().Nx;
    hdr["Nv"] = f.spec().Nv;
    hdr["Lx"] = f.spec().Lx;
    hdr["Lv"] = f.spec().Lv;
    hdr["t"] = t;
    const std::string line = hdr.dump() + "\n";
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
    os.write(reinterpret_cast<const char*>(f.data().data()),
             static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    if (!os) throw std::runtime_error("write_field: write failed for " + path);
}

PhaseField read_field(const std::string& path, double* t_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_field: cannot open " + path);
    char magic[24];
    is.read(magic, 24);
    if (!is || std::memcmp(magic, kMagic, 24) != 0)
        throw std::runtime_error("read_field: bad magic in " + path);
    std::string hdr_line;
    std::getline(is, hdr_line);
    const nlohmann::json hdr = nlohmann::json::parse(hdr_line);
    GridSpec spec(hdr.at("Nx").get<int>(), hdr.at("Nv").get<int>(),
                  hdr.at("Lx").get<double>(), hdr.at("Lv").get<double>());
    if (t_out) *t_out = hdr.at("t").get<double>();
    PhaseField f(spec);
    is.read(reinterpret_cast<char*>(f.data().data()),
            static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_field: truncated payload in " + path);
    return f;
}

} // namespace kac
