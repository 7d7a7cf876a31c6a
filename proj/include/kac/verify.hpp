#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kac/collision.hpp"
#include "kac/grid.hpp"
#include "kac/multiplier.hpp"
#include "kac/norms.hpp"

namespace kac {

/// Seed-deterministic corpus of band-limited Gaussian-random fields with
/// spectra ~ <eta>^{-2} <xi>^{-2}.  The band defaults to half the usable
/// band of the grid; passing it explicitly keeps the continuum fields fixed
/// across resolutions (grid-doubling studies).
std::vector<PhaseField> make_corpus(const Transform& tr, int count, std::uint64_t seed,
                                    int kx_max = -1, int kv_max = -1);

struct RatioSuite {
    std::string name;
    std::int64_t n_samples = 0;
    double sup_ratio = 0.0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> stats;

    double stat(const std::string& key, double fallback = 0.0) const;
};

struct VerifyConfig {
    GridSpec grid{32, 64, 3.14159265358979323846, 10.0};
    CrossSection cs{0.25, 1.0};
    CollisionQuadratureConfig quad{};
    MultiplierParams mult{0.25, 0.25, 1e-2, 1.0};
    double t = 0.5; // weight evaluation time
    int corpus = 16;
    std::uint64_t seed = 20240808;
    int workers = 1;
    int corpus_kx = -1; // explicit corpus band (grid-doubling studies)
    int corpus_kv = -1;
};

/// |(K(f,g),h)_{H^r_x(L^2_v)}| <= C ||f||_{H^r_x(L^2_v)} |||g|||_{(r,0)} |||h|||_{(r,0)};
/// sup ratio over corpus triples plus a quadrature-refinement drift stat.
RatioSuite check_trilinear_K(const VerifyConfig& cfg, bool with_refinement = true);

/// Same bound for T(f,g,mu^alpha), alpha > 1/4.
RatioSuite check_trilinear_T(const VerifyConfig& cfg, double alpha);

/// |([L, M_delta] g, h)| <= C ||M_delta g|| ||h||, delta-uniform (<10% spread).
RatioSuite check_commutator_L_M(const VerifyConfig& cfg, const std::vector<double>& deltas);

/// |([L, G_delta] g, h)| <= C ||<v>^s G_delta g|| ||h||.
RatioSuite check_commutator_L_G(const VerifyConfig& cfg, const std::vector<double>& deltas);

/// A1+A2+A3 decomposition of (M_delta K(f,g), h): term definitions checked
/// against the undecomposed pairing at rounding level, each |A_i| against its
/// majorant, plus a quadrature-level cross-check against the tensor path.
RatioSuite check_A_decomposition(const VerifyConfig& cfg);

/// |(K(f, G_delta g) - G_delta K(f,g), h)| <= C ||G f|| ||G g|| |||h|||_{(r,0)}.
RatioSuite check_nonlinear_G_commutator(const VerifyConfig& cfg);

} // namespace kac
