#pragma once

#include <cstdint>
#include <string>

#include "kac/config.hpp"
#include "kac/grid.hpp"
#include "kac/solver.hpp"

namespace kac {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes shared by all subcommands: 0 ok, 2 config error, 3 numerical
/// failure, 4 Picard non-convergence; cmd_verify returns 1 when a suite fails.
struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 1;
    std::uint64_t seed = 0; // 0 = take the config's seed
};

GridSpec grid_from_config(const Config& cfg, int default_nx = 32, int default_nv = 64);
CrossSection cross_section_from_config(const Config& cfg);
CollisionQuadratureConfig quad_from_config(const Config& cfg);
MultiplierParams multiplier_from_config(const Config& cfg, double c0_override = 0.0);
SolverConfig solver_from_config(const Config& cfg, int workers);

/// Seeded initial field per initial.kind = random_band | zero | delta_v.
PhaseField make_initial_field(const Transform& tr, const Config& cfg, std::uint64_t seed);

int cmd_kolmogorov(const CliOptions& opt);
int cmd_simulate(const CliOptions& opt);
int cmd_verify(const std::string& selector, const CliOptions& opt);
int cmd_fit(const CliOptions& opt);

/// FNV-1a 64-bit file hash, hex string (manifest entries).
std::string hash_file(const std::string& path);

} // namespace kac
