#include <string>

#include "CLI11.hpp"

#include "kac/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fourier-spectral solver and verification harness for the non-cutoff Kac equation"};
    app.require_subcommand(1);

    kac::CliOptions opt;
    std::string suite;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opt.config_path, "run configuration file");
        if (config_required) c->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--workers", opt.workers, "worker thread count");
        sub->add_option("--seed", opt.seed, "seed override (0 = config value)");
    };

    CLI::App* kol = app.add_subcommand("kolmogorov", "exact fractional-Kolmogorov run + radius fits");
    add_common(kol, true);
    CLI::App* sim = app.add_subcommand("simulate", "Kac run (picard or direct) with norm reports");
    add_common(sim, true);
    CLI::App* ver = app.add_subcommand("verify", "lemma/inequality regression suites");
    ver->add_option("suite", suite, "suite selector (or 'all')");
    add_common(ver, true);
    CLI::App* fit = app.add_subcommand("fit", "Gevrey radius fits from stored snapshots");
    add_common(fit, true);

    CLI11_PARSE(app, argc, argv);

    if (kol->parsed()) return kac::cmd_kolmogorov(opt);
    if (sim->parsed()) return kac::cmd_simulate(opt);
    if (ver->parsed()) return kac::cmd_verify(suite, opt);
    if (fit->parsed()) return kac::cmd_fit(opt);
    return 2;
}
