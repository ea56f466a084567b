// shimsign: build a level-1 eigenform, recover a(t n^2) through the Shimura
// relations and report sign statistics.
//
//   shimsign coeffs   --weight 12 --t 1 --nmax 100000 --out stream.csv
//   shimsign equidist --checkpoints 100,1000,10000 --C 10
//   shimsign primes   --format json --bins 20
//   shimsign probe    --set neg --zgrid 1.5,1.2,1.1,1.05,1.01

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "shimsign/experiment.hpp"

namespace {

void add_common_flags(CLI::App* cmd, shimsign::ExperimentConfig& cfg, std::string& cache) {
    cmd->add_option("--weight", cfg.weight, "Weight 2k of the level-1 eigenform (12,16,18,20,22,26)");
    cmd->add_option("--t", cfg.t, "Squarefree t >= 1");
    cmd->add_option("--nmax", cfg.nmax, "Coefficient precision N");
    cmd->add_option("--checkpoints", cfg.checkpoints, "Ascending cutoffs (default: powers of 10)")
        ->delimiter(',');
    cmd->add_option("--C", cfg.C, "Constant of the Halasz-type bound");
    cmd->add_option("--bins", cfg.bins, "Sato-Tate histogram bins");
    cmd->add_option("--out", cfg.out, "Output path, '-' for stdout");
    cmd->add_option("--format", cfg.format, "csv or json");
    cmd->add_option("--cache", cache, "Eigenform coefficient cache file");
    cmd->add_option("--trials", cfg.trials, "Random coprime pairs checked for multiplicativity");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sign statistics of Shimura-lifted half-integral weight coefficients"};
    app.require_subcommand(1);

    shimsign::ExperimentConfig cfg;
    std::string cache;

    auto* coeffs = app.add_subcommand("coeffs", "Write the a(t n^2) stream as CSV");
    auto* equidist = app.add_subcommand("equidist", "Sign counts, mean value and Halasz bound per checkpoint");
    auto* primes = app.add_subcommand("primes", "Prime sign partition, exceptional primes, Sato-Tate histogram");
    auto* probe = app.add_subcommand("probe", "Dirichlet-density probe for a set of primes");
    for (auto* cmd : {coeffs, equidist, primes, probe}) {
        add_common_flags(cmd, cfg, cache);
    }
    probe->add_option("--set", cfg.probe_set, "all, pos, neg or zero");
    probe->add_option("--zgrid", cfg.zgrid, "Grid of z in (1,2]")->delimiter(',');
    probe->add_option("--cutoff", cfg.probe_cutoff, "Largest prime included (default nmax)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : shimsign::kExitConfig;
    }
    if (!cache.empty()) {
        cfg.cache = cache;
    }

    if (coeffs->parsed()) {
        return shimsign::cmd_coeffs(cfg);
    }
    if (equidist->parsed()) {
        return shimsign::cmd_equidist(cfg);
    }
    if (primes->parsed()) {
        if (primes->get_option("--format")->count() == 0) {
            cfg.format = "json";
        }
        return shimsign::cmd_primes(cfg);
    }
    if (probe->parsed()) {
        if (probe->get_option("--format")->count() == 0) {
            cfg.format = "json";
        }
        return shimsign::cmd_probe(cfg);
    }
    return shimsign::kExitConfig;
}
