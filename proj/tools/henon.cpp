#include "henon/error.hpp"
#include "henon/report.hpp"

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<int> N, m, k, grid, workers;
    std::optional<double> alpha, p, xmax, tol;
    std::optional<std::string> out, symmetry;
    bool zero_potential = false;
    bool eigenfunctions = false;
    bool no_cache = false;
    std::optional<std::string> axis;
    std::optional<double> from, to;
    std::optional<int> steps, oracle_n;
};

henon::report::RunConfig resolve(const Overrides& o)
{
    henon::report::RunConfig cfg;
    if (!o.config.empty()) cfg = henon::report::load_config(o.config);
    if (o.N) cfg.N = *o.N;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.p) cfg.p = *o.p;
    if (o.m) cfg.m = *o.m;
    if (o.k) cfg.k = *o.k;
    if (o.grid) cfg.spectral.grid = *o.grid;
    if (o.xmax) cfg.spectral.x_max = *o.xmax;
    if (o.tol) cfg.spectral.tol = *o.tol;
    if (o.out) cfg.out = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    if (o.symmetry) cfg.symmetry = *o.symmetry;
    if (o.zero_potential) cfg.zero_potential = true;
    if (o.eigenfunctions) cfg.eigenfunctions = true;
    if (o.no_cache) cfg.use_cache = false;
    if (o.axis) cfg.sweep.axis = *o.axis;
    if (o.from) cfg.sweep.from = *o.from;
    if (o.to) cfg.sweep.to = *o.to;
    if (o.steps) cfg.sweep.steps = *o.steps;
    if (o.oracle_n) cfg.oracle.n = *o.oracle_n;
    return cfg;
}

void common_flags(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config, "JSON run configuration; flags override its fields");
    sub->add_option("--N", o.N, "space dimension");
    sub->add_option("--alpha", o.alpha, "weight exponent");
    sub->add_option("--p", o.p, "power of the nonlinearity");
    sub->add_option("--m", o.m, "number of nodal zones");
    sub->add_option("--k", o.k, "eigenvalues requested");
    sub->add_option("--grid", o.grid, "intervals of the fine spectral grid");
    sub->add_option("--xmax", o.xmax, "fixed right end of the Liouville half line");
    sub->add_option("--tol", o.tol, "accepted fine/coarse eigenvalue disagreement");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "threads for sweeps");
    sub->add_option("--symmetry", o.symmetry, "full, trivial, cyclic:q or table:n0,n1,...");
    sub->add_flag("--no-cache", o.no_cache, "ignore and do not write out/cache");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nodal radial solutions of the Henon problem and their Morse index"};
    app.require_subcommand(1);
    Overrides o;

    auto* solve = app.add_subcommand("solve", "radial nodal profile");
    auto* spectrum = app.add_subcommand("spectrum", "singular and standard radial spectra");
    auto* morse = app.add_subcommand("morse", "Morse index report");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    auto* oracle = app.add_subcommand("oracle", "compare against the dense r-grid solve");
    for (auto* s : {solve, spectrum, morse, sweep, oracle}) common_flags(s, o);
    spectrum->add_flag("--zero-potential", o.zero_potential, "use a = 0 instead of the linearization");
    spectrum->add_flag("--eigenfunctions", o.eigenfunctions, "also write eigenfunction CSVs");
    oracle->add_flag("--zero-potential", o.zero_potential, "use a = 0 instead of the linearization");
    sweep->add_option("--axis", o.axis, "p or alpha");
    sweep->add_option("--from", o.from);
    sweep->add_option("--to", o.to);
    sweep->add_option("--steps", o.steps, "number of points, 0 for none");
    oracle->add_option("--n", o.oracle_n, "dense grid size (<= 4000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = resolve(o);
        using namespace henon::report;
        if (*solve) return cmd_solve(cfg);
        if (*spectrum) return cmd_spectrum(cfg);
        if (*morse) return cmd_morse(cfg);
        if (*sweep) return cmd_sweep(cfg);
        if (*oracle) return cmd_oracle(cfg);
    } catch (const henon::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const henon::PreconditionError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const henon::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const henon::OracleMismatch& e) {
        std::cerr << "oracle mismatch: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
