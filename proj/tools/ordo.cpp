// ordo: experiment runner for quantization rules, short-time actions and
// time-sliced propagators. Every subcommand reads one RunConfig (defaults,
// then --config file, then flags), validates it completely, and writes its
// artifacts atomically into the output directory.

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ordo/cli/artifacts.hpp"
#include "ordo/cli/commands.hpp"
#include "ordo/cli/config.hpp"
#include "ordo/cli/report.hpp"

namespace {

using ordo::cli::RunConfig;

/// Flag values collected by CLI11 before they are merged into the config.
struct FlagValues {
    std::map<std::string, std::string> text; // config key -> value
    std::map<std::string, std::string> flag; // config key -> flag spelling
    std::vector<std::string> schemes;
    std::vector<std::string> measures;
};

void add_value(CLI::App& app, FlagValues& fv, const std::string& flag, const std::string& key, const std::string& help) {
    fv.flag[key] = flag;
    app.add_option(flag, fv.text[key], help);
}

RunConfig build_config(const std::string& config_path, const CLI::App& app, const FlagValues& fv) {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::from_file(config_path);
    auto given = [&](const std::string& flag) {
        if (auto* opt = app.get_option_no_throw(flag); opt && opt->count() > 0) return true;
        for (const auto* sub : app.get_subcommands())
            if (auto* opt = sub->get_option_no_throw(flag); opt && opt->count() > 0) return true;
        return false;
    };
    for (const auto& [key, flag] : fv.flag)
        if (given(flag)) cfg.set(key, fv.text.at(key), flag);
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ";") + x;
        return s;
    };
    if (!fv.schemes.empty()) cfg.set("schemes", join(fv.schemes), "--scheme");
    if (!fv.measures.empty()) cfg.set("measures", join(fv.measures), "--measures");
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordo - phase-space quantization, short-time actions and time-sliced propagators"};
    app.require_subcommand(1);
    app.fallthrough();

    FlagValues fv;
    std::string config_path;
    app.add_option("--config", config_path, "config file (key = value with [sections])");
    add_value(app, fv, "--out", "out", "artifact directory");
    add_value(app, fv, "--hbar", "hbar", "reduced Planck constant");
    add_value(app, fv, "--mass", "mass", "particle mass");
    add_value(app, fv, "--potential", "potential", "potential spec, e.g. harmonic:omega=1");
    add_value(app, fv, "--u0", "u0", "magnetic term, e.g. poly:0,0.3");
    add_value(app, fv, "--qa", "qa", "initial position");
    add_value(app, fv, "--qb", "qb", "final position");
    add_value(app, fv, "--eps", "eps", "eps list or log:lo,hi,n");
    add_value(app, fv, "--grid", "grid", "position grid qmin,qmax,n");
    add_value(app, fv, "--measure", "measure", "tau measure for quantize/kernel");
    add_value(app, fv, "--tol", "tol", "BVP tolerance");
    add_value(app, fv, "--steps", "steps", "RK4 steps per trajectory");
    add_value(app, fv, "--symbol", "symbol", "polynomial symbol, e.g. 'q^2 p^2' (kernel: defaults to the Hamiltonian)");
    app.add_option("--scheme", fv.schemes, "slice scheme (repeatable)");

    bool as_json = false;
    auto* quantize = app.add_subcommand("quantize", "canonical operator form of a polynomial symbol");
    quantize->add_flag("--json", as_json, "print JSON instead of text");

    auto* kernel = app.add_subcommand("kernel", "kernel matrix on the grid, optional energy-cutoff sweep");
    add_value(*kernel, fv, "--format", "format", "csv or bin");
    add_value(*kernel, fv, "--pcut", "pcut", "momentum cutoff for p-degree > 2");
    add_value(*kernel, fv, "--cutoffs", "cutoffs", "energy cutoffs E (comma list)");

    auto* action = app.add_subcommand("action", "eps sweep of the classical action against the series");
    auto* series = app.add_subcommand("series", "series coefficients, c5 candidates and secular profiles");

    std::string study = "both";
    auto* slice = app.add_subcommand("slice", "Trotter convergence and fixed-dq phase scaling");
    add_value(*slice, fv, "--time", "T", "total propagation time");
    add_value(*slice, fv, "--slices", "slices", "slice counts N");
    add_value(*slice, fv, "--dt", "dt", "phase-scaling dt values");
    slice->add_option("--study", study, "both, convergence or scaling");

    auto* chernoff = app.add_subcommand("chernoff", "Chernoff iteration against the spectral reference");
    add_value(*chernoff, fv, "--chernoff-time", "t", "evolution time");
    add_value(*chernoff, fv, "--iterations", "n", "iteration counts");
    add_value(*chernoff, fv, "--packet", "packet", "Gaussian q0,p0,width");
    chernoff->add_option("--measures", fv.measures, "measure (repeatable)");

    bool run_all = false;
    auto* report = app.add_subcommand("report", "discrepancy report from prior artifacts");
    report->add_flag("--run-all", run_all, "run action, slice and chernoff first");

    for (auto* sub : {quantize, kernel, action, series, slice, chernoff, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ordo::cli::kExitConfig;
    }

    try {
        const RunConfig cfg = build_config(config_path, app, fv);
        std::string out;
        if (quantize->parsed()) out = ordo::cli::cmd_quantize(cfg, as_json);
        else if (kernel->parsed()) out = ordo::cli::cmd_kernel(cfg);
        else if (action->parsed()) out = ordo::cli::cmd_action(cfg);
        else if (series->parsed()) out = ordo::cli::cmd_series(cfg);
        else if (slice->parsed()) out = ordo::cli::cmd_slice(cfg, ordo::cli::parse_slice_study(study));
        else if (chernoff->parsed()) out = ordo::cli::cmd_chernoff(cfg);
        else if (report->parsed()) out = ordo::cli::cmd_report(cfg, run_all);
        std::cout << out;
        return ordo::cli::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "ordo: " << e.what() << "\n";
        return ordo::cli::exit_code_for(e);
    }
}
