#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ordo/classical/flow.hpp"
#include "ordo/classical/secular.hpp"
#include "ordo/classical/series.hpp"
#include "ordo/cli/artifacts.hpp"
#include "ordo/cli/config.hpp"
#include "ordo/kernels/io.hpp"
#include "ordo/kernels/kernel_matrix.hpp"
#include "ordo/opalg/quantize.hpp"
#include "ordo/propagator/slice.hpp"
#include "ordo/propagator/studies.hpp"

namespace ordo::cli {

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kQuantizeKernel = "quantize_kernel";
inline constexpr const char* kKernel = "kernel";
inline constexpr const char* kKernelCutoff = "kernel_cutoff.csv";
inline constexpr const char* kActionCsv = "action.csv";
inline constexpr const char* kActionSummary = "action_summary.json";
inline constexpr const char* kSeriesJson = "series.json";
inline constexpr const char* kSeriesProfiles = "series_profiles.csv";
inline constexpr const char* kSliceConvergence = "slice_convergence.csv";
inline constexpr const char* kSliceScaling = "slice_scaling.csv";
inline constexpr const char* kSliceSummary = "slice_summary.json";
inline constexpr const char* kChernoffCsv = "chernoff.csv";
inline constexpr const char* kChernoffSummary = "chernoff_summary.json";
inline constexpr const char* kReportMd = "report.md";
inline constexpr const char* kReportJson = "report.json";
} // namespace artifact

/// JSON key prefix of the eps^k coefficient: "c-1", "c0", ..., "c5".
inline std::string coeff_key(int order) { return "c" + std::to_string(order); }

namespace detail {

inline json header(const std::string& command, const RunConfig& cfg) {
    return json{{"command", command}, {"config_hash", cfg.hash()}};
}

inline std::string matrix_csv(const std::string& command, const RunConfig& cfg, const Eigen::MatrixXcd& M,
                              const kernels::Grid1D& g) {
    std::string header;
    for (int j = 0; j < M.cols(); ++j)
        header += (j ? ",re_" : "re_") + std::to_string(j) + ",im_" + std::to_string(j);
    const std::string body = kernels::to_csv(M, g);
    const std::size_t eol = body.find('\n') + 1;
    return "# config_hash=" + cfg.hash() + " command=" + command + "\n" + body.substr(0, eol) + header + "\n" +
           body.substr(eol);
}

inline std::filesystem::path write_matrix(const std::string& command, const RunConfig& cfg, const std::string& stem,
                                          const Eigen::MatrixXcd& M, const kernels::Grid1D& g) {
    const std::string fmt = cfg.kernel_format();
    const auto path = cfg.out_dir() / (stem + "." + fmt);
    write_file_atomic(path, fmt == "bin" ? kernels::to_binary(M, g) : matrix_csv(command, cfg, M, g));
    return path;
}

inline json terms_json(const opalg::OperatorPoly& op) {
    json terms = json::array();
    for (const auto& [mono, scalar] : op.terms())
        for (const auto& [k, c] : scalar.terms())
            terms.push_back({{"q", mono.q_power},
                             {"p", mono.p_power},
                             {"hbar", k},
                             {"re", ordo::to_string(c.re)},
                             {"im", ordo::to_string(c.im)}});
    return terms;
}

inline kernels::WaveFunction packet_state(const RunConfig& cfg, const kernels::Grid1D& g) {
    const auto pk = cfg.packet();
    return kernels::WaveFunction::gaussian(g, pk[0], pk[1], pk[2]);
}

} // namespace detail

// ---------------------------------------------------------------------------
// quantize

/// Canonical operator form of the configured symbol under the configured
/// measure. With an explicit grid the kernel matrix is written as well.
inline std::string cmd_quantize(const RunConfig& cfg, bool as_json) {
    const opalg::PolySymbol f = cfg.symbol();
    const opalg::TauMeasure P = cfg.measure();
    const opalg::OperatorPoly op = opalg::quantize_poly(f, P);
    std::string kernel_file;
    if (cfg.is_set("grid")) {
        const auto g = cfg.grid();
        kernels::KernelOptions ko;
        ko.p_cutoff = cfg.p_cutoff();
        const auto K = kernels::kernel_matrix(kernels::SymbolFunction::from_poly(f), g, P, ko);
        kernel_file = detail::write_matrix("quantize", cfg, artifact::kQuantizeKernel, K.entries, g).string();
    }
    if (!as_json) {
        std::string out = opalg::to_string(op) + "\n";
        if (!kernel_file.empty()) out += "kernel matrix: " + kernel_file + "\n";
        return out;
    }
    json j = detail::header("quantize", cfg);
    j["symbol"] = opalg::to_string(f);
    j["measure"] = opalg::to_string(P);
    j["operator"] = opalg::to_string(op);
    j["terms"] = detail::terms_json(op);
    if (!kernel_file.empty()) j["kernel_file"] = kernel_file;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// kernel

/// Kernel matrix of the configured symbol (or of the Hamiltonian when no
/// symbol is given), plus an optional energy-cutoff sweep of the
/// pseudo-differential action on the Gaussian packet.
inline std::string cmd_kernel(const RunConfig& cfg) {
    const auto g = cfg.grid();
    const auto P = cfg.measure();
    const kernels::SymbolFunction f =
        cfg.is_set("symbol") ? kernels::SymbolFunction::from_poly(cfg.symbol()) : cfg.hamiltonian().symbol();
    kernels::KernelOptions ko;
    ko.p_cutoff = cfg.p_cutoff();
    const auto K = kernels::kernel_matrix(f, g, P, ko);
    std::ostringstream out;
    out << "kernel " << f.id() << " under " << opalg::to_string(P) << ": "
        << detail::write_matrix("kernel", cfg, artifact::kKernel, K.entries, g).string() << "\n";
    out << "hermiticity defect " << format_double(K.hermiticity_defect()) << "\n";

    auto cutoffs = cfg.number_list("cutoffs");
    if (!cutoffs.empty()) {
        std::sort(cutoffs.begin(), cutoffs.end());
        const auto psi = detail::packet_state(cfg, g);
        CsvTable csv("kernel", cfg, {"E", "norm", "successive_difference"});
        std::optional<kernels::WaveFunction> prev;
        for (double E : cutoffs) {
            const auto phi = kernels::apply_pseudodiff(f, P, psi, E, ko);
            // the first difference is taken against the empty truncation (zero output)
            const double diff = prev ? phi.distance(*prev) : phi.norm();
            csv.row().number(E).number(phi.norm()).number(diff);
            prev = phi;
        }
        csv.write(cfg.out_dir() / artifact::kKernelCutoff);
        out << "cutoff sweep: " << (cfg.out_dir() / artifact::kKernelCutoff).string() << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// action

/// Formula coefficients next to a numeric fit, with deviations.
inline json compare_coefficients(const classical::ActionSeries& series, const classical::SeriesFit& fit) {
    json j = json::object();
    for (int k = classical::SeriesFit::kMinOrder; k <= classical::SeriesFit::kMaxOrder; ++k) {
        const std::string c = coeff_key(k);
        const double formula = series.coefficient(k);
        const double fitted = fit.coefficient(k);
        const double dev = std::abs(fitted - formula);
        j[c + "_formula"] = num(formula);
        j[c + "_fit"] = num(fitted);
        j[c + "_stderr"] = num(fit.stderr_of(k));
        j[c + "_noise_floor"] = num(fit.noise_floor(k));
        j[c + "_abs_deviation"] = num(dev);
        j[c + "_rel_deviation"] = formula != 0 ? num(dev / std::abs(formula)) : json(nullptr);
        j[c + "_fit_vanishes"] = fit.vanishes(k);
    }
    return j;
}

inline json candidates_json(const classical::C5Candidates& c5) {
    json a = json::array();
    for (std::size_t i = 0; i < c5.candidates.size(); ++i) {
        const auto& c = c5.candidates[i];
        a.push_back({{"label", c.label}, {"route", c.route}, {"value", num(c.value)}, {"designated", i == c5.designated}});
    }
    return a;
}

/// eps sweep of the BVP action against the series, with a summary JSON of
/// formula coefficients, fitted coefficients and deviations.
inline std::string cmd_action(const RunConfig& cfg) {
    const auto H = cfg.hamiltonian();
    const double qa = cfg.q_A(), qb = cfg.q_B();
    classical::FitOptions opt;
    opt.n_steps = cfg.integer("steps");
    opt.tol = cfg.number("tol");
    const auto series = classical::action_series(H, qa, qb);
    const auto fit = classical::fit_series_numeric(H, qa, qb, cfg.eps_list(), opt);

    CsvTable csv("action", cfg, {"eps", "S_numeric", "S_series", "abs_err", "rel_err"});
    double worst = 0.0;
    for (std::size_t i = 0; i < fit.eps.size(); ++i) {
        const double s_series = series.evaluate(fit.eps[i]);
        const double err = std::abs(fit.S[i] - s_series);
        const double rel = err / std::abs(fit.S[i]);
        worst = std::max(worst, rel);
        csv.row().number(fit.eps[i]).number(fit.S[i]).number(s_series).number(err).number(rel);
    }
    csv.write(cfg.out_dir() / artifact::kActionCsv);

    json j = detail::header("action", cfg);
    j["hamiltonian"] = H.id();
    j["q_A"] = num(qa);
    j["q_B"] = num(qb);
    j["n_steps"] = fit.n_steps;
    j["eps"] = num_array(fit.eps);
    j["residual_norm"] = num(fit.residual_norm);
    j["condition"] = num(fit.condition);
    j["max_rel_err_series"] = num(worst);
    j.update(compare_coefficients(series, fit));
    j["c2_gauge"] = num(series.c2_gauge);
    j["c5_designated"] = num(series.c5);
    if (series.c5_candidates) {
        j["c5_candidates"] = candidates_json(*series.c5_candidates);
        j["c5_designated_label"] = series.c5_candidates->value_of_designated().label;
    }
    if (const auto kind = classical::exact_kind(H)) {
        json ex = json::object();
        for (const auto& [k, v] : classical::exact_action_taylor(*kind, H.m, classical::exact_param(H), qa, qb))
            ex[coeff_key(k)] = num(v);
        j["exact_taylor"] = ex;
    }
    j["provenance"] = series.provenance;
    write_json(cfg.out_dir() / artifact::kActionSummary, j);

    std::ostringstream out;
    out << "action sweep (" << fit.eps.size() << " eps values): " << (cfg.out_dir() / artifact::kActionCsv).string()
        << "\nsummary: " << (cfg.out_dir() / artifact::kActionSummary).string() << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// series

/// Formula coefficients, c5 candidates and sampled secular profiles; no BVP.
inline std::string cmd_series(const RunConfig& cfg) {
    const auto H = cfg.hamiltonian();
    const double qa = cfg.q_A(), qb = cfg.q_B();
    const auto series = classical::action_series(H, qa, qb);
    const auto prof = classical::secular_profiles(H, qa, qb);

    json j = detail::header("series", cfg);
    j["hamiltonian"] = H.id();
    j["q_A"] = num(qa);
    j["q_B"] = num(qb);
    for (int k = -1; k <= 5; ++k) j[coeff_key(k)] = num(series.coefficient(k));
    j["c2_gauge"] = num(series.c2_gauge);
    if (series.c5_candidates) {
        j["c5_candidates"] = candidates_json(*series.c5_candidates);
        j["c5_designated_label"] = series.c5_candidates->value_of_designated().label;
    }
    if (const auto kind = classical::exact_kind(H)) {
        json ex = json::object();
        for (const auto& [k, v] : classical::exact_action_taylor(*kind, H.m, classical::exact_param(H), qa, qb))
            ex[coeff_key(k)] = num(v);
        j["exact_taylor"] = ex;
    }
    j["provenance"] = series.provenance;
    j["pi_minus1"] = num(prof.pi_minus1);
    json means = json::object();
    const std::vector<std::pair<const char*, const std::vector<double>*>> named = {
        {"pi0", &prof.pi0}, {"pi1", &prof.pi1}, {"pi2", &prof.pi2}, {"pi3", &prof.pi3}};
    for (const auto& [name, v] : named) means[name] = num(classical::grid_mean(*v));
    j["profile_means"] = means;
    write_json(cfg.out_dir() / artifact::kSeriesJson, j);

    // every 16th sample: a gnuplot-ready table
    CsvTable csv("series", cfg, {"tau", "pi0", "pi1", "pi2", "pi3", "chi1", "chi2", "chi3", "chi4"});
    for (std::size_t i = 0; i < prof.tau.size(); i += 16)
        csv.row()
            .number(prof.tau[i])
            .number(prof.pi0[i])
            .number(prof.pi1[i])
            .number(prof.pi2[i])
            .number(prof.pi3[i])
            .number(prof.chi1[i])
            .number(prof.chi2[i])
            .number(prof.chi3[i])
            .number(prof.chi4[i]);
    csv.write(cfg.out_dir() / artifact::kSeriesProfiles);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// slice

enum class SliceStudy { Both, Convergence, Scaling };

inline SliceStudy parse_slice_study(const std::string& s) {
    if (s == "both") return SliceStudy::Both;
    if (s == "convergence") return SliceStudy::Convergence;
    if (s == "scaling") return SliceStudy::Scaling;
    throw ConfigError("unknown slice study '" + s + "' (expected both, convergence or scaling)");
}

inline json slope_json(const std::optional<propagator::SlopeFit>& s) {
    if (!s) return nullptr;
    return json{{"slope", num(s->slope)},   {"stderr", num(s->stderr_slope)}, {"ci95_low", num(s->ci_low)},
                {"ci95_high", num(s->ci_high)}, {"intercept", num(s->intercept)}, {"points", s->points}};
}

/// Trotter-limit convergence (scheme, N, distance) and fixed-dq phase
/// scaling (scheme, dt, phase_error), with fitted slopes in a JSON summary.
inline std::string cmd_slice(const RunConfig& cfg, SliceStudy study = SliceStudy::Both) {
    const auto H = cfg.hamiltonian();
    const auto schemes = cfg.schemes();
    json j = detail::header("slice", cfg);
    j["hamiltonian"] = H.id();
    std::ostringstream out;

    if (study != SliceStudy::Scaling) {
        const auto g = cfg.grid();
        const double T = cfg.number("T");
        const auto rep = propagator::convergence_study(H, g, T, schemes, cfg.integer_list("slices"));
        CsvTable csv("slice", cfg, {"scheme", "N", "distance"});
        json conv = json::object();
        conv["T"] = num(T);
        conv["N"] = rep.N;
        json per = json::object();
        for (const auto& s : rep.schemes) {
            for (std::size_t k = 0; k < rep.N.size(); ++k) csv.row().text(s.scheme).integer(rep.N[k]).number(s.distance[k]);
            per[s.scheme] = {{"distance", num_array(s.distance)}, {"monotone", s.monotone}, {"rate", slope_json(s.rate)}};
        }
        conv["schemes"] = per;
        conv["max_pairwise"] = num_array(rep.max_pairwise);
        conv["pairwise_reduction"] = num(rep.max_pairwise.size() > 1 ? rep.pairwise_reduction() : 1.0);
        j["convergence"] = conv;
        csv.write(cfg.out_dir() / artifact::kSliceConvergence);
        out << "convergence: " << (cfg.out_dir() / artifact::kSliceConvergence).string() << "\n";
    }

    if (study != SliceStudy::Convergence) {
        propagator::ScalingOptions so;
        so.hbar = cfg.hbar();
        so.n_steps = cfg.integer("steps");
        so.tol = cfg.number("tol");
        const double qa = cfg.q_A(), qb = cfg.q_B();
        const auto rep = propagator::short_time_phase_scaling(H, qa, qb, cfg.dt_list(), schemes, so);
        CsvTable csv("slice", cfg, {"scheme", "dt", "phase_error"});
        json sc = json::object();
        sc["q_A"] = num(qa);
        sc["q_B"] = num(qb);
        sc["dt"] = num_array(rep.dt);
        const double vbar = propagator::detail::scheme_average<double>(H.V, qa, qb, opalg::TauMeasure::uniform());
        json per = json::object();
        for (std::size_t s = 0; s < rep.schemes.size(); ++s) {
            const auto& r = rep.schemes[s];
            for (std::size_t k = 0; k < rep.dt.size(); ++k) csv.row().text(r.scheme).number(rep.dt[k]).number(r.phase_error[k]);
            // leading mismatch of -V_scheme dt against -avg(V) dt in the classical action
            const double predicted =
                (vbar - propagator::detail::scheme_average<double>(H.V, qa, qb, schemes[s].measure())) / so.hbar;
            per[r.scheme] = {{"phase_error", num_array(r.phase_error)},
                             {"slope", slope_json(r.slope)},
                             {"eps_coefficient", num(r.eps_coefficient)},
                             {"predicted_eps_coefficient", num(predicted)}};
        }
        sc["schemes"] = per;
        if (per.contains("bj") && per.contains("midpoint") && !per["bj"]["slope"].is_null() &&
            !per["midpoint"]["slope"].is_null())
            sc["slope_bj_minus_midpoint"] =
                num(per["bj"]["slope"]["slope"].get<double>() - per["midpoint"]["slope"]["slope"].get<double>());
        j["scaling"] = sc;
        csv.write(cfg.out_dir() / artifact::kSliceScaling);
        out << "phase scaling: " << (cfg.out_dir() / artifact::kSliceScaling).string() << "\n";
    }

    write_json(cfg.out_dir() / artifact::kSliceSummary, j);
    out << "summary: " << (cfg.out_dir() / artifact::kSliceSummary).string() << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// chernoff

/// Chernoff iteration error against the spectral reference for each measure.
inline std::string cmd_chernoff(const RunConfig& cfg) {
    const auto H = cfg.hamiltonian();
    const auto g = cfg.grid();
    const double t = cfg.number("t");
    const auto n_list = cfg.integer_list("n");
    const auto psi = detail::packet_state(cfg, g);
    CsvTable csv("chernoff", cfg, {"measure", "n", "distance", "norm"});
    json j = detail::header("chernoff", cfg);
    j["hamiltonian"] = H.id();
    j["t"] = num(t);
    j["n"] = n_list;
    json per = json::object();
    for (const auto& P : cfg.chernoff_measures()) {
        const auto st = propagator::chernoff_study(H, g, t, n_list, P, psi);
        for (std::size_t k = 0; k < st.n.size(); ++k)
            csv.row().text(st.measure).integer(st.n[k]).number(st.distance[k]).number(st.norm[k]);
        per[st.measure] = {{"distance", num_array(st.distance)}, {"norm", num_array(st.norm)}, {"monotone", st.monotone}};
    }
    j["measures"] = per;
    csv.write(cfg.out_dir() / artifact::kChernoffCsv);
    write_json(cfg.out_dir() / artifact::kChernoffSummary, j);
    return "chernoff: " + (cfg.out_dir() / artifact::kChernoffCsv).string() + "\nsummary: " +
           (cfg.out_dir() / artifact::kChernoffSummary).string() + "\n";
}

} // namespace ordo::cli
