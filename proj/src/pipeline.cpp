#include "bbq/pipeline.hpp"

#include "bbq/errors.hpp"
#include "bbq/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bbq {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto in_stage(const char* name, ErrorKind kind, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const std::exception& e) {
        throw Error(kind, std::string(name) + " stage: " + e.what());
    }
}

} // namespace

void RunConfig::validate(bool need_junction) const {
    if (input_path.empty()) throw ConfigError("input path is empty");
    if (output_dir.empty()) throw ConfigError("output directory is empty");
    if (n_pole_pairs < 1) throw ConfigError("n_pole_pairs must be >= 1");
    if (fit.max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(fit.pole_move_tol > 0.0)) throw ConfigError("pole_move_tol must be positive");
    if (ref_impedance_ohm && !(*ref_impedance_ohm > 0.0)) throw ConfigError("reference impedance must be positive");
    if (e_j_ghz && i_c_ua) throw ConfigError("set exactly one of e_j_ghz and i_c_ua, not both");
    if (need_junction) {
        if (!e_j_ghz && !i_c_ua) throw ConfigError("a junction is required: set e_j_ghz or i_c_ua");
        if (e_j_ghz && !(*e_j_ghz >= 0.0)) throw ConfigError("e_j_ghz must be non-negative");
        if (i_c_ua && !(*i_c_ua >= 0.0)) throw ConfigError("i_c_ua must be non-negative");
    }
    for (int t : truncations) {
        if (t < 5) throw ConfigError("Fock truncations must be >= 5");
    }
}

JunctionParams RunConfig::junction() const {
    if (e_j_ghz) return JunctionParams::from_ghz(*e_j_ghz);
    if (i_c_ua) return JunctionParams::from_critical_current(*i_c_ua * 1e-6);
    throw ConfigError("no junction configured");
}

FitStageResult run_fit_stage(const RunConfig& config) {
    FitStageResult out;
    out.impedance = in_stage("parse", ErrorKind::Parse, [&] {
        ParseOptions opts;
        opts.format = config.input_format;
        opts.ref_impedance = config.ref_impedance_ohm;
        opts.csv_kind = config.csv_kind;
        auto resp = read_response_file(config.input_path, opts);
        return resp.kind == ResponseKind::Scattering ? s_to_z(resp) : resp;
    });
    out.fit = in_stage("fit", ErrorKind::Fit, [&] {
        auto result = fit(out.impedance, config.n_pole_pairs, config.fit);
        if (config.require_convergence && !result.report.converged) {
            throw FitError("no convergence after " + std::to_string(result.report.iterations) + " iterations");
        }
        return result;
    });
    in_stage("synthesis", ErrorKind::Synthesis, [&] {
        out.modes = synthesize_modes(out.fit.model);
        out.discarded = check_discarded_terms(out.fit.model, out.impedance.freq_hz);
        const auto chain = chain_impedance(out.modes, out.impedance.freq_hz);
        const auto model = evaluate_model(out.fit.model, out.impedance.freq_hz);
        double worst = 0.0;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const cplx s(0.0, 2.0 * std::numbers::pi * out.impedance.freq_hz[i]);
            const cplx full = chain[i] + out.fit.model.const_term + out.fit.model.slope_term * s;
            worst = std::max(worst, std::abs(full - model[i]) / std::abs(model[i]));
        }
        out.chain_max_rel_deviation = worst;
        return 0;
    });
    return out;
}

QuantizeStageResult run_quantize_stage(const std::vector<RLCMode>& modes, const RunConfig& config) {
    return in_stage("quantize", ErrorKind::Quantization, [&] {
        QuantizeStageResult q;
        const auto junction = config.junction();
        q.modes = quantize_modes(modes);
        q.truncations = config.truncations.empty() ? default_truncations(q.modes.size(), config.dim_cap) : config.truncations;
        q.perturbative = kerr_perturbative(q.modes, junction);
        const auto h = build_hamiltonian(q.modes, junction, q.truncations, config.dim_cap);
        q.exact = kerr_exact(h, q.modes);
        return q;
    });
}

std::vector<OutputFile> fit_outputs(const FitStageResult& fit) {
    auto report = fit_report_to_json(fit.fit.report);
    report["discarded_d_ohm"] = fit.discarded.const_term;
    report["discarded_slope_ohm_s"] = fit.discarded.slope_term;
    report["median_abs_z_ohm"] = fit.discarded.median_abs_z;
    report["discarded_terms_significant"] = fit.discarded.significant;
    report["chain_max_rel_deviation"] = fit.chain_max_rel_deviation;

    const auto fitted = evaluate_model(fit.fit.model, fit.impedance.freq_hz);
    return {
        {"model.json", dump_json(model_to_json(fit.fit.model))},
        {"modes.json", dump_json(modes_to_json(fit.modes))},
        {"fit_report.json", dump_json(report)},
        {"impedance_compare.csv", impedance_compare_csv(fit.impedance.freq_hz, fit.impedance.values, fitted)},
    };
}

OutputFile dispersive_output(const QuantizeStageResult& q) {
    return {"dispersive.json", dump_json(dispersive_report_json(q.perturbative, q.exact, q.truncations))};
}

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir);
        for (const auto& f : files) {
            const fs::path path = fs::path(dir) / f.name;
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
            written.push_back(path);
            out << f.contents;
            out.close();
            if (!out) throw ConfigError("failed writing '" + path.string() + "'");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
}

std::vector<std::string> run_pipeline(const RunConfig& config) {
    config.validate(true);
    const auto fitted = run_fit_stage(config);
    const auto quantized = run_quantize_stage(fitted.modes, config);

    auto files = fit_outputs(fitted);
    files.push_back(dispersive_output(quantized));
    try {
        write_outputs(config.output_dir, files);
    } catch (const fs::filesystem_error& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.name);
    return names;
}

std::vector<std::string> run_rcsj(const RcsjRunConfig& config) {
    if (config.output_dir.empty()) throw ConfigError("output directory is empty");
    if (config.trace_stride < 1) throw ConfigError("trace stride must be >= 1");
    try {
        config.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    std::ostringstream trace;
    SweepOptions sweep = config.sweep;
    if (config.trace) {
        trace << "t_s,phi_rad,v_volt\n";
        std::size_t count = 0;
        sweep.observer = [&trace, &count, stride = static_cast<std::size_t>(config.trace_stride)](const PhaseState& s, double) {
            if (count++ % stride == 0) {
                trace << format_double(s.time) << ',' << format_double(s.phi) << ',' << format_double(s.voltage()) << '\n';
            }
        };
    }
    const auto [up, down] = in_stage("rcsj", ErrorKind::Simulation,
                                     [&] { return iv_sweep(config.params, config.i_max, config.n_points, sweep); });

    std::vector<OutputFile> files{{"iv.csv", iv_csv(up, down)}};
    if (config.trace) files.push_back({"trace.csv", trace.str()});
    try {
        write_outputs(config.output_dir, files);
    } catch (const fs::filesystem_error& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.name);
    return names;
}

} // namespace bbq
