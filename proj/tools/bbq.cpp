// bbq: black-box quantization and RCSJ command-line driver.

#include "bbq/errors.hpp"
#include "bbq/pipeline.hpp"
#include "bbq/serialize.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <numbers>

namespace {

using namespace bbq;

struct CliRun {
    RunConfig cfg;
    std::vector<std::string> inputs;
    std::string format = "touchstone";
    std::string csv_kind = "z";
    std::string weighting = "uniform";
    bool no_const = false;
    bool no_slope = false;
    bool allow_unconverged = false;
    double e_j_ghz = -1.0;
    double i_c_ua = -1.0;
    int jobs = 1;
};

void add_input_options(CLI::App* sub, CliRun& run, bool multiple) {
    if (multiple) {
        sub->add_option("-i,--input", run.inputs, "Frequency-response file(s)")->required();
    } else {
        sub->add_option("-i,--input", run.cfg.input_path, "Frequency-response file")->required();
    }
    sub->add_option("--format", run.format, "Input format")->check(CLI::IsMember({"touchstone", "csv"}));
    sub->add_option("--csv-kind", run.csv_kind, "Kind of CSV data (s or z)")->check(CLI::IsMember({"s", "z"}));
    sub->add_option("--ref-ohm", run.cfg.ref_impedance_ohm, "Reference impedance override (ohm)");
    sub->add_option("-n,--pole-pairs", run.cfg.n_pole_pairs, "Number of conjugate pole pairs");
    sub->add_option("--max-iters", run.cfg.fit.max_iters, "Maximum pole relocations");
    sub->add_option("--tol", run.cfg.fit.pole_move_tol, "Relative pole-move tolerance");
    sub->add_flag("--no-const", run.no_const, "Fit without the constant term");
    sub->add_flag("--no-slope", run.no_slope, "Fit without the term proportional to s");
    sub->add_option("--weighting", run.weighting, "Least-squares weighting")
        ->check(CLI::IsMember({"uniform", "inverse-magnitude"}));
    sub->add_flag("--allow-unconverged", run.allow_unconverged, "Do not fail when the fit does not converge");
}

void add_junction_options(CLI::App* sub, CliRun& run) {
    sub->add_option("--ej-ghz", run.e_j_ghz, "Josephson energy E_J/h (GHz)");
    sub->add_option("--ic-ua", run.i_c_ua, "Critical current (uA)");
    sub->add_option("--truncations", run.cfg.truncations, "Fock truncation per mode");
    sub->add_option("--dim-cap", run.cfg.dim_cap, "Maximum Hilbert-space dimension");
}

void finish_config(CliRun& run) {
    run.cfg.input_format = run.format == "csv" ? ResponseFormat::Csv : ResponseFormat::TouchstoneSubset;
    run.cfg.csv_kind = run.csv_kind == "s" ? ResponseKind::Scattering : ResponseKind::Impedance;
    run.cfg.fit.include_const = !run.no_const;
    run.cfg.fit.include_slope = !run.no_slope;
    run.cfg.fit.weighting = run.weighting == "uniform" ? FitWeighting::Uniform : FitWeighting::InverseMagnitude;
    run.cfg.require_convergence = !run.allow_unconverged;
    if (run.e_j_ghz >= 0.0) run.cfg.e_j_ghz = run.e_j_ghz;
    if (run.i_c_ua >= 0.0) run.cfg.i_c_ua = run.i_c_ua;
}

void print_fit_summary(const FitStageResult& fit) {
    const auto& r = fit.fit.report;
    std::printf("fit: %d iteration(s), converged=%s, rms=%.3e ohm, max rel err=%.3e\n", r.iterations,
                r.converged ? "yes" : "no", r.rms_error, r.max_rel_error);
    for (const auto& m : fit.modes) {
        std::printf("  mode %.6f GHz  Q=%.4g  R=%.4g ohm  L=%.4g H  C=%.4g F\n", m.freq_hz() * 1e-9, m.q_factor, m.r, m.l, m.c);
    }
    if (fit.discarded.significant) {
        std::fprintf(stderr, "warning: discarded d=%.3g ohm / slope=%.3g ohm*s exceed 1%% of median |Z| (%.3g ohm)\n",
                     fit.discarded.const_term, fit.discarded.slope_term, fit.discarded.median_abs_z);
    }
}

void print_dispersive_summary(const QuantizeStageResult& q) {
    for (std::size_t i = 0; i < q.modes.size(); ++i) {
        std::printf("  mode %zu: f=%.6f GHz  phi_zpf=%.4g  alpha_pert=%.6g MHz  alpha_exact=%.6g MHz\n", i,
                    q.modes[i].freq_hz() * 1e-9, q.modes[i].phi_zpf, q.perturbative.alpha_hz[i] * 1e-6,
                    q.exact.alpha_hz[i] * 1e-6);
    }
    for (Eigen::Index i = 0; i < q.exact.chi_hz.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < q.exact.chi_hz.cols(); ++j) {
            std::printf("  chi(%td,%td): pert=%.6g MHz  exact=%.6g MHz\n", static_cast<std::ptrdiff_t>(i),
                        static_cast<std::ptrdiff_t>(j), q.perturbative.chi_hz(i, j) * 1e-6, q.exact.chi_hz(i, j) * 1e-6);
        }
    }
}

int run_pipeline_inputs(CliRun& run) {
    if (run.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (run.inputs.size() == 1) {
        run.cfg.input_path = run.inputs.front();
        const auto files = run_pipeline(run.cfg);
        std::printf("wrote %zu file(s) to %s\n", files.size(), run.cfg.output_dir.c_str());
        return 0;
    }
    // Several inputs: one output subdirectory per input stem.
    std::vector<RunConfig> configs;
    for (const auto& in : run.inputs) {
        RunConfig c = run.cfg;
        c.input_path = in;
        c.output_dir = (std::filesystem::path(run.cfg.output_dir) / std::filesystem::path(in).stem()).string();
        configs.push_back(c);
    }
    int status = 0;
    for (std::size_t start = 0; start < configs.size(); start += static_cast<std::size_t>(run.jobs)) {
        std::vector<std::future<void>> batch;
        const std::size_t stop = std::min(configs.size(), start + static_cast<std::size_t>(run.jobs));
        for (std::size_t k = start; k < stop; ++k) {
            batch.push_back(std::async(std::launch::async, [&c = configs[k]] { run_pipeline(c); }));
        }
        for (std::size_t k = start; k < stop; ++k) {
            try {
                batch[k - start].get();
                std::printf("%s: ok -> %s\n", configs[k].input_path.c_str(), configs[k].output_dir.c_str());
            } catch (const Error& e) {
                std::fprintf(stderr, "%s: error: %s\n", configs[k].input_path.c_str(), e.what());
                if (status == 0) status = e.exit_code();
            }
        }
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-box quantization of one-port impedance data and RCSJ junction simulation"};
    app.require_subcommand(1);

    // Config files hold one [section] per subcommand, e.g. [pipeline].
    app.set_config("--config", "", "TOML/INI file with per-subcommand sections");

    CliRun fit_run, quant_run, pipe_run;
    std::string modes_path;

    auto* fit_cmd = app.add_subcommand("fit", "Fit a pole-residue model and synthesize RLC modes");
    fit_cmd->configurable();
    add_input_options(fit_cmd, fit_run, false);
    fit_cmd->add_option("-o,--out", fit_run.cfg.output_dir, "Output directory");

    auto* quant_cmd = app.add_subcommand("quantize", "Compute self- and cross-Kerr from an RLC mode list");
    quant_cmd->configurable();
    quant_cmd->add_option("-m,--modes", modes_path, "modes.json from the fit step")->required();
    add_junction_options(quant_cmd, quant_run);
    quant_cmd->add_option("-o,--out", quant_run.cfg.output_dir, "Output directory");

    auto* pipe_cmd = app.add_subcommand("pipeline", "Fit, synthesize and quantize in one run");
    pipe_cmd->configurable();
    add_input_options(pipe_cmd, pipe_run, true);
    add_junction_options(pipe_cmd, pipe_run);
    pipe_cmd->add_option("-o,--out", pipe_run.cfg.output_dir, "Output directory");
    pipe_cmd->add_option("-j,--jobs", pipe_run.jobs, "Parallel runs across input files");

    RcsjRunConfig rcsj;
    double ic_ua = 1.0, cj_ff = 1000.0, delta0_uev = 1.0, i_max_ua = -1.0;
    double beta_c = 25.0, rn_ohm = -1.0;
    auto* rcsj_cmd = app.add_subcommand("rcsj", "Hysteretic IV sweep of a current-driven junction");
    rcsj_cmd->configurable();
    rcsj_cmd->add_option("--ic-ua", ic_ua, "Critical current (uA)");
    rcsj_cmd->add_option("--cj-ff", cj_ff, "Junction capacitance (fF)");
    auto* beta_opt = rcsj_cmd->add_option("--beta-c", beta_c, "Stewart-McCumber parameter (sets R_N)");
    rcsj_cmd->add_option("--rn-ohm", rn_ohm, "Normal resistance (ohm)")->excludes(beta_opt);
    rcsj_cmd->add_option("--delta0-uev", delta0_uev, "Zero-temperature gap (ueV)");
    rcsj_cmd->add_option("--gap-smoothing", rcsj.params.gap_smoothing, "Conductance ramp half-width / (2 Delta0/e)");
    rcsj_cmd->add_option("--i-max-ua", i_max_ua, "Sweep maximum (uA, default 2 I_c)");
    rcsj_cmd->add_option("--points", rcsj.n_points, "Bias points per branch");
    rcsj_cmd->add_option("--settle", rcsj.sweep.settle_periods, "Settling plasma periods per point");
    rcsj_cmd->add_option("--average", rcsj.sweep.average_periods, "Averaging plasma periods per point");
    rcsj_cmd->add_option("--tol", rcsj.sweep.tol, "Integrator local tolerance");
    rcsj_cmd->add_flag("--trace", rcsj.trace, "Also write trace.csv");
    rcsj_cmd->add_option("--trace-stride", rcsj.trace_stride, "Keep every n-th accepted step in the trace");
    rcsj_cmd->add_option("-o,--out", rcsj.output_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ErrorKind::Config);
    }

    try {
        if (fit_cmd->parsed()) {
            finish_config(fit_run);
            fit_run.cfg.validate(false);
            const auto fit = run_fit_stage(fit_run.cfg);
            print_fit_summary(fit);
            write_outputs(fit_run.cfg.output_dir, fit_outputs(fit));
        } else if (quant_cmd->parsed()) {
            finish_config(quant_run);
            quant_run.cfg.input_path = modes_path;
            quant_run.cfg.validate(true);
            std::ifstream in(modes_path);
            if (!in) throw ParseError("cannot open '" + modes_path + "'");
            std::vector<RLCMode> modes;
            try {
                modes = modes_from_json(nlohmann::json::parse(in));
            } catch (const std::exception& e) {
                throw ParseError(std::string("modes file: ") + e.what());
            }
            const auto q = run_quantize_stage(modes, quant_run.cfg);
            print_dispersive_summary(q);
            write_outputs(quant_run.cfg.output_dir, {dispersive_output(q)});
        } else if (pipe_cmd->parsed()) {
            finish_config(pipe_run);
            pipe_run.cfg.input_path = pipe_run.inputs.empty() ? std::string{} : pipe_run.inputs.front();
            pipe_run.cfg.validate(true);
            return run_pipeline_inputs(pipe_run);
        } else if (rcsj_cmd->parsed()) {
            const double i_c = ic_ua * 1e-6;
            const double c_j = cj_ff * 1e-15;
            const double delta0 = delta0_uev * 1e-6 * kElementaryCharge;
            if (!(i_c > 0.0) || !(c_j > 0.0) || !(delta0 > 0.0)) throw ConfigError("I_c, C_J and Delta0 must be positive");
            const double smoothing = rcsj.params.gap_smoothing;
            if (rn_ohm > 0.0) {
                rcsj.params = RcsjParams{i_c, rn_ohm, c_j, delta0, smoothing};
            } else {
                if (!(beta_c > 0.0)) throw ConfigError("beta_c must be positive");
                rcsj.params = params_for_beta(i_c, c_j, beta_c, delta0);
                rcsj.params.gap_smoothing = smoothing;
            }
            rcsj.i_max = i_max_ua > 0.0 ? i_max_ua * 1e-6 : 2.0 * i_c;
            std::printf("rcsj: beta_c=%.4g  R_N=%.4g ohm  f_p=%.4g GHz  2Delta0/e=%.4g V\n", rcsj.params.beta_c(),
                        rcsj.params.r_n, rcsj.params.plasma_omega() / (2.0 * std::numbers::pi) * 1e-9,
                        rcsj.params.gap_voltage());
            const auto files = run_rcsj(rcsj);
            std::printf("wrote %zu file(s) to %s\n", files.size(), rcsj.output_dir.c_str());
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(ErrorKind::Config);
    }
    return 0;
}
