#pragma once

// End-to-end orchestration: parse -> transform -> fit -> synthesize -> quantize.

#include "bbq/network.hpp"
#include "bbq/quantize.hpp"
#include "bbq/ratfit.hpp"
#include "bbq/rcsj.hpp"
#include "bbq/synthesis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bbq {

struct RunConfig {
    std::string input_path;
    ResponseFormat input_format = ResponseFormat::TouchstoneSubset;
    ResponseKind csv_kind = ResponseKind::Impedance;
    std::optional<double> ref_impedance_ohm;
    int n_pole_pairs = 1;
    FitOptions fit;
    bool require_convergence = true;
    std::optional<double> e_j_ghz;
    std::optional<double> i_c_ua;
    std::vector<int> truncations;  // empty: default_truncations()
    std::size_t dim_cap = kDefaultDimensionCap;
    std::string output_dir = ".";

    /// Throws ConfigError. `need_junction` is false for fit-only runs.
    void validate(bool need_junction) const;
    JunctionParams junction() const;
};

struct FitStageResult {
    FrequencyResponse impedance;
    FitResult fit;
    std::vector<RLCMode> modes;
    DiscardedTerms discarded;
    double chain_max_rel_deviation = 0.0;
};

struct QuantizeStageResult {
    std::vector<QuantizedMode> modes;
    std::vector<int> truncations;
    DispersiveModel perturbative;
    DispersiveModel exact;
};

struct OutputFile {
    std::string name;
    std::string contents;
};

/// Parse, transform, fit and synthesize. Errors carry the stage name and kind.
FitStageResult run_fit_stage(const RunConfig& config);

QuantizeStageResult run_quantize_stage(const std::vector<RLCMode>& modes, const RunConfig& config);

std::vector<OutputFile> fit_outputs(const FitStageResult& fit);
OutputFile dispersive_output(const QuantizeStageResult& q);

/// Writes every file or none: on failure, files already written are removed.
void write_outputs(const std::string& dir, const std::vector<OutputFile>& files);

/// Full pipeline; writes model.json, modes.json, dispersive.json,
/// fit_report.json and impedance_compare.csv into config.output_dir.
std::vector<std::string> run_pipeline(const RunConfig& config);

struct RcsjRunConfig {
    RcsjParams params;
    double i_max = 0.0;
    int n_points = 100;
    SweepOptions sweep;
    bool trace = false;
    int trace_stride = 10;
    std::string output_dir = ".";
};

/// Runs the IV sweep and writes iv.csv (and trace.csv when requested).
std::vector<std::string> run_rcsj(const RcsjRunConfig& config);

} // namespace bbq
