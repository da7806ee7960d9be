#pragma once

// JSON and CSV documents exchanged by the command-line tools.
// Floats are written with 17 significant digits and keys in a fixed order so
// identical inputs give byte-identical files.

#include "bbq/quantize.hpp"
#include "bbq/ratfit.hpp"
#include "bbq/rcsj.hpp"
#include "bbq/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace bbq {

using ordered_json = nlohmann::ordered_json;

std::string dump_json(const ordered_json& doc);
std::string format_double(double v);

ordered_json model_to_json(const RationalModel& model);
RationalModel model_from_json(const nlohmann::json& doc);

ordered_json modes_to_json(std::span<const RLCMode> modes);
std::vector<RLCMode> modes_from_json(const nlohmann::json& doc);

/// One DispersiveModel block: freqs_ghz, alpha_mhz, chi_mhz, phi_zpf, ej_ghz.
ordered_json dispersive_to_json(const DispersiveModel& model);

/// Perturbative and exact blocks plus their per-entry relative deviation.
ordered_json dispersive_report_json(const DispersiveModel& perturbative, const DispersiveModel& exact,
                                    std::span<const int> truncations);

ordered_json fit_report_to_json(const FitReport& report);

std::string iv_csv(const IVCurve& up, const IVCurve& down);
std::string impedance_compare_csv(std::span<const double> freqs_hz, std::span<const cplx> data,
                                  std::span<const cplx> fit);

} // namespace bbq
