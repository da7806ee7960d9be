#pragma once

// One-port frequency-response data: file ingest and S <-> Z conversion.

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace bbq {

using cplx = std::complex<double>;

enum class ResponseKind { Scattering, Impedance };

enum class ResponseFormat { TouchstoneSubset, Csv };

/// Sampled one-port response. Values are dimensionless for scattering data
/// and ohms for impedance data.
struct FrequencyResponse {
    std::vector<double> freq_hz;
    std::vector<cplx> values;
    ResponseKind kind = ResponseKind::Impedance;
    double ref_impedance = 50.0;

    std::size_t size() const noexcept { return freq_hz.size(); }

    /// Throws std::invalid_argument if any type invariant is violated.
    void validate() const;
};

struct ParseOptions {
    ResponseFormat format = ResponseFormat::TouchstoneSubset;
    /// Overrides the Touchstone option-line reference; required for CSV scattering data.
    std::optional<double> ref_impedance;
    /// CSV carries no kind marker, so the caller declares it.
    ResponseKind csv_kind = ResponseKind::Impedance;
};

/// Parses a single-port Touchstone (RI only) or `freq_hz,re,im` CSV document.
/// Throws ParseError with the offending line number on any malformed input.
FrequencyResponse parse_response(std::string_view source, const ParseOptions& options);

FrequencyResponse read_response_file(const std::string& path, const ParseOptions& options);

/// Minimum |1 - S| (or |1 + Z/Z0| for the inverse) accepted before division.
inline constexpr double kSingularityTolerance = 1e-9;

/// Z = Z0 (1 + S) / (1 - S), sample by sample.
FrequencyResponse s_to_z(const FrequencyResponse& resp);

/// S = (Z - Z0) / (Z + Z0) using resp.ref_impedance as Z0.
FrequencyResponse z_to_s(const FrequencyResponse& resp);

} // namespace bbq
