#pragma once

// Series chain of parallel RLC resonators identified from conjugate pole pairs.

#include "bbq/ratfit.hpp"

#include <span>
#include <vector>

namespace bbq {

struct RLCMode {
    double omega = 0.0;     // rad/s
    double q_factor = 0.0;
    double r = 0.0;         // ohm
    double l = 0.0;         // H
    double c = 0.0;         // F

    double freq_hz() const noexcept;
    /// Throws std::invalid_argument unless all fields are positive and the
    /// resonance and Q identities hold to 1e-9 relative.
    void validate() const;
};

/// Builds a mode from (R, omega, Q), deriving C = Q / (omega R) and L = 1 / (omega^2 C).
RLCMode make_rlc_mode(double r, double omega, double q_factor);

/// Conjugate pole pair (Im > 0 first) and residues of one mode's impedance.
/// Poles are the exact roots of s^2 + (omega/Q) s + omega^2.
struct PolePair {
    cplx pole;
    cplx residue;
};
PolePair mode_pole_pair(const RLCMode& mode);

/// Rational model with one conjugate pair per mode and no d / slope terms.
RationalModel model_from_modes(std::span<const RLCMode> modes);

/// One RLC mode per conjugate pair, sorted by ascending omega.
/// Throws SynthesisError for real poles, lossless poles, or a_k <= 0.
std::vector<RLCMode> synthesize_modes(const RationalModel& model);

/// Z_k(s) = (omega R / Q) s / (s^2 + (omega / Q) s + omega^2) at s = j 2 pi f.
std::vector<cplx> mode_impedance(const RLCMode& mode, std::span<const double> freqs_hz);

/// Sum of mode impedances across the chain.
std::vector<cplx> chain_impedance(std::span<const RLCMode> modes, std::span<const double> freqs_hz);

/// Constant and slope terms dropped by synthesis, and whether either exceeds
/// 1% of the in-band median |Z|.
struct DiscardedTerms {
    double const_term = 0.0;
    double slope_term = 0.0;
    double median_abs_z = 0.0;
    bool significant = false;
};
DiscardedTerms check_discarded_terms(const RationalModel& model, std::span<const double> freqs_hz);

} // namespace bbq
