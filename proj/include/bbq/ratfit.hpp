#pragma once

// Pole-residue impedance models and the relocating least-squares fit
// (vector fitting) that produces them.

#include "bbq/network.hpp"

#include <complex>
#include <span>
#include <vector>

namespace bbq {

/// Z(s) = sum_k r_k / (s - p_k) + const_term + slope_term * s, with s = j*2*pi*f.
/// Complex poles are stored as adjacent conjugate pairs (Im > 0 first).
struct RationalModel {
    std::vector<cplx> poles;     // rad/s
    std::vector<cplx> residues;  // ohm * rad/s
    double const_term = 0.0;     // ohm
    double slope_term = 0.0;     // ohm * s

    std::size_t order() const noexcept { return poles.size(); }

    /// Checks length agreement and conjugate pairing of poles and residues.
    void validate() const;
    bool is_stable() const;
};

enum class FitWeighting { Uniform, InverseMagnitude };

struct FitOptions {
    int max_iters = 20;
    double pole_move_tol = 1e-8;
    bool include_const = true;
    bool include_slope = true;
    FitWeighting weighting = FitWeighting::Uniform;
};

struct FitReport {
    int iterations = 0;
    double rms_error = 0.0;      // ohm
    double max_rel_error = 0.0;
    bool converged = false;
    std::vector<double> rms_history;   // one entry per relocation
    std::vector<double> pole_moves;    // relative pole displacement per relocation
};

struct FitResult {
    RationalModel model;
    FitReport report;
};

/// Fits `n_pole_pairs` conjugate pole pairs to impedance data.
/// Throws FitError on insufficient samples, a rank-deficient residue system,
/// or non-finite intermediate values.
FitResult fit(const FrequencyResponse& data, int n_pole_pairs, const FitOptions& options = {});

/// Evaluates the model at an arbitrary complex frequency.
cplx evaluate_model_at(const RationalModel& model, cplx s);

/// Evaluates the model at s = j*2*pi*f for each frequency (Hz).
std::vector<cplx> evaluate_model(const RationalModel& model, std::span<const double> freqs_hz);

/// Initial pole set used by `fit`: pairs log-spaced over [omega_min, omega_max]
/// with real parts -omega/100.
std::vector<cplx> initial_poles(double omega_min, double omega_max, int n_pole_pairs);

/// Zeros of 1 + sum_k c_k phi_k(s) for a real-parametrized pole set.
/// Exposed for testing the relocation step in isolation.
std::vector<cplx> relocate_poles(std::span<const cplx> poles, std::span<const double> sigma_coeffs);

} // namespace bbq
