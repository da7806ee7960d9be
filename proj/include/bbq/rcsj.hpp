#pragma once

// Current-driven resistively and capacitively shunted junction.
//
// Integrates  I_d(t) = (Phi0/2pi) C phi'' + (Phi0/2pi) phi' G_N(V) + I_c sin(phi)
// with V = (Phi0/2pi) phi'. Internally time is measured in units of 1/omega_p.

#include <functional>
#include <utility>
#include <vector>

namespace bbq {

struct RcsjParams {
    double i_c = 0.0;      // A
    double r_n = 0.0;      // ohm
    double c_j = 0.0;      // F
    double delta0 = 0.0;   // J
    /// Half-width of the conductance ramp as a fraction of 2 Delta0 / e.
    double gap_smoothing = 1e-3;

    void validate() const;
    /// Stewart-McCumber parameter 2 pi I_c R_N^2 C_J / Phi0.
    double beta_c() const;
    /// sqrt(2 pi I_c / (Phi0 C_J)), rad/s.
    double plasma_omega() const;
    double gap_voltage() const;  // 2 Delta0 / e
    double characteristic_voltage() const { return i_c * r_n; }
};

/// Parameters with R_N chosen to give the requested beta_c.
RcsjParams params_for_beta(double i_c, double c_j, double beta_c, double delta0);

struct PhaseState {
    double phi = 0.0;       // rad
    double dphi_dt = 0.0;   // rad/s
    double time = 0.0;      // s

    double voltage() const;
};

enum class Branch { SweepUp, SweepDown };

struct IVPoint {
    double i_drive;   // A
    double v_avg;     // V
};

struct IVCurve {
    Branch branch = Branch::SweepUp;
    std::vector<IVPoint> points;
};

/// Drive current in amperes as a function of time in seconds.
using DriveWaveform = std::function<double(double)>;

/// Quasiparticle conductance: 0 below the gap voltage, 1/R_N above it, with a
/// linear ramp of half-width gap_smoothing * 2 Delta0 / e around the edge.
double junction_conductance(double v, const RcsjParams& params);

/// Adaptive Dormand-Prince integration from `initial` to `t_end` (seconds);
/// returns every accepted step including the initial state.
/// Throws SimulationError on step-size underflow or a non-finite state.
std::vector<PhaseState> integrate(const RcsjParams& params, const DriveWaveform& drive, const PhaseState& initial,
                                  double t_end, double tol);

struct SweepOptions {
    int settle_periods = 50;
    int average_periods = 200;
    double tol = 1e-8;
    /// Called with every accepted state, for trajectory output.
    std::function<void(const PhaseState&, double i_drive)> observer;
};

/// DC sweep 0 -> i_max -> 0 with state carried between bias points.
/// `n_points` counts points per branch, both ends included.
std::pair<IVCurve, IVCurve> iv_sweep(const RcsjParams& params, double i_max, int n_points,
                                     const SweepOptions& options = {});

/// Highest down-branch bias whose average voltage is below `v_threshold`,
/// i.e. the retrapping current. Returns 0 when the branch never retraps.
double retrapping_current(const IVCurve& down, double v_threshold);

/// Lowest up-branch bias whose average voltage exceeds `v_threshold`.
/// Returns +inf when the branch never switches.
double switching_current(const IVCurve& up, double v_threshold);

} // namespace bbq
