#include "bbq/rcsj.hpp"

#include "bbq/constants.hpp"
#include "bbq/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bbq {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;  // (phi, dphi/dtau)

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxStep = 1.0;  // tau units; keeps phase-crossing detection well resolved

// Dimensionless right-hand side: phi'' = i(tau) - sin(phi) - g(u) u.
struct Rhs {
    const RcsjParams& params;
    std::function<double(double)> drive_norm;  // tau -> I_d / I_c
    double volt_per_u;                        // volts per unit dphi/dtau
    double inv_sqrt_beta;

    void operator()(const State& y, State& dydt, double tau) const {
        const double g = junction_conductance(y[1] * volt_per_u, params) * params.r_n * inv_sqrt_beta;
        dydt[0] = y[1];
        dydt[1] = drive_norm(tau) - std::sin(y[0]) - g * y[1];
    }
};

// Cubic Hermite interpolant of phi across one accepted step.
double hermite(double t, double h, double p0, double m0, double p1, double m1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * m1;
}

double crossing_time(double tau0, double tau1, const State& y0, const State& y1, double level) {
    const double h = tau1 - tau0;
    double lo = 0.0;
    double hi = 1.0;
    const double f_lo = hermite(lo, h, y0[0], y0[1], y1[0], y1[1]) - level;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = hermite(mid, h, y0[0], y0[1], y1[0], y1[1]) - level;
        if ((f_mid < 0.0) == (f_lo < 0.0)) lo = mid;
        else hi = mid;
    }
    return tau0 + 0.5 * (lo + hi) * h;
}

class Integrator {
public:
    Integrator(const RcsjParams& params, double tol)
        : params_(params),
          tol_(tol),
          omega_p_(params.plasma_omega()),
          volt_per_u_(kReducedFluxQuantum * omega_p_),
          inv_sqrt_beta_(1.0 / std::sqrt(params.beta_c())) {}

    double omega_p() const { return omega_p_; }
    double volt_per_u() const { return volt_per_u_; }

    // Advances (y, tau) to tau_end; `on_step` sees every accepted step.
    template <typename OnStep>
    void advance(State& y, double& tau, double tau_end, std::function<double(double)> drive_norm, OnStep&& on_step) {
        Rhs rhs{params_, std::move(drive_norm), volt_per_u_, inv_sqrt_beta_};
        auto stepper = odeint::make_controlled(tol_, tol_, odeint::runge_kutta_dopri5<State>());
        double dt = std::min(kMaxStep, std::max(1e-3, 0.01 * (tau_end - tau)));
        while (tau < tau_end) {
            const double remaining = tau_end - tau;
            bool last = false;
            if (dt >= remaining) {
                dt = remaining;
                last = true;
            }
            const State y0 = y;
            const double tau0 = tau;
            const auto result = stepper.try_step(rhs, y, tau, dt);
            if (result == odeint::success) {
                if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
                    std::ostringstream msg;
                    msg << "non-finite junction state at t = " << tau / omega_p_ << " s";
                    throw SimulationError(msg.str());
                }
                if (last) tau = tau_end;
                on_step(tau0, y0, tau, y);
                dt = std::min(dt, kMaxStep);
            } else if (dt < 1e-14 * std::max(1.0, std::abs(tau))) {
                std::ostringstream msg;
                msg << "step size underflow at t = " << tau / omega_p_ << " s";
                throw SimulationError(msg.str());
            }
        }
    }

private:
    const RcsjParams& params_;
    double tol_;
    double omega_p_;
    double volt_per_u_;
    double inv_sqrt_beta_;
};

// Average dphi/dtau over a window, using whole phase-slip periods when at
// least two new 2pi levels are reached in the direction of motion.
class PhaseAverager {
public:
    explicit PhaseAverager(double tau0, const State& y0)
        : tau_start_(tau0), phi_start_(y0[0]), up_level_(std::floor(y0[0] / kTwoPi)), down_level_(std::ceil(y0[0] / kTwoPi)) {}

    void step(double tau0, const State& y0, double tau1, const State& y1) {
        while (y1[0] >= kTwoPi * (up_level_ + 1)) {
            up_level_ += 1;
            const double t = crossing_time(tau0, tau1, y0, y1, kTwoPi * up_level_);
            if (up_count_ == 0) up_first_ = t;
            up_last_ = t;
            ++up_count_;
        }
        while (y1[0] <= kTwoPi * (down_level_ - 1)) {
            down_level_ -= 1;
            const double t = crossing_time(tau0, tau1, y0, y1, kTwoPi * down_level_);
            if (down_count_ == 0) down_first_ = t;
            down_last_ = t;
            ++down_count_;
        }
        tau_end_ = tau1;
        phi_end_ = y1[0];
    }

    double mean_velocity() const {
        const double net = phi_end_ - phi_start_;
        if (net > 0.0 && up_count_ >= 2) return kTwoPi * (up_count_ - 1) / (up_last_ - up_first_);
        if (net < 0.0 && down_count_ >= 2) return -kTwoPi * (down_count_ - 1) / (down_last_ - down_first_);
        return tau_end_ > tau_start_ ? net / (tau_end_ - tau_start_) : 0.0;
    }

private:
    double tau_start_;
    double phi_start_;
    double tau_end_ = 0.0;
    double phi_end_ = 0.0;
    double up_level_;
    double down_level_;
    int up_count_ = 0;
    int down_count_ = 0;
    double up_first_ = 0.0, up_last_ = 0.0, down_first_ = 0.0, down_last_ = 0.0;
};

} // namespace

void RcsjParams::validate() const {
    for (double v : {i_c, r_n, c_j, delta0}) {
        if (!std::isfinite(v) || !(v > 0.0)) throw std::invalid_argument("RCSJ parameters must be positive and finite");
    }
    if (!(gap_smoothing >= 0.0) || gap_smoothing >= 1.0) throw std::invalid_argument("gap_smoothing must lie in [0, 1)");
}

double RcsjParams::beta_c() const { return kTwoPi * i_c * r_n * r_n * c_j / kFluxQuantum; }

double RcsjParams::plasma_omega() const { return std::sqrt(kTwoPi * i_c / (kFluxQuantum * c_j)); }

double RcsjParams::gap_voltage() const { return 2.0 * delta0 / kElementaryCharge; }

RcsjParams params_for_beta(double i_c, double c_j, double beta_c, double delta0) {
    RcsjParams p;
    p.i_c = i_c;
    p.c_j = c_j;
    p.delta0 = delta0;
    p.r_n = std::sqrt(beta_c * kFluxQuantum / (kTwoPi * i_c * c_j));
    p.validate();
    return p;
}

double PhaseState::voltage() const { return kReducedFluxQuantum * dphi_dt; }

double junction_conductance(double v, const RcsjParams& params) {
    const double vg = params.gap_voltage();
    const double w = params.gap_smoothing * vg;
    const double av = std::abs(v);
    if (av <= vg - w) return 0.0;
    if (av >= vg + w) return 1.0 / params.r_n;
    return (av - (vg - w)) / (2.0 * w) / params.r_n;
}

std::vector<PhaseState> integrate(const RcsjParams& params, const DriveWaveform& drive, const PhaseState& initial,
                                  double t_end, double tol) {
    params.validate();
    if (!(t_end > initial.time)) throw std::invalid_argument("integrate: t_end must exceed the initial time");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (!std::isfinite(initial.phi) || !std::isfinite(initial.dphi_dt)) throw SimulationError("non-finite initial state");

    Integrator integ(params, tol);
    const double wp = integ.omega_p();
    State y{initial.phi, initial.dphi_dt / wp};
    double tau = initial.time * wp;
    std::vector<PhaseState> out{initial};
    const double i_c = params.i_c;
    integ.advance(y, tau, t_end * wp, [&drive, wp, i_c](double t) { return drive(t / wp) / i_c; },
                  [&](double, const State&, double t1, const State& y1) {
                      out.push_back({y1[0], y1[1] * wp, t1 / wp});
                  });
    out.back().time = t_end;
    return out;
}

std::pair<IVCurve, IVCurve> iv_sweep(const RcsjParams& params, double i_max, int n_points, const SweepOptions& options) {
    params.validate();
    if (n_points < 2) throw std::invalid_argument("iv_sweep: n_points must be >= 2");
    if (!std::isfinite(i_max) || i_max == 0.0) throw std::invalid_argument("iv_sweep: i_max must be finite and nonzero");
    if (options.settle_periods < 0 || options.average_periods < 1) throw std::invalid_argument("iv_sweep: invalid averaging window");

    Integrator integ(params, options.tol);
    const double wp = integ.omega_p();
    const double settle = kTwoPi * options.settle_periods;
    const double window = kTwoPi * options.average_periods;

    State y{0.0, 0.0};
    double tau = 0.0;
    IVCurve up{Branch::SweepUp, {}};
    IVCurve down{Branch::SweepDown, {}};

    auto run_point = [&](double i_drive) {
        const double i_norm = i_drive / params.i_c;
        auto notify = [&](double, const State&, double t1, const State& y1) {
            if (options.observer) options.observer(PhaseState{y1[0], y1[1] * wp, t1 / wp}, i_drive);
        };
        try {
            integ.advance(y, tau, tau + settle, [i_norm](double) { return i_norm; }, notify);
            PhaseAverager avg(tau, y);
            integ.advance(y, tau, tau + window, [i_norm](double) { return i_norm; },
                          [&](double t0, const State& y0, double t1, const State& y1) {
                              avg.step(t0, y0, t1, y1);
                              notify(t0, y0, t1, y1);
                          });
            return avg.mean_velocity() * integ.volt_per_u();
        } catch (const SimulationError& e) {
            std::ostringstream msg;
            msg << "at bias " << i_drive << " A: " << e.what();
            throw SimulationError(msg.str());
        }
    };

    for (int k = 0; k < n_points; ++k) {
        const double i = i_max * static_cast<double>(k) / (n_points - 1);
        up.points.push_back({i, run_point(i)});
    }
    for (int k = n_points - 1; k >= 0; --k) {
        const double i = i_max * static_cast<double>(k) / (n_points - 1);
        down.points.push_back({i, run_point(i)});
    }
    return {up, down};
}

double retrapping_current(const IVCurve& down, double v_threshold) {
    for (const auto& p : down.points) {
        if (std::abs(p.v_avg) < v_threshold) return std::abs(p.i_drive);
    }
    return 0.0;
}

double switching_current(const IVCurve& up, double v_threshold) {
    for (const auto& p : up.points) {
        if (std::abs(p.v_avg) > v_threshold) return std::abs(p.i_drive);
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace bbq
