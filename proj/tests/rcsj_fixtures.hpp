#pragma once

#include "bbq/rcsj.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fixture {

inline constexpr double kIc = 1e-6;     // A
inline constexpr double kCj = 1e-12;    // F

// Gap voltage set to `gap_fraction` of I_c R_N.
inline bbq::RcsjParams junction(double beta_c, double gap_fraction) {
    const double r = std::sqrt(beta_c * oracle::phi0 / (oracle::two_pi() * kIc * kCj));
    bbq::RcsjParams p;
    p.i_c = kIc;
    p.r_n = r;
    p.c_j = kCj;
    p.delta0 = gap_fraction * kIc * r * oracle::e / 2.0;
    return p;
}

inline double plasma_omega_oracle(const bbq::RcsjParams& p) {
    return std::sqrt(oracle::two_pi() * p.i_c / (oracle::phi0 * p.c_j));
}

// Times of upward zero crossings of phi, located on the cubic Hermite
// interpolant through consecutive accepted states.
inline std::vector<double> upward_zero_crossings(const std::vector<bbq::PhaseState>& traj) {
    std::vector<double> out;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const auto& a = traj[k - 1];
        const auto& b = traj[k];
        if (!(a.phi < 0.0 && b.phi >= 0.0)) continue;
        const double h = b.time - a.time;
        auto value = [&](double t) {
            const double s = (t - a.time) / h;
            const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
            const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
            return h00 * a.phi + h10 * h * a.dphi_dt + h01 * b.phi + h11 * h * b.dphi_dt;
        };
        double lo = a.time, hi = b.time;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (value(mid) < 0.0 ? lo : hi) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

inline double junction_energy(const bbq::RcsjParams& p, const bbq::PhaseState& s) {
    const double k = oracle::phi0 / oracle::two_pi();
    return 0.5 * k * k * p.c_j * s.dphi_dt * s.dphi_dt + k * p.i_c * (1.0 - std::cos(s.phi));
}

} // namespace fixture
