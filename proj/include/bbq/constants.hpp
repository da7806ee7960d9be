#pragma once

#include <numbers>

namespace bbq {

// SI 2019 exact values.
struct PhysicalConstants {
    double h;
    double hbar;
    double e_charge;
    double phi0;
};

inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kFluxQuantum = kPlanck / (2.0 * kElementaryCharge);

inline constexpr PhysicalConstants kConstants{kPlanck, kHbar, kElementaryCharge, kFluxQuantum};

// Reduced flux quantum Phi0 / 2pi.
inline constexpr double kReducedFluxQuantum = kFluxQuantum / (2.0 * std::numbers::pi);

} // namespace bbq
