#pragma once

// Quantized LC modes shunted by a single Josephson junction: ladder operators,
// the truncated Fock-space Hamiltonian, and self-/cross-Kerr extraction.

#include "bbq/constants.hpp"
#include "bbq/synthesis.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace bbq {

struct JunctionParams {
    double e_j = 0.0;                   // J
    std::optional<double> i_c;          // A, set when derived from a critical current

    static JunctionParams direct(double e_j);
    /// E_J = Phi0 I_c / 2pi.
    static JunctionParams from_critical_current(double i_c);
    static JunctionParams from_ghz(double e_j_ghz) { return direct(e_j_ghz * 1e9 * kPlanck); }
};

struct QuantizedMode {
    double omega = 0.0;    // rad/s
    double c = 0.0;        // F
    double phi_zpf = 0.0;  // rad, (2pi/Phi0) sqrt(hbar / (2 omega C))

    double freq_hz() const noexcept;
};

/// Zero-point phase fluctuation of an LC mode.
double zero_point_phase(double omega, double c);

QuantizedMode make_quantized_mode(double omega, double c);
/// Inverse construction: picks C so the mode has the requested phi_zpf.
QuantizedMode mode_with_phi_zpf(double omega, double phi_zpf);

/// Drops resistances and carries omega, C into quantized modes (order preserved).
std::vector<QuantizedMode> quantize_modes(std::span<const RLCMode> modes);

struct DispersiveModel {
    std::vector<QuantizedMode> modes;
    std::vector<double> alpha_hz;          // self-Kerr per mode
    Eigen::MatrixXd chi_hz;                // symmetric, zero diagonal
    std::vector<double> transition_hz;     // 0 -> 1_i transition of each mode
    double e_j = 0.0;                      // J
};

/// Fourth-order expansion of the junction cosine, normal ordered, keeping
/// number-conserving terms: alpha_i = E_J phi_i^4 / 2h, chi_ij = E_J phi_i^2 phi_j^2 / h.
DispersiveModel kerr_perturbative(std::span<const QuantizedMode> modes, const JunctionParams& junction);

inline constexpr std::size_t kDefaultDimensionCap = 4096;

struct HamiltonianMatrix {
    Eigen::MatrixXd entries;               // J; real symmetric in the Fock basis
    std::vector<int> truncations;
    double e_j = 0.0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

/// H = sum_i hbar omega_i n_i + E_J (1 - cos phi - phi^2 / 2) with
/// phi = sum_i phi_zpf_i (a_i + a_i^dag), the first mode most significant in
/// the tensor-product index.
HamiltonianMatrix build_hamiltonian(std::span<const QuantizedMode> modes, const JunctionParams& junction,
                                    std::span<const int> truncations,
                                    std::size_t dim_cap = kDefaultDimensionCap);

/// Diagonalizes H, labels eigenstates by maximum overlap with bare Fock states
/// and reports the spectroscopic alpha and chi.
DispersiveModel kerr_exact(const HamiltonianMatrix& h, std::span<const QuantizedMode> modes);

// Single-mode ladder operators on an n-level truncation.
Eigen::MatrixXd lowering_operator(int n);
/// phi = sqrt(hbar / (2 omega C)) (a + a^dag), in webers.
Eigen::MatrixXd flux_operator(double omega, double c, int n);
/// q = -i sqrt(hbar omega C / 2) (a - a^dag), in coulombs.
Eigen::MatrixXcd charge_operator(double omega, double c, int n);

/// Default per-mode truncation so the product stays within `dim_cap`.
std::vector<int> default_truncations(std::size_t n_modes, std::size_t dim_cap = kDefaultDimensionCap);

} // namespace bbq
