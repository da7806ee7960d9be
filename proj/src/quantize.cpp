#include "bbq/quantize.hpp"

#include "bbq/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace bbq {

namespace {

void check_modes(std::span<const QuantizedMode> modes) {
    for (const auto& m : modes) {
        if (!(m.omega > 0.0) || !(m.c > 0.0) || !(m.phi_zpf > 0.0) || !std::isfinite(m.omega) || !std::isfinite(m.c)) {
            throw QuantizationError("quantized mode fields must be positive and finite");
        }
    }
}

void check_junction(const JunctionParams& j) {
    if (!std::isfinite(j.e_j) || j.e_j < 0.0) throw QuantizationError("Josephson energy must be finite and non-negative");
}

Eigen::MatrixXd position_operator(int n) {
    const Eigen::MatrixXd a = lowering_operator(n);
    return a + a.transpose();
}

// Embeds a single-mode operator into the tensor-product space.
Eigen::MatrixXd embed(const Eigen::MatrixXd& local, std::size_t which, std::span<const int> truncations) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (std::size_t i = 0; i < truncations.size(); ++i) {
        const Eigen::MatrixXd factor =
            i == which ? local : Eigen::MatrixXd::Identity(truncations[i], truncations[i]).eval();
        Eigen::MatrixXd next = Eigen::kroneckerProduct(out, factor).eval();
        out = std::move(next);
    }
    return out;
}

std::vector<std::size_t> strides(std::span<const int> truncations) {
    std::vector<std::size_t> s(truncations.size(), 1);
    for (std::size_t i = truncations.size(); i-- > 1;) s[i - 1] = s[i] * static_cast<std::size_t>(truncations[i]);
    return s;
}

} // namespace

JunctionParams JunctionParams::direct(double e_j) {
    JunctionParams j;
    j.e_j = e_j;
    check_junction(j);
    return j;
}

JunctionParams JunctionParams::from_critical_current(double i_c) {
    if (!std::isfinite(i_c) || i_c < 0.0) throw QuantizationError("critical current must be finite and non-negative");
    JunctionParams j;
    j.e_j = kReducedFluxQuantum * i_c;
    j.i_c = i_c;
    return j;
}

double QuantizedMode::freq_hz() const noexcept { return omega / (2.0 * std::numbers::pi); }

double zero_point_phase(double omega, double c) {
    return (2.0 * std::numbers::pi / kFluxQuantum) * std::sqrt(kHbar / (2.0 * omega * c));
}

QuantizedMode make_quantized_mode(double omega, double c) {
    if (!(omega > 0.0) || !(c > 0.0)) throw QuantizationError("mode omega and C must be positive");
    return {omega, c, zero_point_phase(omega, c)};
}

QuantizedMode mode_with_phi_zpf(double omega, double phi_zpf) {
    if (!(omega > 0.0) || !(phi_zpf > 0.0)) throw QuantizationError("mode omega and phi_zpf must be positive");
    const double k = 2.0 * std::numbers::pi / kFluxQuantum;
    const double c = k * k * kHbar / (2.0 * omega * phi_zpf * phi_zpf);
    return make_quantized_mode(omega, c);
}

std::vector<QuantizedMode> quantize_modes(std::span<const RLCMode> modes) {
    std::vector<QuantizedMode> out;
    out.reserve(modes.size());
    for (const auto& m : modes) {
        try {
            m.validate();
        } catch (const std::invalid_argument& e) {
            throw QuantizationError(std::string("invalid RLC mode: ") + e.what());
        }
        out.push_back(make_quantized_mode(m.omega, m.c));
    }
    return out;
}

DispersiveModel kerr_perturbative(std::span<const QuantizedMode> modes, const JunctionParams& junction) {
    check_modes(modes);
    check_junction(junction);
    DispersiveModel out;
    out.modes.assign(modes.begin(), modes.end());
    out.e_j = junction.e_j;
    const auto n = static_cast<Eigen::Index>(modes.size());
    out.chi_hz = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = modes[static_cast<std::size_t>(i)].phi_zpf;
        if (pi >= 1.0) {
            std::ostringstream msg;
            msg << "phi_zpf = " << pi << " of mode " << i << " is >= 1; the quartic expansion does not apply";
            throw QuantizationError(msg.str());
        }
        out.alpha_hz.push_back(junction.e_j * std::pow(pi, 4) / (2.0 * kPlanck));
        out.transition_hz.push_back(modes[static_cast<std::size_t>(i)].freq_hz());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double pi = modes[static_cast<std::size_t>(i)].phi_zpf;
            const double pj = modes[static_cast<std::size_t>(j)].phi_zpf;
            const double chi = junction.e_j * pi * pi * pj * pj / kPlanck;
            out.chi_hz(i, j) = chi;
            out.chi_hz(j, i) = chi;
        }
    }
    return out;
}

Eigen::MatrixXd lowering_operator(int n) {
    if (n < 1) throw std::invalid_argument("ladder truncation must be >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

Eigen::MatrixXd flux_operator(double omega, double c, int n) {
    return std::sqrt(kHbar / (2.0 * omega * c)) * position_operator(n);
}

Eigen::MatrixXcd charge_operator(double omega, double c, int n) {
    const Eigen::MatrixXd a = lowering_operator(n);
    const Eigen::MatrixXd diff = a - a.transpose();
    return std::complex<double>(0.0, -std::sqrt(kHbar * omega * c / 2.0)) * diff.cast<std::complex<double>>();
}

std::vector<int> default_truncations(std::size_t n_modes, std::size_t dim_cap) {
    if (n_modes == 0) return {};
    const double per_mode = std::pow(static_cast<double>(dim_cap), 1.0 / static_cast<double>(n_modes));
    const int n = std::clamp(static_cast<int>(std::floor(per_mode + 1e-9)), 5, 20);
    return std::vector<int>(n_modes, n);
}

HamiltonianMatrix build_hamiltonian(std::span<const QuantizedMode> modes, const JunctionParams& junction,
                                    std::span<const int> truncations, std::size_t dim_cap) {
    check_modes(modes);
    check_junction(junction);
    if (modes.empty()) throw QuantizationError("at least one mode is required");
    if (truncations.size() != modes.size()) throw QuantizationError("one truncation per mode is required");
    std::size_t dim = 1;
    for (int t : truncations) {
        if (t < 3) throw QuantizationError("Fock truncation " + std::to_string(t) + " is below the minimum of 3");
        dim *= static_cast<std::size_t>(t);
        if (dim > dim_cap) {
            throw QuantizationError("Hilbert-space dimension exceeds the cap of " + std::to_string(dim_cap));
        }
    }

    HamiltonianMatrix h;
    h.truncations.assign(truncations.begin(), truncations.end());
    h.e_j = junction.e_j;
    const auto d = static_cast<Eigen::Index>(dim);
    h.entries = Eigen::MatrixXd::Zero(d, d);

    const auto stride = strides(truncations);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        double e = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto n_i = (idx / stride[i]) % static_cast<std::size_t>(truncations[i]);
            e += kHbar * modes[i].omega * static_cast<double>(n_i);
        }
        h.entries(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = e;
    }
    if (junction.e_j == 0.0) return h;

    // The factors of exp(i phi) act on distinct modes and commute, so
    // cos(phi) = Re(kron_i exp(i phi_i x_i)), each factor from the spectral
    // decomposition of the real symmetric x_i = a_i + a_i^dag.
    Eigen::MatrixXcd expo = Eigen::MatrixXcd::Identity(1, 1);
    std::vector<Eigen::MatrixXd> scaled_x;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Eigen::MatrixXd x = modes[i].phi_zpf * position_operator(truncations[i]);
        scaled_x.push_back(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        if (es.info() != Eigen::Success) throw QuantizationError("phase-operator diagonalization failed");
        const Eigen::VectorXcd phases =
            es.eigenvalues().unaryExpr([](double v) { return std::polar(1.0, v); });
        const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
        const Eigen::MatrixXcd u = v * phases.asDiagonal() * v.transpose();
        Eigen::MatrixXcd next = Eigen::kroneckerProduct(expo, u).eval();
        expo = std::move(next);
    }
    const Eigen::MatrixXd cos_phi = expo.real();
    expo.resize(0, 0);

    // phi^2 = sum_i x_i^2 + 2 sum_{i<j} x_i x_j
    Eigen::MatrixXd phi_sq = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        phi_sq += embed(scaled_x[i] * scaled_x[i], i, truncations);
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(1, 1);
            for (std::size_t k = 0; k < modes.size(); ++k) {
                const Eigen::MatrixXd factor = (k == i || k == j)
                    ? scaled_x[k]
                    : Eigen::MatrixXd::Identity(truncations[k], truncations[k]).eval();
                Eigen::MatrixXd next = Eigen::kroneckerProduct(prod, factor).eval();
                prod = std::move(next);
            }
            phi_sq += 2.0 * prod;
        }
    }

    h.entries += junction.e_j * (Eigen::MatrixXd::Identity(d, d) - cos_phi - 0.5 * phi_sq);
    // Symmetrize away round-off from the complex exponential products.
    h.entries = 0.5 * (h.entries + h.entries.transpose()).eval();
    return h;
}

DispersiveModel kerr_exact(const HamiltonianMatrix& h, std::span<const QuantizedMode> modes) {
    check_modes(modes);
    const auto& trunc = h.truncations;
    if (trunc.size() != modes.size()) throw QuantizationError("mode count does not match Hamiltonian truncations");
    for (int t : trunc) {
        if (t < 5) throw QuantizationError("kerr_exact needs truncation >= 5 (levels 0..2 plus a two-level guard band)");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries);
    if (es.info() != Eigen::Success) throw QuantizationError("Hamiltonian diagonalization failed");
    const Eigen::VectorXd& energies = es.eigenvalues();
    const Eigen::MatrixXd& vecs = es.eigenvectors();

    const auto stride = strides(trunc);
    std::vector<Eigen::Index> claimed;
    auto level = [&](std::size_t bare, const std::string& label) {
        const auto row = static_cast<Eigen::Index>(bare);
        Eigen::Index best = 0;
        const double overlap = vecs.row(row).cwiseAbs().maxCoeff(&best);
        if (overlap < 0.5) {
            std::ostringstream msg;
            msg << "ambiguous labeling of bare state " << label << ": maximum overlap " << overlap
                << " < 0.5 (increase truncation or reduce phi_zpf)";
            throw QuantizationError(msg.str());
        }
        if (std::find(claimed.begin(), claimed.end(), best) != claimed.end()) {
            throw QuantizationError("ambiguous labeling: eigenstate already assigned before " + label);
        }
        claimed.push_back(best);
        return energies(best);
    };

    const std::size_t m = modes.size();
    const double e0 = level(0, "|0>");
    std::vector<double> e1(m), e2(m);
    for (std::size_t i = 0; i < m; ++i) {
        e1[i] = level(stride[i], "|1_" + std::to_string(i) + ">");
        e2[i] = level(2 * stride[i], "|2_" + std::to_string(i) + ">");
    }

    DispersiveModel out;
    out.modes.assign(modes.begin(), modes.end());
    out.e_j = h.e_j;
    out.chi_hz = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        out.alpha_hz.push_back(((e1[i] - e0) - (e2[i] - e1[i])) / kPlanck);
        out.transition_hz.push_back((e1[i] - e0) / kPlanck);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double e11 = level(stride[i] + stride[j], "|1_" + std::to_string(i) + " 1_" + std::to_string(j) + ">");
            const double chi = (e1[i] + e1[j] - e11 - e0) / kPlanck;
            out.chi_hz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = chi;
            out.chi_hz(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = chi;
        }
    }
    return out;
}

} // namespace bbq
