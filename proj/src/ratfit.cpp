#include "bbq/ratfit.hpp"

#include "bbq/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bbq {

namespace {

constexpr cplx kJ{0.0, 1.0};

// A real pole contributes one real unknown, a conjugate pair two.
struct PoleBlock {
    cplx pole;  // representative, Im >= 0
    bool is_pair;
};

std::vector<PoleBlock> to_blocks(std::span<const cplx> poles) {
    std::vector<PoleBlock> blocks;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (poles[i].imag() == 0.0) {
            blocks.push_back({poles[i], false});
        } else {
            if (i + 1 >= poles.size() || poles[i + 1] != std::conj(poles[i]) || poles[i].imag() < 0.0) {
                throw std::invalid_argument("complex poles must be stored as adjacent (p, conj(p)) pairs with Im(p) > 0");
            }
            blocks.push_back({poles[i], true});
            ++i;
        }
    }
    return blocks;
}

std::vector<cplx> from_blocks(const std::vector<PoleBlock>& blocks) {
    std::vector<cplx> poles;
    for (const auto& b : blocks) {
        poles.push_back(b.pole);
        if (b.is_pair) poles.push_back(std::conj(b.pole));
    }
    return poles;
}

Eigen::Index real_unknowns(const std::vector<PoleBlock>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.is_pair ? 2 : 1;
    return n;
}

// Basis functions phi(s) laid out column-wise, one row per sample.
Eigen::MatrixXcd basis(const std::vector<PoleBlock>& blocks, const Eigen::VectorXcd& s) {
    Eigen::MatrixXcd phi(s.size(), real_unknowns(blocks));
    Eigen::Index col = 0;
    for (const auto& b : blocks) {
        for (Eigen::Index n = 0; n < s.size(); ++n) {
            if (b.is_pair) {
                const cplx u = 1.0 / (s(n) - b.pole);
                const cplx v = 1.0 / (s(n) - std::conj(b.pole));
                phi(n, col) = u + v;
                phi(n, col + 1) = kJ * u - kJ * v;
            } else {
                phi(n, col) = 1.0 / (s(n) - b.pole);
            }
        }
        col += b.is_pair ? 2 : 1;
    }
    return phi;
}

// Stacks real and imaginary parts of a complex system into one real system.
Eigen::MatrixXd stack(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXd out(2 * m.rows(), m.cols());
    out.topRows(m.rows()) = m.real();
    out.bottomRows(m.rows()) = m.imag();
    return out;
}

Eigen::VectorXd stack(const Eigen::VectorXcd& v) {
    Eigen::VectorXd out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

struct LsqSolution {
    Eigen::VectorXd x;
    Eigen::Index rank;
};

// Minimum-norm least squares with unit-norm column equilibration.
LsqSolution solve_lsq(Eigen::MatrixXd a, const Eigen::VectorXd& b) {
    Eigen::VectorXd scale(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double norm = a.col(j).norm();
        scale(j) = norm > 0.0 ? 1.0 / norm : 1.0;
        a.col(j) *= scale(j);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-13);
    LsqSolution sol{cod.solve(b), cod.rank()};
    sol.x = sol.x.cwiseProduct(scale);
    return sol;
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

std::string iteration_tag(int iteration) { return "iteration " + std::to_string(iteration); }

struct ResidueFit {
    Eigen::VectorXd coeffs;  // pole coefficients, then const, then slope
    double rms = 0.0;
};

struct Problem {
    Eigen::VectorXcd s;       // normalized complex frequencies
    Eigen::VectorXcd f;       // data
    Eigen::VectorXd weight;
    bool include_const;
    bool include_slope;
};

Eigen::MatrixXcd design_matrix(const Problem& p, const std::vector<PoleBlock>& blocks) {
    const Eigen::MatrixXcd phi = basis(blocks, p.s);
    const Eigen::Index extra = (p.include_const ? 1 : 0) + (p.include_slope ? 1 : 0);
    Eigen::MatrixXcd a(p.s.size(), phi.cols() + extra);
    a.leftCols(phi.cols()) = phi;
    Eigen::Index col = phi.cols();
    if (p.include_const) a.col(col++).setOnes();
    if (p.include_slope) a.col(col++) = p.s;
    return a;
}

ResidueFit fit_residues(const Problem& p, const std::vector<PoleBlock>& blocks, int iteration) {
    const Eigen::MatrixXcd a = design_matrix(p, blocks);
    const Eigen::MatrixXcd aw = p.weight.asDiagonal() * a;
    const Eigen::VectorXcd bw = p.weight.cwiseProduct(p.f);
    const auto sol = solve_lsq(stack(aw), stack(bw));
    if (sol.rank < a.cols()) {
        throw FitError("rank-deficient least-squares system for residues at " + iteration_tag(iteration) +
                       " (rank " + std::to_string(sol.rank) + " of " + std::to_string(a.cols()) + ")");
    }
    if (!all_finite(sol.x)) throw FitError("non-finite residues at " + iteration_tag(iteration));
    const Eigen::VectorXcd resid = a * sol.x.cast<cplx>() - p.f;
    return {sol.x, std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()))};
}

// One pole-identification step: solve for the sigma function and return its zeros.
std::vector<PoleBlock> relocate(const Problem& p, const std::vector<PoleBlock>& blocks, int iteration) {
    const Eigen::MatrixXcd a = design_matrix(p, blocks);
    const Eigen::MatrixXcd phi = basis(blocks, p.s);
    Eigen::MatrixXcd full(a.rows(), a.cols() + phi.cols());
    full.leftCols(a.cols()) = a;
    full.rightCols(phi.cols()) = -(p.f.asDiagonal() * phi);
    const Eigen::MatrixXcd fw = p.weight.asDiagonal() * full;
    const Eigen::VectorXcd bw = p.weight.cwiseProduct(p.f);

    // Rank deficiency here means the data is explained by fewer poles; the
    // minimum-norm solution then leaves the redundant poles in place.
    const auto sol = solve_lsq(stack(fw), stack(bw));
    if (!all_finite(sol.x)) throw FitError("non-finite sigma coefficients at " + iteration_tag(iteration));

    const Eigen::VectorXd sigma = sol.x.tail(phi.cols());
    const auto poles = from_blocks(blocks);
    const auto relocated = relocate_poles(poles, std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())));
    for (const auto& z : relocated) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw FitError("non-finite relocated pole at " + iteration_tag(iteration));
        }
    }
    return to_blocks(relocated);
}

double pole_displacement(const std::vector<PoleBlock>& prev, const std::vector<PoleBlock>& next) {
    if (prev.size() != next.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t k = 0; k < prev.size(); ++k) {
        if (prev[k].is_pair != next[k].is_pair) return std::numeric_limits<double>::infinity();
        const double denom = std::max(std::abs(prev[k].pole), std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(next[k].pole - prev[k].pole) / denom);
    }
    return worst;
}

RationalModel assemble(const std::vector<PoleBlock>& blocks, const Eigen::VectorXd& coeffs, bool include_const,
                       bool include_slope, double omega0) {
    RationalModel model;
    Eigen::Index col = 0;
    for (const auto& b : blocks) {
        const cplx pole = b.pole * omega0;
        if (b.is_pair) {
            const cplx r = cplx(coeffs(col), coeffs(col + 1)) * omega0;
            model.poles.push_back(pole);
            model.poles.push_back(std::conj(pole));
            model.residues.push_back(r);
            model.residues.push_back(std::conj(r));
            col += 2;
        } else {
            model.poles.push_back(pole);
            model.residues.push_back(coeffs(col) * omega0);
            col += 1;
        }
    }
    if (include_const) model.const_term = coeffs(col++);
    if (include_slope) model.slope_term = coeffs(col++) / omega0;
    return model;
}

} // namespace

void RationalModel::validate() const {
    if (poles.size() != residues.size()) throw std::invalid_argument("poles and residues differ in length");
    auto close = [](cplx a, cplx b) { return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300}); };
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (poles[i].imag() == 0.0) {
            if (residues[i].imag() != 0.0) throw std::invalid_argument("real pole with complex residue");
            continue;
        }
        if (i + 1 >= poles.size() || !close(poles[i + 1], std::conj(poles[i])) ||
            !close(residues[i + 1], std::conj(residues[i]))) {
            throw std::invalid_argument("complex pole or residue without adjacent conjugate partner");
        }
        ++i;
    }
    if (!std::isfinite(const_term) || !std::isfinite(slope_term)) throw std::invalid_argument("non-finite d or slope term");
}

bool RationalModel::is_stable() const {
    return std::all_of(poles.begin(), poles.end(), [](cplx p) { return p.real() < 0.0; });
}

std::vector<cplx> initial_poles(double omega_min, double omega_max, int n_pole_pairs) {
    if (n_pole_pairs < 1) throw std::invalid_argument("n_pole_pairs must be >= 1");
    std::vector<cplx> poles;
    for (int k = 0; k < n_pole_pairs; ++k) {
        double omega;
        if (n_pole_pairs == 1) {
            omega = std::sqrt(omega_min * omega_max);
        } else {
            const double t = static_cast<double>(k) / (n_pole_pairs - 1);
            omega = omega_min * std::pow(omega_max / omega_min, t);
        }
        const cplx p(-omega / 100.0, omega);
        poles.push_back(p);
        poles.push_back(std::conj(p));
    }
    return poles;
}

std::vector<cplx> relocate_poles(std::span<const cplx> poles, std::span<const double> sigma_coeffs) {
    const auto blocks = to_blocks(poles);
    const Eigen::Index n = real_unknowns(blocks);
    if (static_cast<Eigen::Index>(sigma_coeffs.size()) != n) {
        throw std::invalid_argument("sigma coefficient count does not match pole set");
    }
    // State-space realization of sigma(s) = 1 + c^T (sI - A)^-1 b; its zeros
    // are eig(A - b c^T).
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    Eigen::Index k = 0;
    for (const auto& blk : blocks) {
        if (blk.is_pair) {
            a(k, k) = blk.pole.real();
            a(k, k + 1) = blk.pole.imag();
            a(k + 1, k) = -blk.pole.imag();
            a(k + 1, k + 1) = blk.pole.real();
            b(k) = 2.0;
            k += 2;
        } else {
            a(k, k) = blk.pole.real();
            b(k) = 1.0;
            k += 1;
        }
    }
    const Eigen::Map<const Eigen::VectorXd> c(sigma_coeffs.data(), n);
    const Eigen::MatrixXd h = a - b * c.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(h, false);
    if (es.info() != Eigen::Success) throw FitError("eigenvalue computation failed during pole relocation");

    std::vector<PoleBlock> next;
    const Eigen::VectorXcd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        cplx z = ev(i);
        if (z.imag() < 0.0) continue;
        // Stability enforcement: reflect right-half-plane poles.
        if (z.real() > 0.0) z = cplx(-z.real(), z.imag());
        next.push_back({z, z.imag() != 0.0});
    }
    std::sort(next.begin(), next.end(), [](const PoleBlock& x, const PoleBlock& y) {
        if (x.pole.imag() != y.pole.imag()) return x.pole.imag() < y.pole.imag();
        return x.pole.real() < y.pole.real();
    });
    return from_blocks(next);
}

FitResult fit(const FrequencyResponse& data, int n_pole_pairs, const FitOptions& options) {
    if (data.kind != ResponseKind::Impedance) throw FitError("fit requires impedance data");
    if (n_pole_pairs < 1) throw FitError("n_pole_pairs must be >= 1");
    data.validate();
    const std::size_t needed = 2 * (2 * static_cast<std::size_t>(n_pole_pairs) + 2);
    if (data.size() < needed) {
        throw FitError("insufficient samples: " + std::to_string(data.size()) + " given, " + std::to_string(needed) +
                       " required for " + std::to_string(n_pole_pairs) + " pole pair(s)");
    }
    if (options.max_iters < 1) throw FitError("max_iters must be >= 1");

    const double two_pi = 2.0 * std::numbers::pi;
    const double omega_min = two_pi * data.freq_hz.front();
    const double omega_max = two_pi * data.freq_hz.back();
    const double omega0 = std::sqrt(omega_min * omega_max);

    Problem prob;
    const auto n = static_cast<Eigen::Index>(data.size());
    prob.s.resize(n);
    prob.f.resize(n);
    prob.weight.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        prob.s(i) = cplx(0.0, two_pi * data.freq_hz[static_cast<std::size_t>(i)] / omega0);
        prob.f(i) = data.values[static_cast<std::size_t>(i)];
    }
    const double fmax = prob.f.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (options.weighting == FitWeighting::InverseMagnitude) {
            const double mag = std::abs(prob.f(i));
            prob.weight(i) = 1.0 / std::max(mag, 1e-12 * std::max(fmax, 1e-300));
        } else {
            prob.weight(i) = 1.0;
        }
    }
    prob.include_const = options.include_const;
    prob.include_slope = options.include_slope;

    std::vector<cplx> start = initial_poles(omega_min / omega0, omega_max / omega0, n_pole_pairs);
    std::vector<PoleBlock> blocks = to_blocks(start);

    FitReport report;
    ResidueFit residues;
    for (int it = 1; it <= options.max_iters; ++it) {
        auto next = relocate(prob, blocks, it);
        const double move = pole_displacement(blocks, next);
        blocks = std::move(next);
        residues = fit_residues(prob, blocks, it);
        report.iterations = it;
        report.pole_moves.push_back(move);
        report.rms_history.push_back(residues.rms);
        if (move < options.pole_move_tol) {
            report.converged = true;
            break;
        }
    }

    FitResult result;
    result.model = assemble(blocks, residues.coeffs, options.include_const, options.include_slope, omega0);
    const auto fitted = evaluate_model(result.model, data.freq_hz);
    double sq = 0.0;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        const double err = std::abs(fitted[i] - data.values[i]);
        sq += err * err;
        const double mag = std::abs(data.values[i]);
        max_rel = std::max(max_rel, err / (mag > 0.0 ? mag : std::max(fmax, 1e-300)));
    }
    report.rms_error = std::sqrt(sq / static_cast<double>(fitted.size()));
    report.max_rel_error = max_rel;
    if (!std::isfinite(report.rms_error)) throw FitError("non-finite fit error");
    result.report = std::move(report);
    return result;
}

cplx evaluate_model_at(const RationalModel& model, cplx s) {
    if (model.poles.size() != model.residues.size()) throw std::invalid_argument("poles and residues differ in length");
    cplx z = model.const_term + model.slope_term * s;
    for (std::size_t k = 0; k < model.poles.size(); ++k) {
        const cplx gap = s - model.poles[k];
        const double scale = std::max(std::abs(s), std::abs(model.poles[k]));
        if (std::abs(gap) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
            std::ostringstream msg;
            msg << "evaluate_model: s = " << s << " coincides with pole " << model.poles[k];
            throw std::domain_error(msg.str());
        }
        z += model.residues[k] / gap;
    }
    return z;
}

std::vector<cplx> evaluate_model(const RationalModel& model, std::span<const double> freqs_hz) {
    std::vector<cplx> out;
    out.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        if (!std::isfinite(f) || !(f > 0.0)) throw std::invalid_argument("evaluate_model: frequencies must be positive and finite");
        out.push_back(evaluate_model_at(model, cplx(0.0, 2.0 * std::numbers::pi * f)));
    }
    return out;
}

} // namespace bbq
