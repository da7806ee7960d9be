#include "bbq/synthesis.hpp"

#include "bbq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bbq {

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

} // namespace

double RLCMode::freq_hz() const noexcept { return omega / (2.0 * std::numbers::pi); }

void RLCMode::validate() const {
    for (double v : {omega, q_factor, r, l, c}) {
        if (!std::isfinite(v) || !(v > 0.0)) throw std::invalid_argument("RLC mode fields must be positive and finite");
    }
    if (!rel_close(omega, 1.0 / std::sqrt(l * c), 1e-9)) throw std::invalid_argument("RLC mode violates omega = 1/sqrt(LC)");
    if (!rel_close(q_factor, omega * r * c, 1e-9)) throw std::invalid_argument("RLC mode violates Q = omega R C");
}

RLCMode make_rlc_mode(double r, double omega, double q_factor) {
    RLCMode m;
    m.omega = omega;
    m.q_factor = q_factor;
    m.r = r;
    m.c = q_factor / (omega * r);
    m.l = 1.0 / (omega * omega * m.c);
    m.validate();
    return m;
}

PolePair mode_pole_pair(const RLCMode& mode) {
    mode.validate();
    const double xi = -mode.omega / (2.0 * mode.q_factor);
    const double disc = mode.omega * mode.omega - xi * xi;
    if (!(disc > 0.0)) throw std::invalid_argument("mode_pole_pair: overdamped mode (Q <= 1/2) has real poles");
    const cplx pole(xi, std::sqrt(disc));
    // Residue of k s / ((s - p)(s - p*)) at p, with k = omega R / Q.
    const double k = mode.omega * mode.r / mode.q_factor;
    const cplx residue = k * pole / (pole - std::conj(pole));
    return {pole, residue};
}

RationalModel model_from_modes(std::span<const RLCMode> modes) {
    RationalModel model;
    for (const auto& m : modes) {
        const auto pp = mode_pole_pair(m);
        model.poles.push_back(pp.pole);
        model.poles.push_back(std::conj(pp.pole));
        model.residues.push_back(pp.residue);
        model.residues.push_back(std::conj(pp.residue));
    }
    return model;
}

std::vector<RLCMode> synthesize_modes(const RationalModel& model) {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw SynthesisError(std::string("invalid rational model: ") + e.what());
    }
    std::vector<RLCMode> modes;
    for (std::size_t k = 0; k < model.poles.size(); ++k) {
        const cplx p = model.poles[k];
        if (p.imag() == 0.0) {
            std::ostringstream msg;
            msg << "real pole " << p.real() << " rad/s cannot form a resonant mode";
            throw SynthesisError(msg.str());
        }
        if (p.imag() < 0.0) continue;  // conjugate partner
        const double xi = p.real();
        const double a = model.residues[k].real();
        if (xi == 0.0) {
            throw SynthesisError("lossless pole (zero real part) gives infinite Q; add loss to the model or supply LC values directly");
        }
        if (xi > 0.0) throw SynthesisError("unstable pole with positive real part");
        if (!(a > 0.0)) {
            std::ostringstream msg;
            msg << "residue real part " << a << " <= 0 implies a non-physical negative resistance";
            throw SynthesisError(msg.str());
        }
        RLCMode m;
        m.omega = std::abs(p);
        m.q_factor = -m.omega / (2.0 * xi);
        m.r = -a / xi;
        m.c = m.q_factor / (m.omega * m.r);
        m.l = 1.0 / (m.omega * m.omega * m.c);
        modes.push_back(m);
    }
    std::sort(modes.begin(), modes.end(), [](const RLCMode& x, const RLCMode& y) { return x.omega < y.omega; });
    return modes;
}

std::vector<cplx> mode_impedance(const RLCMode& mode, std::span<const double> freqs_hz) {
    std::vector<cplx> out;
    out.reserve(freqs_hz.size());
    const double damping = mode.omega / mode.q_factor;
    const double gain = mode.omega * mode.r / mode.q_factor;
    for (double f : freqs_hz) {
        if (!std::isfinite(f)) throw std::invalid_argument("mode_impedance: non-finite frequency");
        const cplx s(0.0, 2.0 * std::numbers::pi * f);
        out.push_back(gain * s / (s * s + damping * s + mode.omega * mode.omega));
    }
    return out;
}

std::vector<cplx> chain_impedance(std::span<const RLCMode> modes, std::span<const double> freqs_hz) {
    std::vector<cplx> total(freqs_hz.size(), cplx{});
    for (const auto& m : modes) {
        const auto zk = mode_impedance(m, freqs_hz);
        for (std::size_t i = 0; i < zk.size(); ++i) total[i] += zk[i];
    }
    return total;
}

DiscardedTerms check_discarded_terms(const RationalModel& model, std::span<const double> freqs_hz) {
    DiscardedTerms out;
    out.const_term = model.const_term;
    out.slope_term = model.slope_term;
    if (freqs_hz.empty()) return out;
    const auto z = evaluate_model(model, freqs_hz);
    std::vector<double> mags;
    mags.reserve(z.size());
    for (const auto& v : z) mags.push_back(std::abs(v));
    const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    out.median_abs_z = *mid;
    const double omega_max = 2.0 * std::numbers::pi * freqs_hz.back();
    const double threshold = 0.01 * out.median_abs_z;
    out.significant = std::abs(model.const_term) > threshold || std::abs(model.slope_term * omega_max) > threshold;
    return out;
}

} // namespace bbq
