#include "bbq/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bbq {

namespace {

void emit(std::ostringstream& out, const ordered_json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
    case ordered_json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            break;
        }
        out << "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << inner << ordered_json(it.key()).dump() << ": ";
            emit(out, it.value(), indent + 1);
        }
        out << "\n" << pad << "}";
        break;
    }
    case ordered_json::value_t::array: {
        // Arrays of scalars stay on one line.
        bool scalar = true;
        for (const auto& e : v) scalar = scalar && !e.is_structured();
        if (v.empty()) {
            out << "[]";
        } else if (scalar) {
            out << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out << ", ";
                emit(out, v[i], indent + 1);
            }
            out << "]";
        } else {
            out << "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out << ",\n";
                out << inner;
                emit(out, v[i], indent + 1);
            }
            out << "\n" << pad << "]";
        }
        break;
    }
    case ordered_json::value_t::number_float:
        out << format_double(v.get<double>());
        break;
    default:
        out << v.dump();
    }
}

std::vector<double> to_vector(const Eigen::MatrixXd& m, Eigen::Index row) {
    std::vector<double> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(row, j));
    return out;
}

double rel_dev(double exact, double approx) {
    if (exact == 0.0 && approx == 0.0) return 0.0;
    return std::abs(exact - approx) / std::abs(exact);
}

} // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("cannot serialize non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Keep floats recognisable as floats after a round trip.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string dump_json(const ordered_json& doc) {
    std::ostringstream out;
    emit(out, doc, 0);
    out << "\n";
    return out.str();
}

ordered_json model_to_json(const RationalModel& model) {
    ordered_json j;
    std::vector<double> pr, pi, rr, ri;
    for (std::size_t k = 0; k < model.poles.size(); ++k) {
        pr.push_back(model.poles[k].real());
        pi.push_back(model.poles[k].imag());
        rr.push_back(model.residues[k].real());
        ri.push_back(model.residues[k].imag());
    }
    j["poles_re"] = pr;
    j["poles_im"] = pi;
    j["residues_re"] = rr;
    j["residues_im"] = ri;
    j["d_ohm"] = model.const_term;
    j["slope_ohm_s"] = model.slope_term;
    return j;
}

RationalModel model_from_json(const nlohmann::json& doc) {
    const auto pr = doc.at("poles_re").get<std::vector<double>>();
    const auto pi = doc.at("poles_im").get<std::vector<double>>();
    const auto rr = doc.at("residues_re").get<std::vector<double>>();
    const auto ri = doc.at("residues_im").get<std::vector<double>>();
    if (pr.size() != pi.size() || pr.size() != rr.size() || pr.size() != ri.size()) {
        throw std::invalid_argument("model JSON arrays differ in length");
    }
    RationalModel m;
    for (std::size_t k = 0; k < pr.size(); ++k) {
        m.poles.emplace_back(pr[k], pi[k]);
        m.residues.emplace_back(rr[k], ri[k]);
    }
    m.const_term = doc.at("d_ohm").get<double>();
    m.slope_term = doc.at("slope_ohm_s").get<double>();
    m.validate();
    return m;
}

ordered_json modes_to_json(std::span<const RLCMode> modes) {
    ordered_json arr = ordered_json::array();
    for (const auto& m : modes) {
        ordered_json j;
        j["omega_rad_s"] = m.omega;
        j["q"] = m.q_factor;
        j["r_ohm"] = m.r;
        j["l_h"] = m.l;
        j["c_f"] = m.c;
        arr.push_back(j);
    }
    return arr;
}

std::vector<RLCMode> modes_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw std::invalid_argument("modes JSON must be an array");
    std::vector<RLCMode> modes;
    for (const auto& j : doc) {
        RLCMode m;
        m.omega = j.at("omega_rad_s").get<double>();
        m.q_factor = j.at("q").get<double>();
        m.r = j.at("r_ohm").get<double>();
        m.l = j.at("l_h").get<double>();
        m.c = j.at("c_f").get<double>();
        m.validate();
        modes.push_back(m);
    }
    return modes;
}

ordered_json dispersive_to_json(const DispersiveModel& model) {
    ordered_json j;
    std::vector<double> freqs, alpha, phi;
    for (const auto& m : model.modes) {
        freqs.push_back(m.freq_hz() * 1e-9);
        phi.push_back(m.phi_zpf);
    }
    for (double a : model.alpha_hz) alpha.push_back(a * 1e-6);
    ordered_json chi = ordered_json::array();
    for (Eigen::Index i = 0; i < model.chi_hz.rows(); ++i) {
        auto row = to_vector(model.chi_hz, i);
        for (auto& v : row) v *= 1e-6;
        chi.push_back(row);
    }
    std::vector<double> transitions;
    for (double t : model.transition_hz) transitions.push_back(t * 1e-9);
    j["freqs_ghz"] = freqs;
    j["alpha_mhz"] = alpha;
    j["chi_mhz"] = chi;
    j["phi_zpf"] = phi;
    j["ej_ghz"] = model.e_j / kPlanck * 1e-9;
    j["transition_ghz"] = transitions;
    return j;
}

ordered_json dispersive_report_json(const DispersiveModel& perturbative, const DispersiveModel& exact,
                                    std::span<const int> truncations) {
    ordered_json j;
    j["perturbative"] = dispersive_to_json(perturbative);
    j["exact"] = dispersive_to_json(exact);
    ordered_json dev;
    std::vector<double> alpha;
    for (std::size_t i = 0; i < exact.alpha_hz.size(); ++i) alpha.push_back(rel_dev(exact.alpha_hz[i], perturbative.alpha_hz[i]));
    ordered_json chi = ordered_json::array();
    for (Eigen::Index i = 0; i < exact.chi_hz.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index k = 0; k < exact.chi_hz.cols(); ++k) row.push_back(rel_dev(exact.chi_hz(i, k), perturbative.chi_hz(i, k)));
        chi.push_back(row);
    }
    dev["alpha"] = alpha;
    dev["chi"] = chi;
    j["relative_deviation"] = dev;
    j["truncations"] = std::vector<int>(truncations.begin(), truncations.end());
    return j;
}

ordered_json fit_report_to_json(const FitReport& report) {
    ordered_json j;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["rms_error_ohm"] = report.rms_error;
    j["max_rel_error"] = report.max_rel_error;
    j["rms_history_ohm"] = report.rms_history;
    std::vector<double> moves;
    // The first relocation has no finite predecessor when the pole structure changes.
    for (double m : report.pole_moves) moves.push_back(std::isfinite(m) ? m : -1.0);
    j["pole_moves"] = moves;
    return j;
}

std::string iv_csv(const IVCurve& up, const IVCurve& down) {
    std::ostringstream out;
    out << "branch,i_amp,v_volt\n";
    for (const auto* curve : {&up, &down}) {
        const char* name = curve->branch == Branch::SweepUp ? "up" : "down";
        for (const auto& p : curve->points) out << name << ',' << format_double(p.i_drive) << ',' << format_double(p.v_avg) << '\n';
    }
    return out.str();
}

std::string impedance_compare_csv(std::span<const double> freqs_hz, std::span<const cplx> data, std::span<const cplx> fit) {
    std::ostringstream out;
    out << "freq_hz,abs_z_data_ohm,abs_z_fit_ohm\n";
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        out << format_double(freqs_hz[i]) << ',' << format_double(std::abs(data[i])) << ',' << format_double(std::abs(fit[i]))
            << '\n';
    }
    return out.str();
}

} // namespace bbq
