#include "bbq/errors.hpp"
#include "bbq/network.hpp"
#include "bbq/pipeline.hpp"
#include "bbq/quantize.hpp"
#include "bbq/ratfit.hpp"
#include "bbq/rcsj.hpp"
#include "bbq/serialize.hpp"
#include "bbq/synthesis.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace bbq;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Black-box quantization of one-port impedance data and RCSJ junction simulation";

    py::register_exception<Error>(m, "BbqError", PyExc_RuntimeError);

    m.attr("PLANCK") = kPlanck;
    m.attr("HBAR") = kHbar;
    m.attr("ELEMENTARY_CHARGE") = kElementaryCharge;
    m.attr("FLUX_QUANTUM") = kFluxQuantum;

    // network
    py::enum_<ResponseKind>(m, "ResponseKind")
        .value("Scattering", ResponseKind::Scattering)
        .value("Impedance", ResponseKind::Impedance);
    py::enum_<ResponseFormat>(m, "ResponseFormat")
        .value("TouchstoneSubset", ResponseFormat::TouchstoneSubset)
        .value("Csv", ResponseFormat::Csv);

    py::class_<FrequencyResponse>(m, "FrequencyResponse")
        .def(py::init<>())
        .def(py::init([](std::vector<double> f, std::vector<cplx> v, ResponseKind kind, double ref) {
                 FrequencyResponse r{std::move(f), std::move(v), kind, ref};
                 r.validate();
                 return r;
             }),
             "freq_hz"_a, "values"_a, "kind"_a, "ref_impedance"_a = 50.0)
        .def_readwrite("freq_hz", &FrequencyResponse::freq_hz)
        .def_readwrite("values", &FrequencyResponse::values)
        .def_readwrite("kind", &FrequencyResponse::kind)
        .def_readwrite("ref_impedance", &FrequencyResponse::ref_impedance)
        .def("__len__", &FrequencyResponse::size);

    m.def(
        "parse_response",
        [](const std::string& text, ResponseFormat format, std::optional<double> ref, ResponseKind csv_kind) {
            return parse_response(text, ParseOptions{format, ref, csv_kind});
        },
        "source"_a, "format"_a = ResponseFormat::TouchstoneSubset, "ref_impedance"_a = py::none(),
        "csv_kind"_a = ResponseKind::Impedance);
    m.def("s_to_z", &s_to_z, "resp"_a);
    m.def("z_to_s", &z_to_s, "resp"_a);

    // ratfit
    py::class_<RationalModel>(m, "RationalModel")
        .def(py::init<>())
        .def_readwrite("poles", &RationalModel::poles)
        .def_readwrite("residues", &RationalModel::residues)
        .def_readwrite("const_term", &RationalModel::const_term)
        .def_readwrite("slope_term", &RationalModel::slope_term)
        .def("is_stable", &RationalModel::is_stable)
        .def("to_json", [](const RationalModel& model) { return dump_json(model_to_json(model)); });

    py::enum_<FitWeighting>(m, "FitWeighting")
        .value("Uniform", FitWeighting::Uniform)
        .value("InverseMagnitude", FitWeighting::InverseMagnitude);

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("max_iters", &FitOptions::max_iters)
        .def_readwrite("pole_move_tol", &FitOptions::pole_move_tol)
        .def_readwrite("include_const", &FitOptions::include_const)
        .def_readwrite("include_slope", &FitOptions::include_slope)
        .def_readwrite("weighting", &FitOptions::weighting);

    py::class_<FitReport>(m, "FitReport")
        .def_readonly("iterations", &FitReport::iterations)
        .def_readonly("rms_error", &FitReport::rms_error)
        .def_readonly("max_rel_error", &FitReport::max_rel_error)
        .def_readonly("converged", &FitReport::converged)
        .def_readonly("rms_history", &FitReport::rms_history);

    m.def(
        "fit",
        [](const FrequencyResponse& data, int n_pole_pairs, const FitOptions& options) {
            auto r = fit(data, n_pole_pairs, options);
            return py::make_tuple(r.model, r.report);
        },
        "data"_a, "n_pole_pairs"_a, "options"_a = FitOptions{});
    m.def(
        "evaluate_model",
        [](const RationalModel& model, const std::vector<double>& freqs) { return evaluate_model(model, freqs); },
        "model"_a, "freqs_hz"_a);

    // synthesis
    py::class_<RLCMode>(m, "RLCMode")
        .def(py::init(&make_rlc_mode), "r"_a, "omega"_a, "q_factor"_a)
        .def_readonly("omega", &RLCMode::omega)
        .def_readonly("q_factor", &RLCMode::q_factor)
        .def_readonly("r", &RLCMode::r)
        .def_readonly("l", &RLCMode::l)
        .def_readonly("c", &RLCMode::c)
        .def_property_readonly("freq_hz", &RLCMode::freq_hz);

    m.def("synthesize_modes", &synthesize_modes, "model"_a);
    m.def(
        "mode_impedance", [](const RLCMode& mode, const std::vector<double>& freqs) { return mode_impedance(mode, freqs); },
        "mode"_a, "freqs_hz"_a);
    m.def(
        "model_from_modes", [](const std::vector<RLCMode>& modes) { return model_from_modes(modes); }, "modes"_a);

    // quantize
    py::class_<JunctionParams>(m, "JunctionParams")
        .def_static("direct", &JunctionParams::direct, "e_j"_a)
        .def_static("from_critical_current", &JunctionParams::from_critical_current, "i_c"_a)
        .def_static("from_ghz", &JunctionParams::from_ghz, "e_j_ghz"_a)
        .def_readonly("e_j", &JunctionParams::e_j);

    py::class_<QuantizedMode>(m, "QuantizedMode")
        .def(py::init(&make_quantized_mode), "omega"_a, "c"_a)
        .def_static("with_phi_zpf", &mode_with_phi_zpf, "omega"_a, "phi_zpf"_a)
        .def_readonly("omega", &QuantizedMode::omega)
        .def_readonly("c", &QuantizedMode::c)
        .def_readonly("phi_zpf", &QuantizedMode::phi_zpf);

    py::class_<DispersiveModel>(m, "DispersiveModel")
        .def_readonly("modes", &DispersiveModel::modes)
        .def_readonly("alpha_hz", &DispersiveModel::alpha_hz)
        .def_readonly("chi_hz", &DispersiveModel::chi_hz)
        .def_readonly("transition_hz", &DispersiveModel::transition_hz)
        .def_readonly("e_j", &DispersiveModel::e_j);

    py::class_<HamiltonianMatrix>(m, "HamiltonianMatrix")
        .def_readonly("entries", &HamiltonianMatrix::entries)
        .def_readonly("truncations", &HamiltonianMatrix::truncations)
        .def_property_readonly("dim", &HamiltonianMatrix::dim);

    m.def(
        "quantize_modes", [](const std::vector<RLCMode>& modes) { return quantize_modes(modes); }, "modes"_a);
    m.def(
        "kerr_perturbative",
        [](const std::vector<QuantizedMode>& modes, const JunctionParams& j) { return kerr_perturbative(modes, j); },
        "modes"_a, "junction"_a);
    m.def(
        "build_hamiltonian",
        [](const std::vector<QuantizedMode>& modes, const JunctionParams& j, const std::vector<int>& trunc,
           std::size_t cap) { return build_hamiltonian(modes, j, trunc, cap); },
        "modes"_a, "junction"_a, "truncations"_a, "dim_cap"_a = kDefaultDimensionCap);
    m.def(
        "kerr_exact",
        [](const HamiltonianMatrix& h, const std::vector<QuantizedMode>& modes) { return kerr_exact(h, modes); },
        "h"_a, "modes"_a);

    // rcsj
    py::class_<RcsjParams>(m, "RcsjParams")
        .def(py::init([](double i_c, double r_n, double c_j, double delta0, double smoothing) {
                 RcsjParams p{i_c, r_n, c_j, delta0, smoothing};
                 p.validate();
                 return p;
             }),
             "i_c"_a, "r_n"_a, "c_j"_a, "delta0"_a, "gap_smoothing"_a = 1e-3)
        .def_static("for_beta", &params_for_beta, "i_c"_a, "c_j"_a, "beta_c"_a, "delta0"_a)
        .def_readonly("i_c", &RcsjParams::i_c)
        .def_readonly("r_n", &RcsjParams::r_n)
        .def_readonly("c_j", &RcsjParams::c_j)
        .def_readonly("delta0", &RcsjParams::delta0)
        .def_property_readonly("beta_c", &RcsjParams::beta_c)
        .def_property_readonly("plasma_omega", &RcsjParams::plasma_omega)
        .def_property_readonly("gap_voltage", &RcsjParams::gap_voltage);

    py::class_<PhaseState>(m, "PhaseState")
        .def(py::init([](double phi, double dphi_dt, double time) { return PhaseState{phi, dphi_dt, time}; }),
             "phi"_a = 0.0, "dphi_dt"_a = 0.0, "time"_a = 0.0)
        .def_readonly("phi", &PhaseState::phi)
        .def_readonly("dphi_dt", &PhaseState::dphi_dt)
        .def_readonly("time", &PhaseState::time)
        .def_property_readonly("voltage", &PhaseState::voltage);

    m.def("junction_conductance", &junction_conductance, "v"_a, "params"_a);
    m.def(
        "integrate",
        [](const RcsjParams& p, const std::function<double(double)>& drive, const PhaseState& init, double t_end,
           double tol) { return integrate(p, drive, init, t_end, tol); },
        "params"_a, "drive"_a, "initial"_a, "t_end"_a, "tol"_a = 1e-8);
    m.def(
        "iv_sweep",
        [](const RcsjParams& p, double i_max, int n_points, int settle, int average, double tol) {
            SweepOptions opts;
            opts.settle_periods = settle;
            opts.average_periods = average;
            opts.tol = tol;
            const auto [up, down] = iv_sweep(p, i_max, n_points, opts);
            auto as_lists = [](const IVCurve& c) {
                std::vector<double> i, v;
                for (const auto& pt : c.points) {
                    i.push_back(pt.i_drive);
                    v.push_back(pt.v_avg);
                }
                return py::make_tuple(i, v);
            };
            return py::make_tuple(as_lists(up), as_lists(down));
        },
        "params"_a, "i_max"_a, "n_points"_a, "settle_periods"_a = 50, "average_periods"_a = 200, "tol"_a = 1e-8);
}
