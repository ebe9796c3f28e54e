#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "antago/scenario_io.hpp"
#include "antago/stepper_command.hpp"
#include "antago/verification.hpp"

namespace py = pybind11;
using namespace antago;

namespace {

py::dict trajectory_arrays(const std::vector<TrajectorySample>& samples)
{
    static const std::vector<double TrajectorySample::*> fields{
        &TrajectorySample::t,     &TrajectorySample::x,       &TrajectorySample::xdot,   &TrajectorySample::p,
        &TrajectorySample::P1,    &TrajectorySample::P2,      &TrajectorySample::U1,     &TrajectorySample::U2,
        &TrajectorySample::F_hat, &TrajectorySample::F_tilde, &TrajectorySample::F_true, &TrajectorySample::zeta,
        &TrajectorySample::sigma, &TrajectorySample::H,       &TrajectorySample::H_d,    &TrajectorySample::Psi,
        &TrajectorySample::x_star};
    const auto& names = trajectory_columns();
    py::dict out;
    for (std::size_t c = 0; c < fields.size(); ++c) {
        py::array_t<double> column(static_cast<py::ssize_t>(samples.size()));
        auto view = column.mutable_unchecked<1>();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            view(static_cast<py::ssize_t>(i)) = samples[i].*fields[c];
        }
        out[py::str(names[c])] = column;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Antagonistic bellow actuator pair: plant, controller, observer and simulation";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ScenarioParseError>(m, "ScenarioParseError", PyExc_ValueError);

    py::class_<ActuatorGeometry>(m, "ActuatorGeometry")
        .def(py::init<>())
        .def_readwrite("L0", &ActuatorGeometry::L0)
        .def_readwrite("n_L", &ActuatorGeometry::n_L)
        .def_readwrite("D_s", &ActuatorGeometry::D_s)
        .def_readwrite("d_c", &ActuatorGeometry::d_c)
        .def_readwrite("k0", &ActuatorGeometry::k0)
        .def_readwrite("K0", &ActuatorGeometry::K0)
        .def_readwrite("V0", &ActuatorGeometry::V0)
        .def_readwrite("x0", &ActuatorGeometry::x0)
        .def_readwrite("x_M", &ActuatorGeometry::x_M)
        .def_readwrite("domain_margin", &ActuatorGeometry::domain_margin)
        .def("shape_factor", &ActuatorGeometry::shape_factor)
        .def("lower_bound", &ActuatorGeometry::lower_bound)
        .def("upper_bound", &ActuatorGeometry::upper_bound)
        .def("admits", &ActuatorGeometry::admits, py::arg("x"))
        .def("validate", &ActuatorGeometry::validate);

    py::class_<FluidParams>(m, "FluidParams")
        .def(py::init<>())
        .def_readwrite("Gamma0", &FluidParams::Gamma0)
        .def_readwrite("rho", &FluidParams::rho)
        .def_readwrite("P_atm", &FluidParams::P_atm);

    py::class_<PlantParams>(m, "PlantParams")
        .def(py::init<>())
        .def_static("reference", &PlantParams::reference)
        .def_readwrite("geometry", &PlantParams::geometry)
        .def_readwrite("fluid", &PlantParams::fluid)
        .def_readwrite("m", &PlantParams::m)
        .def_readwrite("R", &PlantParams::R)
        .def("validate", &PlantParams::validate);

    py::class_<PlantState>(m, "PlantState")
        .def(py::init<double, double, double, double>(), py::arg("x") = 0.0, py::arg("p") = 0.0,
             py::arg("P1") = 0.0, py::arg("P2") = 0.0)
        .def_readwrite("x", &PlantState::x)
        .def_readwrite("p", &PlantState::p)
        .def_readwrite("P1", &PlantState::P1)
        .def_readwrite("P2", &PlantState::P2)
        .def("__repr__", [](const PlantState& s) {
            return "PlantState(x=" + format_double(s.x) + ", p=" + format_double(s.p) +
                   ", P1=" + format_double(s.P1) + ", P2=" + format_double(s.P2) + ")";
        });

    py::class_<PlantRates>(m, "PlantRates")
        .def_readonly("x_dot", &PlantRates::x_dot)
        .def_readonly("p_dot", &PlantRates::p_dot)
        .def_readonly("P1_dot", &PlantRates::P1_dot)
        .def_readonly("P2_dot", &PlantRates::P2_dot);

    py::class_<HamiltonianGradient>(m, "HamiltonianGradient")
        .def_readonly("d_x", &HamiltonianGradient::d_x)
        .def_readonly("d_p", &HamiltonianGradient::d_p)
        .def_readonly("d_P1", &HamiltonianGradient::d_P1)
        .def_readonly("d_P2", &HamiltonianGradient::d_P2);

    m.def("volumes", [](double x, const ActuatorGeometry& g) {
        const auto v = volumes(x, g);
        return py::make_tuple(v.V1, v.V2);
    }, py::arg("x"), py::arg("geometry"));
    m.def("volume_gradients", [](double x, const ActuatorGeometry& g) {
        const auto a = volume_gradients(x, g);
        return py::make_tuple(a.A1, a.A2);
    }, py::arg("x"), py::arg("geometry"));
    m.def("volume_curvatures", [](double x, const ActuatorGeometry& g) {
        const auto c = volume_curvatures(x, g);
        return py::make_tuple(c.dA1, c.dA2);
    }, py::arg("x"), py::arg("geometry"));
    m.def("total_mass", &total_mass, py::arg("x"), py::arg("params"));
    m.def("hamiltonian", &hamiltonian, py::arg("state"), py::arg("params"));
    m.def("hamiltonian_gradient", &hamiltonian_gradient, py::arg("state"), py::arg("params"));
    m.def("open_loop_field", &open_loop_field, py::arg("state"), py::arg("U1"), py::arg("U2"), py::arg("F"),
          py::arg("params"));

    py::class_<ObserverState>(m, "ObserverState")
        .def(py::init<double, double>(), py::arg("F_hat") = 0.0, py::arg("alpha") = 1.0)
        .def_readwrite("F_hat", &ObserverState::F_hat)
        .def_readwrite("alpha", &ObserverState::alpha);
    m.def("observer_rate", &observer_rate, py::arg("state"), py::arg("observer"), py::arg("params"));
    m.def("force_estimate", [](const ObserverState& obs, double p) { return force_estimate(obs, p).F_tilde; },
          py::arg("observer"), py::arg("p"));

    py::class_<ControllerGains>(m, "ControllerGains")
        .def(py::init<double, double, double, double>(), py::arg("k_p") = 1.0, py::arg("k_m") = 1.0,
             py::arg("k_i") = 1.0, py::arg("alpha") = 1.0)
        .def_readwrite("k_p", &ControllerGains::k_p)
        .def_readwrite("k_m", &ControllerGains::k_m)
        .def_readwrite("k_i", &ControllerGains::k_i)
        .def_readwrite("alpha", &ControllerGains::alpha);

    m.def("control_flows", [](const PlantState& s, const ObserverState& obs, const ControllerGains& g, double x_star,
                              const PlantParams& p) {
        const auto u = control_flows(s, obs, g, Setpoint{x_star}, p);
        return py::make_tuple(u.U1, u.U2);
    }, py::arg("state"), py::arg("observer"), py::arg("gains"), py::arg("x_star"), py::arg("params"));
    m.def("closed_loop_field", [](const PlantState& s, const ObserverState& obs, double F, const ControllerGains& g,
                                  double x_star, const PlantParams& p) {
        return closed_loop_field(s, obs, F, g, Setpoint{x_star}, p);
    }, py::arg("state"), py::arg("observer"), py::arg("F"), py::arg("gains"), py::arg("x_star"), py::arg("params"));
    m.def("sigma", [](const PlantState& s, double F_hat, const ControllerGains& g, double x_star,
                      const ActuatorGeometry& geo) {
        const auto t = sigma(s, F_hat, g, Setpoint{x_star}, geo);
        return py::dict(py::arg("value") = t.value, py::arg("d_x") = t.d_x, py::arg("d_P1") = t.d_P1,
                        py::arg("d_P2") = t.d_P2);
    }, py::arg("state"), py::arg("F_hat"), py::arg("gains"), py::arg("x_star"), py::arg("geometry"));
    m.def("lyapunov_function", [](const PlantState& s, const ObserverState& obs, double F, const ControllerGains& g,
                                  double x_star, const PlantParams& p) {
        return desired_energy(s, obs, F, g, Setpoint{x_star}, p).Psi;
    }, py::arg("state"), py::arg("observer"), py::arg("F"), py::arg("gains"), py::arg("x_star"), py::arg("params"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("theta", &StabilityReport::theta)
        .def_readonly("M_eval", &StabilityReport::M_eval)
        .def_readonly("epsilon", &StabilityReport::epsilon)
        .def_readonly("condition_product", &StabilityReport::condition_product)
        .def_readonly("required_product", &StabilityReport::required_product)
        .def_readonly("positive_definite", &StabilityReport::positive_definite)
        .def_readonly("consistent", &StabilityReport::consistent)
        .def_readonly("margin", &StabilityReport::margin)
        .def_readonly("alpha_bound", &StabilityReport::alpha_bound)
        .def_readonly("alpha_below_bound", &StabilityReport::alpha_below_bound)
        .def_readonly("km_window_exists", &StabilityReport::km_window_exists)
        .def_readonly("km_window_low", &StabilityReport::km_window_low)
        .def_readonly("km_window_high", &StabilityReport::km_window_high)
        .def_property_readonly("valid", &StabilityReport::valid);
    m.def("validate_gains",
          py::overload_cast<const PlantParams&, const ControllerGains&, double, double>(&validate_gains),
          py::arg("params"), py::arg("gains"), py::arg("M_eval"), py::arg("epsilon") = 0.0);

    py::class_<StepperParams>(m, "StepperParams")
        .def(py::init<>())
        .def_static("from_bore", &StepperParams::from_bore, py::arg("inner_diameter"), py::arg("rate_hz"),
                    py::arg("k_U") = 0.0)
        .def_readwrite("S", &StepperParams::S)
        .def_readwrite("delta_t", &StepperParams::delta_t)
        .def_readwrite("T_f", &StepperParams::T_f)
        .def_readwrite("k_U", &StepperParams::k_U);
    m.def("min_jerk_position", &min_jerk_position, py::arg("t"), py::arg("T_f"), py::arg("x_s0"),
          py::arg("x_s_star"));
    m.def("stepper_target", &stepper_target, py::arg("U"), py::arg("stepper"), py::arg("x_s0"), py::arg("t"));
    m.def("stepper_target_sampled", &stepper_target_sampled, py::arg("U"), py::arg("stepper"), py::arg("x_s0"));

    py::class_<ScenarioConfig>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("params", &ScenarioConfig::params)
        .def_readwrite("gains", &ScenarioConfig::gains)
        .def_readwrite("duration", &ScenarioConfig::duration)
        .def_readwrite("epsilon", &ScenarioConfig::epsilon)
        .def("__getitem__", [](const ScenarioConfig& s, const std::string& k) { return get_scenario_value(s, k); })
        .def("__setitem__", [](ScenarioConfig& s, const std::string& k, double v) { set_scenario_value(s, k, v); })
        .def("validate", &ScenarioConfig::validate)
        .def("serialize", &serialize_scenario)
        .def_static("parse", &parse_scenario, py::arg("text"))
        .def_static("load", &load_scenario, py::arg("path"))
        .def_static("preset", [](const std::string& name) { return load_scenario(resolve_scenario_path(name)); },
                    py::arg("name"));
    m.def("scalar_keys", &scenario_scalar_keys);
    m.def("presets", [] {
        py::list out;
        for (const auto& p : list_presets()) out.append(py::make_tuple(p.name, p.description));
        return out;
    });

    m.def("simulate", [](const ScenarioConfig& sc) {
        TrajectoryRecord rec;
        {
            py::gil_scoped_release release;
            rec = simulate(sc);
        }
        const DiagnosticsSummary d = diagnostics(rec, sc.gains, sc.params);
        py::dict summary;
        for (const auto& [key, value] : diagnostics_fields(d, rec)) summary[py::str(key)] = value;
        py::dict out;
        out["status"] = to_string(rec.status);
        out["message"] = rec.message;
        out["trajectory"] = trajectory_arrays(rec.samples);
        out["diagnostics"] = summary;
        return out;
    }, py::arg("scenario"), "Runs a scenario; returns status, trajectory columns and diagnostics.");

    m.def("verify", [](const std::string& suite, std::uint64_t seed) {
        const VerificationReport r = run_verification(suite, seed);
        py::list checks;
        for (const auto& c : r.checks) {
            checks.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value, py::arg("bound") = c.bound,
                                   py::arg("passed") = c.passed, py::arg("detail") = c.detail));
        }
        return py::dict(py::arg("suite") = r.suite, py::arg("passed") = r.passed(), py::arg("checks") = checks,
                        py::arg("notes") = r.notes);
    }, py::arg("suite"), py::arg("seed") = 1);
}
