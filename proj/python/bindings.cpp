#include "relhydro/cli_io.hpp"
#include "relhydro/exact_riemann.hpp"
#include "relhydro/flux.hpp"
#include "relhydro/reconstruction.hpp"
#include "relhydro/setup.hpp"
#include "relhydro/state.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace py = pybind11;
using namespace relhydro;

namespace {

std::vector<double> to_list(const StateVector& u, const Eos& eos) { return {u.begin(), u.begin() + eos.nvar()}; }

StateVector from_list(const std::vector<double>& v, const Eos& eos) {
  if (int(v.size()) != eos.nvar())
    throw std::invalid_argument("expected " + std::to_string(eos.nvar()) + " conserved components, got " +
                                std::to_string(v.size()));
  StateVector u{};
  std::copy(v.begin(), v.end(), u.begin());
  return u;
}

} // namespace

PYBIND11_MODULE(_relhydro, m) {
  m.doc() = "Special-relativistic hydrodynamics: exact Riemann solver, Marquina/HLLE fluxes, CENO "
            "reconstruction and corrugated-interface runs";

  py::register_exception<PhysicsError>(m, "PhysicsError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<System>(m, "System")
      .value("ULTRA_RELATIVISTIC", System::UltraRelativistic)
      .value("PERFECT_GAS", System::PerfectGas);
  py::enum_<Axis>(m, "Axis").value("X", Axis::X).value("Y", Axis::Y).value("Z", Axis::Z);
  py::enum_<WavePattern>(m, "WavePattern")
      .value("SS", WavePattern::SS)
      .value("RR", WavePattern::RR)
      .value("SR", WavePattern::SR)
      .value("RS", WavePattern::RS);
  py::enum_<WaveKind>(m, "WaveKind").value("SHOCK", WaveKind::Shock).value("RAREFACTION", WaveKind::Rarefaction);

  py::class_<Eos>(m, "Eos")
      .def_static("ultra_relativistic", &Eos::ultra_relativistic, py::arg("cs2") = 1.0 / 3.0)
      .def_static("perfect_gas", &Eos::perfect_gas, py::arg("gamma") = 4.0 / 3.0)
      .def_readonly("system", &Eos::system)
      .def_readonly("cs2", &Eos::cs2)
      .def_readonly("gamma", &Eos::gamma)
      .def_property_readonly("nvar", &Eos::nvar)
      .def(py::self == py::self);

  py::class_<Primitive>(m, "Primitive")
      .def_readonly("rho", &Primitive::rho)
      .def_readonly("n", &Primitive::n)
      .def_readonly("eps", &Primitive::eps)
      .def_readonly("p", &Primitive::p)
      .def_readonly("v", &Primitive::v)
      .def("__repr__", [](const Primitive& w) {
        std::ostringstream os;
        os << "Primitive(rho=" << w.rho << ", n=" << w.n << ", eps=" << w.eps << ", p=" << w.p << ", v=(" << w.v[0]
           << ", " << w.v[1] << ", " << w.v[2] << "))";
        return os.str();
      });

  m.def("make_ultra", &make_ultra, py::arg("rho"), py::arg("v"), py::arg("eos"));
  m.def("make_gas", &make_gas, py::arg("n"), py::arg("eps"), py::arg("v"), py::arg("eos"));
  m.def("sound_speed", &sound_speed, py::arg("prim"), py::arg("eos"));
  m.def(
      "primitive_to_conserved",
      [](const Primitive& w, const Eos& eos) { return to_list(primitive_to_conserved(w, eos), eos); },
      py::arg("prim"), py::arg("eos"));
  m.def(
      "recover_primitive",
      [](const std::vector<double>& u, const Eos& eos) { return recover_primitive(from_list(u, eos), eos); },
      py::arg("u"), py::arg("eos"));
  m.def(
      "physical_flux",
      [](const Primitive& w, const Eos& eos, Axis dir) { return to_list(physical_flux(w, eos, dir), eos); },
      py::arg("prim"), py::arg("eos"), py::arg("axis") = Axis::X);

  m.def(
      "eigenvalues",
      [](const Primitive& w, const Eos& eos, Axis dir) {
        const Eigenvalues e = eigenvalues(w, eos, dir);
        return py::make_tuple(e.lambda_minus, e.lambda0, e.lambda_plus);
      },
      py::arg("prim"), py::arg("eos"), py::arg("axis") = Axis::X,
      "(lambda_-, lambda_0, lambda_+) of the flux Jacobian along `axis`");
  m.def(
      "characteristic_projection",
      [](const Primitive& w, const Eos& eos, Axis dir) {
        const CharacteristicDecomposition d = characteristic_projection(w, primitive_to_conserved(w, eos), eos, dir);
        py::dict out;
        out["minus"] = to_list(d.minus, eos);
        out["degenerate"] = to_list(d.degenerate, eos);
        out["plus"] = to_list(d.plus, eos);
        return out;
      },
      py::arg("prim"), py::arg("eos"), py::arg("axis") = Axis::X);
  m.def(
      "marquina_flux",
      [](const std::vector<double>& ul, const std::vector<double>& ur, const Eos& eos, Axis dir) {
        return to_list(marquina_flux(from_list(ul, eos), from_list(ur, eos), eos, dir), eos);
      },
      py::arg("ul"), py::arg("ur"), py::arg("eos"), py::arg("axis") = Axis::X);
  m.def(
      "hlle_flux",
      [](const std::vector<double>& ul, const std::vector<double>& ur, const Eos& eos, Axis dir) {
        return to_list(hlle_flux(from_list(ul, eos), from_list(ur, eos), eos, dir), eos);
      },
      py::arg("ul"), py::arg("ur"), py::arg("eos"), py::arg("axis") = Axis::X);

  m.def(
      "ceno_faces",
      [](const std::array<double, 5>& u, const std::optional<std::array<double, 5>>& widths) {
        const FacePair f = widths ? ceno_faces(u, *widths) : ceno_faces(u);
        return py::make_tuple(f.right_of_minus_face, f.left_of_plus_face);
      },
      py::arg("u"), py::arg("widths") = py::none(),
      "Face values (u^R at i-1/2, u^L at i+1/2) of the middle zone of a five-zone stencil");

  py::class_<RiemannProblem>(m, "RiemannProblem")
      .def(py::init([](const Primitive& l, const Primitive& r, const Eos& eos) {
             return RiemannProblem{eos, l, r, std::nullopt};
           }),
           py::arg("left"), py::arg("right"), py::arg("eos"))
      .def_readonly("eos", &RiemannProblem::eos)
      .def_readonly("left", &RiemannProblem::left)
      .def_readonly("right", &RiemannProblem::right)
      .def_readonly("label", &RiemannProblem::label);
  m.def("table1_problem", &table1_problem, py::arg("label"));
  m.def("figure_times", &figure_times, py::arg("label"));
  m.def("without_tangential_velocity", &without_tangential_velocity, py::arg("problem"));

  py::class_<ExactSolution>(m, "ExactSolution")
      .def_readonly("left_star", &ExactSolution::left_star)
      .def_readonly("right_star", &ExactSolution::right_star)
      .def_readonly("p_star", &ExactSolution::p_star)
      .def_readonly("vx_star", &ExactSolution::vx_star)
      .def_readonly("pattern", &ExactSolution::pattern)
      .def_readonly("left_wave", &ExactSolution::left_wave)
      .def_readonly("right_wave", &ExactSolution::right_wave)
      .def_readonly("left_head", &ExactSolution::left_head)
      .def_readonly("left_tail", &ExactSolution::left_tail)
      .def_readonly("contact", &ExactSolution::contact)
      .def_readonly("right_tail", &ExactSolution::right_tail)
      .def_readonly("right_head", &ExactSolution::right_head)
      .def("sample", [](const ExactSolution& s, double xi) { return sample(s, xi); }, py::arg("xi"));
  m.def("solve_star_state", &solve_star_state, py::arg("left"), py::arg("right"), py::arg("eos"));
  m.def("classify_pattern", &classify_pattern, py::arg("left"), py::arg("right"), py::arg("eos"));
  m.def("exact_csv", &exact_csv, py::arg("problem"), py::arg("t"), py::arg("points"), py::arg("x_min") = -1.5,
        py::arg("x_max") = 1.5);

  m.def(
      "run",
      [](const std::string& config_text, const std::map<std::string, std::string>& overrides) {
        const RunConfig cfg = parse_config(config_text, overrides);
        std::ostringstream log;
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run(cfg, log);
        }
        py::list norms;
        for (const NormTriple& n : res.norms) norms.append(py::make_tuple(n.t, n.l1, n.l2, n.linf));
        py::dict out;
        out["steps"] = res.evolve.steps;
        out["time"] = res.final_grid.time;
        out["norms"] = norms;
        out["output_dir"] = res.output_dir;
        out["files"] = res.files;
        out["wall_seconds"] = res.wall_seconds;
        out["log"] = log.str();
        return out;
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Run a configuration given as INI text; returns steps, final time, the norm series (t, l1, l2, linf), "
      "written files and the progress log");
  m.def(
      "format_config", [](const std::string& text) { return format_config(parse_config(text)); }, py::arg("config"),
      "Fully resolved form of an INI configuration");
  m.def("read_norms_csv", &read_norms_csv, py::arg("path"));
  py::class_<NormTriple>(m, "NormTriple")
      .def_readonly("t", &NormTriple::t)
      .def_readonly("l1", &NormTriple::l1)
      .def_readonly("l2", &NormTriple::l2)
      .def_readonly("linf", &NormTriple::linf);
}
