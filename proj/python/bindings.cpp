#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chargetune/band_bending.hpp"
#include "chargetune/charge_cycle.hpp"
#include "chargetune/charge_state.hpp"
#include "chargetune/cli.hpp"
#include "chargetune/errors.hpp"
#include "chargetune/fitting.hpp"
#include "chargetune/photocatalysis.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace chargetune;

namespace {

py::dict fit_dict(const FitResult& r) {
  py::dict params;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    params[py::str(r.names[i])] = py::make_tuple(r.values[i], r.std_errors[i]);
  }
  return py::dict("parameters"_a = params, "derived"_a = r.derived, "flags"_a = flag_names(r.flags),
                  "ok"_a = r.ok(), "iterations"_a = r.iterations);
}

}  // namespace

PYBIND11_MODULE(_chargetune, m) {
  m.doc() = "Photo-induced surface chemistry and emitter charge-state modelling";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DegenerateSystemError>(m, "DegenerateSystemError", PyExc_ArithmeticError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("photon_energy_from_wavelength_nm", &photon_energy_from_wavelength_nm, "wavelength_nm"_a);
  m.def("photon_flux_from_power", &photon_flux_from_power, "power_W"_a, "photon_energy_eV"_a);
  m.def(
      "cumulative_on_time",
      [](double on_s, double off_s, double t) { return cumulative_on_time(IlluminationSchedule::gated(on_s, off_s), t); },
      "on_s"_a, "off_s"_a, "wall_clock_t_s"_a, "Park time under a repeating on/off schedule.");

  py::class_<NVCycleParams>(m, "NVCycleParams")
      .def(py::init<>())
      .def(py::init([](double k1, double k2, double k3, double k4, double gamma0, double gamma1, double total_nv) {
             return NVCycleParams{k1, k2, k3, k4, gamma0, gamma1, total_nv};
           }),
           "k1"_a = 1.0, "k2"_a = 1.0, "k3"_a = 1.0, "k4"_a = 1.0, "gamma0"_a = 1.0, "gamma1"_a = 1.0,
           "total_nv"_a = 1.0)
      .def_readwrite("k1", &NVCycleParams::k1)
      .def_readwrite("k2", &NVCycleParams::k2)
      .def_readwrite("k3", &NVCycleParams::k3)
      .def_readwrite("k4", &NVCycleParams::k4)
      .def_readwrite("gamma0", &NVCycleParams::gamma0)
      .def_readwrite("gamma1", &NVCycleParams::gamma1)
      .def_readwrite("total_nv", &NVCycleParams::total_nv);

  m.def(
      "nv_steady_state", [](const NVCycleParams& p, double I) { return nv_steady_state(p, I).as_array(); }, "params"_a,
      "intensity"_a, "(NV-, NV-*, NV0, NV0*) populations.");
  m.def("generation_rate", &generation_rate, "params"_a, "intensity"_a);
  m.def("saturated_alpha0", &saturated_alpha0, "params"_a);

  py::class_<SurfaceKineticsParams>(m, "SurfaceKineticsParams")
      .def(py::init([](double k5, double k6, double k7, double k8) { return SurfaceKineticsParams{k5, k6, k7, k8}; }),
           "k5"_a = 1.0, "k6"_a = 1e-4, "k7"_a = 10.0, "k8"_a = 1e5)
      .def_readwrite("k5", &SurfaceKineticsParams::k5)
      .def_readwrite("k6", &SurfaceKineticsParams::k6)
      .def_readwrite("k7", &SurfaceKineticsParams::k7)
      .def_readwrite("k8", &SurfaceKineticsParams::k8);

  m.def("hole_steady_state", &hole_steady_state, "params"_a, "bicarbonate"_a, "source_rate"_a);
  m.def("rate_constant", &rate_constant, "params"_a, "bicarbonate"_a, "source_rate"_a);
  m.def("local_source_exponent", &local_source_exponent, "params"_a, "bicarbonate"_a, "source_rate"_a);

  m.def(
      "population",
      [](double offset_eV, double kelvin) { return population(offset_eV, Temperature(kelvin)); }, "offset_eV"_a,
      "kelvin"_a = constants::room_temperature_K);
  m.def(
      "pl_trace",
      [](const std::vector<double>& t, double A, double B, double k, double D) {
        std::vector<double> out;
        out.reserve(t.size());
        const TraceModelParams p{A, B, k, D, 0.0};
        for (double x : t) out.push_back(pl_trace(x, p));
        return out;
      },
      "t_park_s"_a, "A"_a, "B"_a, "k"_a, "D"_a);

  m.def(
      "depletion_depth", [](double e_bb_eV) { return depletion_depth(MaterialParams{}, e_bb_eV); }, "e_bb_eV"_a,
      "Flat-surface depletion depth in m for the default diamond.");
  m.def(
      "surface_band_bending",
      [](double hydrogen_fraction) {
        SurfaceState s;
        s.hydrogen_fraction = hydrogen_fraction;
        return surface_band_bending(MaterialParams{}, s).e_bb_eV;
      },
      "hydrogen_fraction"_a = 1.0);

  m.def(
      "fit_trace",
      [](const std::vector<double>& t, const std::vector<double>& counts) {
        return fit_dict(fit_trace(PLTrace{t, counts, {}}));
      },
      "t_park_s"_a, "counts_per_s"_a);
  m.def(
      "fit_power_law",
      [](const std::vector<double>& flux, const std::vector<double>& k) {
        if (flux.size() != k.size()) throw DomainError("flux and k differ in length");
        std::vector<ScalingPoint> pts;
        for (std::size_t i = 0; i < flux.size(); ++i) pts.push_back({flux[i], k[i]});
        return fit_dict(fit_power_law(pts));
      },
      "flux"_a, "k"_a);
  m.def(
      "fit_line",
      [](const std::vector<double>& x, const std::vector<double>& y, double lo, double hi, const std::string& profile) {
        const auto prof = profile == "gaussian" ? LineProfile::Gaussian : LineProfile::Lorentzian;
        return fit_dict(fit_line(Spectrum{x, y}, {lo, hi}, prof));
      },
      "wavelength_nm"_a, "counts"_a, "lo_nm"_a, "hi_nm"_a, "profile"_a = "lorentzian");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
