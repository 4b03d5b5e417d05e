// Python bindings for the flexent planning library.

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flexent/commands.hpp"
#include "flexent/errors.hpp"
#include "flexent/hardware.hpp"
#include "flexent/scenario.hpp"
#include "flexent/spectrum.hpp"

namespace py = pybind11;
using namespace flexent;

namespace {

py::dict loss_row(const LossRow& row) {
    py::dict d;
    d["n_users"] = row.n_users;
    d["wss_loss_db"] = row.wss_loss_db;
    d["dwdm_best_db"] = row.dwdm_best_db;
    d["dwdm_worst_db"] = row.dwdm_worst_db;
    return d;
}

py::tuple run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = run_command(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_flexent, m) {
    m.doc() = "Flex-grid entanglement distribution planner";

    static py::exception<Error> error(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<ConstraintError>(m, "ConstraintError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());

    py::class_<WssModel>(m, "WssModel")
        .def(py::init<>())
        .def_readwrite("port_count", &WssModel::port_count)
        .def_readwrite("insertion_loss_db", &WssModel::insertion_loss_db)
        .def_readwrite("resolution_ghz", &WssModel::resolution_ghz)
        .def_readwrite("addressability_ghz", &WssModel::addressability_ghz)
        .def_readwrite("total_bandwidth_ghz", &WssModel::total_bandwidth_ghz);

    py::class_<DwdmModel>(m, "DwdmModel")
        .def(py::init<>())
        .def_readwrite("reflection_loss_db", &DwdmModel::reflection_loss_db)
        .def_readwrite("transmission_loss_db", &DwdmModel::transmission_loss_db);

    py::class_<BiphotonSpectrum>(m, "BiphotonSpectrum")
        .def(py::init<>())
        .def_readwrite("first_null_detuning_ghz", &BiphotonSpectrum::first_null_detuning_ghz)
        .def_readwrite("stopband_halfwidth_ghz", &BiphotonSpectrum::stopband_halfwidth_ghz)
        .def_readwrite("total_pair_flux", &BiphotonSpectrum::total_pair_flux);

    m.def("dwdm_filter_count", &dwdm_filter_count, py::arg("n_users"));
    m.def("dwdm_worst_loss", &dwdm_worst_loss, py::arg("model"), py::arg("n_users"));
    m.def("dwdm_best_loss", &dwdm_best_loss, py::arg("model"), py::arg("n_users"));
    m.def("crossover_users", &crossover_users, py::arg("wss"), py::arg("dwdm"));
    m.def("fully_connected_capacity", &fully_connected_capacity, py::arg("wss"), py::arg("slice_width_ghz"));
    m.def(
        "loss_table",
        [](const WssModel& wss, const DwdmModel& dwdm, int n_from, int n_to) {
            py::list rows;
            for (const auto& row : loss_table(wss, dwdm, n_from, n_to)) rows.append(loss_row(row));
            return rows;
        },
        py::arg("wss"), py::arg("dwdm"), py::arg("n_from"), py::arg("n_to"));

    m.def("spectral_density", &spectral_density, py::arg("spectrum"), py::arg("detuning_ghz"));
    m.def(
        "channel_fluxes",
        [](const BiphotonSpectrum& spectrum, double slice_width_ghz, int channel_count) {
            return channel_fluxes(spectrum, carve_grid(spectrum, slice_width_ghz, channel_count));
        },
        py::arg("spectrum"), py::arg("slice_width_ghz"), py::arg("channel_count"),
        "Pair flux per channel of a contiguous grid, innermost first.");

    m.def("default_scenario", [] { return format_scenario(paper_default_scenario()); },
          "Built-in four-user testbed as scenario JSON.");
    m.def("normalize_scenario", [](const std::string& text) { return format_scenario(parse_scenario(text)); },
          py::arg("text"), "Parse, validate and re-render scenario JSON.");
    m.def("run", &run, py::arg("args"),
          "Run a command-line invocation; returns (exit_code, stdout, stderr).");
}
