#include "nhrk/errors.hpp"
#include "nhrk/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nhrk;

namespace {

RunConfig build_config(const std::string& text, const std::vector<std::string>& overrides) {
    RunConfig cfg = parse_config_text(text, "<python>");
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

py::array_t<double> rows_to_array(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    py::array_t<double> out({rows.size(), cols});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) view(i, j) = rows[i][j];
    return out;
}

py::dict tableau_dict(int s) {
    const PartitionedTableau t = lobatto_pair(s);
    const auto& c = t.cert;
    py::dict cert;
    cert["p"] = c.p;
    cert["q"] = c.q;
    cert["r"] = c.r;
    cert["p_hat"] = c.p_hat;
    cert["q_hat"] = c.q_hat;
    cert["r_hat"] = c.r_hat;
    cert["r_inf"] = c.r_inf;
    py::dict d;
    d["stages"] = s;
    d["a"] = t.primal.a;
    d["b"] = t.primal.b;
    d["c"] = t.primal.c;
    d["a_hat"] = t.dual.a;
    d["b_hat"] = t.dual.b;
    d["c_hat"] = t.dual.c;
    d["certificate"] = cert;
    d["symplecticity_residual"] = t.symplecticity_residual();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonholonomic partitioned Runge-Kutta integrators";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
    static py::exception<InvalidArgument> invalid_argument(m, "InvalidArgument", error.ptr());
    static py::exception<StepFailure> step_failure(m, "StepFailure", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(config_error.ptr(), e.what());
        } catch (const InvalidArgument& e) {
            PyErr_SetString(invalid_argument.ptr(), e.what());
        } catch (const StepFailure& e) {
            PyErr_SetString(step_failure.ptr(), e.what());
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), e.what());
        }
    });

    m.def("lobatto_nodes", &lobatto_nodes, py::arg("stages"));
    m.def("lobatto_pair", &tableau_dict, py::arg("stages"),
          "Lobatto IIIA-IIIB coefficients and their order certificate.");
    m.def("predicted_orders", &predicted_orders, py::arg("stages"));
    m.def("catalog_names", &catalog_names);

    m.def(
        "check_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            build_config(text, overrides);
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Parses and validates a config; raises ConfigError on problems.");

    m.def(
        "simulate",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            const Trajectory t = simulate(build_config(text, overrides));
            py::dict d;
            d["columns"] = t.columns;
            d["data"] = rows_to_array(t.rows, t.columns.size());
            d["failed"] = t.failed;
            d["failed_step"] = t.failed_step;
            d["failure"] = t.failure;
            return d;
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Integrates one trajectory; returns columns, an (N+1)×C array and failure info.");

    m.def(
        "converge",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            const ConvergenceReport r = converge(build_config(text, overrides));
            py::dict d;
            d["h"] = r.h;
            d["err_q"] = r.err_q;
            d["err_p"] = r.err_p;
            d["err_lambda"] = r.err_lambda;
            d["slope_q"] = r.slope_q;
            d["slope_p"] = r.slope_p;
            d["slope_lambda"] = r.slope_lambda;
            d["h_ref"] = r.h_ref;
            d["t_final"] = r.t_final;
            return d;
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "ensemble",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            const EnsembleReport r = ensemble(build_config(text, overrides));
            py::dict d;
            d["h"] = r.h;
            d["exponent"] = r.exponent;
            d["t"] = r.t;
            d["mu"] = r.mu;
            d["mu_normalized"] = r.mu_normalized;
            d["members"] = r.members;
            d["initial_energy"] = r.initial_energy;
            d["dropped"] = r.dropped;
            return d;
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{});

    m.def("fit_slope", &fit_slope, py::arg("h"), py::arg("err"), py::arg("floor") = 0.0);
}
