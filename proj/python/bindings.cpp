#include <pybind11/pybind11.h>

#include "ltsens/config.hpp"
#include "ltsens/report.hpp"
#include "ltsens/verify.hpp"

namespace py = pybind11;
using namespace ltsens;

namespace {

Model make_model(const std::string& model_json, double p)
{
    return Model::validate(parse_model_block(Json::parse(model_json)), Preferences(p));
}

SimConfig sim_config(double T, std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                     unsigned workers)
{
    SimConfig c;
    c.T = T;
    c.n_steps = n_steps;
    c.n_paths = n_paths;
    c.seed = seed;
    c.workers = workers;
    return c;
}

std::string dump(const Json& j)
{
    return dump_json(j, -1);
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Long-term sensitivities of optimal power-utility portfolios";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UnsupportedModelError>(m, "UnsupportedModelError",
                                                  PyExc_NotImplementedError);

    m.def("dual_exponent", &dual_exponent, py::arg("p"));

    m.def("eigenpair", [](const std::string& model, double p) {
        return dump(eigenpair_json(make_model(model, p)));
    });

    m.def("value", [](const std::string& model, double p, double chi, double T) {
        return dump(value_json(make_model(model, p), chi, T));
    });

    m.def("coefficient_path",
          [](const std::string& model, double p, double T, std::size_t intervals) {
              const auto mdl = make_model(model, p);
              return dump(coefficient_path_json(coefficient_path(mdl, uniform_grid(T, intervals))));
          });

    m.def("sensitivities", [](const std::string& model, double p) {
        return dump(sensitivities_json(long_term_sensitivities(make_model(model, p))));
    });

    m.def(
        "simulate_value",
        [](const std::string& model, double p, double chi, double T, std::size_t n_steps,
           std::size_t n_paths, std::uint64_t seed, unsigned workers) {
            const auto mdl = make_model(model, p);
            const auto cfg = sim_config(T, n_steps, n_paths, seed, workers);
            ValueEstimate est;
            {
                py::gil_scoped_release release;
                est = simulate_phat_value(mdl, chi, cfg);
            }
            return dump(value_estimate_json(mdl, chi, cfg, est));
        });

    m.def(
        "decomposition",
        [](const std::string& model, double p, double chi, double T, std::size_t n_steps,
           std::size_t n_paths, std::uint64_t seed, unsigned workers) {
            const auto mdl = make_model(model, p);
            const auto cfg = sim_config(T, n_steps, n_paths, seed, workers);
            DecompositionResult r;
            {
                py::gil_scoped_release release;
                r = decomposition_check(mdl, chi, cfg);
            }
            return dump(decomposition_json(r));
        });

    m.def(
        "verify",
        [](const std::string& model, double p, double T, std::size_t n_steps,
           std::size_t n_paths, std::uint64_t seed, unsigned workers) {
            const auto mdl = make_model(model, p);
            const auto cfg = sim_config(T, n_steps, n_paths, seed, workers);
            VerifyReport r;
            {
                py::gil_scoped_release release;
                r = run_verify(mdl, cfg);
            }
            return dump(verify_json(r));
        });
}
