#include "arw/checks.hpp"
#include "arw/coarse_grain.hpp"
#include "arw/count_chain.hpp"
#include "arw/exact_solver.hpp"
#include "arw/experiments.hpp"
#include "arw/micro_dynamics.hpp"
#include "arw/moment_analysis.hpp"
#include "arw/scaling_limit.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using namespace arw;

namespace {

py::dict law_dict(const IncrementLaw& law) {
    py::dict d;
    d["sleep"] = law.sleep;
    d["settle"] = law.settle;
    d["exit"] = law.exit;
    return d;
}

py::dict report_dict(const WindowReport& r) {
    py::dict d;
    d["mode"] = r.mode;
    d["samples"] = r.samples;
    d["truncated"] = r.truncated;
    d["mean_count"] = r.mean_count;
    d["sd_count"] = r.sd_count;
    d["shift_estimate"] = r.shift_estimate;
    d["shift_lower_99"] = r.shift_lower_99;
    d["in_window_fraction"] = r.in_window_fraction;
    d["within_deviation_fraction"] = r.within_deviation_fraction;
    d["below_deviation_fraction"] = r.below_deviation_fraction;
    d["min_count"] = r.min_count;
    d["max_count"] = r.max_count;
    return d;
}

ExperimentConfig config_from(const py::dict& settings) {
    ExperimentConfig c;
    for (const auto& [k, v] : settings) c.set(py::str(k), py::str(v));
    return c;
}

}  // namespace

PYBIND11_MODULE(_arw, m) {
    m.doc() = "Activated random walk on the complete graph";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<std::int64_t, double>(), py::arg("n_sites"), py::arg("lam"))
        .def_readonly("n_sites", &ModelParams::n_sites)
        .def_readonly("lam", &ModelParams::lambda)
        .def_property_readonly("rho_c", &ModelParams::rho_c)
        .def_property_readonly("shift_constant", &ModelParams::shift_constant)
        .def_property_readonly("window_scale", &ModelParams::window_scale)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(n_sites=" + std::to_string(p.n_sites) + ", lam=" + format_double(p.lambda) + ")";
        });

    m.def("pi_tail",
          [](const ModelParams& p, std::int64_t x, std::int64_t y, bool exit_branch, std::int64_t k) {
              return pi_tail(p, {x, y}, exit_branch ? Branch::Exit : Branch::Settle, k);
          },
          py::arg("params"), py::arg("x"), py::arg("y"), py::arg("exit_branch"), py::arg("k"));

    m.def("increment_law",
          [](const ModelParams& p, std::int64_t x, std::int64_t y) { return law_dict(increment_law(p, {x, y})); },
          py::arg("params"), py::arg("x"), py::arg("y"));

    m.def("run_until_absorbed",
          [](const ModelParams& p, std::int64_t x, std::int64_t y, std::uint64_t seed, std::int64_t max_steps,
             std::int64_t stride) {
              Stream rng(seed);
              RunOptions o;
              o.record_stride = stride;
              Trajectory t;
              {
                  py::gil_scoped_release release;
                  t = run_until_absorbed(p, {x, y}, rng, max_steps, o);
              }
              py::dict d;
              std::vector<std::int64_t> ts, xs, ys;
              for (const auto& pt : t.path) {
                  ts.push_back(pt.t);
                  xs.push_back(pt.x);
                  ys.push_back(pt.y);
              }
              d["t"] = ts;
              d["x"] = xs;
              d["y"] = ys;
              d["steps"] = t.steps;
              d["final"] = py::make_tuple(t.final_state.x, t.final_state.y);
              d["truncated"] = t.truncated;
              d["absorption_time"] = t.absorption_time ? py::cast(*t.absorption_time) : py::none();
              return d;
          },
          py::arg("params"), py::arg("x"), py::arg("y"), py::arg("seed"), py::arg("max_steps"),
          py::arg("stride") = 1);

    m.def("driven_chain_counts",
          [](const ModelParams& p, std::int64_t steps, std::uint64_t seed) {
              Stream rng(seed);
              std::vector<std::int64_t> out;
              py::gil_scoped_release release;
              for (const auto& s : driven_chain_run(p, MicroConfig::all_empty(p.n_sites), steps, rng)) {
                  out.push_back(s.particle_count);
              }
              return out;
          },
          py::arg("params"), py::arg("steps"), py::arg("seed"));

    m.def("stationary_exact",
          [](const ModelParams& p, bool hessenberg) {
              ExactSolverOptions o;
              o.solver = hessenberg ? SliceSolver::Hessenberg : SliceSolver::Dense;
              return stationary_exact(p, o).mass;
          },
          py::arg("params"), py::arg("hessenberg") = false);

    m.def("sum_identity_first", [](std::int64_t n, std::int64_t mm) {
        const auto c = sum_identity_first(n, mm);
        return py::make_tuple(c.lhs, c.rhs);
    });
    m.def("sum_identity_second", [](std::int64_t n, std::int64_t mm) {
        const auto c = sum_identity_second(n, mm);
        return py::make_tuple(c.lhs, c.rhs);
    });

    m.def("drift_exact", [](const ModelParams& p, std::int64_t x, std::int64_t y) { return drift_exact(p, {x, y}); });
    m.def("drift_enumerated",
          [](const ModelParams& p, std::int64_t x, std::int64_t y) { return drift_enumerated(p, {x, y}); });
    m.def("second_moment_exact",
          [](const ModelParams& p, std::int64_t x, std::int64_t y) { return second_moment_exact(p, {x, y}); });
    m.def("mgf_exact", [](const ModelParams& p, std::int64_t x, std::int64_t y, double theta) {
        return mgf_exact(p, {x, y}, theta);
    });
    m.def("mgf_expansion", [](const ModelParams& p, std::int64_t x, std::int64_t y, double theta) {
        return mgf_expansion(p, {x, y}, theta);
    });
    m.def("supermartingale_margin",
          [](const ModelParams& p, std::int64_t x, std::int64_t y, double h, double eps) {
              return supermartingale_margin(p, {x, y}, h, eps);
          });

    m.def("band_parameters",
          [](const ModelParams& p, std::int64_t k, double x_hat, bool barred) {
              const BandSpec b = band_parameters(p, k, x_hat, barred);
              py::dict d;
              d["k"] = b.k;
              d["width"] = b.width;
              d["lower"] = b.lower;
              d["upper"] = b.upper;
              d["x_anchor"] = b.x_anchor;
              d["z_star"] = b.z_star;
              d["y_star"] = b.y_star;
              d["delta"] = b.delta;
              d["k_minus"] = b.k_minus;
              d["k_plus"] = b.k_plus;
              const TiltRoot r = theta_star(p, b);
              d["theta_star"] = r.theta;
              d["theta_prediction"] = r.prediction;
              d["f"] = band_exit_probability(p, b);
              return d;
          },
          py::arg("params"), py::arg("k"), py::arg("x_hat"), py::arg("barred") = false);

    m.def("hitting_probability",
          [](std::int64_t lowest, std::vector<double> g, std::int64_t start) {
              return hitting_probability(BirthDeathChain(lowest, std::move(g)), start);
          },
          py::arg("lowest"), py::arg("g"), py::arg("start"));
    m.def("hitting_probability_linear",
          [](std::int64_t lowest, std::vector<double> g, std::int64_t start) {
              return hitting_probability_linear(BirthDeathChain(lowest, std::move(g)), start);
          },
          py::arg("lowest"), py::arg("g"), py::arg("start"));

    m.def("critical_constants", [](double lam) {
        const auto c = critical_constants(lam);
        return py::make_tuple(c.rho_c, c.a);
    });
    m.def("ou_simulate",
          [](double horizon, double dt, std::uint64_t seed, double r0) {
              Stream rng(seed);
              return ou_simulate(horizon, dt, rng, r0);
          },
          py::arg("horizon"), py::arg("dt"), py::arg("seed"), py::arg("r0") = 0.0);

    m.def("run_stationary_sampling",
          [](const py::dict& settings) {
              const ExperimentConfig c = config_from(settings);
              StationaryRun run;
              {
                  py::gil_scoped_release release;
                  run = run_stationary_sampling(c);
              }
              py::dict d = report_dict(run.report);
              d["counts"] = run.counts;
              d["weights"] = run.weights;
              return d;
          },
          py::arg("settings") = py::dict());

    m.def("suite_names", &suite_names);
    m.def("run_suite",
          [](const std::string& name, const py::dict& settings) {
              const ExperimentConfig c = config_from(settings);
              SuiteResult r;
              {
                  py::gil_scoped_release release;
                  r = run_suite(c, name);
              }
              return py::make_tuple(r.passed, r.json);
          },
          py::arg("name"), py::arg("settings") = py::dict());

    m.def("config_hash", [](const py::dict& settings) { return config_from(settings).hash(); },
          py::arg("settings") = py::dict());
}
