#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "kelly/asymptotics.hpp"
#include "kelly/config.hpp"
#include "kelly/dp.hpp"
#include "kelly/gamble.hpp"
#include "kelly/rates.hpp"
#include "kelly/simulator.hpp"

namespace py = pybind11;
using namespace kelly;

PYBIND11_MODULE(_core, m) {
    m.doc() = "betting-policy toolkit for repeated favorable gambles with outside capital";

    py::class_<Gamble>(m, "Gamble")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("gains"),
             py::arg("probs"))
        .def_readonly("gains", &Gamble::gains)
        .def_readonly("probs", &Gamble::probs)
        .def("mean_gain", &Gamble::mean_gain)
        .def("favorable", &Gamble::favorable)
        .def("to_json", &Gamble::to_json)
        .def_static("from_json", &Gamble::from_json)
        .def("__repr__", [](const Gamble& g) { return "Gamble(" + g.to_json() + ")"; });

    py::enum_<GambleClass>(m, "GambleClass")
        .value("Unfavorable", GambleClass::Unfavorable)
        .value("Intermediate", GambleClass::Intermediate)
        .value("Attractive", GambleClass::Attractive);

    py::class_<Classification>(m, "Classification")
        .def_readonly("kind", &Classification::kind)
        .def_readonly("lambda_star", &Classification::lambda_star);

    m.def("isoelastic_utility", &isoelastic_utility, py::arg("x"), py::arg("alpha"));
    m.def("expected_utility", &expected_utility, py::arg("gamble"), py::arg("alpha"),
          py::arg("lam"));
    m.def("optimal_fraction", &optimal_fraction, py::arg("gamble"), py::arg("alpha"));
    m.def("classify", &classify, py::arg("gamble"), py::arg("alpha"));
    m.def(
        "attractiveness_threshold",
        [](const Gamble& g) -> py::object {
            const AttractivenessThreshold t = attractiveness_threshold(g);
            switch (t.kind) {
                case AttractivenessThreshold::Kind::Interior: return py::float_(t.alpha);
                case AttractivenessThreshold::Kind::AttractiveEverywhere: return py::float_(0.0);
                default: return py::none();
            }
        },
        py::arg("gamble"),
        "Smallest alpha making the gamble attractive; None when it never is.");

    m.def("growth_rate_r", &growth_rate_r, py::arg("gamble"), py::arg("alpha"), py::arg("lam"));
    m.def(
        "kappa",
        [](const Gamble& g, double alpha) {
            const KappaPoint k = kappa(g, alpha);
            return py::make_tuple(k.kappa, k.lambda_star);
        },
        py::arg("gamble"), py::arg("alpha"), "(kappa, lambda_star) at the given alpha");
    m.def("kappa_prime", &kappa_prime, py::arg("gamble"), py::arg("alpha"));
    m.def("entropy_rate_s", &entropy_rate_s, py::arg("gamble"), py::arg("v"), py::arg("lam"));
    m.def(
        "failure_rate_h",
        [](const Gamble& g, double v) {
            const FailureRate f = failure_rate_h(g, v);
            return py::make_tuple(f.h, f.alpha);
        },
        py::arg("gamble"), py::arg("v"), "(h, alpha) with kappa'(alpha) = v");

    py::class_<DiffusionParams>(m, "DiffusionParams")
        .def_readonly("v0", &DiffusionParams::v0)
        .def_readonly("D", &DiffusionParams::D)
        .def_readonly("lambda_kelly", &DiffusionParams::lambda_kelly);
    m.def("diffusion_params", &diffusion_params, py::arg("gamble"));

    py::class_<RateSpectrum>(m, "RateSpectrum")
        .def(py::init<const Gamble&, std::size_t>(), py::arg("gamble"), py::arg("points") = 1001)
        .def_property_readonly("v0", &RateSpectrum::v0)
        .def_property_readonly("v1", &RateSpectrum::v1)
        .def_property_readonly("D", &RateSpectrum::diffusion)
        .def_property_readonly("lambda_kelly", &RateSpectrum::lambda_kelly)
        .def("kappa_at", &RateSpectrum::kappa_at)
        .def("kappa_prime_at", &RateSpectrum::kappa_prime_at)
        .def("lambda_star_at", &RateSpectrum::lambda_star_at)
        .def("alpha_for_slope", &RateSpectrum::alpha_for_slope)
        .def("failure_rate",
             [](const RateSpectrum& s, double v) {
                 const FailureRate f = s.failure_rate(v);
                 return py::make_tuple(f.h, f.alpha);
             })
        .def("csv", [](const RateSpectrum& s) {
            std::ostringstream out;
            s.write_csv(out);
            return out.str();
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<double, double, int>(), py::arg("q_min"), py::arg("q_max"),
             py::arg("points"))
        .def_readonly("q_min", &GridSpec::q_min)
        .def_readonly("q_max", &GridSpec::q_max)
        .def_readonly("points", &GridSpec::points)
        .def("step", &GridSpec::step);

    py::class_<DpSolution, std::shared_ptr<DpSolution>>(m, "DpSolution")
        .def_property_readonly("rounds", &DpSolution::rounds)
        .def_property_readonly("grid", &DpSolution::grid)
        .def_property_readonly("tail_drift", &DpSolution::tail_drift)
        .def("value_row", &DpSolution::value_row, py::arg("k"))
        .def("policy_row", &DpSolution::policy_row, py::arg("k"))
        .def("eval", &DpSolution::eval, py::arg("k"), py::arg("x"))
        .def("eval_final", &DpSolution::eval_final, py::arg("x"))
        .def("query_policy", &DpSolution::query_policy, py::arg("k"), py::arg("x"))
        .def("save", &DpSolution::save, py::arg("path"))
        .def_static("load", &DpSolution::load, py::arg("path"));

    m.def(
        "solve",
        [](const Gamble& g, int rounds, const GridSpec& grid, bool keep_values,
           bool keep_policies) {
            SolveOptions opts;
            opts.keep_values = keep_values;
            opts.keep_policies = keep_policies;
            return std::make_shared<DpSolution>(solve(g, rounds, grid, opts));
        },
        py::arg("gamble"), py::arg("rounds"), py::arg("grid"), py::arg("keep_values") = true,
        py::arg("keep_policies") = true, py::call_guard<py::gil_scoped_release>());

    m.def("alpha0", &alpha0, py::arg("x"));
    py::class_<WkbValue>(m, "WkbValue")
        .def_readonly("value", &WkbValue::value)
        .def_readonly("log_value", &WkbValue::log_value)
        .def_readonly("alpha", &WkbValue::alpha)
        .def_readonly("x0", &WkbValue::x0)
        .def_readonly("residual", &WkbValue::residual);
    m.def("wkb_value", &wkb_value, py::arg("spectrum"), py::arg("x"), py::arg("n"));
    m.def("wkb_value_max_v", &wkb_value_max_v, py::arg("spectrum"), py::arg("x"), py::arg("n"));
    m.def("wkb_step_rate", &wkb_step_rate, py::arg("spectrum"), py::arg("x"), py::arg("n"));
    m.def("diffusion_value", &diffusion_value, py::arg("params"), py::arg("x"), py::arg("n"));
    m.def("diffusion_value_quadrature", &diffusion_value_quadrature, py::arg("params"),
          py::arg("x"), py::arg("n"), py::arg("dz") = 5e-4);

    m.def("step", &step, py::arg("x"), py::arg("lam"), py::arg("j"), py::arg("gamble"));

    py::class_<Strategy>(m, "Strategy")
        .def_static("idle", &Strategy::idle)
        .def_static("all_in", &Strategy::all_in)
        .def_static("fixed", &Strategy::fixed, py::arg("lam"))
        .def_static("policy",
                    [](std::shared_ptr<DpSolution> sol) {
                        return Strategy::policy(std::shared_ptr<const DpSolution>(sol));
                    },
                    py::arg("solution"))
        .def_static("blend", &Strategy::blend, py::arg("base0"), py::arg("base1"), py::arg("t"))
        .def("describe", &Strategy::describe);

    py::class_<ExactSummary>(m, "ExactSummary")
        .def_readonly("median", &ExactSummary::median)
        .def_readonly("mean", &ExactSummary::mean)
        .def_readonly("thresholds", &ExactSummary::thresholds)
        .def_readonly("tail_probs", &ExactSummary::tail_probs);
    m.def("exact_fixed_fraction", &exact_fixed_fraction, py::arg("gamble"), py::arg("lam"),
          py::arg("x_init"), py::arg("n"), py::arg("thresholds"));

    py::class_<EmpiricalDistribution>(m, "EmpiricalDistribution")
        .def_property_readonly("paths", &EmpiricalDistribution::paths)
        .def_property_readonly("seed", &EmpiricalDistribution::seed)
        .def("median", &EmpiricalDistribution::median)
        .def("mean", &EmpiricalDistribution::mean)
        .def("quantile", &EmpiricalDistribution::quantile)
        .def("tail_prob", &EmpiricalDistribution::tail_prob)
        .def("tail_se", &EmpiricalDistribution::tail_se)
        .def("sorted_log_finals", &EmpiricalDistribution::sorted_log_finals)
        .def("summary_json", &EmpiricalDistribution::summary_json, py::arg("thresholds"),
             py::arg("scale") = 1.0);
    m.def("simulate", &simulate, py::arg("gamble"), py::arg("strategy"), py::arg("x_init"),
          py::arg("n"), py::arg("paths"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<CompetitiveReport>(m, "CompetitiveReport")
        .def_readonly("mean_ratio", &CompetitiveReport::mean_ratio)
        .def_readonly("se_mean", &CompetitiveReport::se_mean)
        .def_readonly("ratio_levels", &CompetitiveReport::ratio_levels)
        .def_readonly("tail_freq", &CompetitiveReport::tail_freq)
        .def_readonly("tail_se", &CompetitiveReport::tail_se)
        .def_readonly("paths", &CompetitiveReport::paths);
    m.def("competitive_check", &competitive_check, py::arg("gamble"), py::arg("reference"),
          py::arg("challenger"), py::arg("x_init"), py::arg("n"), py::arg("paths"),
          py::arg("seed"), py::arg("ratio_levels"), py::call_guard<py::gil_scoped_release>());
}
