#pragma once

#include <iosfwd>
#include <vector>

#include "kelly/dp.hpp"
#include "kelly/rates.hpp"

namespace kelly {

// alpha0(x) = x / ((1+x) ln(1+x)); slope of ln f_0 against ln x.
// Tends to 1 as x -> 0 and to 0 as x -> infinity.
double alpha0(double x);

struct WkbValue {
    double value;
    double log_value;  // computed without forming value when it underflows
    double alpha;      // slope picked by the shooting construction
    double x0;         // endpoint capital after n rounds of characteristic drift
    double residual;   // alpha - alpha0(x0) at the returned solution
};

// Characteristic-shooting evaluator: finds alpha in [0,1] with
// alpha = alpha0(x e^{n kappa'(alpha)}) and propagates f_0 back along the
// characteristic with rate alpha kappa'(alpha) - kappa(alpha).
WkbValue wkb_value(const RateSpectrum& spec, double x, int n);

// Equivalent variational form: max over v in [v0, v1] of e^{-n h(v)} f_0(e^{n v} x).
WkbValue wkb_value_max_v(const RateSpectrum& spec, double x, int n);

// Step-function simplification inside the intermediate region
// e^{-n v1} <= x <= e^{-n v0}: the bare rate factor e^{-n h(-ln x / n)}.
double wkb_step_rate(const RateSpectrum& spec, double x, int n);
double wkb_step_log_rate(const RateSpectrum& spec, double x, int n);

// Closed-form drift-diffusion value: sqrt(4 D n) g(t) with
// t = (ln x + v0 n) / sqrt(4 D n), g(t) = t (1 + erf t)/2 + e^{-t^2}/(2 sqrt(pi)).
double diffusion_value(const DiffusionParams& p, double x, int n);

// Gaussian propagator of the drift-diffusion equation in y = ln x.
double diffusion_kernel(const DiffusionParams& p, int n, double y, double z);

// Trapezoid transport of the ramp initial profile through the kernel
// (oracle for the closed form).
double diffusion_value_quadrature(const DiffusionParams& p, double x, int n, double dz = 5e-4);

// x, f_dp, f_wkb, f_diffusion plus log-scale/relative error columns; marks the
// row at the Kelly-region boundary x = e^{-n v0}.
void write_comparison_csv(std::ostream& out, const DpSolution& dp, const RateSpectrum& spec,
                          const std::vector<double>& xs);

// Lines of constant alpha in the (ln x, n) plane, projected from the final
// round: ln x(n) = ln x0 - n kappa'(alpha0(x0)).
void write_characteristics_csv(std::ostream& out, const RateSpectrum& spec,
                               const std::vector<double>& x0s, int n_max, int n_step);

}  // namespace kelly
