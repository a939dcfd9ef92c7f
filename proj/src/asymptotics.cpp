#include "kelly/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace kelly {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// ln(ln(1+e^q)) without forming intermediate under/overflow
double log_softplus_logx(double q) {
    if (q < -40.0) return q + std::log1p(-0.5 * std::exp(q));
    if (q > 40.0) return std::log(q + std::exp(-q));
    return std::log(std::log1p(std::exp(q)));
}

double alpha0_logx(double q) {
    if (q > 700.0) return 1.0 / q;      // 1/ln x limit
    if (q < -700.0) return 1.0;        // e^q underflows; slope saturates
    const double x = std::exp(q);
    return alpha0(x);
}

}  // namespace

double alpha0(double x) {
    if (!(x >= 0.0)) throw std::domain_error("alpha0: x must be positive");
    if (x == 0.0) return 1.0;
    if (x > 1e300) return 1.0 / std::log(x);
    return x / ((1.0 + x) * std::log1p(x));
}

WkbValue wkb_value(const RateSpectrum& spec, double x, int n) {
    if (!(x > 0.0)) throw std::domain_error("wkb_value: x must be positive");
    if (n < 0) throw std::invalid_argument("wkb_value: n must be nonnegative");
    const double q = std::log(x);
    if (n == 0) {
        const double f0 = std::log1p(x);
        return {f0, log_softplus_logx(q), alpha0(x), x, 0.0};
    }
    // residual(alpha) = alpha - alpha0(x e^{n kappa'(alpha)}) is strictly
    // increasing, negative at 0 and positive at 1
    auto drifted_logx = [&](double alpha) { return q + n * spec.kappa_prime_at(alpha); };
    auto residual = [&](double alpha) { return alpha - alpha0_logx(drifted_logx(alpha)); };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    const double q0 = drifted_logx(alpha);
    const double x0 = q0 > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(q0);
    const double rate = alpha * spec.kappa_prime_at(alpha) - spec.kappa_at(alpha);
    const double log_value = -n * rate + log_softplus_logx(q0);
    return {std::exp(log_value), log_value, alpha, x0, residual(alpha)};
}

WkbValue wkb_value_max_v(const RateSpectrum& spec, double x, int n) {
    if (!(x > 0.0)) throw std::domain_error("wkb_value_max_v: x must be positive");
    if (n < 0) throw std::invalid_argument("wkb_value_max_v: n must be nonnegative");
    const double q = std::log(x);
    if (n == 0) {
        const double f0 = std::log1p(x);
        return {f0, log_softplus_logx(q), alpha0(x), x, 0.0};
    }
    auto objective = [&](double v) {
        return -n * spec.failure_rate(v).h + log_softplus_logx(q + n * v);
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double a = spec.v0(), b = spec.v1();
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = objective(c), fd = objective(d);
    for (int it = 0; it < 120; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = objective(d);
        }
    }
    double v = fc >= fd ? c : d;
    double log_value = std::max(fc, fd);
    const double fa = objective(spec.v0()), fb = objective(spec.v1());
    if (fa >= log_value) {
        v = spec.v0();
        log_value = fa;
    }
    if (fb > log_value) {
        v = spec.v1();
        log_value = fb;
    }
    const double alpha = spec.alpha_for_slope(v);
    const double q0 = q + n * v;
    const double x0 = q0 > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(q0);
    return {std::exp(log_value), log_value, alpha, x0, alpha - alpha0_logx(q0)};
}

double wkb_step_log_rate(const RateSpectrum& spec, double x, int n) {
    if (!(x > 0.0)) throw std::domain_error("wkb_step_rate: x must be positive");
    if (n < 1) throw std::invalid_argument("wkb_step_rate: n must be positive");
    const double v = -std::log(x) / n;
    const double tol = 1e-12 * (1.0 + spec.v1());
    if (v < spec.v0() - tol || v > spec.v1() + tol)
        throw std::domain_error("wkb_step_rate: x outside the intermediate region");
    return -n * spec.failure_rate(std::clamp(v, spec.v0(), spec.v1())).h;
}

double wkb_step_rate(const RateSpectrum& spec, double x, int n) {
    return std::exp(wkb_step_log_rate(spec, x, n));
}

double diffusion_value(const DiffusionParams& p, double x, int n) {
    if (!(x > 0.0)) throw std::domain_error("diffusion_value: x must be positive");
    if (n < 1) throw std::invalid_argument("diffusion_value: n must be positive");
    const double width = std::sqrt(4.0 * p.D * n);
    const double t = (std::log(x) + p.v0 * n) / width;
    const double g = 0.5 * t * (1.0 + std::erf(t)) + std::exp(-t * t) / (2.0 * kSqrtPi);
    return width * g;
}

double diffusion_kernel(const DiffusionParams& p, int n, double y, double z) {
    const double u = y - z + p.v0 * n;
    return std::exp(-u * u / (4.0 * p.D * n)) / (2.0 * std::sqrt(M_PI * p.D * n));
}

double diffusion_value_quadrature(const DiffusionParams& p, double x, int n, double dz) {
    if (n < 1) throw std::invalid_argument("diffusion_value_quadrature: n must be positive");
    const double y = std::log(x);
    const double mu = y + p.v0 * n;  // kernel in z is centered here
    const double sigma = std::sqrt(2.0 * p.D * n);
    const double z_hi = std::max(mu + 12.0 * sigma, 12.0 * sigma);
    if (z_hi <= 0.0) return 0.0;
    const long steps = static_cast<long>(z_hi / dz) + 1;
    const double h = z_hi / steps;
    // integrand z * K(y,z) vanishes at z = 0; trapezoid over [0, z_hi]
    double sum = 0.5 * z_hi * diffusion_kernel(p, n, y, z_hi);
    for (long i = 1; i < steps; ++i) {
        const double z = h * i;
        sum += z * diffusion_kernel(p, n, y, z);
    }
    return sum * h;
}

void write_comparison_csv(std::ostream& out, const DpSolution& dp, const RateSpectrum& spec,
                          const std::vector<double>& xs) {
    const int n = dp.rounds();
    const DiffusionParams& pars = spec.diffusion_parameters();
    const double x_boundary = std::exp(-pars.v0 * n);
    std::vector<double> points = xs;
    points.push_back(x_boundary);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    out << "x,f_dp,f_wkb,f_diffusion,wkb_log_rel_err,diff_rel_err,kelly_boundary\n";
    const ValueFunction vf = dp.value_function(n);
    char line[256];
    for (double x : points) {
        const double f_dp = n == 0 ? std::log1p(x) : vf.eval(x);
        double f_wkb, f_diff;
        if (n == 0) {
            f_wkb = f_diff = std::log1p(x);
        } else {
            f_wkb = wkb_value(spec, x, n).value;
            f_diff = diffusion_value(pars, x, n);
        }
        const double log_dp = std::log(f_dp);
        const double wkb_err =
            std::abs(log_dp) > 0.0 ? std::abs(std::log(f_wkb) - log_dp) / std::abs(log_dp) : 0.0;
        const double diff_err = f_dp > 0.0 ? std::abs(f_diff - f_dp) / f_dp : 0.0;
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", x, f_dp,
                      f_wkb, f_diff, wkb_err, diff_err, x == x_boundary ? 1 : 0);
        out << line;
    }
}

void write_characteristics_csv(std::ostream& out, const RateSpectrum& spec,
                               const std::vector<double>& x0s, int n_max, int n_step) {
    out << "alpha,x0,n,ln_x\n";
    char line[160];
    for (double x0 : x0s) {
        const double a = alpha0(x0);
        const double slope = spec.kappa_prime_at(std::clamp(a, 0.0, 1.0));
        for (int n = 0; n <= n_max; n += n_step) {
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%d,%.17g\n", a, x0, n,
                          std::log(x0) - n * slope);
            out << line;
        }
    }
}

}  // namespace kelly
