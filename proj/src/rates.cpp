#include "kelly/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace kelly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha_unit(double alpha, const char* who) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument(std::string(who) + ": alpha must lie in [0,1]");
}

// KL(q||p) for a two-outcome distribution pinned by the mean log gain.
double two_outcome_entropy(const Gamble& g, double v, double s1, double s2) {
    const double q1 = (v - s2) / (s1 - s2);
    if (q1 < -1e-12 || q1 > 1.0 + 1e-12) return kInf;
    const double c1 = std::clamp(q1, 0.0, 1.0);
    const double c2 = 1.0 - c1;
    double kl = 0.0;
    if (c1 > 0.0) kl += c1 * std::log(c1 / g.probs[0]);
    if (c2 > 0.0) kl += c2 * std::log(c2 / g.probs[1]);
    return kl;
}

}  // namespace

double growth_rate_r(const Gamble& g, double alpha, double lambda) {
    double sum = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const double ag = g.effective_gain(j, lambda);
        if (!(ag > 0.0)) throw std::domain_error("growth_rate_r: nonpositive effective gain");
        sum += g.probs[j] * std::pow(ag, alpha);
    }
    return std::log(sum);
}

KappaPoint kappa(const Gamble& g, double alpha) {
    check_alpha_unit(alpha, "kappa");
    // r(0, .) is identically 0; use the limiting maximizer, the Kelly fraction.
    const double lam = (alpha == 0.0) ? optimal_fraction(g, 0.0) : optimal_fraction(g, alpha);
    return {growth_rate_r(g, alpha, lam), lam};
}

double kappa_prime(const Gamble& g, double alpha) {
    check_alpha_unit(alpha, "kappa_prime");
    const double lam = kappa(g, alpha).lambda_star;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const double ag = g.effective_gain(j, lam);
        const double w = g.probs[j] * std::pow(ag, alpha);
        num += w * std::log(ag);
        den += w;
    }
    return num / den;
}

double log_growth_drift(const Gamble& g, double lambda) {
    double v = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j)
        v += g.probs[j] * std::log(g.effective_gain(j, lambda));
    return v;
}

double log_growth_halfvar(const Gamble& g, double lambda) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const double s = std::log(g.effective_gain(j, lambda));
        m1 += g.probs[j] * s;
        m2 += g.probs[j] * s * s;
    }
    return 0.5 * (m2 - m1 * m1);
}

double entropy_rate_s(const Gamble& g, double v, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("entropy_rate_s: lambda must lie in [0,1]");
    std::vector<double> s(g.outcomes());
    double lo = kInf, hi = -kInf;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        s[j] = std::log(g.effective_gain(j, lambda));
        lo = std::min(lo, s[j]);
        hi = std::max(hi, s[j]);
    }
    const double span = hi - lo;
    const double edge_tol = 1e-14 * (1.0 + std::abs(lo) + std::abs(hi));
    if (v < lo - edge_tol || v > hi + edge_tol) return kInf;
    if (span <= edge_tol) return 0.0;  // degenerate: every outcome has the same log gain
    // Exact endpoints: all mass on the extreme outcomes.
    auto mass_at = [&](double target) {
        double p = 0.0;
        for (std::size_t j = 0; j < g.outcomes(); ++j)
            if (std::abs(s[j] - target) <= edge_tol) p += g.probs[j];
        return p;
    };
    if (v <= lo + edge_tol) return -std::log(mass_at(lo));
    if (v >= hi - edge_tol) return -std::log(mass_at(hi));

    if (g.outcomes() == 2) return two_outcome_entropy(g, v, s[0], s[1]);

    // General case via the dual form sup_alpha (alpha v - r(alpha, lambda));
    // the stationarity condition dr/dalpha = v has a unique root.
    auto r_slope = [&](double alpha) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < g.outcomes(); ++j) {
            const double w = g.probs[j] * std::exp(alpha * s[j]);
            num += w * s[j];
            den += w;
        }
        return num / den;
    };
    double a_lo = -1.0, a_hi = 1.0;
    while (r_slope(a_lo) > v && a_lo > -1e6) a_lo *= 2.0;
    while (r_slope(a_hi) < v && a_hi < 1e6) a_hi *= 2.0;
    for (int it = 0; it < 200 && a_hi - a_lo > 1e-13 * (1.0 + std::abs(a_lo)); ++it) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (r_slope(mid) < v)
            a_lo = mid;
        else
            a_hi = mid;
    }
    const double alpha = 0.5 * (a_lo + a_hi);
    double sum = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j) sum += g.probs[j] * std::exp(alpha * s[j]);
    return alpha * v - std::log(sum);
}

FailureRate failure_rate_h(const Gamble& g, double v) {
    const double v0 = kappa_prime(g, 0.0);
    const double v1 = kappa_prime(g, 1.0);
    const double tol = 1e-12 * (1.0 + std::abs(v0) + std::abs(v1));
    if (v < v0 - tol || v > v1 + tol)
        throw std::domain_error("failure_rate_h: v outside [kappa'(0), kappa'(1)]");
    const double vc = std::clamp(v, v0, v1);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kappa_prime(g, mid) < vc)
            lo = mid;
        else
            hi = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    return {alpha * vc - kappa(g, alpha).kappa, alpha};
}

DiffusionParams diffusion_params(const Gamble& g) {
    if (!g.favorable()) throw std::invalid_argument("diffusion_params: gamble must be favorable");
    const double lam = optimal_fraction(g, 0.0);
    return {log_growth_drift(g, lam), log_growth_halfvar(g, lam), lam};
}

RateSpectrum::RateSpectrum(const Gamble& g, std::size_t points) {
    if (points < 2) throw std::invalid_argument("RateSpectrum: need at least 2 points");
    alpha_.resize(points);
    lambda_star_.resize(points);
    kappa_.resize(points);
    kappa_prime_.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(points - 1);
        alpha_[i] = a;
        const KappaPoint kp = kappa(g, a);
        lambda_star_[i] = kp.lambda_star;
        kappa_[i] = kp.kappa;
        kappa_prime_[i] = kappa_prime(g, a);
    }
    diffusion_ = diffusion_params(g);
    v0_ = kappa_prime_.front();
    v1_ = kappa_prime_.back();
    for (std::size_t i = 1; i + 1 < points; ++i) {
        const double d2 = kappa_[i - 1] - 2.0 * kappa_[i] + kappa_[i + 1];
        worst_convexity_defect_ = std::min(worst_convexity_defect_, d2);
    }
}

namespace {

// piecewise-linear read on the uniform alpha grid
double interp_uniform(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const std::size_t n = xs.size();
    const double step = xs[1] - xs[0];
    double u = (x - xs.front()) / step;
    if (u <= 0.0) return ys.front();
    if (u >= static_cast<double>(n - 1)) return ys.back();
    const std::size_t i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace

double RateSpectrum::kappa_at(double alpha) const {
    check_alpha_unit(alpha, "RateSpectrum::kappa_at");
    return interp_uniform(alpha_, kappa_, alpha);
}

double RateSpectrum::kappa_prime_at(double alpha) const {
    check_alpha_unit(alpha, "RateSpectrum::kappa_prime_at");
    return interp_uniform(alpha_, kappa_prime_, alpha);
}

double RateSpectrum::lambda_star_at(double alpha) const {
    check_alpha_unit(alpha, "RateSpectrum::lambda_star_at");
    return interp_uniform(alpha_, lambda_star_, alpha);
}

double RateSpectrum::alpha_for_slope(double v) const {
    const double tol = 1e-12 * (1.0 + std::abs(v0_) + std::abs(v1_));
    if (v < v0_ - tol || v > v1_ + tol)
        throw std::domain_error("RateSpectrum::alpha_for_slope: v outside [v0, v1]");
    const double vc = std::clamp(v, v0_, v1_);
    // kappa' is nondecreasing on the grid; invert cell by cell
    const auto it = std::lower_bound(kappa_prime_.begin(), kappa_prime_.end(), vc);
    if (it == kappa_prime_.begin()) return alpha_.front();
    if (it == kappa_prime_.end()) return alpha_.back();
    const std::size_t i = static_cast<std::size_t>(it - kappa_prime_.begin());
    const double d = kappa_prime_[i] - kappa_prime_[i - 1];
    const double w = d > 0.0 ? (vc - kappa_prime_[i - 1]) / d : 0.0;
    return alpha_[i - 1] + w * (alpha_[i] - alpha_[i - 1]);
}

FailureRate RateSpectrum::failure_rate(double v) const {
    const double a = alpha_for_slope(v);
    return {a * std::clamp(v, v0_, v1_) - kappa_at(a), a};
}

void RateSpectrum::write_csv(std::ostream& out) const {
    out << "alpha,lambda_star,kappa,kappa_prime\n";
    char line[160];
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", alpha_[i], lambda_star_[i],
                      kappa_[i], kappa_prime_[i]);
        out << line;
    }
}

}  // namespace kelly
