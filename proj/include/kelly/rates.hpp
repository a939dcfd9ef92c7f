#pragma once

#include <iosfwd>
#include <vector>

#include "kelly/gamble.hpp"

namespace kelly {

// r(alpha, lambda) = ln sum_j p_j (1 + lambda (a_j - 1))^alpha.
// Power-law coefficients grow by exp(r) per round when the fraction is fixed.
double growth_rate_r(const Gamble& g, double alpha, double lambda);

struct KappaPoint {
    double kappa;        // max over lambda of r(alpha, .)
    double lambda_star;  // maximizer
};

// Per-round growth exponent under the best fraction, for alpha in [0,1].
KappaPoint kappa(const Gamble& g, double alpha);

// d kappa / d alpha = sum_j p_j ag^alpha ln ag / sum_j p_j ag^alpha at the
// optimal fraction, where ag = 1 + lambda*(alpha) (a_j - 1).
double kappa_prime(const Gamble& g, double alpha);

// v0(lambda) = sum_j p_j ln ag and the half-variance D(lambda) of ln ag.
double log_growth_drift(const Gamble& g, double lambda);
double log_growth_halfvar(const Gamble& g, double lambda);

// Minimum relative entropy KL(q||p) over outcome distributions q whose mean
// log gain equals v.  +infinity when v is outside the attainable range.
double entropy_rate_s(const Gamble& g, double v, double lambda);

struct FailureRate {
    double h;      // alpha v - kappa(alpha) at the matching slope
    double alpha;  // the alpha in [0,1] with kappa'(alpha) = v
};

// Legendre transform of kappa, defined for v in [kappa'(0), kappa'(1)].
FailureRate failure_rate_h(const Gamble& g, double v);

struct DiffusionParams {
    double v0;            // log-capital drift per round at the Kelly fraction
    double D;             // diffusion coefficient (half the log-gain variance)
    double lambda_kelly;  // fraction maximizing the drift
};

DiffusionParams diffusion_params(const Gamble& g);

// Dense tabulation of alpha -> (lambda*, kappa, kappa') over [0,1] with
// piecewise-linear accessors.  Built once, read-only afterwards.
class RateSpectrum {
public:
    explicit RateSpectrum(const Gamble& g, std::size_t points = 1001);

    double v0() const { return v0_; }
    double v1() const { return v1_; }
    double diffusion() const { return diffusion_.D; }
    double lambda_kelly() const { return diffusion_.lambda_kelly; }
    const DiffusionParams& diffusion_parameters() const { return diffusion_; }

    double kappa_at(double alpha) const;
    double kappa_prime_at(double alpha) const;
    double lambda_star_at(double alpha) const;
    double alpha_for_slope(double v) const;  // inverse of kappa' on [v0, v1]
    FailureRate failure_rate(double v) const;

    // most negative second difference of kappa on the grid (>= -1e-9 expected)
    double worst_convexity_defect() const { return worst_convexity_defect_; }

    const std::vector<double>& alphas() const { return alpha_; }
    const std::vector<double>& kappas() const { return kappa_; }
    const std::vector<double>& kappa_primes() const { return kappa_prime_; }
    const std::vector<double>& lambda_stars() const { return lambda_star_; }

    // header: alpha,lambda_star,kappa,kappa_prime
    void write_csv(std::ostream& out) const;

private:
    std::vector<double> alpha_, lambda_star_, kappa_, kappa_prime_;
    DiffusionParams diffusion_{};
    double v0_ = 0.0, v1_ = 0.0;
    double worst_convexity_defect_ = 0.0;
};

}  // namespace kelly
