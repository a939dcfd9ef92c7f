#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "kelly/rates.hpp"
#include "test_util.hpp"

using namespace kelly;
using kelly_test::coin_flip;

namespace {

// high-precision direct summation, independent of growth_rate_r
long double r_oracle(const Gamble& g, double alpha, double lambda) {
    long double sum = 0.0L;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const long double ag = 1.0L + static_cast<long double>(lambda) * (g.gains[j] - 1.0L);
        sum += static_cast<long double>(g.probs[j]) * std::pow(ag, static_cast<long double>(alpha));
    }
    return std::log(sum);
}

}  // namespace

TEST_CASE("growth rate examples") {
    const Gamble g = coin_flip();
    CHECK(std::abs(growth_rate_r(g, 0.0, 0.7)) < 1e-14);
    CHECK(growth_rate_r(g, 1.0, 1.0) == doctest::Approx(std::log(1.025)).epsilon(1e-14));
    CHECK(growth_rate_r(g, 0.5, 0.5) ==
          doctest::Approx(static_cast<double>(r_oracle(g, 0.5, 0.5))).epsilon(1e-14));
}

TEST_CASE("kappa endpoints") {
    const Gamble g = coin_flip();
    const KappaPoint k0 = kappa(g, 0.0);
    CHECK(std::abs(k0.kappa) < 1e-12);
    CHECK(k0.lambda_star == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

    const double v0 = 0.5 * std::log(1.1) + 0.5 * std::log(11.0 / 12.0);
    CHECK(kappa_prime(g, 0.0) == doctest::Approx(v0).epsilon(1e-9));
    CHECK(v0 == doctest::Approx(0.0041494).epsilon(1e-4));

    const KappaPoint k1 = kappa(g, 1.0);
    CHECK(k1.kappa == doctest::Approx(std::log(1.025)).epsilon(1e-13));
    CHECK(k1.lambda_star == 1.0);
    const double v1 = (0.5 * 1.3 * std::log(1.3) + 0.5 * 0.75 * std::log(0.75)) / 1.025;
    CHECK(kappa_prime(g, 1.0) == doctest::Approx(v1).epsilon(1e-12));
    CHECK(v1 == doctest::Approx(0.06113).epsilon(1e-4));
}

TEST_CASE("kappa is convex with a nondecreasing derivative") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        const Gamble g = trial == 0 ? coin_flip() : kelly_test::random_favorable(rng);
        std::vector<double> ka(101), kp(101);
        for (int i = 0; i <= 100; ++i) {
            const double a = i / 100.0;
            ka[i] = kappa(g, a).kappa;
            kp[i] = kappa_prime(g, a);
        }
        for (int i = 1; i < 100; ++i) CHECK(ka[i - 1] - 2.0 * ka[i] + ka[i + 1] >= -1e-9);
        for (int i = 1; i <= 100; ++i) CHECK(kp[i] >= kp[i - 1] - 1e-9);
        CHECK(kp[0] <= kp[100]);
    }
}

TEST_CASE("entropy rate basics") {
    const Gamble g = coin_flip();
    const double lam = 1.0 / 3.0;
    const double mean = log_growth_drift(g, lam);
    CHECK(entropy_rate_s(g, mean, lam) == doctest::Approx(0.0).epsilon(1e-12));

    const double hi = std::log(1.1);
    CHECK(entropy_rate_s(g, hi + 0.01, lam) == std::numeric_limits<double>::infinity());
    CHECK(entropy_rate_s(g, std::log(11.0 / 12.0) - 0.01, lam) ==
          std::numeric_limits<double>::infinity());

    // all mass on the winning outcome at the upper edge
    CHECK(entropy_rate_s(g, hi, lam) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("entropy rate matches the pinned two-outcome distribution") {
    const Gamble g = coin_flip();
    const double lam = 1.0 / 3.0;
    const double s1 = std::log(1.1), s2 = std::log(11.0 / 12.0);
    const double v = 0.5 * (s1 + 0.5 * (s1 + s2));  // some interior point
    // solve q1 s1 + (1-q1) s2 = v directly and evaluate the divergence
    const double q1 = (v - s2) / (s1 - s2);
    const double want = q1 * std::log(q1 / 0.5) + (1.0 - q1) * std::log((1.0 - q1) / 0.5);
    CHECK(entropy_rate_s(g, v, lam) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("entropy rate for three outcomes against a dense primal scan") {
    const Gamble g({1.5, 1.0, 0.6}, {0.3, 0.3, 0.4});
    const double lam = 0.5;
    std::vector<double> s(3);
    for (int j = 0; j < 3; ++j) s[j] = std::log(g.effective_gain(j, lam));
    // primal: grid over the simplex slice q1 s1 + q2 s2 + q3 s3 = v
    for (double v : {-0.05, 0.0, 0.08}) {
        double best = std::numeric_limits<double>::infinity();
        const int steps = 4000;
        for (int i = 0; i <= steps; ++i) {
            const double q1 = static_cast<double>(i) / steps;
            // remaining mass split fixed by the constraint
            const double denom = s[1] - s[2];
            const double q2 = (v - q1 * s[0] - (1.0 - q1) * s[2]) / denom;
            const double q3 = 1.0 - q1 - q2;
            if (q2 < 0.0 || q3 < 0.0) continue;
            double kl = 0.0;
            const double qs[3] = {q1, q2, q3};
            for (int j = 0; j < 3; ++j)
                if (qs[j] > 0.0) kl += qs[j] * std::log(qs[j] / g.probs[j]);
            best = std::min(best, kl);
        }
        CHECK(entropy_rate_s(g, v, lam) == doctest::Approx(best).epsilon(1e-5));
    }
}

TEST_CASE("failure rate endpoints and duality") {
    const Gamble g = coin_flip();
    const double v0 = kappa_prime(g, 0.0);
    const double v1 = kappa_prime(g, 1.0);

    CHECK(failure_rate_h(g, v0).h == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(failure_rate_h(g, v1).h == doctest::Approx(v1 - std::log(1.025)).epsilon(1e-10));
    CHECK_THROWS_AS(failure_rate_h(g, v1 + 0.01), std::domain_error);
    CHECK_THROWS_AS(failure_rate_h(g, v0 - 0.01), std::domain_error);

    // h(v) = min over fractions of the pinned relative entropy
    for (int i = 1; i <= 20; ++i) {
        const double v = v0 + (v1 - v0) * i / 21.0;
        const FailureRate fr = failure_rate_h(g, v);
        double best = std::numeric_limits<double>::infinity();
        for (int li = 0; li <= 4000; ++li)
            best = std::min(best, entropy_rate_s(g, v, li / 4000.0));
        CHECK(std::abs(fr.h - best) < 1e-6);
        CHECK(fr.alpha >= 0.0);
        CHECK(fr.alpha <= 1.0);
    }
}

TEST_CASE("legendre involution recovers kappa") {
    const Gamble g = coin_flip();
    const RateSpectrum spec(g, 2001);
    for (double alpha : {0.15, 0.4, 0.75}) {
        double best = -1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double v = spec.v0() + (spec.v1() - spec.v0()) * i / 4000.0;
            best = std::max(best, alpha * v - spec.failure_rate(v).h);
        }
        CHECK(best == doctest::Approx(kappa(g, alpha).kappa).epsilon(1e-6));
    }
}

TEST_CASE("diffusion parameters of the coin flip") {
    const DiffusionParams p = diffusion_params(coin_flip());
    const double s1 = std::log(1.1), s2 = std::log(11.0 / 12.0);
    const double v0 = 0.5 * (s1 + s2);
    const double D = 0.5 * (0.5 * (s1 * s1 + s2 * s2) - v0 * v0);
    CHECK(p.lambda_kelly == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(p.v0 == doctest::Approx(v0).epsilon(1e-9));
    CHECK(p.D == doctest::Approx(D).epsilon(1e-9));
    CHECK(p.v0 == doctest::Approx(0.0041494).epsilon(1e-4));
    CHECK(p.D == doctest::Approx(0.0041551).epsilon(1e-4));

    CHECK(diffusion_params(Gamble({1.2}, {1.0})).D == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(diffusion_params(Gamble({0.9, 1.0}, {0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("fraction slope at alpha 0 matches the drift/diffusion expansion") {
    const Gamble g = coin_flip();
    const double lamK = optimal_fraction(g, 0.0);
    const double da = 1e-4;
    const double lhs = (optimal_fraction(g, da) - optimal_fraction(g, -da)) / (2.0 * da);
    const double dl = 1e-4;
    const double Dp = (log_growth_halfvar(g, lamK + dl) - log_growth_halfvar(g, lamK - dl)) / (2.0 * dl);
    const double v0pp = (log_growth_drift(g, lamK + dl) - 2.0 * log_growth_drift(g, lamK) +
                         log_growth_drift(g, lamK - dl)) /
                        (dl * dl);
    CHECK(lhs == doctest::Approx(-Dp / v0pp).epsilon(1e-3));
}

TEST_CASE("rate spectrum tabulation and accessors") {
    const Gamble g = coin_flip();
    const RateSpectrum spec(g, 1001);
    CHECK(spec.worst_convexity_defect() >= -1e-9);
    CHECK(spec.v0() <= spec.v1());
    CHECK(spec.v0() == doctest::Approx(kappa_prime(g, 0.0)).epsilon(1e-12));
    CHECK(spec.v1() == doctest::Approx(kappa_prime(g, 1.0)).epsilon(1e-12));
    CHECK(spec.kappa_at(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spec.kappa_at(1.0) == doctest::Approx(std::log(1.025)).epsilon(1e-12));
    CHECK(spec.kappa_at(0.4035) == doctest::Approx(kappa(g, 0.4035).kappa).epsilon(1e-7));
    CHECK(spec.kappa_prime_at(0.4035) == doctest::Approx(kappa_prime(g, 0.4035)).epsilon(1e-5));

    const double v = 0.5 * (spec.v0() + spec.v1());
    const double a = spec.alpha_for_slope(v);
    CHECK(spec.kappa_prime_at(a) == doctest::Approx(v).epsilon(1e-10));
    CHECK(spec.failure_rate(v).h == doctest::Approx(failure_rate_h(g, v).h).epsilon(1e-7));

    // lambda* is nondecreasing in alpha for this gamble (regression, not a theorem)
    for (std::size_t i = 1; i < spec.lambda_stars().size(); ++i)
        CHECK(spec.lambda_stars()[i] >= spec.lambda_stars()[i - 1] - 1e-7);
}

TEST_CASE("rate spectrum csv header and shape") {
    const RateSpectrum spec(coin_flip(), 11);
    std::ostringstream out;
    spec.write_csv(out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,lambda_star,kappa,kappa_prime");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 11);
}
