#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kelly {

// One multiplicative betting round: outcome j turns a staked unit into
// gains[j] units with probability probs[j].  Unstaked money is kept as is.
struct Gamble {
    std::vector<double> gains;
    std::vector<double> probs;

    Gamble(std::vector<double> gains_, std::vector<double> probs_);

    std::size_t outcomes() const { return gains.size(); }

    // a-bar = sum_j p_j a_j
    double mean_gain() const;
    bool favorable() const { return mean_gain() > 1.0; }

    // gain factor of total in-game capital when betting fraction lambda
    double effective_gain(std::size_t j, double lambda) const {
        return 1.0 + lambda * (gains[j] - 1.0);
    }

    std::string to_json() const;
    static Gamble from_json(const std::string& text);

    bool operator==(const Gamble&) const = default;
};

// Stable identifier for checkpoint keys; FNV-1a over the canonical JSON.
std::uint64_t gamble_hash(const Gamble& g);

// u_alpha(x) = (x^alpha - 1)/alpha, with the alpha -> 0 limit ln(x).
// Risk aversion is 1 - alpha; alpha must be <= 1 and x > 0.
double isoelastic_utility(double x, double alpha);

// U_alpha(lambda) = sum_j p_j u_alpha(1 + lambda (a_j - 1))
double expected_utility(const Gamble& g, double alpha, double lambda);

// dU_alpha/dlambda; decreasing in lambda (U_alpha is concave).
double expected_utility_derivative(const Gamble& g, double alpha, double lambda);

// argmax over [0,1] of U_alpha; interior roots by bisection on the derivative.
double optimal_fraction(const Gamble& g, double alpha);

enum class GambleClass { Unfavorable, Intermediate, Attractive };

struct Classification {
    GambleClass kind;
    double lambda_star;
};

const char* to_string(GambleClass c);

// Unfavorable  : U'(0) <= 0, best fraction 0
// Attractive   : U'(1) >= 0, best fraction 1
// Intermediate : interior stationary point
Classification classify(const Gamble& g, double alpha);

struct AttractivenessThreshold {
    enum class Kind { Interior, AttractiveEverywhere, AttractiveNowhere };
    Kind kind;
    double alpha;  // threshold when Interior, 0 when AttractiveEverywhere
};

// Smallest alpha in [0,1] at which betting everything becomes optimal.
AttractivenessThreshold attractiveness_threshold(const Gamble& g);

}  // namespace kelly
