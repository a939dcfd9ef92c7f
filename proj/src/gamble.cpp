#include "kelly/gamble.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kelly {

namespace {

void validate(const std::vector<double>& gains, const std::vector<double>& probs) {
    if (gains.empty() || probs.size() != gains.size())
        throw std::invalid_argument("gamble: gains and probs must be non-empty and equally sized");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw std::invalid_argument("gamble: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("gamble: probabilities must sum to 1");
    for (double a : gains) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("gamble: gain factors must be positive");
    }
}

}  // namespace

Gamble::Gamble(std::vector<double> gains_, std::vector<double> probs_)
    : gains(std::move(gains_)), probs(std::move(probs_)) {
    validate(gains, probs);
}

double Gamble::mean_gain() const {
    double m = 0.0;
    for (std::size_t j = 0; j < gains.size(); ++j) m += probs[j] * gains[j];
    return m;
}

std::string Gamble::to_json() const {
    nlohmann::ordered_json j;
    j["gains"] = gains;
    j["probs"] = probs;
    return j.dump();
}

Gamble Gamble::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return Gamble(j.at("gains").get<std::vector<double>>(),
                  j.at("probs").get<std::vector<double>>());
}

std::uint64_t gamble_hash(const Gamble& g) {
    char buf[64];
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const char* s) {
        for (; *s; ++s) {
            h ^= static_cast<unsigned char>(*s);
            h *= 1099511628211ull;
        }
    };
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g:%.17g;", g.gains[j], g.probs[j]);
        mix(buf);
    }
    return h;
}

double isoelastic_utility(double x, double alpha) {
    if (!(x > 0.0)) throw std::domain_error("isoelastic_utility: x must be positive");
    if (alpha > 1.0) throw std::invalid_argument("isoelastic_utility: alpha must be <= 1");
    if (alpha == 0.0) return std::log(x);
    return std::expm1(alpha * std::log(x)) / alpha;
}

double expected_utility(const Gamble& g, double alpha, double lambda) {
    double u = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j)
        u += g.probs[j] * isoelastic_utility(g.effective_gain(j, lambda), alpha);
    return u;
}

double expected_utility_derivative(const Gamble& g, double alpha, double lambda) {
    // sum_j p_j (a_j - 1) (1 + lambda (a_j - 1))^(alpha - 1)
    double d = 0.0;
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const double edge = g.gains[j] - 1.0;
        const double w = g.effective_gain(j, lambda);
        if (!(w > 0.0)) throw std::domain_error("expected_utility_derivative: ruinous fraction");
        d += g.probs[j] * edge * std::pow(w, alpha - 1.0);
    }
    return d;
}

double optimal_fraction(const Gamble& g, double alpha) {
    if (alpha > 1.0) throw std::invalid_argument("optimal_fraction: alpha must be <= 1");
    if (expected_utility_derivative(g, alpha, 0.0) <= 0.0) return 0.0;
    // U' can diverge at lambda = 1 when some 1 + (a_j - 1) is tiny; probe just inside.
    double hi = 1.0;
    bool shrink = false;
    for (std::size_t j = 0; j < g.outcomes(); ++j)
        if (g.effective_gain(j, 1.0) < 1e-300) shrink = true;
    if (!shrink && expected_utility_derivative(g, alpha, 1.0) >= 0.0) return 1.0;
    double lo = 0.0;
    if (shrink) hi = 1.0 - 1e-12;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (expected_utility_derivative(g, alpha, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

const char* to_string(GambleClass c) {
    switch (c) {
        case GambleClass::Unfavorable: return "unfavorable";
        case GambleClass::Intermediate: return "intermediate";
        case GambleClass::Attractive: return "attractive";
    }
    return "?";
}

Classification classify(const Gamble& g, double alpha) {
    double edge0 = 0.0;  // U'(0) up to a positive factor
    for (std::size_t j = 0; j < g.outcomes(); ++j) edge0 += g.probs[j] * (g.gains[j] - 1.0);
    if (edge0 <= 0.0) return {GambleClass::Unfavorable, 0.0};

    double edge1 = 0.0;  // U'(1): sum_j p_j (a_j^alpha - a_j^(alpha-1))
    for (std::size_t j = 0; j < g.outcomes(); ++j) {
        const double a = g.gains[j];
        edge1 += g.probs[j] * (std::pow(a, alpha) - std::pow(a, alpha - 1.0));
    }
    if (edge1 >= 0.0) return {GambleClass::Attractive, 1.0};
    return {GambleClass::Intermediate, optimal_fraction(g, alpha)};
}

AttractivenessThreshold attractiveness_threshold(const Gamble& g) {
    auto edge1 = [&g](double alpha) {
        double e = 0.0;
        for (std::size_t j = 0; j < g.outcomes(); ++j) {
            const double a = g.gains[j];
            e += g.probs[j] * (std::pow(a, alpha) - std::pow(a, alpha - 1.0));
        }
        return e;
    };
    if (edge1(0.0) >= 0.0) return {AttractivenessThreshold::Kind::AttractiveEverywhere, 0.0};
    if (edge1(1.0) <= 0.0)
        return {AttractivenessThreshold::Kind::AttractiveNowhere,
                std::numeric_limits<double>::quiet_NaN()};
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-6 * 0.5) {
        const double mid = 0.5 * (lo + hi);
        if (edge1(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {AttractivenessThreshold::Kind::Interior, 0.5 * (lo + hi)};
}

}  // namespace kelly
