#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "kelly/dp.hpp"
#include "kelly/gamble.hpp"

namespace kelly {

// Capital after one round: stake fraction `lambda` of x on outcome j.
double step(double x, double lambda, int j, const Gamble& g);

// Immutable betting rule.  Policy-driven strategies read the fraction rows of
// a dynamic-programming solution; blended strategies mix two rules so that
// the blended capital is the exact convex combination of its parents', round
// by round.
class Strategy {
public:
    enum class Kind { Idle, AllIn, Fixed, Policy, Blend };

    static Strategy idle();
    static Strategy all_in();
    static Strategy fixed(double lambda);
    static Strategy policy(std::shared_ptr<const DpSolution> solution);
    static Strategy blend(Strategy base0, Strategy base1, double t);

    Kind kind() const { return kind_; }
    double fixed_fraction() const { return lambda_; }
    double blend_t() const { return t_; }
    const DpSolution* solution() const { return solution_.get(); }
    const Strategy& base(int i) const { return *children_[i]; }
    bool has_blend() const;
    int min_horizon() const;  // largest usable round count (INT_MAX if unconstrained)
    std::string describe() const;

private:
    Strategy() = default;
    Kind kind_ = Kind::Idle;
    double lambda_ = 0.0;
    double t_ = 0.0;
    std::shared_ptr<const DpSolution> solution_;
    std::vector<std::shared_ptr<const Strategy>> children_;
};

// Per-path runner; capital is carried as q = ln x.  Keeps its own copy of
// the rule, so temporaries may be passed in.
class PathRunner {
public:
    PathRunner(Strategy s, double x_init);

    // fraction prescribed with k rounds remaining (plan, then commit)
    double plan(int k);
    void commit(const Gamble& g, int j);

    double log_capital() const { return q_; }
    double capital() const;

private:
    Strategy strategy_;
    double q_;
    double planned_ = 0.0;
    std::vector<PathRunner> children_;
};

struct ExactSummary {
    double median = 0.0;
    double mean = 0.0;
    std::vector<double> thresholds;
    std::vector<double> tail_probs;  // P(final > threshold)
};

// Full outcome distribution of an n-round fixed-fraction game with two
// outcomes: support x * ag1^k ag2^(n-k) with binomial weights, in log space.
struct ExactDistribution {
    std::vector<double> log_support;  // ascending
    std::vector<double> log_weight;
    double log_x_init = 0.0;

    static ExactDistribution fixed_fraction(const Gamble& g, double lambda, double x_init, int n);

    double median() const;
    double mean() const;
    double tail_prob(double threshold) const;  // P(final > threshold)
    double cdf(double value) const;            // P(final <= value)
    ExactSummary summarize(const std::vector<double>& thresholds) const;
};

ExactSummary exact_fixed_fraction(const Gamble& g, double lambda, double x_init, int n,
                                  const std::vector<double>& thresholds);

// Sorted Monte Carlo finals; reproducible given (seed, strategy, gamble, n, x).
class EmpiricalDistribution {
public:
    EmpiricalDistribution(std::vector<double> sorted_log_finals, std::uint64_t seed);

    std::size_t paths() const { return logs_.size(); }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& sorted_log_finals() const { return logs_; }

    double median() const;
    double mean() const;
    double quantile(double p) const;
    double tail_prob(double threshold) const;
    double tail_se(double threshold) const;

    struct Histogram {
        std::vector<double> bin_left;   // in ln x
        std::vector<double> bin_right;
        std::vector<double> density;    // per unit ln x
    };
    Histogram log_histogram() const;  // Freedman-Diaconis bin width

    void write_tail_csv(std::ostream& out, double scale = 1.0) const;       // x0,cum_prob
    void write_histogram_csv(std::ostream& out, double scale = 1.0) const;  // bin_left,bin_right,density
    std::string summary_json(const std::vector<double>& thresholds, double scale = 1.0) const;

private:
    std::vector<double> logs_;
    std::uint64_t seed_;
};

EmpiricalDistribution simulate(const Gamble& g, const Strategy& strategy, double x_init, int n,
                               std::size_t paths, std::uint64_t seed);

struct CompetitiveReport {
    double mean_ratio = 0.0;  // E[(1 + final(challenger)) / (1 + final(reference))]
    double se_mean = 0.0;
    std::vector<double> ratio_levels;
    std::vector<double> tail_freq;  // Pr[ratio >= level]
    std::vector<double> tail_se;
    std::size_t paths = 0;
};

// Common-random-number comparison of a challenger against the reference
// (the log-optimal rule in the intended use).
CompetitiveReport competitive_check(const Gamble& g, const Strategy& reference,
                                    const Strategy& challenger, double x_init, int n,
                                    std::size_t paths, std::uint64_t seed,
                                    const std::vector<double>& ratio_levels);

// Thread cap from KELLY_EXT_THREADS (>=1); hardware concurrency otherwise.
unsigned simulation_threads();

}  // namespace kelly
