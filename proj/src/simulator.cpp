#include "kelly/simulator.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "kelly/philox.hpp"

namespace kelly {

double step(double x, double lambda, int j, const Gamble& g) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("step: fraction must lie in [0,1]");
    if (j < 0 || static_cast<std::size_t>(j) >= g.outcomes())
        throw std::out_of_range("step: outcome index");
    return g.effective_gain(static_cast<std::size_t>(j), lambda) * x;
}

Strategy Strategy::idle() {
    Strategy s;
    s.kind_ = Kind::Idle;
    return s;
}

Strategy Strategy::all_in() {
    Strategy s;
    s.kind_ = Kind::AllIn;
    s.lambda_ = 1.0;
    return s;
}

Strategy Strategy::fixed(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("Strategy::fixed: fraction must lie in [0,1]");
    Strategy s;
    s.kind_ = Kind::Fixed;
    s.lambda_ = lambda;
    return s;
}

Strategy Strategy::policy(std::shared_ptr<const DpSolution> solution) {
    if (!solution) throw std::invalid_argument("Strategy::policy: null solution");
    if (!solution->has_all_policies())
        throw std::invalid_argument("Strategy::policy: solution lacks per-round fraction rows");
    Strategy s;
    s.kind_ = Kind::Policy;
    s.solution_ = std::move(solution);
    return s;
}

Strategy Strategy::blend(Strategy base0, Strategy base1, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("Strategy::blend: t must lie in [0,1]");
    Strategy s;
    s.kind_ = Kind::Blend;
    s.t_ = t;
    s.children_.push_back(std::make_shared<Strategy>(std::move(base0)));
    s.children_.push_back(std::make_shared<Strategy>(std::move(base1)));
    return s;
}

bool Strategy::has_blend() const {
    if (kind_ == Kind::Blend) return true;
    for (const auto& c : children_)
        if (c->has_blend()) return true;
    return false;
}

int Strategy::min_horizon() const {
    int h = INT_MAX;
    if (kind_ == Kind::Policy) h = solution_->rounds();
    for (const auto& c : children_) h = std::min(h, c->min_horizon());
    return h;
}

std::string Strategy::describe() const {
    char buf[64];
    switch (kind_) {
        case Kind::Idle: return "idle";
        case Kind::AllIn: return "allin";
        case Kind::Fixed:
            std::snprintf(buf, sizeof(buf), "fixed:%g", lambda_);
            return buf;
        case Kind::Policy: return "optimal";
        case Kind::Blend:
            std::snprintf(buf, sizeof(buf), "blend(%g)", t_);
            return std::string(buf) + "[" + children_[0]->describe() + "," +
                   children_[1]->describe() + "]";
    }
    return "?";
}

PathRunner::PathRunner(Strategy s, double x_init)
    : strategy_(std::move(s)), q_(std::log(x_init)) {
    if (!(x_init > 0.0)) throw std::domain_error("PathRunner: initial capital must be positive");
    if (strategy_.kind() == Strategy::Kind::Blend) {
        children_.emplace_back(strategy_.base(0), x_init);
        children_.emplace_back(strategy_.base(1), x_init);
    }
}

double PathRunner::capital() const { return std::exp(q_); }

double PathRunner::plan(int k) {
    switch (strategy_.kind()) {
        case Strategy::Kind::Idle: planned_ = 0.0; break;
        case Strategy::Kind::AllIn: planned_ = 1.0; break;
        case Strategy::Kind::Fixed: planned_ = strategy_.fixed_fraction(); break;
        case Strategy::Kind::Policy: planned_ = strategy_.solution()->policy_from_rows(k, q_); break;
        case Strategy::Kind::Blend: {
            const double t = strategy_.blend_t();
            const double l0 = children_[0].plan(k);
            const double l1 = children_[1].plan(k);
            const double x0 = children_[0].capital();
            const double x1 = children_[1].capital();
            const double xt = capital();
            planned_ = xt > 0.0 ? ((1.0 - t) * x0 * l0 + t * x1 * l1) / xt : 0.0;
            planned_ = std::clamp(planned_, 0.0, 1.0);
            break;
        }
    }
    return planned_;
}

void PathRunner::commit(const Gamble& g, int j) {
    for (auto& c : children_) c.commit(g, j);
    q_ += std::log1p(planned_ * (g.gains[static_cast<std::size_t>(j)] - 1.0));
}

ExactDistribution ExactDistribution::fixed_fraction(const Gamble& g, double lambda, double x_init,
                                                    int n) {
    if (g.outcomes() != 2)
        throw std::invalid_argument("exact_fixed_fraction: needs exactly two outcomes");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("exact_fixed_fraction: fraction must lie in [0,1]");
    if (!(x_init > 0.0)) throw std::domain_error("exact_fixed_fraction: x_init must be positive");
    if (n < 0) throw std::invalid_argument("exact_fixed_fraction: n must be nonnegative");

    const double s1 = std::log(g.effective_gain(0, lambda));
    const double s2 = std::log(g.effective_gain(1, lambda));
    const double lp1 = std::log(g.probs[0]);
    const double lp2 = std::log(g.probs[1]);
    const double lx = std::log(x_init);

    ExactDistribution d;
    d.log_x_init = lx;
    d.log_support.resize(n + 1);
    d.log_weight.resize(n + 1);
    const double lgn = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
        d.log_weight[k] = lgn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp1 +
                          (n - k) * lp2;
        d.log_support[k] = lx + k * s1 + (n - k) * s2;
    }
    if (s1 < s2) {
        std::reverse(d.log_support.begin(), d.log_support.end());
        std::reverse(d.log_weight.begin(), d.log_weight.end());
    }
    return d;
}

namespace {

double log_sum_exp(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return -std::numeric_limits<double>::infinity();
    double m = v[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) m = std::max(m, v[i]);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

}  // namespace

double ExactDistribution::median() const {
    double cum = 0.0;
    for (std::size_t k = 0; k < log_support.size(); ++k) {
        cum += std::exp(log_weight[k]);
        if (cum >= 0.5) return std::exp(log_support[k]);
    }
    return std::exp(log_support.back());
}

double ExactDistribution::mean() const {
    std::vector<double> terms(log_support.size());
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = log_weight[k] + log_support[k];
    return std::exp(log_sum_exp(terms, 0, terms.size()));
}

double ExactDistribution::tail_prob(double threshold) const {
    if (!(threshold > 0.0)) return 1.0;
    const double lt = std::log(threshold);
    const auto it = std::upper_bound(log_support.begin(), log_support.end(), lt);
    const std::size_t lo = static_cast<std::size_t>(it - log_support.begin());
    const double lse = log_sum_exp(log_weight, lo, log_weight.size());
    return std::isfinite(lse) ? std::min(1.0, std::exp(lse)) : 0.0;
}

double ExactDistribution::cdf(double value) const {
    if (!(value > 0.0)) return 0.0;
    const double lv = std::log(value);
    const auto it = std::upper_bound(log_support.begin(), log_support.end(), lv);
    const std::size_t hi = static_cast<std::size_t>(it - log_support.begin());
    const double lse = log_sum_exp(log_weight, 0, hi);
    return std::isfinite(lse) ? std::min(1.0, std::exp(lse)) : 0.0;
}

ExactSummary ExactDistribution::summarize(const std::vector<double>& thresholds) const {
    ExactSummary s;
    s.median = median();
    s.mean = mean();
    s.thresholds = thresholds;
    s.tail_probs.reserve(thresholds.size());
    for (double t : thresholds) s.tail_probs.push_back(tail_prob(t));
    return s;
}

ExactSummary exact_fixed_fraction(const Gamble& g, double lambda, double x_init, int n,
                                  const std::vector<double>& thresholds) {
    return ExactDistribution::fixed_fraction(g, lambda, x_init, n).summarize(thresholds);
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sorted_log_finals,
                                             std::uint64_t seed)
    : logs_(std::move(sorted_log_finals)), seed_(seed) {}

double EmpiricalDistribution::quantile(double p) const {
    if (logs_.empty()) throw std::logic_error("quantile of an empty distribution");
    const double pos = std::clamp(p, 0.0, 1.0) * (logs_.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double w = pos - i;
    const double lq = (i + 1 < logs_.size()) ? logs_[i] + w * (logs_[i + 1] - logs_[i]) : logs_[i];
    return std::exp(lq);
}

double EmpiricalDistribution::median() const { return quantile(0.5); }

double EmpiricalDistribution::mean() const {
    long double s = 0.0;
    for (double l : logs_) s += std::exp(static_cast<long double>(l));
    return static_cast<double>(s / logs_.size());
}

double EmpiricalDistribution::tail_prob(double threshold) const {
    if (!(threshold > 0.0)) return 1.0;
    const double lt = std::log(threshold);
    const auto it = std::upper_bound(logs_.begin(), logs_.end(), lt);
    return static_cast<double>(logs_.end() - it) / static_cast<double>(logs_.size());
}

double EmpiricalDistribution::tail_se(double threshold) const {
    const double p = tail_prob(threshold);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(logs_.size()));
}

EmpiricalDistribution::Histogram EmpiricalDistribution::log_histogram() const {
    Histogram h;
    if (logs_.empty()) return h;
    const double lo = logs_.front(), hi = logs_.back();
    const double iqr = std::log(quantile(0.75)) - std::log(quantile(0.25));
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(logs_.size()));
    if (!(width > 0.0)) width = std::max(hi - lo, 1e-9);
    const std::size_t bins = std::max<std::size_t>(1, static_cast<std::size_t>((hi - lo) / width) + 1);
    h.bin_left.resize(bins);
    h.bin_right.resize(bins);
    h.density.assign(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
        h.bin_left[b] = lo + b * width;
        h.bin_right[b] = h.bin_left[b] + width;
    }
    for (double l : logs_) {
        std::size_t b = static_cast<std::size_t>((l - lo) / width);
        if (b >= bins) b = bins - 1;
        h.density[b] += 1.0;
    }
    const double norm = 1.0 / (width * static_cast<double>(logs_.size()));
    for (double& d : h.density) d *= norm;
    return h;
}

void EmpiricalDistribution::write_tail_csv(std::ostream& out, double scale) const {
    out << "x0,cum_prob\n";
    const std::size_t n = logs_.size();
    const std::size_t rows = std::min<std::size_t>(n, 2000);
    char line[96];
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = rows == 1 ? 0 : r * (n - 1) / (rows - 1);
        const double x0 = std::exp(logs_[i]) * scale;
        const double cum = static_cast<double>(n - 1 - i) / static_cast<double>(n);
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", x0, cum);
        out << line;
    }
}

void EmpiricalDistribution::write_histogram_csv(std::ostream& out, double scale) const {
    const Histogram h = log_histogram();
    out << "bin_left,bin_right,density\n";
    const double shift = std::log(scale);
    char line[128];
    for (std::size_t b = 0; b < h.bin_left.size(); ++b) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", std::exp(h.bin_left[b] + shift),
                      std::exp(h.bin_right[b] + shift), h.density[b]);
        out << line;
    }
}

std::string EmpiricalDistribution::summary_json(const std::vector<double>& thresholds,
                                                double scale) const {
    nlohmann::ordered_json j;
    j["paths"] = logs_.size();
    j["seed"] = seed_;
    j["median"] = median() * scale;
    j["mean"] = mean() * scale;
    j["tail_probs"] = nlohmann::ordered_json::array();
    for (double t : thresholds) {
        const double t_raw = t / scale;
        j["tail_probs"].push_back({{"threshold", t},
                                   {"prob", tail_prob(t_raw)},
                                   {"se", tail_se(t_raw)}});
    }
    return j.dump(2);
}

unsigned simulation_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("KELLY_EXT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) return std::min<unsigned>(static_cast<unsigned>(cap), hw);
    }
    return hw;
}

namespace {

inline int draw_outcome(const double* probs, std::size_t n, double u) {
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        cum += probs[j];
        if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(n - 1);
}

void run_paths(const Gamble& g, const Strategy& strategy, double x_init, int n,
               std::uint64_t seed, std::size_t lo, std::size_t hi, double* out) {
    const std::size_t jn = g.outcomes();
    const double* probs = g.probs.data();
    const double q0 = std::log(x_init);

    if (strategy.kind() == Strategy::Kind::Idle || strategy.kind() == Strategy::Kind::AllIn ||
        strategy.kind() == Strategy::Kind::Fixed) {
        const double lam = strategy.kind() == Strategy::Kind::AllIn ? 1.0
                           : strategy.kind() == Strategy::Kind::Idle ? 0.0
                                                                     : strategy.fixed_fraction();
        std::vector<double> shift(jn);
        for (std::size_t j = 0; j < jn; ++j) shift[j] = std::log1p(lam * (g.gains[j] - 1.0));
        for (std::size_t p = lo; p < hi; ++p) {
            double q = q0;
            for (int k = n; k >= 1; --k) {
                const double u = Philox::uniform(seed, p, static_cast<std::uint32_t>(k));
                q += shift[static_cast<std::size_t>(draw_outcome(probs, jn, u))];
            }
            out[p] = q;
        }
        return;
    }

    if (strategy.kind() == Strategy::Kind::Policy) {
        const DpSolution* sol = strategy.solution();
        std::vector<double> edge(jn);
        for (std::size_t j = 0; j < jn; ++j) edge[j] = g.gains[j] - 1.0;
        for (std::size_t p = lo; p < hi; ++p) {
            double q = q0;
            for (int k = n; k >= 1; --k) {
                const double u = Philox::uniform(seed, p, static_cast<std::uint32_t>(k));
                const int j = draw_outcome(probs, jn, u);
                const double lam = sol->policy_from_rows(k, q);
                q += std::log1p(lam * edge[static_cast<std::size_t>(j)]);
            }
            out[p] = q;
        }
        return;
    }

    for (std::size_t p = lo; p < hi; ++p) {
        PathRunner runner(strategy, x_init);
        for (int k = n; k >= 1; --k) {
            const double u = Philox::uniform(seed, p, static_cast<std::uint32_t>(k));
            const int j = draw_outcome(probs, jn, u);
            runner.plan(k);
            runner.commit(g, j);
        }
        out[p] = runner.log_capital();
    }
}

}  // namespace

EmpiricalDistribution simulate(const Gamble& g, const Strategy& strategy, double x_init, int n,
                               std::size_t paths, std::uint64_t seed) {
    if (!(x_init > 0.0)) throw std::domain_error("simulate: x_init must be positive");
    if (n < 0) throw std::invalid_argument("simulate: n must be nonnegative");
    if (paths == 0) throw std::invalid_argument("simulate: need at least one path");
    if (strategy.min_horizon() < n)
        throw std::invalid_argument("simulate: policy solution horizon is shorter than n");

    std::vector<double> logs(paths);
    const unsigned threads = std::min<unsigned>(simulation_threads(),
                                                static_cast<unsigned>((paths + 4095) / 4096));
    if (threads <= 1) {
        run_paths(g, strategy, x_init, n, seed, 0, paths, logs.data());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] { run_paths(g, strategy, x_init, n, seed, lo, hi, logs.data()); });
        }
        for (auto& th : pool) th.join();
    }
    std::sort(logs.begin(), logs.end());
    return EmpiricalDistribution(std::move(logs), seed);
}

CompetitiveReport competitive_check(const Gamble& g, const Strategy& reference,
                                    const Strategy& challenger, double x_init, int n,
                                    std::size_t paths, std::uint64_t seed,
                                    const std::vector<double>& ratio_levels) {
    if (reference.min_horizon() < n || challenger.min_horizon() < n)
        throw std::invalid_argument("competitive_check: policy solution horizon is shorter than n");
    const std::size_t jn = g.outcomes();
    const double* probs = g.probs.data();

    CompetitiveReport rep;
    rep.ratio_levels = ratio_levels;
    rep.tail_freq.assign(ratio_levels.size(), 0.0);
    rep.tail_se.assign(ratio_levels.size(), 0.0);
    rep.paths = paths;

    double mean = 0.0, m2 = 0.0;
    std::vector<std::size_t> counts(ratio_levels.size(), 0);
    for (std::size_t p = 0; p < paths; ++p) {
        PathRunner ref(reference, x_init);
        PathRunner ch(challenger, x_init);
        for (int k = n; k >= 1; --k) {
            const double u = Philox::uniform(seed, p, static_cast<std::uint32_t>(k));
            const int j = draw_outcome(probs, jn, u);
            ref.plan(k);
            ch.plan(k);
            ref.commit(g, j);
            ch.commit(g, j);
        }
        const double ratio = (1.0 + ch.capital()) / (1.0 + ref.capital());
        const double delta = ratio - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (ratio - mean);
        for (std::size_t a = 0; a < ratio_levels.size(); ++a)
            if (ratio >= ratio_levels[a]) ++counts[a];
    }
    rep.mean_ratio = mean;
    const double var = paths > 1 ? m2 / static_cast<double>(paths - 1) : 0.0;
    rep.se_mean = std::sqrt(var / static_cast<double>(paths));
    for (std::size_t a = 0; a < ratio_levels.size(); ++a) {
        const double f = static_cast<double>(counts[a]) / static_cast<double>(paths);
        rep.tail_freq[a] = f;
        rep.tail_se[a] = std::sqrt(f * (1.0 - f) / static_cast<double>(paths));
    }
    return rep;
}

}  // namespace kelly
