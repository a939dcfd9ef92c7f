#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kelly/gamble.hpp"

namespace kelly {

// Uniform grid in q = ln x.
struct GridSpec {
    double q_min;
    double q_max;
    int points;

    GridSpec(double q_min_, double q_max_, int points_);

    double step() const { return (q_max - q_min) / (points - 1); }
    double q(int i) const { return q_min + step() * i; }
    double x(int i) const { return std::exp(q(i)); }

    bool operator==(const GridSpec&) const = default;
};

// Expected terminal utility with `round` gambles remaining, sampled on the
// grid.  Off-grid queries use the analytic tails: linear through the origin
// below, ln x + round * v0 above.  The round-0 function is evaluated in
// closed form everywhere.
class ValueFunction {
public:
    ValueFunction(const GridSpec& grid, int round, std::vector<double> values, double v0,
                  bool analytic_terminal = false);

    int round() const { return round_; }
    double tail_drift() const { return v0_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return f_; }
    const std::vector<double>& node_x() const { return x_; }

    double eval(double x) const { return eval_logx(x, std::log(x)); }

    // q must equal ln x; passing it avoids a log in hot loops.
    double eval_logx(double x, double q) const {
        if (analytic_terminal_) return std::log1p(x);
        if (x >= x_.back()) {
            if (x == x_.back()) return f_.back();
            return q + static_cast<double>(round_) * v0_;
        }
        if (x <= x_.front()) return slope0_ * x;
        int i = static_cast<int>((q - grid_.q_min) * inv_step_);
        if (i < 0) i = 0;
        const int last_cell = grid_.points - 2;
        if (i > last_cell) i = last_cell;
        const double dx = x - x_[i];
        return f_[i] + dx * (m_[i] + dx * c_[i]);
    }

    // left-end slope of the interpolation cell containing x (diagnostics)
    double cell_slope(int i) const { return m_[i]; }
    double cell_curvature(int i) const { return c_[i]; }

private:
    GridSpec grid_;
    int round_;
    double v0_;
    bool analytic_terminal_;
    double inv_step_;
    double slope0_;
    std::vector<double> x_, f_, m_, c_;
};

ValueFunction terminal_value(const GridSpec& grid);

struct BellmanRow {
    std::vector<double> values;
    std::vector<double> policy;
};

// One backward-induction sweep: at every node maximize the expected
// next-round value over the betting fraction.
BellmanRow bellman_step(const ValueFunction& prev, const Gamble& g);

// Lower nodes that break concavity in x (smallest reduction first) until all
// second differences are nonpositive.  Values never increase.  Returns the
// number of adjusted nodes; sets *converged to false if the pass limit hits.
int enforce_concavity(const std::vector<double>& xs, std::vector<double>& f,
                      bool* converged = nullptr);

struct PolicyQuery {
    double value;
    double lambda;
};

// Maximize sum_j p_j prev((1 + lambda (a_j - 1)) x) over lambda in [0,1].
PolicyQuery maximize_step(const ValueFunction& prev, const Gamble& g, double x);

struct SolveOptions {
    bool keep_values = true;    // retain every round's grid values
    bool keep_policies = true;  // retain every round's fraction rows
};

struct SolveDiagnostics {
    bool grid_span_warning = false;  // q-range shorter than rounds * kappa'(1)
    bool concavity_converged = true;
    long total_clips = 0;
    std::string message;
};

using PolicyTable = std::vector<std::vector<double>>;

class DpSolution {
public:
    DpSolution(Gamble g, GridSpec grid, int rounds, double v0, SolveOptions opts);

    const Gamble& gamble() const { return gamble_; }
    const GridSpec& grid() const { return grid_; }
    int rounds() const { return rounds_; }
    double tail_drift() const { return v0_; }
    const SolveDiagnostics& diagnostics() const { return diag_; }
    bool has_all_values() const { return keep_.keep_values; }
    bool has_all_policies() const { return keep_.keep_policies; }

    // grid values of f_k (k = rounds remaining)
    const std::vector<double>& value_row(int k) const;
    // fraction row for round k, k in [1, rounds]
    const std::vector<double>& policy_row(int k) const;
    const PolicyTable& policy_rows() const { return policies_; }

    ValueFunction value_function(int k) const;

    double eval(int k, double x) const;
    double eval_final(double x) const;

    // Re-runs the one-step maximization at exactly x against f_{k-1}.
    double query_policy(int k, double x) const;

    // Fast path for simulation: interpolate the stored fraction row at q = ln x.
    double policy_from_rows(int k, double q) const;

    void write_round_csv(std::ostream& out, int k) const;

    void save(const std::string& path) const;
    static DpSolution load(const std::string& path);
    bool matches(const Gamble& g, int rounds, const GridSpec& grid) const;

private:
    friend DpSolution solve(const Gamble&, int, const GridSpec&, SolveOptions);

    Gamble gamble_;
    GridSpec grid_;
    int rounds_;
    double v0_;
    SolveOptions keep_;
    std::vector<std::vector<double>> values_;  // [0..rounds] or {f_0, f_rounds}
    PolicyTable policies_;                     // [k-1] -> row for round k when kept
    SolveDiagnostics diag_;
};

DpSolution solve(const Gamble& g, int rounds, const GridSpec& grid, SolveOptions opts = {});

}  // namespace kelly
