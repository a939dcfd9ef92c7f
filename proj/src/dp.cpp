#include "kelly/dp.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "kelly/rates.hpp"

namespace kelly {

GridSpec::GridSpec(double q_min_, double q_max_, int points_)
    : q_min(q_min_), q_max(q_max_), points(points_) {
    if (!(q_min < q_max)) throw std::invalid_argument("GridSpec: q_min must be below q_max");
    if (points < 16) throw std::invalid_argument("GridSpec: need at least 16 points");
}

ValueFunction::ValueFunction(const GridSpec& grid, int round, std::vector<double> values,
                             double v0, bool analytic_terminal)
    : grid_(grid),
      round_(round),
      v0_(v0),
      analytic_terminal_(analytic_terminal),
      inv_step_(1.0 / grid.step()),
      f_(std::move(values)) {
    const int n = grid_.points;
    if (static_cast<int>(f_.size()) != n)
        throw std::invalid_argument("ValueFunction: value count must match the grid");
    x_.resize(n);
    for (int i = 0; i < n; ++i) x_[i] = grid_.x(i);
    slope0_ = f_[0] / x_[0];

    // Cell quadratics: match both endpoint values and a left-end slope taken
    // as the mean of the adjacent chords, which keeps each cell concave when
    // the data is.
    m_.resize(n - 1);
    c_.resize(n - 1);
    double s_prev = slope0_;
    for (int i = 0; i + 1 < n; ++i) {
        const double dx = x_[i + 1] - x_[i];
        const double s = (f_[i + 1] - f_[i]) / dx;
        double m = 0.5 * (s_prev + s);
        const double lo = std::min(s_prev, s), hi = std::max(s_prev, s);
        m = std::clamp(m, lo, hi);
        m_[i] = m;
        c_[i] = (s - m) / dx;
        s_prev = s;
    }
}

ValueFunction terminal_value(const GridSpec& grid) {
    std::vector<double> values(grid.points);
    for (int i = 0; i < grid.points; ++i) values[i] = std::log1p(grid.x(i));
    return ValueFunction(grid, 0, std::move(values), 0.0, true);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

template <class F>
PolicyQuery maximize_fraction(F&& phi) {
    const double f0 = phi(0.0);
    const double f1 = phi(1.0);
    // Concave objective: a non-positive slope at an endpoint pins the maximum
    // there.  Two probe widths so that the sub-cell kink where a branch meets
    // the grid boundary cannot masquerade as a negative slope.
    if (phi(1e-7) <= f0 && phi(1e-3) <= f0) return {f0, 0.0};
    if (phi(1.0 - 1e-7) <= f1 && phi(1.0 - 1e-3) <= f1) return {f1, 1.0};
    double a = 0.0, b = 1.0;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int it = 0; it < 60; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = phi(d);
        }
    }
    PolicyQuery best = fc >= fd ? PolicyQuery{fc, c} : PolicyQuery{fd, d};
    if (f0 >= best.value) return {f0, 0.0};
    if (f1 > best.value) return {f1, 1.0};
    return best;
}

}  // namespace

BellmanRow bellman_step(const ValueFunction& prev, const Gamble& g) {
    const GridSpec& grid = prev.grid();
    const int n = grid.points;
    const std::size_t jn = g.outcomes();
    std::vector<double> edge(jn), prob(jn);
    for (std::size_t j = 0; j < jn; ++j) {
        edge[j] = g.gains[j] - 1.0;
        prob[j] = g.probs[j];
    }
    const std::vector<double>& xs = prev.node_x();

    BellmanRow out;
    out.values.resize(n);
    out.policy.resize(n);
    for (int i = 0; i < n; ++i) {
        const double xi = xs[i];
        const double qi = grid.q(i);
        auto phi = [&](double lam) {
            double v = 0.0;
            for (std::size_t j = 0; j < jn; ++j) {
                const double c = 1.0 + lam * edge[j];
                v += prob[j] * prev.eval_logx(xi * c, qi + std::log(c));
            }
            return v;
        };
        const PolicyQuery q = maximize_fraction(phi);
        out.values[i] = q.value;
        out.policy[i] = q.lambda;
    }
    return out;
}

int enforce_concavity(const std::vector<double>& xs, std::vector<double>& f, bool* converged) {
    const int n = static_cast<int>(f.size());
    if (converged) *converged = true;
    if (n < 3) return 0;

    // Left-to-right sweep: wherever the slope would increase, cap the next
    // node by the extension of the incoming chord.  Anomalies get swept into
    // the upper boundary, where the analytic tail takes over; interior nodes
    // are never touched by a downstream violation.
    int clips = 0;
    for (int pass = 0; pass < 50; ++pass) {
        int pass_clips = 0;
        for (int i = 1; i + 1 < n; ++i) {
            const double dxl = xs[i] - xs[i - 1];
            const double dxr = xs[i + 1] - xs[i];
            const double sl = (f[i] - f[i - 1]) / dxl;
            const double sr = (f[i + 1] - f[i]) / dxr;
            if (sr - sl <= 1e-13 * (1.0 + std::abs(f[i])) / std::min(dxl, dxr)) continue;
            f[i + 1] = f[i] + sl * dxr;
            ++pass_clips;
        }
        clips += pass_clips;
        if (pass_clips == 0) return clips;
    }
    if (converged) *converged = false;
    return clips;
}

PolicyQuery maximize_step(const ValueFunction& prev, const Gamble& g, double x) {
    auto phi = [&](double lam) {
        double v = 0.0;
        for (std::size_t j = 0; j < g.outcomes(); ++j) {
            const double c = g.effective_gain(j, lam);
            v += g.probs[j] * prev.eval(x * c);
        }
        return v;
    };
    return maximize_fraction(phi);
}

DpSolution::DpSolution(Gamble g, GridSpec grid, int rounds, double v0, SolveOptions opts)
    : gamble_(std::move(g)), grid_(grid), rounds_(rounds), v0_(v0), keep_(opts) {}

const std::vector<double>& DpSolution::value_row(int k) const {
    if (k < 0 || k > rounds_) throw std::out_of_range("value_row: round out of range");
    if (keep_.keep_values) return values_[k];
    if (k == 0) return values_.front();
    if (k == rounds_) return values_.back();
    throw std::logic_error("value_row: intermediate rounds were not retained");
}

const std::vector<double>& DpSolution::policy_row(int k) const {
    if (k < 1 || k > rounds_) throw std::out_of_range("policy_row: round out of range");
    if (!keep_.keep_policies) throw std::logic_error("policy_row: rows were not retained");
    return policies_[k - 1];
}

ValueFunction DpSolution::value_function(int k) const {
    return ValueFunction(grid_, k, value_row(k), v0_, k == 0);
}

double DpSolution::eval(int k, double x) const { return value_function(k).eval(x); }

double DpSolution::eval_final(double x) const { return value_function(rounds_).eval(x); }

double DpSolution::query_policy(int k, double x) const {
    if (k < 1 || k > rounds_) throw std::out_of_range("query_policy: round out of range");
    if (!(x > 0.0)) throw std::domain_error("query_policy: x must be positive");
    return maximize_step(value_function(k - 1), gamble_, x).lambda;
}

double DpSolution::policy_from_rows(int k, double q) const {
    const std::vector<double>& row = policy_row(k);
    double u = (q - grid_.q_min) / grid_.step();
    if (u <= 0.0) return row.front();
    const double top = static_cast<double>(grid_.points - 1);
    if (u >= top) return row.back();
    const int i = static_cast<int>(u);
    const double w = u - i;
    return row[i] + w * (row[i + 1] - row[i]);
}

void DpSolution::write_round_csv(std::ostream& out, int k) const {
    const std::vector<double>& f = value_row(k);
    const std::vector<double>* lam = (k >= 1 && keep_.keep_policies) ? &policy_row(k) : nullptr;
    out << (lam ? "q,x,f_k,lambda_k\n" : "q,x,f_k\n");
    char line[160];
    for (int i = 0; i < grid_.points; ++i) {
        if (lam)
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", grid_.q(i), grid_.x(i),
                          f[i], (*lam)[i]);
        else
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", grid_.q(i), grid_.x(i), f[i]);
        out << line;
    }
}

namespace {

constexpr char kMagic[4] = {'K', 'X', 'D', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count) {
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated data section");
    return v;
}

}  // namespace

void DpSolution::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");

    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(gamble_hash(gamble_)));
    nlohmann::ordered_json header;
    header["gamble"] = nlohmann::json::parse(gamble_.to_json());
    header["gamble_hash"] = hash_buf;
    header["rounds"] = rounds_;
    header["grid"] = {{"q_min", grid_.q_min}, {"q_max", grid_.q_max}, {"points", grid_.points}};
    header["v0"] = v0_;
    header["keep_values"] = keep_.keep_values;
    header["keep_policies"] = keep_.keep_policies;
    header["value_rows"] = values_.size();
    header["policy_rows"] = policies_.size();
    header["diagnostics"] = {{"grid_span_warning", diag_.grid_span_warning},
                             {"concavity_converged", diag_.concavity_converged},
                             {"total_clips", diag_.total_clips},
                             {"message", diag_.message}};
    const std::string htext = header.dump();

    out.write(kMagic, 4);
    const std::uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto& row : values_) write_doubles(out, row);
    for (const auto& row : policies_) write_doubles(out, row);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

DpSolution DpSolution::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (!in || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
        throw std::runtime_error("checkpoint: bad magic or version in " + path);
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);
    const nlohmann::json header = nlohmann::json::parse(htext);

    Gamble g = Gamble::from_json(header.at("gamble").dump());
    GridSpec grid(header.at("grid").at("q_min").get<double>(),
                  header.at("grid").at("q_max").get<double>(),
                  header.at("grid").at("points").get<int>());
    SolveOptions opts;
    opts.keep_values = header.at("keep_values").get<bool>();
    opts.keep_policies = header.at("keep_policies").get<bool>();
    DpSolution sol(std::move(g), grid, header.at("rounds").get<int>(),
                   header.at("v0").get<double>(), opts);
    const auto& d = header.at("diagnostics");
    sol.diag_.grid_span_warning = d.at("grid_span_warning").get<bool>();
    sol.diag_.concavity_converged = d.at("concavity_converged").get<bool>();
    sol.diag_.total_clips = d.at("total_clips").get<long>();
    sol.diag_.message = d.at("message").get<std::string>();

    const std::size_t vrows = header.at("value_rows").get<std::size_t>();
    const std::size_t prows = header.at("policy_rows").get<std::size_t>();
    const std::size_t pts = static_cast<std::size_t>(grid.points);
    sol.values_.reserve(vrows);
    for (std::size_t r = 0; r < vrows; ++r) sol.values_.push_back(read_doubles(in, pts));
    sol.policies_.reserve(prows);
    for (std::size_t r = 0; r < prows; ++r) sol.policies_.push_back(read_doubles(in, pts));
    return sol;
}

bool DpSolution::matches(const Gamble& g, int rounds, const GridSpec& grid) const {
    return gamble_hash(g) == gamble_hash(gamble_) && rounds == rounds_ && grid == grid_;
}

DpSolution solve(const Gamble& g, int rounds, const GridSpec& grid, SolveOptions opts) {
    if (rounds < 0) throw std::invalid_argument("solve: rounds must be nonnegative");
    const double lambda_kelly = optimal_fraction(g, 0.0);
    const double v0 = log_growth_drift(g, lambda_kelly);
    DpSolution sol(g, grid, rounds, v0, opts);

    ValueFunction vf = terminal_value(grid);
    sol.values_.push_back(vf.values());
    for (int k = 1; k <= rounds; ++k) {
        BellmanRow row = bellman_step(vf, g);
        bool converged = true;
        sol.diag_.total_clips += enforce_concavity(vf.node_x(), row.values, &converged);
        if (!converged) sol.diag_.concavity_converged = false;
        if (opts.keep_policies) sol.policies_.push_back(std::move(row.policy));
        if (opts.keep_values) sol.values_.push_back(row.values);
        vf = ValueFunction(grid, k, std::move(row.values), v0);
    }
    if (!opts.keep_values && rounds > 0) sol.values_.push_back(vf.values());

    if (g.favorable()) {
        const double v1 = kappa_prime(g, 1.0);
        if (grid.q_max - grid.q_min < rounds * v1) {
            sol.diag_.grid_span_warning = true;
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "grid span %.3f is below the %d-round characteristic span %.3f; "
                          "values near the boundaries are degraded",
                          grid.q_max - grid.q_min, rounds, rounds * v1);
            sol.diag_.message = msg;
        }
    }
    if (!sol.diag_.concavity_converged && sol.diag_.message.empty())
        sol.diag_.message = "concavity repair hit its pass limit";
    return sol;
}

}  // namespace kelly
