#include "kelly/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kelly/asymptotics.hpp"
#include "kelly/rates.hpp"

namespace fs = std::filesystem;

namespace kelly::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void check_solution_health(const DpSolution& sol) {
    const auto& d = sol.diagnostics();
    if (d.grid_span_warning) std::cerr << "warning: " << d.message << "\n";
    if (!d.concavity_converged)
        throw NumericalError("concavity repair failed to converge: " + d.message);
    for (double v : sol.value_row(sol.rounds()))
        if (!std::isfinite(v)) throw NumericalError("non-finite values in the solved table");
}

double parse_fixed_fraction(const std::string& name) {
    const double lam = std::strtod(name.c_str() + 6, nullptr);
    if (!(lam >= 0.0 && lam <= 1.0))
        throw ConfigError("strategy " + name + ": fraction must lie in [0,1]");
    return lam;
}

}  // namespace

std::shared_ptr<const DpSolution> load_or_solve(const ExperimentConfig& cfg) {
    const fs::path ckpt = fs::path(cfg.out_dir) / "solution.ckpt";
    if (fs::exists(ckpt)) {
        try {
            auto sol = std::make_shared<DpSolution>(DpSolution::load(ckpt.string()));
            if (sol->matches(cfg.gamble, cfg.rounds, cfg.grid)) {
                check_solution_health(*sol);
                return sol;
            }
        } catch (const NumericalError&) {
            throw;
        } catch (const std::exception&) {
            // stale or foreign file; fall through and rebuild
        }
    }
    auto sol = std::make_shared<DpSolution>(solve(cfg.gamble, cfg.rounds, cfg.grid));
    check_solution_health(*sol);
    fs::create_directories(cfg.out_dir);
    sol->save(ckpt.string());
    return sol;
}

Strategy make_strategy(const std::string& name, const ExperimentConfig& cfg,
                       std::shared_ptr<const DpSolution> solution) {
    if (name == "optimal") {
        if (!solution) solution = load_or_solve(cfg);
        return Strategy::policy(solution);
    }
    if (name == "kelly") return Strategy::fixed(optimal_fraction(cfg.gamble, 0.0));
    if (name == "allin") return Strategy::all_in();
    if (name == "idle") return Strategy::idle();
    if (name.rfind("fixed:", 0) == 0) return Strategy::fixed(parse_fixed_fraction(name));
    throw ConfigError("unknown strategy " + name +
                      " (expected optimal|kelly|allin|idle|fixed:<fraction>)");
}

void cmd_rates(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const RateSpectrum spec(cfg.gamble, static_cast<std::size_t>(cfg.alpha_points));
    {
        auto out = open_out(fs::path(cfg.out_dir) / "rates.csv");
        spec.write_csv(out);
    }
    {
        auto out = open_out(fs::path(cfg.out_dir) / "failure_rate.csv");
        out << "v,alpha,h\n";
        char line[128];
        const int pts = 101;
        for (int i = 0; i < pts; ++i) {
            const double v = spec.v0() + (spec.v1() - spec.v0()) * i / (pts - 1);
            const FailureRate fr = spec.failure_rate(v);
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", v, fr.alpha, fr.h);
            out << line;
        }
    }
    std::cout << "rates: lambda_kelly=" << optimal_fraction(cfg.gamble, 0.0) << " v0=" << spec.v0()
              << " v1=" << spec.v1() << " D=" << spec.diffusion() << "\n";
}

void cmd_solve(const ExperimentConfig& cfg) {
    auto sol = load_or_solve(cfg);
    fs::create_directories(cfg.out_dir);
    std::vector<int> rounds = cfg.export_rounds;
    if (rounds.empty()) rounds = {cfg.rounds};
    for (int k : rounds) {
        if (k > cfg.rounds) continue;
        char name[64];
        std::snprintf(name, sizeof(name), "solve_round_%d.csv", k);
        auto out = open_out(fs::path(cfg.out_dir) / name);
        sol->write_round_csv(out, k);
    }
    if (cfg.rounds >= 1) {
        const double x = cfg.initial_capital();
        std::cout << "first-move fraction at x=" << x << ": "
                  << sol->query_policy(cfg.rounds, x) << "\n";
    }
}

void cmd_compare(const ExperimentConfig& cfg) {
    auto sol = load_or_solve(cfg);
    fs::create_directories(cfg.out_dir);
    const RateSpectrum spec(cfg.gamble, static_cast<std::size_t>(cfg.alpha_points));

    const double h = cfg.grid.step();
    double q_lo = cfg.grid.q_min + 5.0 * h;
    double q_hi = cfg.grid.q_max - 5.0 * h;
    if (cfg.rounds >= 1) {
        q_lo = std::max(q_lo, -1.05 * cfg.rounds * spec.v1());
        q_hi = std::min(q_hi, 4.0);
    }
    std::vector<double> xs;
    const int pts = 241;
    for (int i = 0; i < pts; ++i) xs.push_back(std::exp(q_lo + (q_hi - q_lo) * i / (pts - 1)));
    {
        auto out = open_out(fs::path(cfg.out_dir) / "compare.csv");
        write_comparison_csv(out, *sol, spec, xs);
    }
    {
        std::vector<double> x0s;
        for (int i = -6; i <= 6; ++i) x0s.push_back(std::pow(10.0, i / 2.0));
        auto out = open_out(fs::path(cfg.out_dir) / "characteristics.csv");
        write_characteristics_csv(out, spec, x0s, cfg.rounds, std::max(1, cfg.rounds / 100));
    }
}

void cmd_simulate(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const double scale = cfg.dollars ? cfg.external_dollars : 1.0;
    const double x_init = cfg.initial_capital();
    std::vector<double> thresholds = cfg.thresholds;
    if (thresholds.empty()) thresholds = {x_init, 0.1, 0.5, 1.0};
    std::vector<double> scaled;
    for (double t : thresholds) scaled.push_back(t * scale);

    const std::string tag = cfg.strategy.rfind("fixed:", 0) == 0
                                ? "fixed_" + cfg.strategy.substr(6)
                                : cfg.strategy;

    if (cfg.exact) {
        double lam;
        if (cfg.strategy == "kelly")
            lam = optimal_fraction(cfg.gamble, 0.0);
        else if (cfg.strategy == "allin")
            lam = 1.0;
        else if (cfg.strategy == "idle")
            lam = 0.0;
        else if (cfg.strategy.rfind("fixed:", 0) == 0)
            lam = parse_fixed_fraction(cfg.strategy);
        else
            throw ConfigError("exact mode needs a fixed-fraction strategy, got " + cfg.strategy);
        const ExactDistribution dist =
            ExactDistribution::fixed_fraction(cfg.gamble, lam, x_init, cfg.rounds);
        nlohmann::ordered_json j;
        j["mode"] = "exact";
        j["strategy"] = cfg.strategy;
        j["lambda"] = lam;
        j["median"] = dist.median() * scale;
        j["mean"] = dist.mean() * scale;
        j["tail_probs"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            j["tail_probs"].push_back(
                {{"threshold", scaled[i]}, {"prob", dist.tail_prob(thresholds[i])}});
        auto out = open_out(fs::path(cfg.out_dir) / ("summary_exact_" + tag + ".json"));
        out << j.dump(2) << "\n";
        std::cout << "exact " << cfg.strategy << ": median=" << dist.median() * scale
                  << " mean=" << dist.mean() * scale << "\n";
        return;
    }

    std::shared_ptr<const DpSolution> sol;
    if (cfg.strategy == "optimal") sol = load_or_solve(cfg);
    const Strategy strategy = make_strategy(cfg.strategy, cfg, sol);
    const EmpiricalDistribution dist =
        simulate(cfg.gamble, strategy, x_init, cfg.rounds, cfg.paths, cfg.seed);
    {
        auto out = open_out(fs::path(cfg.out_dir) / ("tail_" + tag + ".csv"));
        dist.write_tail_csv(out, scale);
    }
    {
        auto out = open_out(fs::path(cfg.out_dir) / ("hist_" + tag + ".csv"));
        dist.write_histogram_csv(out, scale);
    }
    {
        auto out = open_out(fs::path(cfg.out_dir) / ("summary_" + tag + ".json"));
        out << dist.summary_json(scaled, scale) << "\n";
    }
    std::cout << "simulate " << cfg.strategy << ": paths=" << dist.paths()
              << " median=" << dist.median() * scale << " mean=" << dist.mean() * scale << "\n";
}

void cmd_report(const ExperimentConfig& cfg) {
    cmd_rates(cfg);
    cmd_solve(cfg);
    cmd_compare(cfg);
    ExperimentConfig c = cfg;
    c.strategy = "optimal";
    cmd_simulate(c);
    c.strategy = "kelly";
    cmd_simulate(c);
    c.strategy = "kelly";
    c.exact = true;
    cmd_simulate(c);
    c.strategy = "allin";
    cmd_simulate(c);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "config.json");
        out << cfg.emit() << "\n";
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("kelly_ext");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    CLI::App app{"betting-policy toolkit for repeated favorable gambles with outside capital"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path, out_dir, strategy, preset_name;
    bool dollars = false, exact = false;
    std::uint64_t seed = 0, paths = 0;
    int rounds = -1, grid_points = 0;
    double qmin = 0.0, qmax = 0.0;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--preset", preset_name, "named preset (paper)");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    auto* rounds_opt = app.add_option("--rounds", rounds, "number of rounds");
    auto* paths_opt = app.add_option("--paths", paths, "Monte Carlo path count");
    auto* gp_opt = app.add_option("--grid-points", grid_points, "grid resolution");
    auto* qmin_opt = app.add_option("--qmin", qmin, "lower ln-capital grid bound");
    auto* qmax_opt = app.add_option("--qmax", qmax, "upper ln-capital grid bound");
    auto* strat_opt =
        app.add_option("--strategy", strategy, "optimal|kelly|allin|idle|fixed:<fraction>");
    app.add_flag("--dollars", dollars, "scale outputs by the external capital");
    app.add_flag("--exact", exact, "exact two-outcome distribution instead of Monte Carlo");

    auto* c_rates = app.add_subcommand("rates", "fraction/growth-rate/failure-rate tables");
    auto* c_solve = app.add_subcommand("solve", "backward induction over the capital grid");
    auto* c_compare = app.add_subcommand("compare", "solved values vs closed-form approximations");
    auto* c_simulate = app.add_subcommand("simulate", "final-capital distributions");
    auto* c_report = app.add_subcommand("report", "run every dataset into the output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ExperimentConfig cfg;
        if (!preset_name.empty()) {
            if (preset_name != "paper") throw ConfigError("unknown preset " + preset_name);
            if (!config_path.empty())
                throw ConfigError("--preset and --config are mutually exclusive");
            cfg = ExperimentConfig::paper_preset();
        } else if (!config_path.empty()) {
            cfg = ExperimentConfig::parse(read_file(config_path));
        }
        if (*out_opt) cfg.out_dir = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (*rounds_opt) cfg.rounds = rounds;
        if (*paths_opt) cfg.paths = paths;
        if (*gp_opt || *qmin_opt || *qmax_opt)
            cfg.grid = GridSpec(*qmin_opt ? qmin : cfg.grid.q_min, *qmax_opt ? qmax : cfg.grid.q_max,
                                *gp_opt ? grid_points : cfg.grid.points);
        if (*strat_opt) cfg.strategy = strategy;
        if (dollars) cfg.dollars = true;
        if (exact) cfg.exact = true;
        cfg.validate();

        if (c_rates->parsed()) cmd_rates(cfg);
        if (c_solve->parsed()) cmd_solve(cfg);
        if (c_compare->parsed()) cmd_compare(cfg);
        if (c_simulate->parsed()) cmd_simulate(cfg);
        if (c_report->parsed()) cmd_report(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kelly::cli
