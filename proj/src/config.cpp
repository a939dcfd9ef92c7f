#include "kelly/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace kelly {

double ExperimentConfig::initial_capital() const {
    if (x_init > 0.0) return x_init;
    return stake_dollars / external_dollars;
}

void ExperimentConfig::validate() const {
    if (rounds < 0) throw ConfigError("rounds must be nonnegative");
    if (!(initial_capital() > 0.0)) throw ConfigError("initial capital must be positive");
    if (!(stake_dollars > 0.0) || !(external_dollars > 0.0))
        throw ConfigError("stake and external capital must be positive");
    if (paths == 0) throw ConfigError("paths must be positive");
    if (alpha_points < 2) throw ConfigError("alpha_points must be at least 2");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    for (double t : thresholds)
        if (!(t > 0.0)) throw ConfigError("thresholds must be positive");
    // entries above the horizon are allowed and skipped at export time
    for (int k : export_rounds)
        if (k < 0) throw ConfigError("export_rounds entries must be nonnegative");
}

std::string ExperimentConfig::emit() const {
    nlohmann::ordered_json j;
    j["gamble"] = nlohmann::json::parse(gamble.to_json());
    j["rounds"] = rounds;
    j["grid"] = {{"q_min", grid.q_min}, {"q_max", grid.q_max}, {"points", grid.points}};
    j["x_init"] = x_init;
    j["stake_dollars"] = stake_dollars;
    j["external_dollars"] = external_dollars;
    j["paths"] = paths;
    j["seed"] = seed;
    j["alpha_points"] = alpha_points;
    j["strategy"] = strategy;
    j["thresholds"] = thresholds;
    j["out_dir"] = out_dir;
    j["dollars"] = dollars;
    j["exact"] = exact;
    j["export_rounds"] = export_rounds;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("gamble")) c.gamble = Gamble::from_json(j["gamble"].dump());
        if (j.contains("rounds")) c.rounds = j["rounds"].get<int>();
        if (j.contains("grid")) {
            const auto& gj = j["grid"];
            c.grid = GridSpec(gj.at("q_min").get<double>(), gj.at("q_max").get<double>(),
                              gj.at("points").get<int>());
        }
        if (j.contains("x_init")) c.x_init = j["x_init"].get<double>();
        if (j.contains("stake_dollars")) c.stake_dollars = j["stake_dollars"].get<double>();
        if (j.contains("external_dollars")) c.external_dollars = j["external_dollars"].get<double>();
        if (j.contains("paths")) c.paths = j["paths"].get<std::uint64_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("alpha_points")) c.alpha_points = j["alpha_points"].get<int>();
        if (j.contains("strategy")) c.strategy = j["strategy"].get<std::string>();
        if (j.contains("thresholds")) c.thresholds = j["thresholds"].get<std::vector<double>>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("dollars")) c.dollars = j["dollars"].get<bool>();
        if (j.contains("exact")) c.exact = j["exact"].get<bool>();
        if (j.contains("export_rounds")) c.export_rounds = j["export_rounds"].get<std::vector<int>>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::paper_preset() {
    ExperimentConfig c;
    c.gamble = Gamble({1.3, 0.75}, {0.5, 0.5});
    c.rounds = 1000;
    c.grid = GridSpec(std::log(1e-16), std::log(1e3), 4001);
    c.x_init = std::pow(10.0, -3.3);
    c.stake_dollars = 1000.0;
    c.external_dollars = 2000000.0;
    c.paths = 1000000;
    c.seed = 20260809;
    c.alpha_points = 1001;
    c.strategy = "optimal";
    c.thresholds = {5e-4, 0.05, 0.1, 0.25, 0.5, 1.0};
    c.out_dir = "out";
    c.export_rounds = {0, 1, 10, 100, 1000};
    return c;
}

}  // namespace kelly
