#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kelly/config.hpp"
#include "kelly/simulator.hpp"

namespace kelly::cli {

// Exit codes: 0 success, 2 configuration error, 3 numerical diagnostic failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// Loads the checkpoint under cfg.out_dir when it matches (gamble, rounds,
// grid); otherwise solves and writes a fresh one.
std::shared_ptr<const DpSolution> load_or_solve(const ExperimentConfig& cfg);

Strategy make_strategy(const std::string& name, const ExperimentConfig& cfg,
                       std::shared_ptr<const DpSolution> solution);

void cmd_rates(const ExperimentConfig& cfg);
void cmd_solve(const ExperimentConfig& cfg);
void cmd_compare(const ExperimentConfig& cfg);
void cmd_simulate(const ExperimentConfig& cfg);
void cmd_report(const ExperimentConfig& cfg);

}  // namespace kelly::cli
