#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kelly/dp.hpp"
#include "kelly/gamble.hpp"

namespace kelly {

// Thrown for malformed or inconsistent experiment configuration (CLI exit 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a solve reports a numerical diagnostic failure (CLI exit 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    Gamble gamble{{1.3, 0.75}, {0.5, 0.5}};
    int rounds = 1000;
    GridSpec grid{std::log(1e-16), std::log(1e3), 4001};
    double x_init = 0.0;  // 0: derive from stake/external
    double stake_dollars = 1000.0;
    double external_dollars = 2000000.0;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 20260809;
    int alpha_points = 1001;
    std::string strategy = "optimal";
    std::vector<double> thresholds;  // final-capital levels for tail reports
    std::string out_dir = "out";
    bool dollars = false;
    bool exact = false;
    std::vector<int> export_rounds;  // value/fraction rows written by `solve`

    // stake / external when x_init was not given explicitly
    double initial_capital() const;

    std::string emit() const;                          // canonical JSON
    static ExperimentConfig parse(const std::string&); // inverse of emit
    static ExperimentConfig paper_preset();

    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace kelly
