#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dqk/scenario.hpp"

namespace dqk {

struct CommandOptions {
    std::filesystem::path out = "out";
    bool quiet = false;
};

/// Files written by a command plus its JSON run summary.
struct ResultBundle {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
    std::string summary_json;
};

/// Final-state figures of merit for a closed-loop run.
struct Stabilization {
    double position = 0.0;  ///< ||t|| at the end of the run
    double omega = 0.0;
    double velocity = 0.0;
    bool converged = false;  ///< position < 5% of the initial distance, twist norms < 0.05
};

Stabilization assess(const RigidBodyState& initial, const RigidBodyState& final_state);

/// One cell of the dictionary-by-order cost table.
struct CompareCell {
    std::string dictionary;
    int order = 0;
    bool ok = false;
    double cost = 0.0;
    Stabilization result;
    std::string error;
};

ResultBundle cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opt);
ResultBundle cmd_fit(const ScenarioConfig& cfg, const CommandOptions& opt);
ResultBundle cmd_control(const ScenarioConfig& cfg, const CommandOptions& opt);
ResultBundle cmd_compare(const ScenarioConfig& cfg, const CommandOptions& opt,
                         std::vector<CompareCell>* cells = nullptr);

/// Closed-loop trajectory in the exported CSV layout.
void write_closed_loop_csv(const std::filesystem::path& path, const ClosedLoopLog& log);

}  // namespace dqk
