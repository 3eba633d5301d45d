#pragma once

#include <string>
#include <vector>

#include "cv32rt/scenario.hpp"

namespace cv32rt {

// Scenario set behind the latency, back-to-back and context-switch bands.
std::vector<Scenario> acceptance_scenarios();

// Runs every scenario on its own simulator, jobs at a time; the result is
// sorted by scenario name. Throws ConfigError on an empty set or on duplicate
// names.
std::vector<ScenarioReport> run_sweep(const std::vector<Scenario>& scenarios, unsigned jobs = 1);

struct BandCheck {
    unsigned criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Band tolerances are fixed here. A missing or failed scenario fails its band.
std::vector<BandCheck> evaluate_bands(const std::vector<ScenarioReport>& reports);
bool all_pass(const std::vector<BandCheck>& checks);
std::string format_bands(const std::vector<BandCheck>& checks);

} // namespace cv32rt
