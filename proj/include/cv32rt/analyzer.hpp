#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cv32rt/trace.hpp"

namespace cv32rt {

struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Phase {
    std::string name;
    uint64_t cycles = 0;

    bool operator==(const Phase&) const = default;
};

struct Measurement {
    uint64_t cycles = 0;
    std::vector<Phase> breakdown;  // sums to cycles
};

// First body marker entering execute minus the first interrupt assertion.
// Phases: controller (assert to handshake), flush (to trap flush), fetch (to
// first handler instruction in execute), software (to the body).
Measurement measure_latency(const std::vector<TraceEvent>& trace);

// Second body start minus the cycle after the first body. Phases: exit (to the
// next handshake), entry (to its first handler instruction), save (to the body);
// without a second handshake the whole span is dispatch.
Measurement measure_back2back(const std::vector<TraceEvent>& trace);

// Per task switch: task-resume marker minus the preceding switch-start marker.
std::vector<Measurement> measure_ctxswitches(const std::vector<TraceEvent>& trace);
// All switches must agree; the first one is reported. Phases: yield (to trap
// entry), handler (to mret), resume (to the task marker).
Measurement measure_ctxswitch(const std::vector<TraceEvent>& trace);

} // namespace cv32rt
