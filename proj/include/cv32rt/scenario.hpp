#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cv32rt/analyzer.hpp"
#include "cv32rt/config.hpp"
#include "cv32rt/core.hpp"
#include "cv32rt/kernels.hpp"

namespace cv32rt {

enum class Controller { Clint, Clic, ClicXnxti, ClicJalxnxti, Fastirq };
enum class MeasurementKind { Latency, Back2Back, CtxSwitch };

const char* controller_name(Controller c);
const char* measurement_name(MeasurementKind m);
const char* abi_name(Abi a);

struct Scenario {
    std::string name = "scenario";
    Controller controller = Controller::Clic;
    Abi abi = Abi::I;
    std::optional<KernelVariant> kernel;  // default follows the controller
    MeasurementKind measurement = MeasurementKind::Latency;
    bool accelerated = false;             // ctxswitch only
    unsigned switches = 4;
    unsigned nlbits = 4;
    unsigned num_lines = 0;               // 0: controller default
    unsigned arb_stages = 0;
    DrainPort drain_port = DrainPort::Dedicated;
    GatePolicy gate = GatePolicy::Watermark;
    WaitStates ws;
    unsigned trap_extra = 0;
    unsigned idle_iters = 300;
    uint64_t max_cycles = 20000;
    std::vector<LineSpec> lines;          // empty: measurement default
    std::vector<InputEvent> schedule;     // empty: measurement default

    KernelVariant effective_kernel() const;
    SimConfig sim_config() const;
    // Throws ConfigError.
    void validate() const;
};

// key=value lines; '#' starts a comment. Repeated keys: line=id,level,priority[,trigger]
// and irq=cycle,line,assert|deassert. Throws ConfigError with the line number.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario_file(const std::string& path);
std::string format_scenario(const Scenario& s);

struct ScenarioReport {
    std::string scenario;
    Controller controller = Controller::Clic;
    Abi abi = Abi::I;
    MeasurementKind measurement = MeasurementKind::Latency;
    std::string kernel;
    bool ok = false;
    std::string error;  // fault or analysis diagnosis when !ok
    uint64_t cycles = 0;
    std::vector<Phase> breakdown;
    uint64_t sim_cycles = 0;
    std::string config;  // echo of the scenario
    std::vector<TraceEvent> trace;
};

// Builds the program, runs it to the halt marker and analyzes the trace. The
// trace is always recorded at full verbosity.
ScenarioReport run_scenario(const Scenario& s);

// Scenario inputs used when the schedule or line list is left empty.
std::vector<LineSpec> default_lines(const Scenario& s);
std::vector<InputEvent> default_schedule(const Scenario& s);

} // namespace cv32rt
