#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "cv32rt/isa.hpp"

namespace cv32rt {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ControllerMode { Clint, Clic };
enum class DrainPort { Dedicated, Shared };
enum class GatePolicy { Watermark, BlockUntilDrained };

// Per-phase cycle costs. Every interrupt-path number the benchmarks report is
// a sum of these and the structural pipeline timing (IF/ID/EX/WB, a redirect
// refetches in the cycle it resolves, one-cycle load-use gap).
struct Calibration {
    unsigned flush_cycles = 1;         // trap flush after the handshake cycle
    unsigned vector_load_cycles = 1;   // SHV table read at zero wait states
    unsigned trap_extra = 0;           // injected regression knob, 0 when calibrated
    unsigned serialize_delay = 1;      // refetch delay after a status-CSR write
    unsigned load_use = 1;             // bubble between a load and its consumer
    unsigned mnxti_occupancy = 8;      // EX cycles of an mnxti claim round trip
    unsigned jalxnxti_occupancy = 6;   // EX cycles of a jalxnxti before its redirect
    unsigned emret_resolve = 2;        // cycles from emret execute to the chained handshake
    unsigned exception_flush = 1;      // synchronous trap flush
};

struct WaitStates {
    unsigned instr = 0;
    unsigned data = 0;
    unsigned clic = 0;
    unsigned stub = 0;
};

struct SimConfig {
    ControllerMode mode = ControllerMode::Clic;
    bool fastirq = false;
    Abi abi = Abi::I;
    unsigned num_lines = 64;
    unsigned nlbits = 4;
    unsigned arb_stages = 0;
    DrainPort drain_port = DrainPort::Dedicated;
    GatePolicy gate = GatePolicy::Watermark;
    bool force_reload = false;           // emret always restores through the software stub
    std::optional<unsigned> ctx_line;    // line whose fastirq entry drains the full context frame
    WaitStates ws;
    Calibration cal;

    // Throws ConfigError on an inconsistent combination.
    void validate() const;
};

} // namespace cv32rt
