#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cv32rt {

enum class EventKind : uint8_t {
    Fetch,
    Exec,
    Retire,
    Stall,
    Mem,
    IrqAssert,
    IrqDeassert,
    Handshake,
    Kill,
    Flush,
    VectorLoad,
    Trap,
    Marker,
    Mret,
    EmretChain,
    EmretReturn,
    BankSwitch,
    DrainStore,
    DrainDone,
    NestedWait,
    LsuLoad,
    LsuStore,
    Fault,
    Halt,
};

const char* event_kind_name(EventKind k);
bool event_kind_from_name(const std::string& name, EventKind& out);
// Pipeline-level kinds are recorded only at full verbosity.
bool is_pipeline_event(EventKind k);

// Fields not used by a kind stay zero and are not printed.
struct TraceEvent {
    uint64_t cycle = 0;
    EventKind kind = EventKind::Fetch;
    uint32_t pc = 0;
    uint32_t addr = 0;
    uint32_t value = 0;
    uint32_t id = 0;
    uint32_t level = 0;
    uint32_t aux = 0;

    bool operator==(const TraceEvent&) const = default;
};

enum class TraceLevel { Off, Events, Full };

// One event per line: cycle=<u64> kind=<ident> key=value ...
std::string format_event(const TraceEvent& e);
bool parse_event(const std::string& line, TraceEvent& out);

class TraceSink {
public:
    explicit TraceSink(TraceLevel level = TraceLevel::Events) : level_(level) {}
    void emit(const TraceEvent& e);
    const std::vector<TraceEvent>& events() const { return events_; }
    TraceLevel level() const { return level_; }
    void clear() { events_.clear(); }

private:
    TraceLevel level_;
    std::vector<TraceEvent> events_;
};

std::string format_trace(const std::vector<TraceEvent>& events);

} // namespace cv32rt
