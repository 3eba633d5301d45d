#include "cv32rt/trace.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace cv32rt {

namespace {

enum Field : uint8_t { F_PC, F_ADDR, F_VALUE, F_ID, F_LEVEL, F_AUX, F_NONE };

struct FieldSpec {
    Field field;
    const char* name;
    bool hex;
};

struct KindSpec {
    const char* name;
    bool pipeline;
    std::array<FieldSpec, 4> fields;
};

constexpr FieldSpec N{F_NONE, nullptr, false};

const std::array<KindSpec, 24> kKinds = {{
    {"fetch", true, {{{F_PC, "pc", true}, {F_AUX, "tag", false}, N, N}}},
    {"exec", true, {{{F_PC, "pc", true}, {F_VALUE, "insn", true}, {F_AUX, "tag", false}, N}}},
    {"retire", true, {{{F_PC, "pc", true}, {F_AUX, "tag", false}, N, N}}},
    {"stall", true, {{{F_PC, "pc", true}, {F_ADDR, "addr", true}, {F_AUX, "reason", false}, N}}},
    {"mem", true, {{{F_AUX, "port", false}, {F_ADDR, "addr", true}, {F_VALUE, "lat", false}, N}}},
    {"irq_assert", false, {{{F_ID, "id", false}, N, N, N}}},
    {"irq_deassert", false, {{{F_ID, "id", false}, N, N, N}}},
    {"handshake", false, {{{F_ID, "id", false}, {F_LEVEL, "level", false}, {F_AUX, "chain", false}, N}}},
    {"kill", false, {{{F_ID, "id", false}, {F_LEVEL, "level", false}, N, N}}},
    {"flush", false, {{{F_PC, "epc", true}, N, N, N}}},
    {"vector_load", false, {{{F_ADDR, "addr", true}, {F_VALUE, "target", true}, N, N}}},
    {"trap", false, {{{F_PC, "epc", true}, {F_ID, "cause", false}, {F_AUX, "irq", false}, {F_VALUE, "target", true}}}},
    {"marker", false, {{{F_PC, "pc", true}, {F_ID, "id", false}, N, N}}},
    {"mret", false, {{{F_PC, "pc", true}, {F_VALUE, "target", true}, N, N}}},
    {"emret_chain", false, {{{F_PC, "pc", true}, {F_ID, "id", false}, {F_LEVEL, "level", false}, N}}},
    {"emret_return", false, {{{F_PC, "pc", true}, {F_VALUE, "target", true}, {F_AUX, "stub", false}, N}}},
    {"bank_switch", false, {{{F_AUX, "bank", false}, {F_VALUE, "sp", true}, {F_ID, "frame", false}, N}}},
    {"drain_store", false, {{{F_AUX, "slot", false}, {F_ADDR, "addr", true}, {F_VALUE, "value", true}, N}}},
    {"drain_done", false, {{{F_AUX, "slots", false}, N, N, N}}},
    {"nested_wait", false, {{{F_VALUE, "cycles", false}, {F_ID, "id", false}, N, N}}},
    {"lsu_load", false, {{{F_PC, "pc", true}, {F_ADDR, "addr", true}, {F_VALUE, "value", true}, N}}},
    {"lsu_store", false, {{{F_PC, "pc", true}, {F_ADDR, "addr", true}, {F_VALUE, "value", true}, N}}},
    {"fault", false, {{{F_PC, "pc", true}, {F_ADDR, "addr", true}, {F_AUX, "code", false}, N}}},
    {"halt", false, {{{F_PC, "pc", true}, N, N, N}}},
}};

uint32_t& field_ref(TraceEvent& e, Field f) {
    switch (f) {
    case F_PC: return e.pc;
    case F_ADDR: return e.addr;
    case F_VALUE: return e.value;
    case F_ID: return e.id;
    case F_LEVEL: return e.level;
    default: return e.aux;
    }
}

uint32_t field_val(const TraceEvent& e, Field f) { return field_ref(const_cast<TraceEvent&>(e), f); }

} // namespace

const char* event_kind_name(EventKind k) { return kKinds[static_cast<size_t>(k)].name; }

bool event_kind_from_name(const std::string& name, EventKind& out) {
    for (size_t i = 0; i < kKinds.size(); ++i) {
        if (name == kKinds[i].name) {
            out = static_cast<EventKind>(i);
            return true;
        }
    }
    return false;
}

bool is_pipeline_event(EventKind k) { return kKinds[static_cast<size_t>(k)].pipeline; }

std::string format_event(const TraceEvent& e) {
    const KindSpec& ks = kKinds[static_cast<size_t>(e.kind)];
    char buf[256];
    int n = std::snprintf(buf, sizeof buf, "cycle=%" PRIu64 " kind=%s", e.cycle, ks.name);
    for (const FieldSpec& fs : ks.fields) {
        if (fs.field == F_NONE) break;
        uint32_t v = field_val(e, fs.field);
        if (fs.hex)
            n += std::snprintf(buf + n, sizeof buf - n, " %s=0x%08x", fs.name, v);
        else
            n += std::snprintf(buf + n, sizeof buf - n, " %s=%u", fs.name, v);
    }
    return std::string(buf, static_cast<size_t>(n));
}

bool parse_event(const std::string& line, TraceEvent& out) {
    std::istringstream in(line);
    std::string tok;
    TraceEvent e;
    bool have_cycle = false, have_kind = false;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) return false;
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        if (key == "cycle") {
            e.cycle = std::strtoull(val.c_str(), nullptr, 10);
            have_cycle = true;
            continue;
        }
        if (key == "kind") {
            if (!event_kind_from_name(val, e.kind)) return false;
            have_kind = true;
            continue;
        }
        if (!have_kind) return false;
        const KindSpec& ks = kKinds[static_cast<size_t>(e.kind)];
        bool found = false;
        for (const FieldSpec& fs : ks.fields) {
            if (fs.field == F_NONE) break;
            if (key == fs.name) {
                field_ref(e, fs.field) = static_cast<uint32_t>(std::strtoul(val.c_str(), nullptr, 0));
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    if (!have_cycle || !have_kind) return false;
    out = e;
    return true;
}

void TraceSink::emit(const TraceEvent& e) {
    if (level_ == TraceLevel::Off) return;
    if (level_ == TraceLevel::Events && is_pipeline_event(e.kind)) return;
    events_.push_back(e);
}

std::string format_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += format_event(e);
        out += '\n';
    }
    return out;
}

} // namespace cv32rt
