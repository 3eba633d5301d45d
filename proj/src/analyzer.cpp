#include "cv32rt/analyzer.hpp"

#include <optional>

#include "cv32rt/isa.hpp"

namespace cv32rt {

namespace {

using Trace = std::vector<TraceEvent>;

std::optional<size_t> find_from(const Trace& t, size_t from, EventKind k, int id = -1) {
    for (size_t i = from; i < t.size(); ++i) {
        if (t[i].kind == k && (id < 0 || t[i].id == uint32_t(id))) return i;
    }
    return std::nullopt;
}

bool is_marker(const TraceEvent& e, uint16_t id) { return e.kind == EventKind::Marker && e.id == id; }

// Splits [start, end] at the given cut points, skipping unknown ones.
std::vector<Phase> split(uint64_t start, uint64_t end, const std::vector<std::pair<std::string, std::optional<uint64_t>>>& cuts,
                         const std::string& last) {
    std::vector<Phase> out;
    uint64_t at = start;
    for (const auto& [name, c] : cuts) {
        if (!c || *c < at || *c > end) continue;
        out.push_back({name, *c - at});
        at = *c;
    }
    out.push_back({last, end - at});
    return out;
}

std::optional<uint64_t> cycle_of(const Trace& t, std::optional<size_t> i) {
    if (!i) return std::nullopt;
    return t[*i].cycle;
}

// First instruction executing after the flush at index f, if full-level
// events are present.
std::optional<size_t> first_exec_after(const Trace& t, size_t f, uint64_t limit) {
    for (size_t i = f; i < t.size() && t[i].cycle <= limit; ++i)
        if (t[i].kind == EventKind::Exec && t[i].cycle > t[f].cycle) return i;
    return std::nullopt;
}

} // namespace

Measurement measure_latency(const Trace& t) {
    auto a = find_from(t, 0, EventKind::IrqAssert);
    if (!a) throw AnalysisError("latency: no interrupt assertion in trace");
    std::optional<size_t> m;
    for (size_t i = *a; i < t.size(); ++i)
        if (is_marker(t[i], kMarkBody)) {
            m = i;
            break;
        }
    if (!m) throw AnalysisError("latency: no handler body marker after the assertion");
    uint64_t A = t[*a].cycle, M = t[*m].cycle;
    auto h = find_from(t, *a, EventKind::Handshake);
    std::optional<size_t> f = h ? find_from(t, *h, EventKind::Flush) : std::nullopt;
    std::optional<size_t> e = f ? first_exec_after(t, *f, M) : std::nullopt;
    Measurement r;
    r.cycles = M - A;
    r.breakdown = split(A, M, {{"controller", cycle_of(t, h)}, {"flush", cycle_of(t, f)}, {"fetch", cycle_of(t, e)}},
                        "software");
    return r;
}

Measurement measure_back2back(const Trace& t) {
    std::optional<size_t> m1, m2;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!is_marker(t[i], kMarkBody)) continue;
        if (!m1) m1 = i;
        else {
            m2 = i;
            break;
        }
    }
    if (!m2) throw AnalysisError("back2back: fewer than two handler bodies in trace");
    uint64_t start = t[*m1].cycle + 1, end = t[*m2].cycle;
    std::optional<size_t> h;
    for (size_t i = *m1; i < *m2; ++i)
        if (t[i].kind == EventKind::Handshake) h = i;
    Measurement r;
    r.cycles = end - start;
    if (!h) {
        r.breakdown = {{"dispatch", r.cycles}};
        return r;
    }
    auto f = find_from(t, *h, EventKind::Flush);
    std::optional<size_t> e = f ? first_exec_after(t, *f, end) : std::nullopt;
    r.breakdown = split(start, end, {{"exit", cycle_of(t, h)}, {"entry", cycle_of(t, e)}}, "save");
    return r;
}

std::vector<Measurement> measure_ctxswitches(const Trace& t) {
    std::vector<Measurement> out;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!is_marker(t[i], kMarkSwitchStart)) continue;
        std::optional<size_t> resume;
        for (size_t j = i + 1; j < t.size(); ++j) {
            if (is_marker(t[j], kMarkSwitchStart)) break;
            if (is_marker(t[j], kMarkTaskResume)) {
                resume = j;
                break;
            }
        }
        if (!resume) continue;
        std::optional<size_t> trap, ret;
        for (size_t j = i; j < *resume; ++j) {
            if (!trap && t[j].kind == EventKind::Trap) trap = j;
            if (t[j].kind == EventKind::Mret) ret = j;
        }
        Measurement m;
        uint64_t s = t[i].cycle, e = t[*resume].cycle;
        m.cycles = e - s;
        m.breakdown = split(s, e, {{"yield", cycle_of(t, trap)}, {"handler", cycle_of(t, ret)}}, "resume");
        out.push_back(m);
        i = *resume;
    }
    return out;
}

Measurement measure_ctxswitch(const Trace& t) {
    auto all = measure_ctxswitches(t);
    if (all.empty()) throw AnalysisError("ctxswitch: no completed task switch in trace");
    for (const auto& m : all)
        if (m.cycles != all.front().cycles) throw AnalysisError("ctxswitch: task switches differ in cost");
    return all.front();
}

} // namespace cv32rt
