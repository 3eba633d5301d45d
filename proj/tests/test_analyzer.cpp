#include "doctest.h"

#include <sstream>

#include "cv32rt/analyzer.hpp"
#include "cv32rt/isa.hpp"

using namespace cv32rt;

namespace {

TraceEvent ev(uint64_t cycle, EventKind k, uint32_t id = 0) {
    TraceEvent e;
    e.cycle = cycle;
    e.kind = k;
    e.id = id;
    return e;
}

uint64_t sum(const std::vector<Phase>& p) {
    uint64_t s = 0;
    for (const auto& x : p) s += x.cycles;
    return s;
}

std::vector<TraceEvent> reparse(const std::vector<TraceEvent>& t) {
    std::istringstream in(format_trace(t));
    std::vector<TraceEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        TraceEvent e;
        REQUIRE(parse_event(line, e));
        out.push_back(e);
    }
    return out;
}

} // namespace

TEST_CASE("latency from assertion to body marker") {
    std::vector<TraceEvent> t = {ev(100, EventKind::IrqAssert, 31), ev(101, EventKind::Handshake, 31),
                                 ev(102, EventKind::Flush), ev(103, EventKind::Exec), ev(106, EventKind::Marker, kMarkBody)};
    Measurement m = measure_latency(t);
    CHECK(m.cycles == 6);
    CHECK(sum(m.breakdown) == 6);
    REQUIRE(m.breakdown.size() == 4);
    CHECK(m.breakdown[0] == Phase{"controller", 1});
    CHECK(m.breakdown[1] == Phase{"flush", 1});
    CHECK(m.breakdown[2] == Phase{"fetch", 1});
    CHECK(m.breakdown[3] == Phase{"software", 3});

    Measurement again = measure_latency(reparse(t));
    CHECK(again.cycles == m.cycles);
    CHECK(again.breakdown == m.breakdown);
}

TEST_CASE("events-level trace still measures latency") {
    std::vector<TraceEvent> t = {ev(100, EventKind::IrqAssert, 31), ev(101, EventKind::Handshake, 31),
                                 ev(102, EventKind::Flush), ev(106, EventKind::Marker, kMarkBody)};
    Measurement m = measure_latency(t);
    CHECK(m.cycles == 6);
    CHECK(sum(m.breakdown) == 6);
}

TEST_CASE("latency diagnoses incomplete traces") {
    CHECK_THROWS_AS(measure_latency({}), AnalysisError);
    CHECK_THROWS_AS(measure_latency({ev(100, EventKind::IrqAssert, 31)}), AnalysisError);
    // A body marker before the assertion does not count.
    CHECK_THROWS_AS(measure_latency({ev(90, EventKind::Marker, kMarkBody), ev(100, EventKind::IrqAssert)}), AnalysisError);
}

TEST_CASE("back-to-back spans the gap between bodies") {
    std::vector<TraceEvent> t = {ev(100, EventKind::Marker, kMarkBody), ev(104, EventKind::Handshake, 30),
                                 ev(105, EventKind::Flush), ev(106, EventKind::Exec),
                                 ev(109, EventKind::Marker, kMarkBody)};
    Measurement m = measure_back2back(t);
    CHECK(m.cycles == 8);
    CHECK(sum(m.breakdown) == 8);
    CHECK(m.breakdown.front() == Phase{"exit", 3});

    std::vector<TraceEvent> loop = {ev(100, EventKind::Marker, kMarkBody), ev(110, EventKind::Marker, kMarkBody)};
    Measurement d = measure_back2back(loop);
    CHECK(d.cycles == 9);
    REQUIRE(d.breakdown.size() == 1);
    CHECK(d.breakdown[0].name == "dispatch");

    CHECK_THROWS_AS(measure_back2back({ev(100, EventKind::Marker, kMarkBody)}), AnalysisError);
}

TEST_CASE("context switches must agree") {
    auto sw = [](uint64_t at, uint64_t len) {
        return std::vector<TraceEvent>{ev(at, EventKind::Marker, kMarkSwitchStart), ev(at + 2, EventKind::Trap),
                                       ev(at + len - 3, EventKind::Mret), ev(at + len, EventKind::Marker, kMarkTaskResume)};
    };
    std::vector<TraceEvent> t;
    for (uint64_t at : {100, 300, 500}) {
        auto s = sw(at, 120);
        t.insert(t.end(), s.begin(), s.end());
    }
    Measurement m = measure_ctxswitch(t);
    CHECK(m.cycles == 120);
    CHECK(sum(m.breakdown) == 120);
    CHECK(measure_ctxswitches(t).size() == 3);

    auto odd = sw(700, 121);
    t.insert(t.end(), odd.begin(), odd.end());
    CHECK_THROWS_AS(measure_ctxswitch(t), AnalysisError);
    CHECK_THROWS_AS(measure_ctxswitch({ev(100, EventKind::Marker, kMarkSwitchStart)}), AnalysisError);
}
