#include "doctest.h"

#include <algorithm>
#include <string>

#include "cv32rt/scenario.hpp"

using namespace cv32rt;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

} // namespace

TEST_CASE("parse a full scenario") {
    Scenario s = parse_scenario("# comment\n"
                                "controller = fastirq\n"
                                "abi=E\n"
                                "measurement=back2back  # trailing\n"
                                "nlbits=3\n"
                                "gate=block\n"
                                "drain_port=shared\n"
                                "ws.data=2\n"
                                "line=31,1,1,rising\n"
                                "line=30,1,0,high\n"
                                "irq=200,31,assert\n"
                                "irq=200,30,assert\n",
                                "x");
    CHECK(s.name == "x");
    CHECK(s.controller == Controller::Fastirq);
    CHECK(s.abi == Abi::E);
    CHECK(s.measurement == MeasurementKind::Back2Back);
    CHECK(s.nlbits == 3);
    CHECK(s.gate == GatePolicy::BlockUntilDrained);
    CHECK(s.drain_port == DrainPort::Shared);
    CHECK(s.ws.data == 2);
    REQUIRE(s.lines.size() == 2);
    CHECK(s.lines[1].trigger == Trigger::LevelHigh);
    REQUIRE(s.schedule.size() == 2);
    CHECK(s.schedule[0].line == 31);
}

TEST_CASE("parse errors carry the line number") {
    CHECK(contains(error_of("abi=I\nbogus=1\n"), "line 2"));
    CHECK(contains(error_of("abi=I\nbogus=1\n"), "unknown key"));
    CHECK(contains(error_of("\n\nnlbits\n"), "line 3"));
    CHECK(contains(error_of("nlbits=9\n"), "out of range"));
    CHECK(contains(error_of("nlbits=-1\n"), "unsigned"));
    CHECK(contains(error_of("nlbits=4x\n"), "unsigned"));
    CHECK(contains(error_of("abi=X\n"), "abi"));
    CHECK(contains(error_of("controller=nvic\n"), "controller"));
    CHECK(contains(error_of("line=31,1\n"), "line"));
    CHECK(contains(error_of("line=31,1,0,sideways\n"), "trigger"));
    CHECK(contains(error_of("irq=5,31,maybe\n"), "assert"));
    CHECK(contains(error_of("accelerated=maybe\n"), "true or false"));
}

TEST_CASE("incompatible combinations are rejected") {
    CHECK_FALSE(error_of("controller=clint\nkernel=fastirq\n").empty());
    CHECK_FALSE(error_of("controller=clic\nkernel=ctxswitch\naccelerated=true\n").empty());
    CHECK_FALSE(error_of("controller=fastirq\nkernel=ctxswitch\n").empty());
    CHECK_FALSE(error_of("irq=10,31,assert\nirq=10,31,deassert\n").empty());
    CHECK_FALSE(error_of("controller=clint\nlines=64\n").empty());
    CHECK(error_of("controller=fastirq\nkernel=ctxswitch\naccelerated=true\n").empty());
    CHECK(error_of("controller=clic-xnxti\n").empty());
}

TEST_CASE("format round-trips through the parser") {
    Scenario s;
    s.name = "rt";
    s.controller = Controller::ClicJalxnxti;
    s.abi = Abi::E;
    s.measurement = MeasurementKind::Back2Back;
    s.nlbits = 2;
    s.arb_stages = 1;
    s.ws.instr = 1;
    s.trap_extra = 3;
    s.lines = {LineSpec{31, 1, 1, Trigger::EdgeRising}, LineSpec{30, 1, 0, Trigger::EdgeRising}};
    s.schedule = {{200, 31, true}, {200, 30, true}, {201, 31, false}};
    std::string f = format_scenario(s);
    std::string text = f;
    std::replace(text.begin(), text.end(), ';', '\n');
    Scenario back = parse_scenario(text);
    CHECK(format_scenario(back) == f);
}

TEST_CASE("missing scenario file") {
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("scenario failures are reported, not thrown") {
    Scenario s;
    s.name = "short";
    s.max_cycles = 50;
    ScenarioReport r = run_scenario(s);
    CHECK_FALSE(r.ok);
    CHECK(contains(r.error, "did not halt"));

    Scenario none;
    none.name = "none";
    none.schedule = {{200, 30, true}};  // line 30 is not enabled
    ScenarioReport q = run_scenario(none);
    CHECK_FALSE(q.ok);
    CHECK_FALSE(q.error.empty());
}

TEST_CASE("default inputs per measurement") {
    Scenario s;
    CHECK(default_lines(s).size() == 1);
    CHECK(default_schedule(s).size() == 2);
    s.measurement = MeasurementKind::Back2Back;
    CHECK(default_lines(s).size() == 2);
    auto sched = default_schedule(s);
    REQUIRE(sched.size() == 4);
    CHECK(std::is_sorted(sched.begin(), sched.end(),
                         [](const InputEvent& a, const InputEvent& b) { return a.cycle < b.cycle; }));
}
