#include "doctest.h"

#include "cv32rt/report.hpp"

using namespace cv32rt;

namespace {

ScenarioReport sample(const std::string& name, bool ok) {
    ScenarioReport r;
    r.scenario = name;
    r.controller = Controller::Fastirq;
    r.abi = Abi::I;
    r.measurement = MeasurementKind::Latency;
    r.ok = ok;
    r.cycles = 6;
    r.breakdown = {{"controller", 1}, {"software", 5}};
    if (!ok) r.error = "fault, at \"x\"";
    return r;
}

} // namespace

TEST_CASE("header-only output for an empty report") {
    CHECK(emit_report({}, ReportFormat::Csv) == "scenario,controller,abi,metric,cycles,breakdown\n");
    std::string md = emit_report({}, ReportFormat::Markdown);
    CHECK(md == "| scenario | controller | abi | metric | cycles | breakdown |\n|:---|:---|:---|:---|---:|:---|\n");
}

TEST_CASE("csv rows and quoting") {
    std::string csv = emit_report({sample("a", true), sample("b", false)}, ReportFormat::Csv);
    CHECK(csv == "scenario,controller,abi,metric,cycles,breakdown\n"
                 "a,fastirq,I,latency,6,controller=1;software=5\n"
                 "b,fastirq,I,latency,,\"error: fault, at \"\"x\"\"\"\n");
}

TEST_CASE("markdown escapes pipes") {
    ScenarioReport r = sample("p|q", true);
    std::string md = emit_report({r}, ReportFormat::Markdown);
    CHECK(md.find("p\\|q") != std::string::npos);
}

TEST_CASE("identical inputs give identical bytes") {
    std::vector<ScenarioReport> v = {sample("a", true), sample("b", false)};
    CHECK(emit_report(v, ReportFormat::Csv) == emit_report(v, ReportFormat::Csv));
    CHECK(emit_report(v, ReportFormat::Markdown) == emit_report(v, ReportFormat::Markdown));
    CHECK(format_breakdown({}) == "");
}
