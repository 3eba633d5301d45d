#include "doctest.h"

#include <filesystem>

#include "cv32rt/report.hpp"
#include "cv32rt/sweep.hpp"

using namespace cv32rt;

namespace {

const BandCheck* find_band(const std::vector<BandCheck>& v, const std::string& name) {
    for (const auto& b : v)
        if (b.name == name) return &b;
    return nullptr;
}

} // namespace

TEST_CASE("sweep rejects bad sets") {
    CHECK_THROWS_AS(run_sweep({}), ConfigError);
    Scenario a;
    a.name = "same";
    CHECK_THROWS_AS(run_sweep({a, a}), ConfigError);
}

TEST_CASE("acceptance set has unique names and passes its bands") {
    auto set = acceptance_scenarios();
    CHECK(set.size() == 22);
    auto reports = run_sweep(set, 4);
    for (const auto& r : reports) {
        CAPTURE(r.scenario);
        CHECK(r.ok);
    }
    auto bands = evaluate_bands(reports);
    for (const auto& b : bands) {
        CAPTURE(b.name);
        CAPTURE(b.detail);
        CHECK(b.pass);
    }
}

TEST_CASE("extra trap cycles break the fastirq latency band") {
    auto set = acceptance_scenarios();
    for (auto& s : set)
        if (s.controller == Controller::Fastirq && s.measurement == MeasurementKind::Latency) s.trap_extra = 5;
    auto bands = evaluate_bands(run_sweep(set, 4));
    const BandCheck* b = find_band(bands, "fastirq latency (I)");
    REQUIRE(b);
    CHECK_FALSE(b->pass);
    CHECK_FALSE(all_pass(bands));
}

TEST_CASE("missing scenarios fail their bands") {
    auto bands = evaluate_bands({});
    CHECK_FALSE(bands.empty());
    for (const auto& b : bands) CHECK_FALSE(b.pass);
}

TEST_CASE("scenario directory matches the built-in set") {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(CV32RT_SOURCE_DIR) / "scenarios";
    std::vector<Scenario> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(load_scenario_file(e.path().string()));
    CHECK(files.size() == 22);
    auto a = emit_report(run_sweep(files, 4), ReportFormat::Csv);
    auto b = emit_report(run_sweep(acceptance_scenarios(), 4), ReportFormat::Csv);
    CHECK(a == b);
}
