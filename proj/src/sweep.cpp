#include "cv32rt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <thread>

namespace cv32rt {

namespace {

Scenario make(const std::string& name, Controller c, Abi abi, MeasurementKind m) {
    Scenario s;
    s.name = name;
    s.controller = c;
    s.abi = abi;
    s.measurement = m;
    if (m == MeasurementKind::CtxSwitch) s.accelerated = c == Controller::Fastirq;
    return s;
}

struct Tag {
    Controller c;
    const char* tag;
};

constexpr Tag kLatency[] = {{Controller::Fastirq, "fastirq"}, {Controller::Clic, "clic"},
                            {Controller::Clint, "clint"},     {Controller::ClicXnxti, "xnxti"},
                            {Controller::ClicJalxnxti, "jalxnxti"}};
constexpr Tag kBack2Back[] = {{Controller::Fastirq, "fastirq"}, {Controller::Clic, "clic"},
                              {Controller::ClicXnxti, "xnxti"}, {Controller::ClicJalxnxti, "jalxnxti"}};

class Lookup {
public:
    explicit Lookup(const std::vector<ScenarioReport>& r) {
        for (const auto& x : r) by_name_[x.scenario] = &x;
    }
    const ScenarioReport* get(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end() || !it->second->ok) return nullptr;
        return it->second;
    }
    std::optional<double> cycles(const std::string& name) const {
        const ScenarioReport* r = get(name);
        if (!r) return std::nullopt;
        return double(r->cycles);
    }

private:
    std::map<std::string, const ScenarioReport*> by_name_;
};

std::string fmt(double v) {
    char buf[32];
    if (v == std::floor(v)) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

BandCheck band(unsigned crit, const std::string& name, std::optional<double> v, double lo, double hi) {
    BandCheck b{crit, name, false, ""};
    if (!v) {
        b.detail = "missing scenario result";
        return b;
    }
    b.pass = *v >= lo && *v <= hi;
    b.detail = "value " + fmt(*v) + (lo == hi ? ", want " + fmt(lo) : ", want [" + fmt(lo) + ", " + fmt(hi) + "]");
    return b;
}

// Second body marker minus the first one.
std::optional<double> handler_to_handler(const ScenarioReport* r) {
    if (!r) return std::nullopt;
    std::vector<uint64_t> m;
    for (const auto& e : r->trace)
        if (e.kind == EventKind::Marker && e.id == kMarkBody) m.push_back(e.cycle);
    if (m.size() < 2) return std::nullopt;
    return double(m[1] - m[0]);
}

} // namespace

std::vector<Scenario> acceptance_scenarios() {
    std::vector<Scenario> out;
    for (Abi abi : {Abi::I, Abi::E}) {
        std::string suffix = std::string("_") + abi_name(abi);
        for (const auto& t : kLatency) out.push_back(make(std::string("lat_") + t.tag + suffix, t.c, abi, MeasurementKind::Latency));
        for (const auto& t : kBack2Back)
            out.push_back(make(std::string("b2b_") + t.tag + suffix, t.c, abi, MeasurementKind::Back2Back));
        out.push_back(make("ctx_baseline" + suffix, Controller::Clic, abi, MeasurementKind::CtxSwitch));
        out.push_back(make("ctx_fastirq" + suffix, Controller::Fastirq, abi, MeasurementKind::CtxSwitch));
    }
    return out;
}

std::vector<ScenarioReport> run_sweep(const std::vector<Scenario>& scenarios, unsigned jobs) {
    if (scenarios.empty()) throw ConfigError("empty scenario set");
    std::set<std::string> names;
    for (const auto& s : scenarios)
        if (!names.insert(s.name).second) throw ConfigError("duplicate scenario name: " + s.name);
    std::vector<ScenarioReport> out(scenarios.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < scenarios.size(); i = next++) out[i] = run_scenario(scenarios[i]);
    };
    unsigned n = std::max(1u, std::min<unsigned>(jobs, unsigned(scenarios.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::sort(out.begin(), out.end(),
              [](const ScenarioReport& a, const ScenarioReport& b) { return a.scenario < b.scenario; });
    return out;
}

std::vector<BandCheck> evaluate_bands(const std::vector<ScenarioReport>& reports) {
    Lookup L(reports);
    std::vector<BandCheck> out;

    // 1. latency ladder
    auto fi = L.cycles("lat_fastirq_I"), fe = L.cycles("lat_fastirq_E");
    auto clic = L.cycles("lat_clic_I"), clint = L.cycles("lat_clint_I");
    auto xn = L.cycles("lat_xnxti_I"), jal = L.cycles("lat_jalxnxti_I");
    out.push_back(band(1, "fastirq latency (I)", fi, 6, 6));
    out.push_back(band(1, "fastirq latency (E)", fe, 6, 6));
    out.push_back(band(1, "clic latency", clic, 31, 35));
    out.push_back(band(1, "clint latency", clint, 31, 35));
    out.push_back(band(1, "xnxti latency", xn, 40, 44));
    out.push_back(band(1, "jalxnxti latency", jal, 33, 37));
    {
        BandCheck b{1, "latency ordering", false, "missing scenario result"};
        if (fi && clic && clint && xn && jal) {
            b.pass = *fi < *jal && *jal < std::min(*clic, *clint) && std::max(*clic, *clint) < *xn;
            b.detail = "fastirq " + fmt(*fi) + " < jalxnxti " + fmt(*jal) + " < clic " + fmt(*clic) + " / clint " +
                       fmt(*clint) + " < xnxti " + fmt(*xn);
        }
        out.push_back(b);
    }

    // 2. back-to-back
    out.push_back(band(2, "clic back-to-back (I)", L.cycles("b2b_clic_I"), 66, 70));
    out.push_back(band(2, "clic back-to-back (E)", L.cycles("b2b_clic_E"), 48, 52));
    {
        auto bx = L.cycles("b2b_xnxti_I"), bj = L.cycles("b2b_jalxnxti_I");
        std::optional<double> d;
        if (bx && bj) d = *bx - *bj;
        out.push_back(band(2, "xnxti minus jalxnxti back-to-back", d, 9, 9));
    }
    out.push_back(band(2, "emret back-to-back", L.cycles("b2b_fastirq_I"), 7, 9));
    out.push_back(band(2, "fastirq handler-to-handler", handler_to_handler(L.get("b2b_fastirq_I")), 0, 12));

    // 3. context switch
    for (Abi abi : {Abi::I, Abi::E}) {
        std::string sfx = std::string("_") + abi_name(abi);
        auto base = L.cycles("ctx_baseline" + sfx), acc = L.cycles("ctx_fastirq" + sfx);
        std::optional<double> delta, pct;
        if (base && acc) {
            delta = *acc - *base;
            pct = 100.0 * *delta / *base;
        }
        double dcen = abi == Abi::I ? -31 : -16, pcen = abi == Abi::I ? -19 : -12;
        out.push_back(band(3, std::string("ctxswitch delta (") + abi_name(abi) + ")", delta, dcen - 3, dcen + 3));
        out.push_back(band(3, std::string("ctxswitch percent (") + abi_name(abi) + ")", pct, pcen - 3, pcen + 3));
    }
    out.push_back(band(3, "fastirq ctxswitch absolute (I)", L.cycles("ctx_fastirq_I"), 100, 135));
    return out;
}

bool all_pass(const std::vector<BandCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const BandCheck& b) { return b.pass; });
}

std::string format_bands(const std::vector<BandCheck>& checks) {
    std::string out;
    for (const auto& b : checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s [%u] %-36s %s\n", b.pass ? "PASS" : "FAIL", b.criterion, b.name.c_str(),
                      b.detail.c_str());
        out += buf;
    }
    return out;
}

} // namespace cv32rt
