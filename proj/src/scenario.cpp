#include "cv32rt/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cv32rt/program.hpp"

namespace cv32rt {

namespace {

struct ControllerInfo {
    Controller c;
    const char* name;
    KernelVariant kernel;
};

constexpr ControllerInfo kControllers[] = {
    {Controller::Clint, "clint", KernelVariant::ClintNested},
    {Controller::Clic, "clic", KernelVariant::ClicNested},
    {Controller::ClicXnxti, "clic-xnxti", KernelVariant::XnxtiLoop},
    {Controller::ClicJalxnxti, "clic-jalxnxti", KernelVariant::Jalxnxti},
    {Controller::Fastirq, "fastirq", KernelVariant::Fastirq},
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

uint64_t parse_uint(const std::string& v, const std::string& key) {
    if (v.empty() || v[0] == '-') throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    size_t used = 0;
    uint64_t x = 0;
    try {
        x = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return x;
}

unsigned parse_small(const std::string& v, const std::string& key, uint64_t max) {
    uint64_t x = parse_uint(v, key);
    if (x > max) throw ConfigError(key + ": value " + v + " out of range");
    return unsigned(x);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

Trigger parse_trigger(const std::string& v) {
    if (v == "edge" || v == "rising") return Trigger::EdgeRising;
    if (v == "falling") return Trigger::EdgeFalling;
    if (v == "high" || v == "level") return Trigger::LevelHigh;
    if (v == "low") return Trigger::LevelLow;
    throw ConfigError("line: unknown trigger '" + v + "'");
}

const char* trigger_name(Trigger t) {
    switch (t) {
    case Trigger::EdgeRising: return "rising";
    case Trigger::EdgeFalling: return "falling";
    case Trigger::LevelHigh: return "high";
    case Trigger::LevelLow: return "low";
    }
    return "?";
}

void set_key(Scenario& s, const std::string& key, const std::string& v) {
    if (key == "name") {
        s.name = v;
    } else if (key == "controller") {
        auto it = std::find_if(std::begin(kControllers), std::end(kControllers),
                               [&](const ControllerInfo& c) { return v == c.name; });
        if (it == std::end(kControllers)) throw ConfigError("controller: unknown value '" + v + "'");
        s.controller = it->c;
    } else if (key == "abi") {
        if (v == "I") s.abi = Abi::I;
        else if (v == "E") s.abi = Abi::E;
        else throw ConfigError("abi: expected I or E, got '" + v + "'");
    } else if (key == "kernel") {
        if (v == "ctxswitch") s.measurement = MeasurementKind::CtxSwitch;
        else s.kernel = parse_variant(v);
    } else if (key == "measurement") {
        if (v == "latency") s.measurement = MeasurementKind::Latency;
        else if (v == "back2back") s.measurement = MeasurementKind::Back2Back;
        else if (v == "ctxswitch") s.measurement = MeasurementKind::CtxSwitch;
        else throw ConfigError("measurement: unknown value '" + v + "'");
    } else if (key == "accelerated") {
        s.accelerated = parse_bool(v, key);
    } else if (key == "switches") {
        s.switches = parse_small(v, key, 1000);
    } else if (key == "nlbits") {
        s.nlbits = parse_small(v, key, 8);
    } else if (key == "lines") {
        s.num_lines = parse_small(v, key, 4096);
    } else if (key == "arb_stages") {
        s.arb_stages = parse_small(v, key, 16);
    } else if (key == "drain_port") {
        if (v == "dedicated") s.drain_port = DrainPort::Dedicated;
        else if (v == "shared") s.drain_port = DrainPort::Shared;
        else throw ConfigError("drain_port: expected dedicated or shared, got '" + v + "'");
    } else if (key == "gate") {
        if (v == "watermark") s.gate = GatePolicy::Watermark;
        else if (v == "block") s.gate = GatePolicy::BlockUntilDrained;
        else throw ConfigError("gate: expected watermark or block, got '" + v + "'");
    } else if (key == "ws.instr") {
        s.ws.instr = parse_small(v, key, 64);
    } else if (key == "ws.data") {
        s.ws.data = parse_small(v, key, 64);
    } else if (key == "ws.clic") {
        s.ws.clic = parse_small(v, key, 64);
    } else if (key == "ws.stub") {
        s.ws.stub = parse_small(v, key, 64);
    } else if (key == "trap_extra") {
        s.trap_extra = parse_small(v, key, 1000);
    } else if (key == "idle_iters") {
        s.idle_iters = parse_small(v, key, 1u << 20);
    } else if (key == "max_cycles") {
        s.max_cycles = parse_uint(v, key);
    } else if (key == "line") {
        auto f = split_list(v);
        if (f.size() < 3 || f.size() > 4) throw ConfigError("line: expected id,level,priority[,trigger]");
        LineSpec l;
        l.id = parse_small(f[0], key, 4095);
        l.level = uint8_t(parse_small(f[1], key, 255));
        l.priority = uint8_t(parse_small(f[2], key, 255));
        if (f.size() == 4) l.trigger = parse_trigger(f[3]);
        s.lines.push_back(l);
    } else if (key == "irq") {
        auto f = split_list(v);
        if (f.size() != 3) throw ConfigError("irq: expected cycle,line,assert|deassert");
        InputEvent e;
        e.cycle = parse_uint(f[0], key);
        e.line = parse_small(f[1], key, 4095);
        if (f[2] == "assert") e.assert_ = true;
        else if (f[2] == "deassert") e.assert_ = false;
        else throw ConfigError("irq: expected assert or deassert, got '" + f[2] + "'");
        s.schedule.push_back(e);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

} // namespace

const char* controller_name(Controller c) {
    for (const auto& i : kControllers)
        if (i.c == c) return i.name;
    return "?";
}

const char* measurement_name(MeasurementKind m) {
    switch (m) {
    case MeasurementKind::Latency: return "latency";
    case MeasurementKind::Back2Back: return "back2back";
    case MeasurementKind::CtxSwitch: return "ctxswitch";
    }
    return "?";
}

const char* abi_name(Abi a) { return a == Abi::I ? "I" : "E"; }

KernelVariant Scenario::effective_kernel() const {
    if (kernel) return *kernel;
    for (const auto& i : kControllers)
        if (i.c == controller) return i.kernel;
    return KernelVariant::ClicNested;
}

SimConfig Scenario::sim_config() const {
    SimConfig c;
    if (measurement == MeasurementKind::CtxSwitch) {
        c.mode = ControllerMode::Clic;
        c.fastirq = accelerated;
        c.num_lines = 64;
    } else {
        c = kernel_config(effective_kernel(), abi);
    }
    c.abi = abi;
    if (num_lines) c.num_lines = num_lines;
    c.nlbits = nlbits;
    c.arb_stages = arb_stages;
    c.drain_port = drain_port;
    c.gate = gate;
    c.ws = ws;
    c.cal.trap_extra = trap_extra;
    if (measurement == MeasurementKind::CtxSwitch && accelerated) c.ctx_line = build_ctxswitch(abi, true, 1).line;
    return c;
}

void Scenario::validate() const {
    if (measurement == MeasurementKind::CtxSwitch) {
        if (accelerated != (controller == Controller::Fastirq))
            throw ConfigError("ctxswitch: accelerated runs need the fastirq controller and baseline runs the clic one");
        if (!accelerated && controller != Controller::Clic)
            throw ConfigError("ctxswitch: baseline runs use the clic controller");
    } else {
        SimConfig want = kernel_config(effective_kernel(), abi);
        SimConfig have;
        for (const auto& i : kControllers)
            if (i.c == controller) have = kernel_config(i.kernel, abi);
        if (want.mode != have.mode || want.fastirq != have.fastirq)
            throw ConfigError(std::string("kernel ") + variant_name(effective_kernel()) + " does not run on controller " +
                              controller_name(controller));
    }
    sim_config().validate();
    std::map<uint32_t, uint64_t> last;
    for (const auto& e : schedule) {
        auto it = last.find(e.line);
        if (it != last.end() && e.cycle <= it->second)
            throw ConfigError("schedule cycles must be strictly increasing per line");
        last[e.line] = e.cycle;
    }
}

Scenario parse_scenario(const std::string& text, const std::string& name) {
    Scenario s;
    s.name = name;
    std::stringstream ss(text);
    std::string line;
    unsigned n = 0;
    while (std::getline(ss, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key=value");
        try {
            set_key(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(n) + ": " + e.what());
        }
    }
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem.resize(dot);
    try {
        return parse_scenario(buf.str(), stem);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string format_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "name=" << s.name << ";controller=" << controller_name(s.controller) << ";abi=" << abi_name(s.abi);
    if (s.measurement == MeasurementKind::CtxSwitch) {
        o << ";kernel=ctxswitch;accelerated=" << (s.accelerated ? "true" : "false") << ";switches=" << s.switches;
    } else {
        o << ";kernel=" << variant_name(s.effective_kernel());
    }
    o << ";measurement=" << measurement_name(s.measurement) << ";nlbits=" << s.nlbits;
    if (s.num_lines) o << ";lines=" << s.num_lines;
    o << ";arb_stages=" << s.arb_stages << ";drain_port=" << (s.drain_port == DrainPort::Shared ? "shared" : "dedicated")
      << ";gate=" << (s.gate == GatePolicy::Watermark ? "watermark" : "block") << ";ws.instr=" << s.ws.instr
      << ";ws.data=" << s.ws.data << ";ws.clic=" << s.ws.clic << ";ws.stub=" << s.ws.stub;
    if (s.trap_extra) o << ";trap_extra=" << s.trap_extra;
    for (const auto& l : s.lines)
        o << ";line=" << l.id << "," << unsigned(l.level) << "," << unsigned(l.priority) << "," << trigger_name(l.trigger);
    for (const auto& e : s.schedule) o << ";irq=" << e.cycle << "," << e.line << "," << (e.assert_ ? "assert" : "deassert");
    return o.str();
}

std::vector<LineSpec> default_lines(const Scenario& s) {
    if (!s.lines.empty()) return s.lines;
    if (s.measurement == MeasurementKind::Back2Back) {
        // Same level, the first one wins on priority.
        return {LineSpec{31, 1, 1, Trigger::EdgeRising}, LineSpec{30, 1, 0, Trigger::EdgeRising}};
    }
    return {LineSpec{}};
}

std::vector<InputEvent> default_schedule(const Scenario& s) {
    if (!s.schedule.empty()) return s.schedule;
    std::vector<InputEvent> out;
    if (s.measurement == MeasurementKind::CtxSwitch) return out;
    for (const auto& l : default_lines(s)) {
        out.push_back({200, l.id, true});
        out.push_back({201, l.id, false});
    }
    std::stable_sort(out.begin(), out.end(), [](const InputEvent& a, const InputEvent& b) { return a.cycle < b.cycle; });
    return out;
}

ScenarioReport run_scenario(const Scenario& s) {
    ScenarioReport r;
    r.scenario = s.name;
    r.controller = s.controller;
    r.abi = s.abi;
    r.measurement = s.measurement;
    r.config = format_scenario(s);
    try {
        s.validate();
        SimConfig cfg = s.sim_config();
        Core core(cfg, TraceLevel::Full);
        if (s.measurement == MeasurementKind::CtxSwitch) {
            r.kernel = "ctxswitch";
            CtxSwitchProgram p = build_ctxswitch(s.abi, s.accelerated, s.switches);
            load_program(core.memory(), p.image);
        } else {
            KernelOptions opt;
            opt.lines = default_lines(s);
            opt.nlbits = s.nlbits;
            opt.idle_iters = s.idle_iters;
            Kernel k = build_kernel(s.effective_kernel(), s.abi, opt);
            r.kernel = variant_name(k.variant);
            load_program(core.memory(), k.image);
        }
        core.reset(layout::kEntry);
        for (const auto& e : default_schedule(s)) core.schedule(e);
        r.sim_cycles = core.run(s.max_cycles);
        r.trace = core.trace().events();
        if (core.faulted()) {
            const TraceEvent& f = r.trace.back();
            std::ostringstream o;
            o << "simulation fault at cycle " << f.cycle << ": " << format_event(f);
            r.error = o.str();
            return r;
        }
        if (!core.halted()) {
            r.error = "program did not halt within " + std::to_string(s.max_cycles) + " cycles";
            return r;
        }
        Measurement m;
        switch (s.measurement) {
        case MeasurementKind::Latency: m = measure_latency(r.trace); break;
        case MeasurementKind::Back2Back: m = measure_back2back(r.trace); break;
        case MeasurementKind::CtxSwitch: m = measure_ctxswitch(r.trace); break;
        }
        r.cycles = m.cycles;
        r.breakdown = m.breakdown;
        r.ok = true;
    } catch (const ConfigError& e) {
        r.error = std::string("configuration error: ") + e.what();
    } catch (const AnalysisError& e) {
        r.error = std::string("analysis error: ") + e.what();
    }
    return r;
}

} // namespace cv32rt
