#include "cv32rt/props.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

#include "cv32rt/clic.hpp"
#include "cv32rt/core.hpp"
#include "cv32rt/fastirq.hpp"
#include "cv32rt/kernels.hpp"
#include "cv32rt/report.hpp"
#include "cv32rt/sweep.hpp"

namespace cv32rt {

namespace {

constexpr uint64_t kDefaultSeed = 0x5eed'c32f'0001ull;

using Rng = std::mt19937_64;

uint32_t uniform(Rng& rng, uint32_t lo, uint32_t hi) { return std::uniform_int_distribution<uint32_t>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

void note_mismatch(PropertyResult& r, const std::string& what) {
    if (r.mismatches++ == 0) r.detail = what;
}

void finish(PropertyResult& r, const std::string& summary) {
    if (r.mismatches == 0) r.detail = summary;
}

// --- arbitration -----------------------------------------------------------

struct LineState {
    bool enabled;
    bool pending;
    uint8_t ctl;
};

// Level with the missing low bits set, priority from the remaining bits.
std::pair<unsigned, unsigned> split_ctl(uint8_t ctl, unsigned nlbits) {
    unsigned lvl_mask = nlbits == 0 ? 0 : (0xffu << (8 - nlbits)) & 0xffu;
    unsigned level = (ctl & lvl_mask) | (~lvl_mask & 0xffu);
    unsigned prio = ctl & ~lvl_mask & 0xffu;
    return {level, prio};
}

std::optional<Selection> linear_scan(const std::vector<LineState>& st, unsigned nlbits) {
    std::optional<Selection> best;
    for (uint32_t id = 0; id < st.size(); ++id) {
        if (!st[id].enabled || !st[id].pending) continue;
        auto [lv, pr] = split_ctl(st[id].ctl, nlbits);
        bool better = !best || lv > best->level || (lv == best->level && pr > best->priority) ||
                      (lv == best->level && pr == best->priority && id > best->id);
        if (better) best = Selection{id, uint8_t(lv), uint8_t(pr)};
    }
    return best;
}

std::string sel_str(const std::optional<Selection>& s) {
    if (!s) return "none";
    std::ostringstream o;
    o << "id " << s->id << " level " << unsigned(s->level) << " prio " << unsigned(s->priority);
    return o.str();
}

// --- fastirq programs ------------------------------------------------------

struct HandlerOp {
    enum Kind { Alu, AluImm, LoadFrame, StoreFrame, LoadData, StoreData } kind;
    unsigned rd, rs1, rs2;
    int32_t imm;
};

std::vector<HandlerOp> random_handler(Rng& rng, const std::vector<FrameSlot>& frame) {
    std::vector<unsigned> regs;
    for (const auto& s : frame)
        if (s.src == SlotSource::Gpr) regs.push_back(s.reg);
    auto pick = [&] { return regs[uniform(rng, 0, uint32_t(regs.size() - 1))]; };
    std::vector<HandlerOp> ops(uniform(rng, 2, 24));
    for (auto& op : ops) {
        op.kind = HandlerOp::Kind(uniform(rng, 0, 5));
        op.rd = pick();
        op.rs1 = pick();
        op.rs2 = pick();
        switch (op.kind) {
        case HandlerOp::LoadFrame:
        case HandlerOp::StoreFrame: op.imm = int32_t(4 * uniform(rng, 0, uint32_t(frame.size() - 1))); break;
        case HandlerOp::LoadData:
        case HandlerOp::StoreData: op.imm = int32_t(4 * uniform(rng, 0, 63)); break;
        default: op.imm = int32_t(uniform(rng, 0, 4095)) - 2048; break;
        }
    }
    return ops;
}

void emit_handler(ProgramBuilder& b, const std::vector<HandlerOp>& ops) {
    using namespace reg;
    b.marker(kMarkBody);
    for (const auto& op : ops) {
        switch (op.kind) {
        case HandlerOp::Alu:
            switch (unsigned(op.imm) & 3) {
            case 0: b.add(op.rd, op.rs1, op.rs2); break;
            case 1: b.sub(op.rd, op.rs1, op.rs2); break;
            case 2: b.xor_(op.rd, op.rs1, op.rs2); break;
            default: b.sltu(op.rd, op.rs1, op.rs2); break;
            }
            break;
        case HandlerOp::AluImm: b.addi(op.rd, op.rs1, op.imm); break;
        case HandlerOp::LoadFrame: b.lw(op.rd, op.imm, sp); break;
        case HandlerOp::StoreFrame: b.sw(op.rs2, op.imm, sp); break;
        case HandlerOp::LoadData:
            b.li(op.rd, int32_t(layout::kTaskData));
            b.lw(op.rd, op.imm, op.rd);
            break;
        case HandlerOp::StoreData:
            if (op.rd == op.rs2) {
                b.sw(op.rs2, op.imm - 256, sp);
            } else {
                b.li(op.rd, int32_t(layout::kTaskData));
                b.sw(op.rs2, op.imm, op.rd);
            }
            break;
        }
    }
}

struct FiqRun {
    Abi abi = Abi::I;
    std::vector<HandlerOp> ops;
    // Software-raised rounds, bit 0 line 31 and bit 1 line 30. Empty: the
    // idle loop with the asynchronous schedule.
    std::vector<unsigned> rounds;
    std::vector<InputEvent> schedule;
    std::vector<uint32_t> regs;  // initial bank-0 values, x0..x31
    WaitStates ws;
    DrainPort port = DrainPort::Dedicated;
};

constexpr uint32_t kLineA = 31, kLineB = 30;

FiqRun random_common(Rng& rng) {
    FiqRun r;
    r.abi = coin(rng) ? Abi::I : Abi::E;
    r.ops = random_handler(rng, frame_layout(r.abi, FrameKind::CallerSave));
    r.ws.data = uniform(rng, 0, 2);
    r.port = coin(rng) ? DrainPort::Dedicated : DrainPort::Shared;
    r.regs.resize(32);
    for (auto& v : r.regs) v = uint32_t(rng());
    return r;
}

// Interrupts raised by the thread itself with interrupts masked and taken
// on the enabling csrsi, so the interrupted pc does not depend on timing.
FiqRun random_sync_run(Rng& rng) {
    FiqRun r = random_common(rng);
    r.rounds.resize(uniform(rng, 1, 4));
    for (auto& m : r.rounds) m = uniform(rng, 1, 3);
    return r;
}

// Asynchronous requests on both lines, spaced to land inside handlers.
FiqRun random_chain_run(Rng& rng) {
    FiqRun r = random_common(rng);
    uint64_t t = uniform(rng, 60, 300);
    unsigned n = uniform(rng, 2, 4);
    for (unsigned k = 0; k < n; ++k) {
        uint32_t line = coin(rng) ? kLineA : kLineB;
        r.schedule.push_back({t, line, true});
        r.schedule.push_back({t + 1, line, false});
        t += uniform(rng, 2, 12 + 2 * uint32_t(r.ops.size()));
    }
    std::stable_sort(r.schedule.begin(), r.schedule.end(),
                     [](const InputEvent& a, const InputEvent& b) { return a.cycle < b.cycle; });
    return r;
}

void emit_rounds(ProgramBuilder& b, const std::vector<unsigned>& rounds) {
    using namespace reg;
    for (unsigned m : rounds) {
        // Long enough for any earlier drain to finish.
        std::string wait = b.fresh("wait");
        b.li(s1, 40);
        b.label(wait);
        b.addi(s1, s1, -1);
        b.bnez(s1, wait);
        b.li(s1, 1);
        for (uint32_t line : {kLineA, kLineB}) {
            if (!(m & (line == kLineA ? 1u : 2u))) continue;
            b.li(s0, int32_t(map::kClicBase + clicreg::line_offset(line)));
            b.sb(s1, int32_t(clicreg::kIpByte), s0);
        }
        for (int i = 0; i < 4; ++i) b.nop();
        b.csrsi(csr::kMstatus, mstatus::kMie);
        b.csrci(csr::kMstatus, mstatus::kMie);
    }
    b.ebreak();
}

struct FinalState {
    bool halted = false;
    uint64_t cycles = 0;
    std::vector<uint32_t> regs;
    std::vector<uint32_t> data;
    std::vector<TraceEvent> trace;

    bool same_arch(const FinalState& o) const { return halted == o.halted && regs == o.regs && data == o.data; }
};

FinalState execute(const FiqRun& run, GatePolicy gate) {
    KernelOptions opt;
    opt.lines = {LineSpec{kLineA, 1, 1}, LineSpec{kLineB, 1, 0}};
    opt.fastirq_handler = [&](ProgramBuilder& b, const std::vector<FrameSlot>&) { emit_handler(b, run.ops); };
    if (!run.rounds.empty()) opt.thread_code = [&](ProgramBuilder& b) { emit_rounds(b, run.rounds); };
    Kernel k = build_kernel(KernelVariant::Fastirq, run.abi, opt);
    SimConfig cfg = kernel_config(KernelVariant::Fastirq, run.abi);
    cfg.gate = gate;
    cfg.ws = run.ws;
    cfg.drain_port = run.port;
    Core core(cfg, TraceLevel::Events);
    load_program(core.memory(), k.image);
    core.reset(layout::kEntry);
    for (unsigned r = 1; r < abi_num_regs(run.abi); ++r)
        if (r != reg::sp) core.regs().write_bank(0, r, run.regs[r]);
    for (const auto& e : run.schedule) core.schedule(e);
    FinalState s;
    s.cycles = core.run(40000);
    s.halted = core.halted() && !core.faulted();
    for (unsigned bank = 0; bank < 2; ++bank)
        for (unsigned r = 0; r < 32; ++r) s.regs.push_back(core.regs().read_bank(bank, r));
    s.regs.push_back(core.regs().active());
    for (uint16_t c : {csr::kMepc, csr::kMcause, csr::kMstatus}) s.regs.push_back(core.read_csr_debug(c));
    for (uint32_t a = map::kDataBase; a < map::kDataBase + map::kDataSize; a += 4) s.data.push_back(core.memory().peek32(a));
    s.trace = core.trace().events();
    return s;
}

bool is_lsu(EventKind k) { return k == EventKind::LsuLoad || k == EventKind::LsuStore; }

struct ChainScan {
    unsigned chains = 0;
    unsigned carried = 0;  // stores of a save armed before the chaining emret
};

// Inside a chain window, from the chaining emret to the chained body marker,
// any software frame access or a newly armed hardware save is a redundant
// restore/save. Drain stores of a save armed earlier only finish the
// original one and are counted separately.
void scan_chains(const std::vector<TraceEvent>& trace, PropertyResult& r, const std::string& tag, ChainScan& cs) {
    std::vector<std::pair<uint32_t, uint32_t>> frames;
    bool in_chain = false;
    for (const auto& e : trace) {
        bool entry_save = e.kind == EventKind::BankSwitch && e.id > 0;
        if (entry_save) frames.push_back({e.value, e.value + 4 * e.id});
        if (e.kind == EventKind::EmretChain) {
            in_chain = true;
            ++cs.chains;
            continue;
        }
        if (!in_chain) continue;
        // An abandoned chain returns instead of reaching a chained body.
        if ((e.kind == EventKind::Marker && e.id == kMarkBody) || e.kind == EventKind::EmretReturn) {
            in_chain = false;
            continue;
        }
        if (entry_save) {
            note_mismatch(r, tag + ": hardware save inside a chain: " + format_event(e));
            continue;
        }
        if (e.kind == EventKind::DrainStore) {
            ++cs.carried;
            continue;
        }
        if (!is_lsu(e.kind)) continue;
        bool hit = std::any_of(frames.begin(), frames.end(),
                               [&](const auto& f) { return e.addr >= f.first && e.addr < f.second; });
        if (hit) note_mismatch(r, tag + ": " + format_event(e));
    }
}

} // namespace

uint64_t property_seed() {
    if (const char* s = std::getenv("CV32RT_SIM_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 0);
        if (end && *end == '\0' && end != s) return v;
    }
    return kDefaultSeed;
}

PropertyResult check_arbitration(uint64_t seed, unsigned samples_per_size) {
    PropertyResult r{4, "arbitration oracle", 0, 0, ""};
    Rng rng(seed);
    for (unsigned n : {4u, 16u, 64u, 256u}) {
        for (unsigned k = 0; k < samples_per_size; ++k) {
            unsigned nlbits = uniform(rng, 0, 8);
            Clic clic(ControllerMode::Clic, n, nlbits);
            // A small ctl alphabet makes level and priority ties common.
            bool narrow = coin(rng);
            std::vector<uint8_t> alphabet(uniform(rng, 1, 4));
            for (auto& a : alphabet) a = uint8_t(rng());
            double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            std::vector<LineState> st(n);
            for (uint32_t id = 0; id < n; ++id) {
                st[id].enabled = coin(rng, density);
                st[id].pending = coin(rng, density);
                st[id].ctl = narrow ? alphabet[uniform(rng, 0, uint32_t(alphabet.size() - 1))] : uint8_t(rng());
                clic.configure(id, st[id].enabled, st[id].ctl, coin(rng), Trigger::EdgeRising);
                clic.set_pending(id, st[id].pending);
            }
            auto got = clic.arbitrate();
            auto want = linear_scan(st, nlbits);
            ++r.cases;
            if (got != want)
                note_mismatch(r, "n=" + std::to_string(n) + " nlbits=" + std::to_string(nlbits) + ": tree " +
                                     sel_str(got) + ", scan " + sel_str(want));
        }
    }
    finish(r, std::to_string(r.cases) + " states, n in {4,16,64,256}");
    return r;
}

PropertyResult check_qualify() {
    PropertyResult r{5, "preemption predicate", 0, 0, ""};
    const Priv privs[] = {Priv::U, Priv::S, Priv::M};
    for (Priv in : privs) {
        for (Priv cur : privs) {
            bool vertical = unsigned(in) > unsigned(cur);
            bool same = in == cur;
            for (unsigned lvl = 0; lvl < 256; ++lvl) {
                for (unsigned mil = 0; mil < 256; ++mil) {
                    for (unsigned th = 0; th < 256; ++th) {
                        bool horizontal = same && lvl > th && lvl > mil;
                        bool want = vertical || horizontal;
                        bool got = qualify(Selection{0, uint8_t(lvl), 0}, uint8_t(mil), uint8_t(th), in, cur);
                        ++r.cases;
                        if (got != want) {
                            std::ostringstream o;
                            o << "priv " << unsigned(in) << "/" << unsigned(cur) << " level " << lvl << " mil "
                              << mil << " thresh " << th << ": got " << got;
                            note_mismatch(r, o.str());
                        }
                    }
                }
            }
        }
    }
    finish(r, std::to_string(r.cases) + " combinations");
    return r;
}

PropertyResult check_frame_image(uint64_t seed, unsigned states_per_abi) {
    PropertyResult r{6, "frame image", 0, 0, ""};
    Rng rng(seed ^ 0x6a09e667f3bcc908ull);
    for (Abi abi : {Abi::I, Abi::E}) {
        // Caller-save GPRs in slot order, then mepc, mcause, mstatus.
        std::vector<unsigned> expect_regs = abi == Abi::I
                                                ? std::vector<unsigned>{1, 5, 6, 7, 10, 11, 12, 13, 14, 15, 16, 17,
                                                                        28, 29, 30, 31}
                                                : std::vector<unsigned>{1, 5, 6, 10, 11, 12, 13};
        auto frame = frame_layout(abi, FrameKind::CallerSave);
        const uint32_t len = uint32_t(expect_regs.size() + 3);
        for (unsigned k = 0; k < states_per_abi; ++k) {
            ++r.cases;
            WaitStates ws;
            ws.data = uniform(rng, 0, 3);
            DrainPort port = coin(rng) ? DrainPort::Dedicated : DrainPort::Shared;
            Memory mem(AddressMap::default_map(ws), port);
            const uint32_t lo = map::kDataBase + 4 * len, hi = map::kDataBase + map::kDataSize;
            uint32_t sp_before = lo + 4 * uniform(rng, 0, (hi - lo) / 4);
            // Guard words around the frame detect stray stores.
            const uint32_t guard_lo = std::max(map::kDataBase, sp_before - 4 * len - 64);
            const uint32_t guard_hi = std::min(hi, sp_before + 64);
            for (uint32_t a = guard_lo; a < guard_hi; a += 4) mem.poke(a, 4, 0xdead0000u | (a & 0xffff));

            BankedRegfile rf(abi);
            std::vector<uint32_t> vals(32);
            for (unsigned i = 1; i < 32; ++i) vals[i] = uint32_t(rng());
            vals[2] = sp_before;
            for (unsigned i = 1; i < abi_num_regs(abi); ++i) rf.write_bank(0, i, vals[i]);
            LatchedCsrs csrs{uint32_t(rng()) & ~3u, uint32_t(rng()), uint32_t(rng())};
            rf.latched(1) = csrs;

            std::vector<uint32_t> expect;
            for (unsigned reg : expect_regs) expect.push_back(vals[reg]);
            expect.push_back(csrs.mepc);
            expect.push_back(csrs.mcause);
            expect.push_back(csrs.mstatus);

            SaveFsm fsm;
            StallGate gate;
            uint32_t new_sp = bank_switch(rf, fsm, gate, frame);
            std::ostringstream err;
            if (frame.size() != len) err << "frame has " << frame.size() << " slots, want " << len;
            if (new_sp != sp_before - 4 * len || rf.read(reg::sp) != new_sp)
                err << "sp " << std::hex << rf.read(reg::sp) << ", want " << sp_before - 4 * len;

            bool done = false;
            for (uint64_t cycle = 0; cycle < 1000 && !done; ++cycle) {
                // Random LSU traffic contends with a shared drain port.
                if (port == DrainPort::Shared && coin(rng, 0.3))
                    mem.arbiter().note_lsu(cycle, 1 + ws.data, mem.bank_of(sp_before - 4 * uniform(rng, 1, len)));
                DrainResult d = drain_step(fsm, gate, mem, cycle);
                if (d.kind == DrainResult::Store && (d.addr >= sp_before || d.addr < new_sp))
                    err << "store outside the frame at 0x" << std::hex << d.addr << ' ';
                if (d.kind == DrainResult::Fault) err << "drain fault ";
                done = d.kind == DrainResult::Done || d.kind == DrainResult::Fault;
            }
            if (!done) err << "drain did not finish ";
            for (uint32_t i = 0; i < len; ++i) {
                uint32_t got = mem.peek32(new_sp + 4 * i);
                if (got != expect[i]) {
                    err << "slot " << i << " 0x" << std::hex << got << " want 0x" << expect[i] << ' ';
                    break;
                }
            }
            for (uint32_t a = guard_lo; a < guard_hi; a += 4) {
                if (a >= new_sp && a < sp_before) continue;
                if (mem.peek32(a) != (0xdead0000u | (a & 0xffff))) {
                    err << "guard word 0x" << std::hex << a << " changed ";
                    break;
                }
            }
            if (!err.str().empty())
                note_mismatch(r, std::string(abi_name(abi)) + "-ABI state " + std::to_string(k) + ": " + err.str());
        }
    }
    finish(r, std::to_string(r.cases) + " states over both ABIs");
    return r;
}

PropertyResult check_gate_equivalence(uint64_t seed, unsigned programs) {
    PropertyResult r{7, "gate equivalence", 0, 0, ""};
    Rng rng(seed ^ 0xbb67ae8584caa73bull);
    uint64_t gated_total = 0, blocked_total = 0;
    for (unsigned k = 0; k < programs; ++k) {
        FiqRun run = random_sync_run(rng);
        FinalState g = execute(run, GatePolicy::Watermark);
        FinalState b = execute(run, GatePolicy::BlockUntilDrained);
        ++r.cases;
        gated_total += g.cycles;
        blocked_total += b.cycles;
        std::string tag = "program " + std::to_string(k);
        if (!g.halted || !b.halted) note_mismatch(r, tag + ": did not halt cleanly");
        else if (!g.same_arch(b)) note_mismatch(r, tag + ": final state differs");
        else if (g.cycles > b.cycles)
            note_mismatch(r, tag + ": gated " + std::to_string(g.cycles) + " > blocked " + std::to_string(b.cycles));
    }
    finish(r, std::to_string(r.cases) + " programs, cycles gated " + std::to_string(gated_total) + " vs blocked " +
                  std::to_string(blocked_total));
    return r;
}

PropertyResult check_tail_chain_purity(uint64_t seed, unsigned programs) {
    PropertyResult r{8, "tail-chain purity", 0, 0, ""};
    ChainScan cs;
    for (Abi abi : {Abi::I, Abi::E}) {
        Scenario s;
        s.name = std::string("b2b_fastirq_") + abi_name(abi);
        s.controller = Controller::Fastirq;
        s.abi = abi;
        s.measurement = MeasurementKind::Back2Back;
        ScenarioReport rep = run_scenario(s);
        if (!rep.ok) note_mismatch(r, s.name + ": " + rep.error);
        scan_chains(rep.trace, r, s.name, cs);
    }
    Rng rng(seed ^ 0x3c6ef372fe94f82bull);
    for (unsigned k = 0; k < programs; ++k) {
        FiqRun run = random_chain_run(rng);
        for (GatePolicy gp : {GatePolicy::Watermark, GatePolicy::BlockUntilDrained}) {
            FinalState f = execute(run, gp);
            if (!f.halted) note_mismatch(r, "chain program " + std::to_string(k) + ": did not halt cleanly");
            scan_chains(f.trace, r, "chain program " + std::to_string(k), cs);
        }
    }
    r.cases = cs.chains;
    if (cs.chains == 0) r.detail = "no tail chain observed";
    finish(r, std::to_string(cs.chains) + " chained entries, " + std::to_string(cs.carried) +
                  " stores of an earlier save completing");
    return r;
}

PropertyResult check_determinism(unsigned jobs) {
    PropertyResult r{9, "determinism", 0, 0, ""};
    auto scenarios = acceptance_scenarios();
    auto a = run_sweep(scenarios, 1);
    auto b = run_sweep(scenarios, std::max(2u, jobs));
    ++r.cases;
    if (emit_report(a, ReportFormat::Csv) != emit_report(b, ReportFormat::Csv)) note_mismatch(r, "CSV differs");
    if (emit_report(a, ReportFormat::Markdown) != emit_report(b, ReportFormat::Markdown))
        note_mismatch(r, "markdown differs");
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
        ++r.cases;
        if (format_trace(a[i].trace) != format_trace(b[i].trace)) note_mismatch(r, "trace differs: " + a[i].scenario);
    }
    finish(r, std::to_string(a.size()) + " scenarios, CSV and traces identical");
    return r;
}

} // namespace cv32rt
