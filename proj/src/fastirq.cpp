#include "cv32rt/fastirq.hpp"

#include <algorithm>
#include <cstdio>

namespace cv32rt {

std::vector<FrameSlot> frame_layout(Abi abi, FrameKind kind) {
    std::vector<FrameSlot> f;
    auto gpr = [&](unsigned r) { f.push_back({reg_name(r), SlotSource::Gpr, uint8_t(r)}); };
    if (kind == FrameKind::CallerSave) {
        if (abi == Abi::I) {
            for (unsigned r : {1u, 5u, 6u, 7u, 10u, 11u, 12u, 13u, 14u, 15u, 16u, 17u, 28u, 29u, 30u, 31u}) gpr(r);
        } else {
            for (unsigned r : {1u, 5u, 6u, 10u, 11u, 12u, 13u}) gpr(r);
        }
    } else {
        gpr(1);
        for (unsigned r = 3; r < abi_num_regs(abi); ++r) gpr(r);
    }
    f.push_back({"mepc", SlotSource::Mepc, 0});
    f.push_back({"mcause", SlotSource::Mcause, 0});
    f.push_back({"mstatus", SlotSource::Mstatus, 0});
    return f;
}

unsigned frame_words(Abi abi, FrameKind kind) { return unsigned(frame_layout(abi, kind).size()); }

std::string frame_table(Abi abi, FrameKind kind) {
    std::string out = "| slot | name | offset |\n|---:|:---|---:|\n";
    auto f = frame_layout(abi, kind);
    for (size_t i = 0; i < f.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "| %zu | %s | %zu |\n", i, f[i].name.c_str(), i * 4);
        out += buf;
    }
    return out;
}

bool gate_access(const StallGate& gate, uint32_t addr) {
    if (!gate.active) return false;
    uint32_t rel = addr - gate.base;
    if (rel >= 4 * gate.len) return false;
    return int(rel / 4) > gate.saved_watermark;
}

uint32_t bank_switch(BankedRegfile& rf, SaveFsm& fsm, StallGate& gate, const std::vector<FrameSlot>& frame) {
    unsigned src = rf.active();
    unsigned dst = rf.other();
    uint32_t sp = rf.read_bank(src, 2);
    uint32_t new_sp = sp - 4 * uint32_t(frame.size());
    if (rf.live(dst)) rf.set_clobbered(dst, true);
    rf.set_live(dst, true);
    rf.set_active(dst);
    rf.write_bank(dst, 2, new_sp);

    const LatchedCsrs& csrs = rf.latched(dst);
    fsm.frame = frame;
    fsm.snapshot.clear();
    for (const auto& s : frame) {
        switch (s.src) {
        case SlotSource::Gpr: fsm.snapshot.push_back(rf.read_bank(src, s.reg)); break;
        case SlotSource::Mepc: fsm.snapshot.push_back(csrs.mepc); break;
        case SlotSource::Mcause: fsm.snapshot.push_back(csrs.mcause); break;
        case SlotSource::Mstatus: fsm.snapshot.push_back(csrs.mstatus); break;
        }
    }
    fsm.state = SaveState::AdjustSp;
    fsm.src_bank = src;
    fsm.cursor = 0;
    fsm.base = new_sp;
    fsm.inflight = false;

    gate.active = true;
    gate.saved_watermark = -1;
    gate.base = new_sp;
    gate.len = uint32_t(frame.size());
    return new_sp;
}

DrainResult drain_step(SaveFsm& fsm, StallGate& gate, Memory& mem, uint64_t cycle) {
    DrainResult r;
    switch (fsm.state) {
    case SaveState::Idle: return r;
    case SaveState::AdjustSp:
        fsm.state = SaveState::Draining;
        return r;
    case SaveState::Done:
        fsm.state = SaveState::Idle;
        r.kind = DrainResult::Done;
        r.slot = fsm.cursor;
        return r;
    case SaveState::Draining: break;
    }
    if (!fsm.inflight) {
        uint32_t addr = fsm.base + 4 * fsm.cursor;
        if (!mem.arbiter().drain_may_issue(cycle, mem.bank_of(addr))) {
            r.kind = DrainResult::Deferred;
            r.slot = fsm.cursor;
            r.addr = addr;
            return r;
        }
        AccessResult a = mem.access(Port::Drain, addr, AccessKind::Write, fsm.snapshot[fsm.cursor]);
        r.slot = fsm.cursor;
        r.addr = addr;
        r.value = fsm.snapshot[fsm.cursor];
        if (!a.ok) {
            r.kind = DrainResult::Fault;
            fsm.state = SaveState::Idle;
            gate.active = false;
            return r;
        }
        r.kind = DrainResult::Store;
        r.latency = a.latency;
        fsm.inflight = true;
        fsm.land_cycle = cycle + a.latency - 1;
    }
    if (fsm.inflight && cycle >= fsm.land_cycle) {
        fsm.inflight = false;
        ++fsm.cursor;
        gate.saved_watermark = int(fsm.cursor) - 1;
        if (fsm.cursor == fsm.frame_len()) {
            fsm.state = SaveState::Done;
            gate.active = false;
        }
    }
    return r;
}

unsigned nested_gate(const SaveFsm& fsm) {
    switch (fsm.state) {
    case SaveState::AdjustSp: return fsm.frame_len() + 1;
    case SaveState::Draining: return fsm.frame_len() - fsm.cursor;
    default: return 0;
    }
}

unsigned gate_stall_cycles(const StallGate& gate, uint32_t addr) {
    if (!gate_access(gate, addr)) return 0;
    int slot = int((addr - gate.base) / 4);
    return unsigned(slot - gate.saved_watermark);
}

bool emret_chainable(const Selection& sel, uint8_t mil, uint8_t mintthresh, uint8_t mpil) {
    return sel.level <= mil && sel.level > std::max(mintthresh, mpil);
}

EmretOutcome emret_resolve(const std::optional<Selection>& presented, uint8_t mil, uint8_t mintthresh,
                           uint8_t mpil) {
    EmretOutcome o;
    if (presented && emret_chainable(*presented, mil, mintthresh, mpil)) {
        o.tail_chain = true;
        o.sel = *presented;
    }
    return o;
}

} // namespace cv32rt
