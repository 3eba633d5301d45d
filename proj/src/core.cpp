#include "cv32rt/core.hpp"

#include <algorithm>

namespace cv32rt {

namespace {

constexpr uint32_t kMstatusWritable = mstatus::kMie | mstatus::kMpie;
constexpr uint32_t kMcauseMirror = mcause::kMpieBit | (3u << mcause::kMppShift);

uint32_t mret_status(uint32_t mst) {
    uint32_t v = mst & ~mstatus::kMie;
    if (mst & mstatus::kMpie) v |= mstatus::kMie;
    return v | mstatus::kMpie | mstatus::kMppMask;
}

bool is_status_csr(uint16_t a) { return a == csr::kMstatus || a == csr::kMie || a == csr::kMintthresh; }

uint32_t apply_op(uint32_t old, CsrOp op, uint32_t v) {
    switch (op) {
    case CsrOp::Write: return v;
    case CsrOp::Set: return old | v;
    case CsrOp::Clear: return old & ~v;
    }
    return old;
}

} // namespace

void SimConfig::validate() const {
    if (fastirq && mode != ControllerMode::Clic) throw ConfigError("fastirq requires the CLIC controller");
    if (nlbits > 8) throw ConfigError("nlbits must be in 0..8");
    if (num_lines == 0 || num_lines > 4096) throw ConfigError("line count must be in 1..4096");
    if (mode == ControllerMode::Clint && num_lines > 32) throw ConfigError("CLINT mode supports at most 32 lines");
    if (ctx_line && *ctx_line >= num_lines) throw ConfigError("context-switch line out of range");
    if (cal.flush_cycles == 0 || cal.vector_load_cycles == 0 || cal.mnxti_occupancy == 0 ||
        cal.jalxnxti_occupancy == 0 || cal.exception_flush == 0 || cal.serialize_delay == 0)
        throw ConfigError("calibration cycle counts must be positive");
}

Core::Core(const SimConfig& cfg, TraceLevel level) : cfg_(cfg), rf_(cfg.abi), sink_(level) {
    cfg_.validate();
    mem_ = std::make_unique<Memory>(AddressMap::default_map(cfg_.ws), cfg_.drain_port);
    clic_ = std::make_unique<Clic>(cfg_.mode, cfg_.num_lines, cfg_.nlbits, cfg_.arb_stages);
    stub_ = std::make_unique<WireStub>(*clic_);
    mem_->attach(RegionKind::ClicMmio, clic_.get());
    mem_->attach(RegionKind::StubDevice, stub_.get());
    reset(0);
}

void Core::reset(uint32_t pc) {
    fetch_pc_ = pc;
    if_ = {};
    id_ = {};
    ex_ = {};
    wb_ = {};
    redirect_ = {};
    seq_ = {};
    halted_ = faulted_ = false;
    reg_ready_.fill(0);
}

void Core::schedule(const InputEvent& ev) {
    auto it = std::upper_bound(inputs_.begin() + long(next_input_), inputs_.end(), ev,
                               [](const InputEvent& a, const InputEvent& b) { return a.cycle < b.cycle; });
    inputs_.insert(it, ev);
}

void Core::emit(TraceEvent e) {
    e.cycle = cycle_;
    if (sink_.level() == TraceLevel::Off) return;
    if (sink_.level() == TraceLevel::Events && is_pipeline_event(e.kind)) return;
    sink_.emit(e);
    cycle_events_.push_back(e);
}

void Core::emit_kind(EventKind k, uint32_t pc, uint32_t addr, uint32_t value, uint32_t id, uint32_t level,
                     uint32_t aux) {
    TraceEvent e;
    e.kind = k;
    e.pc = pc;
    e.addr = addr;
    e.value = value;
    e.id = id;
    e.level = level;
    e.aux = aux;
    emit(e);
}

void Core::fault(uint32_t pc, uint32_t addr, uint32_t code) {
    emit_kind(EventKind::Fault, pc, addr, 0, 0, 0, code);
    faulted_ = true;
    halted_ = true;
}

void Core::kill_front() {
    if_.valid = false;
    id_.valid = false;
}

void Core::set_redirect(uint64_t at, uint32_t target) {
    redirect_.valid = true;
    redirect_.at = at;
    redirect_.target = target;
}

void Core::write_reg(unsigned rd, uint32_t v, uint64_t ready) {
    if (rd == 0) return;
    rf_.write(rd, v);
    reg_ready_[rd] = ready;
}

std::vector<TraceEvent> Core::step() {
    cycle_events_.clear();
    if (halted_) {
        ++cycle_;
        return {};
    }
    const uint64_t c = cycle_;

    // 1. interrupt wires
    while (next_input_ < inputs_.size() && inputs_[next_input_].cycle <= c) {
        const InputEvent& in = inputs_[next_input_++];
        clic_->set_input(in.line, in.assert_);
        emit_kind(in.assert_ ? EventKind::IrqAssert : EventKind::IrqDeassert, 0, 0, 0, in.line);
    }

    // 2. write-back
    if (wb_.valid) {
        emit_kind(EventKind::Retire, wb_.pc, 0, 0, 0, 0, wb_.tag);
        ++csr_.minstret;
        wb_.valid = false;
    }

    // 3. execute -> write-back
    if (ex_.valid && c >= ex_.done) {
        if (ex_.retire) wb_ = {true, ex_.pc, ex_.tag};
        ex_.valid = false;
    }

    // 4. trap sequencing and interrupt acceptance
    if (seq_.kind != SeqKind::None) advance_sequence();
    else try_accept();

    // 5. issue
    if (!halted_) try_issue();

    // 6. redirects and decode
    if (!halted_) {
        if (redirect_.valid && redirect_.at <= c) {
            kill_front();
            fetch_pc_ = redirect_.target;
            redirect_.valid = false;
        }
        if (if_.valid && c >= if_.ready && !id_.valid) {
            id_.valid = true;
            id_.pc = if_.pc;
            id_.ins = decode(if_.word, cfg_.abi);
            id_.tag = if_.tag;
            if_.valid = false;
        }
    }

    // 7. fetch
    if (!halted_ && seq_.kind == SeqKind::None && !if_.valid) {
        AccessResult r = mem_->access(Port::Fetch, fetch_pc_, AccessKind::Read, 0, 4);
        if (!r.ok) {
            fault(fetch_pc_, fetch_pc_, 1);
        } else {
            if_ = {true, fetch_pc_, r.data, c + r.latency, next_tag_++};
            emit_kind(EventKind::Fetch, fetch_pc_, 0, 0, 0, 0, if_.tag);
            emit_kind(EventKind::Mem, 0, fetch_pc_, r.latency, 0, 0, static_cast<uint32_t>(Port::Fetch));
            fetch_pc_ += 4;
        }
    }

    // 8. background save
    if (!halted_ && cfg_.fastirq) {
        DrainResult d = drain_step(fsm_, gate_, *mem_, c);
        switch (d.kind) {
        case DrainResult::Store:
            emit_kind(EventKind::DrainStore, 0, d.addr, d.value, 0, 0, d.slot);
            emit_kind(EventKind::Mem, 0, d.addr, d.latency, 0, 0, static_cast<uint32_t>(Port::Drain));
            break;
        case DrainResult::Done: emit_kind(EventKind::DrainDone, 0, 0, 0, 0, 0, d.slot); break;
        case DrainResult::Fault: fault(0, d.addr, 2); break;
        default: break;
        }
    }

    // 9. controller presentation for the next cycle
    clic_->set_clint_enable(csr_.mie);
    TraceSink ctl_events(TraceLevel::Events);
    clic_->tick(c, ctl_events);
    for (const auto& e : ctl_events.events()) emit(e);

    ++cycle_;
    return cycle_events_;
}

uint64_t Core::run(uint64_t max_cycles) {
    while (!halted_ && cycle_ < max_cycles) step();
    return cycle_;
}

bool Core::qualifies(const Selection& sel) const {
    const LatchedCsrs& l = rf_.cur();
    if (!(l.mstatus & mstatus::kMie)) return false;
    if (cfg_.mode == ControllerMode::Clint) return ((csr_.mie >> sel.id) & 1) != 0;
    return qualify(sel, csr_.mil, csr_.mintthresh, Priv::M, Priv::M);
}

void Core::try_accept() {
    const Handshake& hs = clic_->handshake();
    if (!hs.valid || !qualifies(hs.sel) || !clic_->pending_enabled(hs.sel.id)) {
        nested_wait_ = 0;
        return;
    }
    if (ex_.valid) return;
    if (cfg_.fastirq && fsm_.busy()) {
        ++nested_wait_;
        return;
    }
    Selection sel = hs.sel;
    if (nested_wait_ > 0) emit_kind(EventKind::NestedWait, 0, 0, uint32_t(nested_wait_), sel.id);
    nested_wait_ = 0;
    clic_->accept();
    emit_kind(EventKind::Handshake, 0, 0, 0, sel.id, sel.level, 0);
    seq_ = {};
    seq_.kind = SeqKind::Irq;
    seq_.sel = sel;
    seq_.handshaken = true;
    seq_.t_handshake = cycle_;
    seq_.t_flush = cycle_ + 1 + cfg_.cal.trap_extra;
    if (cfg_.mode == ControllerMode::Clic) seq_.vectored_load = clic_->line(sel.id).shv;
}

uint32_t Core::direct_base() const {
    if (cfg_.mode == ControllerMode::Clic) return csr_.mtvec & ~63u;
    return csr_.mtvec & ~3u;
}

void Core::advance_sequence() {
    const uint64_t c = cycle_;
    Sequence& s = seq_;
    if (s.kind == SeqKind::Chain && !s.handshaken) {
        if (c < s.t_handshake) return;
        const Handshake& hs = clic_->handshake();
        uint8_t mpil = mcause::mpil(rf_.cur().mcause);
        auto chainable = [&](const Selection& sel) {
            return clic_->pending_enabled(sel.id) && emret_chainable(sel, csr_.mil, csr_.mintthresh, mpil);
        };
        if (!hs.valid || hs.kill || !chainable(hs.sel)) {
            // A kill restarts the presentation; keep the chain while a
            // chainable request is still pending.
            std::optional<Selection> next = clic_->arbitrate();
            if ((!hs.valid || hs.kill) && next && chainable(*next)) return;
            // The chained request vanished while resolving: plain return.
            ReturnOutcome o = trap_return(true);
            emit_kind(EventKind::EmretReturn, 0, 0, o.target, 0, 0, o.via_stub ? 1 : 0);
            emit_kind(EventKind::BankSwitch, 0, 0, rf_.read(2), 0, 0, rf_.active());
            reg_ready_.fill(0);
            fetch_pc_ = o.target;
            seq_ = {};
            return;
        }
        s.sel = hs.sel;
        clic_->accept();
        s.handshaken = true;
        emit_kind(EventKind::Handshake, 0, 0, 0, s.sel.id, s.sel.level, 1);
        LatchedCsrs& l = rf_.cur();
        set_mcause(l, (l.mcause & ~mcause::kCodeMask) | mcause::kInterrupt | (s.sel.id & mcause::kCodeMask));
        csr_.mil = s.sel.level;
        s.vectored_load = clic_->line(s.sel.id).shv;
        s.t_flush = c + 1 + cfg_.cal.trap_extra;
        return;
    }
    if (!s.flushed) {
        if (c < s.t_flush) return;
        s.flushed = true;
        if (redirect_.valid) {
            fetch_pc_ = redirect_.target;
            redirect_.valid = false;
        }
        uint32_t oldest = id_.valid ? id_.pc : (if_.valid ? if_.pc : fetch_pc_);
        kill_front();
        switch (s.kind) {
        case SeqKind::Irq: {
            s.epc = oldest;
            emit_kind(EventKind::Flush, oldest);
            unsigned bank = cfg_.fastirq ? rf_.other() : rf_.active();
            enter_trap_csrs(bank, true, s.sel.id, s.epc, s.sel.level);
            if (cfg_.fastirq) {
                FrameKind fk = (cfg_.ctx_line && *cfg_.ctx_line == s.sel.id) ? FrameKind::Full : FrameKind::CallerSave;
                auto frame = frame_layout(cfg_.abi, fk);
                uint32_t sp = bank_switch(rf_, fsm_, gate_, frame);
                reg_ready_.fill(0);
                emit_kind(EventKind::BankSwitch, 0, 0, sp, uint32_t(frame.size()), 0, rf_.active());
            }
            if (!s.vectored_load) {
                s.target = direct_base();
                if (cfg_.mode == ControllerMode::Clint && (csr_.mtvec & 3) == 1) s.target += 4 * s.sel.id;
            }
            emit_kind(EventKind::Trap, s.epc, 0, s.vectored_load ? 0 : s.target, s.sel.id, 0, 1);
            break;
        }
        case SeqKind::Exception:
            emit_kind(EventKind::Flush, s.epc);
            enter_trap_csrs(rf_.active(), false, s.cause, s.epc, 0);
            s.target = direct_base();
            emit_kind(EventKind::Trap, s.epc, 0, s.target, s.cause, 0, 0);
            break;
        case SeqKind::Chain:
            emit_kind(EventKind::Flush, rf_.cur().mepc);
            if (!s.vectored_load) s.target = direct_base();
            break;
        case SeqKind::None: break;
        }
        uint64_t after = c + cfg_.cal.flush_cycles;
        if (s.vectored_load) s.t_vector = after;
        else s.t_fetch = after;
        if (!s.vectored_load && s.t_fetch > c) return;
    }
    if (s.vectored_load && s.t_vector != 0) {
        if (c < s.t_vector) return;
        uint32_t addr = csr_.mtvt + 4 * s.sel.id;
        AccessResult r = mem_->access(Port::Vector, addr, AccessKind::Read, 0, 4);
        if (!r.ok) {
            fault(0, addr, 3);
            seq_ = {};
            return;
        }
        s.target = r.data & ~1u;
        emit_kind(EventKind::VectorLoad, 0, addr, s.target, s.sel.id);
        emit_kind(EventKind::Mem, 0, addr, r.latency, 0, 0, static_cast<uint32_t>(Port::Vector));
        s.t_fetch = c + (cfg_.cal.vector_load_cycles - 1) + r.latency;
        s.t_vector = 0;
        s.vectored_load = false;
        if (s.t_fetch > c) return;
    }
    if (s.vectored_load || c < s.t_fetch) return;
    fetch_pc_ = s.target;
    seq_ = {};
}

void Core::enter_trap_csrs(unsigned bank, bool interrupt, uint32_t code, uint32_t epc, uint8_t new_mil) {
    uint32_t mst = rf_.cur().mstatus;
    LatchedCsrs& l = rf_.latched(bank);
    uint32_t ns = (mst & ~(mstatus::kMie | mstatus::kMpie)) | mstatus::kMppMask;
    if (mst & mstatus::kMie) ns |= mstatus::kMpie;
    l.mepc = epc;
    uint32_t cause = (interrupt ? mcause::kInterrupt : 0) | (code & mcause::kCodeMask);
    if (cfg_.mode == ControllerMode::Clic) {
        cause |= uint32_t(csr_.mil) << mcause::kMpilShift;
        if (interrupt) csr_.mil = new_mil;
    }
    l.mcause = cause;
    set_mstatus(l, ns);
}

void Core::set_mstatus(LatchedCsrs& l, uint32_t v) {
    l.mstatus = (v & kMstatusWritable) | mstatus::kMppMask;
    if (cfg_.mode == ControllerMode::Clic) {
        l.mcause &= ~kMcauseMirror;
        if (l.mstatus & mstatus::kMpie) l.mcause |= mcause::kMpieBit;
        l.mcause |= 3u << mcause::kMppShift;
    }
}

void Core::set_mcause(LatchedCsrs& l, uint32_t v) {
    if (cfg_.mode == ControllerMode::Clint) {
        l.mcause = v & (mcause::kInterrupt | mcause::kCodeMask);
        return;
    }
    l.mcause = v & (mcause::kInterrupt | kMcauseMirror | mcause::kMpilMask | mcause::kCodeMask);
    uint32_t ms = l.mstatus & ~mstatus::kMpie;
    if (v & mcause::kMpieBit) ms |= mstatus::kMpie;
    set_mstatus(l, ms);
}

TrapEntry Core::take_trap(const Selection& sel, bool vectored, uint32_t epc) {
    TrapEntry t;
    unsigned bank = cfg_.fastirq ? rf_.other() : rf_.active();
    enter_trap_csrs(bank, true, sel.id, epc, sel.level);
    if (cfg_.fastirq) {
        FrameKind fk = (cfg_.ctx_line && *cfg_.ctx_line == sel.id) ? FrameKind::Full : FrameKind::CallerSave;
        bank_switch(rf_, fsm_, gate_, frame_layout(cfg_.abi, fk));
    }
    t.cycles = 1 + cfg_.cal.trap_extra + cfg_.cal.flush_cycles + 1 + cfg_.ws.instr + 1;
    if (vectored) {
        uint32_t addr = csr_.mtvt + 4 * sel.id;
        AccessResult r = mem_->access(Port::Vector, addr, AccessKind::Read, 0, 4);
        if (!r.ok) {
            t.ok = false;
            return t;
        }
        t.target = r.data & ~1u;
        t.cycles += cfg_.cal.vector_load_cycles - 1 + r.latency;
    } else {
        t.target = direct_base();
        if (cfg_.mode == ControllerMode::Clint && (csr_.mtvec & 3) == 1) t.target += 4 * sel.id;
    }
    return t;
}

ReturnOutcome Core::trap_return(bool emret) {
    ReturnOutcome o;
    if (!emret || !cfg_.fastirq) {
        LatchedCsrs& l = rf_.cur();
        o.target = l.mepc;
        if (cfg_.mode == ControllerMode::Clic) csr_.mil = mcause::mpil(l.mcause);
        set_mstatus(l, mret_status(l.mstatus));
        if (cfg_.fastirq) {
            // A plain mret keeps the current bank; the other context is abandoned.
            rf_.set_live(rf_.other(), false);
            rf_.set_clobbered(rf_.other(), false);
        }
        return o;
    }
    const Handshake& hs = clic_->handshake();
    std::optional<Selection> presented;
    if (hs.valid && clic_->pending_enabled(hs.sel.id)) presented = hs.sel;
    EmretOutcome e = emret_resolve(presented, csr_.mil, csr_.mintthresh, mcause::mpil(rf_.cur().mcause));
    if (e.tail_chain) {
        o.tail_chain = true;
        o.chained = e.sel;
        return o;
    }
    unsigned leave = rf_.active();
    unsigned target = rf_.other();
    LatchedCsrs left = rf_.latched(leave);
    rf_.set_live(leave, false);
    if (rf_.clobbered(target) || cfg_.force_reload) {
        uint32_t sp = rf_.read_bank(leave, 2);
        rf_.set_active(target);
        rf_.write_bank(target, 2, sp);
        rf_.set_clobbered(target, false);
        LatchedCsrs& t = rf_.latched(target);
        t = left;
        set_mstatus(t, left.mstatus & ~mstatus::kMie);
        o.target = csr_.mfiqrst;
        o.via_stub = true;
        return o;
    }
    rf_.set_active(target);
    o.target = left.mepc;
    csr_.mil = mcause::mpil(left.mcause);
    set_mstatus(rf_.cur(), mret_status(left.mstatus));
    return o;
}

uint32_t Core::mnxti_access(bool write, CsrOp op, uint32_t value, bool& serialize) {
    LatchedCsrs& l = rf_.cur();
    uint8_t floor = std::max(csr_.mintthresh, mcause::mpil(l.mcause));
    std::optional<Selection> s = clic_->best_nonshv(floor);
    if (write) {
        set_mstatus(l, apply_op(l.mstatus, op, value));
        serialize = true;
        if (s) {
            set_mcause(l, (l.mcause & ~mcause::kCodeMask) | mcause::kInterrupt | (s->id & mcause::kCodeMask));
            csr_.mil = s->level;
            clic_->claim(s->id);
        }
    }
    return s ? csr_.mtvt + 4 * s->id : 0;
}

CsrResult Core::csr_op(uint16_t addr, CsrOp op, uint32_t value, bool write) {
    CsrResult r;
    r.ok = true;
    const bool clic = cfg_.mode == ControllerMode::Clic;
    LatchedCsrs& l = rf_.cur();
    auto rw = [&](uint32_t& reg, uint32_t mask) {
        r.old = reg;
        if (write) reg = apply_op(reg, op, value) & mask;
    };
    switch (addr) {
    case csr::kMstatus:
        r.old = l.mstatus;
        if (write) set_mstatus(l, apply_op(l.mstatus, op, value));
        break;
    case csr::kMisa:
        r.old = 0x40000000u | (cfg_.abi == Abi::I ? (1u << 8) : (1u << 4));
        break;
    case csr::kMie:
        if (clic) {
            r.old = 0;
        } else {
            rw(csr_.mie, 0xffffffffu);
        }
        break;
    case csr::kMtvec: rw(csr_.mtvec, 0xffffffffu); break;
    case csr::kMtvt:
        if (!clic) return CsrResult{};
        rw(csr_.mtvt, ~63u);
        break;
    case csr::kMscratch: rw(csr_.mscratch, 0xffffffffu); break;
    case csr::kMepc: rw(l.mepc, ~3u); break;
    case csr::kMcause:
        r.old = l.mcause;
        if (write) set_mcause(l, apply_op(l.mcause, op, value));
        break;
    case csr::kMtval: rw(csr_.mtval, 0xffffffffu); break;
    case csr::kMip:
        if (write) return CsrResult{};
        r.old = clic ? 0 : clic_->pending_mask();
        break;
    case csr::kMnxti:
        if (!clic) return CsrResult{};
        r.old = mnxti_access(write, op, value, r.serialize);
        r.occupancy = cfg_.cal.mnxti_occupancy;
        return r;
    case csr::kMintthresh: {
        if (!clic) return CsrResult{};
        r.old = csr_.mintthresh;
        if (write) csr_.mintthresh = uint8_t(apply_op(csr_.mintthresh, op, value));
        break;
    }
    case csr::kMfiqrst:
        if (!cfg_.fastirq) return CsrResult{};
        rw(csr_.mfiqrst, ~3u);
        break;
    case csr::kMcycle: r.old = uint32_t(cycle_); break;
    case csr::kMcycleh: r.old = uint32_t(cycle_ >> 32); break;
    case csr::kMinstret: r.old = uint32_t(csr_.minstret); break;
    case csr::kMinstreth: r.old = uint32_t(csr_.minstret >> 32); break;
    case csr::kMhartid:
        if (write) return CsrResult{};
        r.old = 0;
        break;
    case csr::kMintstatus:
        if (!clic || write) return CsrResult{};
        r.old = uint32_t(csr_.mil) << 24;
        break;
    default: return CsrResult{};
    }
    if (write && is_status_csr(addr) && !(addr == csr::kMie && clic)) r.serialize = true;
    return r;
}

uint32_t Core::read_csr_debug(uint16_t addr) {
    if (addr == csr::kMnxti) {
        bool ser = false;
        return mnxti_access(false, CsrOp::Set, 0, ser);
    }
    return csr_op(addr, CsrOp::Set, 0, false).old;
}

void Core::raise_exception(uint32_t pc, uint32_t code, uint32_t tval) {
    csr_.mtval = tval;
    ex_.retire = false;
    kill_front();
    redirect_.valid = false;
    seq_ = {};
    seq_.kind = SeqKind::Exception;
    seq_.epc = pc;
    seq_.cause = code;
    seq_.t_flush = cycle_ + cfg_.cal.exception_flush;
}

bool Core::try_issue() {
    const uint64_t c = cycle_;
    if (seq_.kind != SeqKind::None || redirect_.valid || !id_.valid || ex_.valid) return false;
    const Instruction& ins = id_.ins;
    auto stall = [&](uint32_t reason, uint32_t addr = 0) {
        emit_kind(EventKind::Stall, id_.pc, addr, 0, 0, 0, reason);
        return false;
    };
    uint8_t a = 0, b = 0;
    source_regs(ins, a, b);
    if ((a && reg_ready_[a] > c) || (b && reg_ready_[b] > c)) return stall(kStallOperand);
    if (cfg_.fastirq && fsm_.busy()) {
        if (cfg_.gate == GatePolicy::BlockUntilDrained) return stall(kStallBlocked);
        if (is_load(ins.op) || is_store(ins.op)) {
            uint32_t addr = rf_.read(ins.rs1) + uint32_t(ins.imm);
            if (gate_access(gate_, addr)) return stall(kStallGate, addr);
        }
        if (ins.op == Op::Emret) {
            const Handshake& hs = clic_->handshake();
            bool chain = hs.valid && clic_->pending_enabled(hs.sel.id) &&
                         emret_chainable(hs.sel, csr_.mil, csr_.mintthresh, mcause::mpil(rf_.cur().mcause));
            if (!chain) return stall(kStallDrainWait);
        }
    }
    uint32_t pc = id_.pc;
    uint32_t tag = id_.tag;
    Instruction copy = ins;
    id_.valid = false;
    ex_ = {true, pc, c + 1, true, tag};
    emit_kind(EventKind::Exec, pc, 0, copy.raw, 0, 0, tag);
    execute(copy, pc, tag);
    return true;
}

void Core::execute(const Instruction& ins, uint32_t pc, uint32_t tag) {
    (void)tag;
    const uint64_t t = cycle_;
    const uint32_t x = rf_.read(ins.rs1);
    const uint32_t y = rf_.read(ins.rs2);
    const uint32_t imm = uint32_t(ins.imm);
    auto alu = [&](uint32_t v) { write_reg(ins.rd, v, t + 1); };
    auto branch = [&](bool taken) {
        if (taken) set_redirect(t, pc + imm);
    };
    switch (ins.op) {
    case Op::Lui: alu(imm); break;
    case Op::Auipc: alu(pc + imm); break;
    case Op::Jal:
        alu(pc + 4);
        set_redirect(t, pc + imm);
        break;
    case Op::Jalr: {
        uint32_t target = (x + imm) & ~1u;
        alu(pc + 4);
        set_redirect(t, target);
        break;
    }
    case Op::Beq: branch(x == y); break;
    case Op::Bne: branch(x != y); break;
    case Op::Blt: branch(int32_t(x) < int32_t(y)); break;
    case Op::Bge: branch(int32_t(x) >= int32_t(y)); break;
    case Op::Bltu: branch(x < y); break;
    case Op::Bgeu: branch(x >= y); break;
    case Op::Lb:
    case Op::Lh:
    case Op::Lw:
    case Op::Lbu:
    case Op::Lhu: {
        unsigned w = (ins.op == Op::Lw) ? 4 : (ins.op == Op::Lh || ins.op == Op::Lhu) ? 2 : 1;
        uint32_t addr = x + imm;
        AccessResult r = mem_->access(Port::Lsu, addr, AccessKind::Read, 0, w);
        if (!r.ok) {
            raise_exception(pc, exc::kLoadFault, addr);
            return;
        }
        uint32_t v = r.data;
        if (ins.op == Op::Lb) v = uint32_t(int32_t(int8_t(v)));
        if (ins.op == Op::Lh) v = uint32_t(int32_t(int16_t(v)));
        mem_->arbiter().note_lsu(t, r.latency, mem_->bank_of(addr));
        ex_.done = t + r.latency;
        write_reg(ins.rd, v, t + r.latency + cfg_.cal.load_use);
        emit_kind(EventKind::LsuLoad, pc, addr, v);
        emit_kind(EventKind::Mem, 0, addr, r.latency, 0, 0, static_cast<uint32_t>(Port::Lsu));
        break;
    }
    case Op::Sb:
    case Op::Sh:
    case Op::Sw: {
        unsigned w = ins.op == Op::Sw ? 4 : ins.op == Op::Sh ? 2 : 1;
        uint32_t addr = x + imm;
        uint32_t v = w == 4 ? y : (y & ((1u << (8 * w)) - 1));
        AccessResult r = mem_->access(Port::Lsu, addr, AccessKind::Write, v, w);
        if (!r.ok) {
            raise_exception(pc, exc::kStoreFault, addr);
            return;
        }
        mem_->arbiter().note_lsu(t, r.latency, mem_->bank_of(addr));
        ex_.done = t + r.latency;
        emit_kind(EventKind::LsuStore, pc, addr, v);
        emit_kind(EventKind::Mem, 0, addr, r.latency, 0, 0, static_cast<uint32_t>(Port::Lsu));
        break;
    }
    case Op::Addi: alu(x + imm); break;
    case Op::Slti: alu(int32_t(x) < int32_t(imm) ? 1 : 0); break;
    case Op::Sltiu: alu(x < imm ? 1 : 0); break;
    case Op::Xori: alu(x ^ imm); break;
    case Op::Ori: alu(x | imm); break;
    case Op::Andi: alu(x & imm); break;
    case Op::Slli: alu(x << (imm & 31)); break;
    case Op::Srli: alu(x >> (imm & 31)); break;
    case Op::Srai: alu(uint32_t(int32_t(x) >> (imm & 31))); break;
    case Op::Add: alu(x + y); break;
    case Op::Sub: alu(x - y); break;
    case Op::Sll: alu(x << (y & 31)); break;
    case Op::Slt: alu(int32_t(x) < int32_t(y) ? 1 : 0); break;
    case Op::Sltu: alu(x < y ? 1 : 0); break;
    case Op::Xor: alu(x ^ y); break;
    case Op::Srl: alu(x >> (y & 31)); break;
    case Op::Sra: alu(uint32_t(int32_t(x) >> (y & 31))); break;
    case Op::Or: alu(x | y); break;
    case Op::And: alu(x & y); break;
    case Op::Fence:
    case Op::Wfi: break;
    case Op::Ecall: raise_exception(pc, exc::kEcallM, 0); break;
    case Op::Ebreak:
        emit_kind(EventKind::Halt, pc);
        halted_ = true;
        break;
    case Op::Mret: {
        ReturnOutcome o = trap_return(false);
        emit_kind(EventKind::Mret, pc, 0, o.target);
        set_redirect(t, o.target);
        break;
    }
    case Op::Emret: {
        if (!cfg_.fastirq) {
            raise_exception(pc, exc::kIllegal, ins.raw);
            return;
        }
        ReturnOutcome o = trap_return(true);
        if (o.tail_chain) {
            emit_kind(EventKind::EmretChain, pc, 0, 0, o.chained.id, o.chained.level);
            kill_front();
            seq_ = {};
            seq_.kind = SeqKind::Chain;
            seq_.sel = o.chained;
            seq_.t_handshake = t + 1 + cfg_.cal.emret_resolve;
        } else {
            emit_kind(EventKind::EmretReturn, pc, 0, o.target, 0, 0, o.via_stub ? 1 : 0);
            emit_kind(EventKind::BankSwitch, 0, 0, rf_.read(2), 0, 0, rf_.active());
            reg_ready_.fill(0);
            set_redirect(t, o.target);
        }
        break;
    }
    case Op::Csrrw:
    case Op::Csrrs:
    case Op::Csrrc:
    case Op::Csrrwi:
    case Op::Csrrsi:
    case Op::Csrrci: {
        bool imm_form = ins.op == Op::Csrrwi || ins.op == Op::Csrrsi || ins.op == Op::Csrrci;
        uint32_t v = imm_form ? imm : x;
        CsrOp op = (ins.op == Op::Csrrw || ins.op == Op::Csrrwi) ? CsrOp::Write
                   : (ins.op == Op::Csrrs || ins.op == Op::Csrrsi) ? CsrOp::Set
                                                                    : CsrOp::Clear;
        bool write = op == CsrOp::Write || (imm_form ? imm != 0 : ins.rs1 != 0);
        CsrResult r = csr_op(ins.csr, op, v, write);
        if (!r.ok) {
            raise_exception(pc, exc::kIllegal, ins.raw);
            return;
        }
        ex_.done = t + r.occupancy;
        write_reg(ins.rd, r.old, t + r.occupancy);
        if (r.serialize) set_redirect(t + r.occupancy - 1 + cfg_.cal.serialize_delay, pc + 4);
        break;
    }
    case Op::Marker: emit_kind(EventKind::Marker, pc, 0, 0, uint32_t(ins.imm)); break;
    case Op::Jalxnxti: {
        if (cfg_.mode != ControllerMode::Clic) {
            raise_exception(pc, exc::kIllegal, ins.raw);
            return;
        }
        bool ser = false;
        uint32_t entry = mnxti_access(true, CsrOp::Set, mstatus::kMie, ser);
        unsigned occ = cfg_.cal.jalxnxti_occupancy;
        ex_.done = t + occ;
        write_reg(ins.rd, pc, t + occ);
        uint32_t target = pc + 4;
        if (entry != 0) {
            AccessResult r = mem_->access(Port::Lsu, entry, AccessKind::Read, 0, 4);
            if (!r.ok) {
                raise_exception(pc, exc::kLoadFault, entry);
                return;
            }
            target = r.data & ~1u;
            emit_kind(EventKind::LsuLoad, pc, entry, r.data);
        }
        set_redirect(t + occ - 1, target);
        break;
    }
    case Op::Illegal: raise_exception(pc, exc::kIllegal, ins.raw); break;
    }
}

} // namespace cv32rt
