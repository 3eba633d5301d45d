#include "cv32rt/kernels.hpp"

#include <algorithm>

#include "cv32rt/csr.hpp"
#include "cv32rt/fastirq.hpp"
#include "cv32rt/memory.hpp"

namespace cv32rt {

namespace {

using namespace reg;

struct VariantInfo {
    KernelVariant v;
    const char* name;
};

constexpr VariantInfo kVariants[] = {
    {KernelVariant::ClintNested, "clint-nested"}, {KernelVariant::ClicNested, "clic-nested"},
    {KernelVariant::Fastirq, "fastirq"},          {KernelVariant::FastirqNested, "fastirq-nested"},
    {KernelVariant::XnxtiLoop, "xnxti-loop"},     {KernelVariant::Jalxnxti, "jalxnxti"},
    {KernelVariant::MinimalInline, "minimal-inline"},
};

bool variant_shv(KernelVariant v) { return v != KernelVariant::XnxtiLoop && v != KernelVariant::Jalxnxti; }

std::vector<unsigned> full_regs(Abi abi) {
    std::vector<unsigned> r;
    for (const auto& s : frame_layout(abi, FrameKind::Full))
        if (s.src == SlotSource::Gpr) r.push_back(s.reg);
    return r;
}

// Lines ranked above id in the fixed CLINT order.
uint32_t clint_higher_mask(uint32_t id) {
    uint32_t m = 0;
    for (uint32_t k = 0; k < 32; ++k)
        if (clint_rank(k) > clint_rank(id)) m |= 1u << k;
    return m;
}

void emit_line_setup(ProgramBuilder& b, const LineSpec& l, bool shv, unsigned nlbits) {
    uint32_t base = map::kClicBase + clicreg::line_offset(l.id);
    b.li(t0, int32_t(base));
    b.li(t1, int32_t((uint8_t(l.trigger) << 1) | (shv ? 1 : 0)));
    b.sb(t1, int32_t(clicreg::kAttrByte), t0);
    b.li(t1, make_ctl(l.level, l.priority, nlbits));
    b.sb(t1, int32_t(clicreg::kCtlByte), t0);
    b.li(t1, 1);
    b.sb(t1, int32_t(clicreg::kIeByte), t0);
}

struct InitSpec {
    ControllerMode mode = ControllerMode::Clic;
    bool fastirq = false;
    bool shv = true;
    unsigned nlbits = 4;
    std::vector<LineSpec> lines;
};

void emit_trap_setup(ProgramBuilder& b, const InitSpec& s) {
    b.li(sp, int32_t(layout::kStackTop));
    b.la(t0, "common");
    b.ori(t0, t0, s.mode == ControllerMode::Clic ? 3 : 1);
    b.csrw(csr::kMtvec, t0);
    if (s.mode == ControllerMode::Clic) {
        b.la(t0, "vtable");
        b.csrw(csr::kMtvt, t0);
        for (const auto& l : s.lines) emit_line_setup(b, l, s.shv, s.nlbits);
    } else {
        uint32_t mask = 0;
        for (const auto& l : s.lines) mask |= 1u << l.id;
        b.li(t0, int32_t(mask));
        b.csrw(csr::kMie, t0);
    }
    if (s.fastirq) {
        b.la(t0, "fiq_restore");
        b.csrw(csr::kMfiqrst, t0);
    }
}

void emit_vtable(ProgramBuilder& b, unsigned num_lines, const std::vector<LineSpec>& lines,
                 const std::string& handler) {
    b.org(layout::kVtable);
    b.label("vtable");
    for (unsigned id = 0; id < num_lines; ++id) {
        bool used = std::any_of(lines.begin(), lines.end(), [&](const LineSpec& l) { return l.id == id; });
        b.word_label(used ? handler : "unexpected");
    }
}

// Stores the caller-save GPRs at their frame slots. sp must already point at
// the frame base.
void emit_save_gprs(ProgramBuilder& b, const std::vector<FrameSlot>& frame) {
    for (size_t i = 0; i < frame.size(); ++i)
        if (frame[i].src == SlotSource::Gpr) b.sw(frame[i].reg, int32_t(4 * i), sp);
}

void emit_load_gprs(ProgramBuilder& b, const std::vector<FrameSlot>& frame) {
    for (size_t i = 0; i < frame.size(); ++i)
        if (frame[i].src == SlotSource::Gpr) b.lw(frame[i].reg, int32_t(4 * i), sp);
}

int32_t slot_offset(const std::vector<FrameSlot>& frame, SlotSource src) {
    for (size_t i = 0; i < frame.size(); ++i)
        if (frame[i].src == src) return int32_t(4 * i);
    return -1;
}

uint16_t slot_csr(SlotSource s) {
    switch (s) {
    case SlotSource::Mepc: return csr::kMepc;
    case SlotSource::Mcause: return csr::kMcause;
    default: return csr::kMstatus;
    }
}

// Software restore of a drained caller-save frame, entered from emret when the
// target bank was reused by a nested handler.
void emit_fiq_restore(ProgramBuilder& b, Abi abi) {
    auto frame = frame_layout(abi, FrameKind::CallerSave);
    b.label("fiq_restore");
    for (SlotSource s : {SlotSource::Mepc, SlotSource::Mcause, SlotSource::Mstatus}) {
        b.lw(t0, slot_offset(frame, s), sp);
        b.csrw(slot_csr(s), t0);
    }
    emit_load_gprs(b, frame);
    b.addi(sp, sp, int32_t(4 * frame.size()));
    b.mret();
}

void emit_idle(ProgramBuilder& b, unsigned iters) {
    b.li(s0, int32_t(std::max(1u, iters)));
    b.csrsi(csr::kMstatus, mstatus::kMie);
    b.label("idle");
    b.addi(s0, s0, -1);
    b.bnez(s0, "idle");
    b.ebreak();
}

void emit_body(ProgramBuilder& b) {
    b.label("body");
    b.marker(kMarkBody);
    b.ret();
}

void emit_unexpected(ProgramBuilder& b) {
    b.label("unexpected");
    b.ebreak();
}

// Software prologue: frame push with the caller-save GPRs followed by the
// listed CSRs, each spilled through scratch.
void emit_sw_save(ProgramBuilder& b, const std::vector<FrameSlot>& frame, std::initializer_list<SlotSource> csrs,
                  unsigned scratch) {
    b.addi(sp, sp, -int32_t(4 * frame.size()));
    emit_save_gprs(b, frame);
    for (SlotSource s : csrs) {
        b.csrr(scratch, slot_csr(s));
        b.sw(scratch, slot_offset(frame, s), sp);
    }
}

void emit_sw_restore(ProgramBuilder& b, const std::vector<FrameSlot>& frame, std::initializer_list<SlotSource> csrs,
                     unsigned scratch) {
    for (SlotSource s : csrs) {
        b.lw(scratch, slot_offset(frame, s), sp);
        b.csrw(slot_csr(s), scratch);
    }
    emit_load_gprs(b, frame);
    b.addi(sp, sp, int32_t(4 * frame.size()));
    b.mret();
}

Kernel build_clic_nested(Kernel k, ProgramBuilder& b, bool minimal) {
    auto frame = frame_layout(k.abi, FrameKind::CallerSave);
    if (minimal) {
        frame = {{"ra", SlotSource::Gpr, ra}, {"mepc", SlotSource::Mepc, 0}, {"mcause", SlotSource::Mcause, 0},
                 {"mstatus", SlotSource::Mstatus, 0}};
    }
    unsigned scratch = minimal ? ra : t0;
    b.org(layout::kCode);
    b.label("isr");
    k.prologue_begin = b.here();
    emit_sw_save(b, frame, {SlotSource::Mepc, SlotSource::Mcause, SlotSource::Mstatus}, scratch);
    b.csrsi(csr::kMstatus, mstatus::kMie);
    k.prologue_end = b.here();
    b.call("body");
    b.csrci(csr::kMstatus, mstatus::kMie);
    emit_sw_restore(b, frame, {SlotSource::Mepc, SlotSource::Mcause, SlotSource::Mstatus}, scratch);
    return k;
}

Kernel build_clint_nested(Kernel k, ProgramBuilder& b) {
    auto frame = frame_layout(k.abi, FrameKind::CallerSave);
    // mcause carries nothing needed on return in CLINT mode; its slot holds the
    // saved interrupt-enable mask.
    const int32_t mie_slot = slot_offset(frame, SlotSource::Mcause);
    uint32_t top = 0;
    for (const auto& l : k.lines) top = std::max(top, l.id);
    b.org(layout::kCommon);
    b.label("common");
    for (uint32_t id = 0; id < top; ++id) {
        bool used = std::any_of(k.lines.begin(), k.lines.end(), [&](const LineSpec& l) { return l.id == id; });
        b.j(used ? "isr" : "unexpected");
    }
    // The highest configured line runs its handler straight from its slot.
    b.label("isr");
    k.prologue_begin = b.here();
    b.addi(sp, sp, -int32_t(4 * frame.size()));
    emit_save_gprs(b, frame);
    b.csrr(t0, csr::kMepc);
    b.sw(t0, slot_offset(frame, SlotSource::Mepc), sp);
    b.li(t1, int32_t(~clint_higher_mask(k.lines.front().id)));
    b.csrrc(t1, csr::kMie, t1);
    b.sw(t1, mie_slot, sp);
    b.csrrsi(t0, csr::kMstatus, mstatus::kMie);
    b.sw(t0, slot_offset(frame, SlotSource::Mstatus), sp);
    k.prologue_end = b.here();
    b.call("body");
    b.csrci(csr::kMstatus, mstatus::kMie);
    b.lw(t0, mie_slot, sp);
    b.csrw(csr::kMie, t0);
    emit_sw_restore(b, frame, {SlotSource::Mepc, SlotSource::Mstatus}, t0);
    return k;
}

// Non-vectored common handler that drains every pending line at a level above
// the interrupted one before restoring.
Kernel build_xnxti(Kernel k, ProgramBuilder& b, bool fused) {
    auto frame = frame_layout(k.abi, FrameKind::CallerSave);
    b.label("isr");
    k.prologue_begin = b.here();
    // mcause mirrors mpie/mpp, so mstatus needs no slot of its own here.
    emit_sw_save(b, frame, {SlotSource::Mepc, SlotSource::Mcause}, t0);
    k.prologue_end = b.here();
    if (fused) {
        b.label("dispatch");
        b.jalxnxti(ra);
    } else {
        b.csrrsi(a0, csr::kMnxti, mstatus::kMie);
        b.beqz(a0, "exit");
        b.label("dispatch");
        b.lw(t0, 0, a0);
        b.jalr(ra, t0, 0);
        b.csrrsi(a0, csr::kMnxti, mstatus::kMie);
        b.bnez(a0, "dispatch");
        b.label("exit");
    }
    b.csrci(csr::kMstatus, mstatus::kMie);
    emit_sw_restore(b, frame, {SlotSource::Mepc, SlotSource::Mcause}, t0);
    return k;
}

Kernel build_fastirq(Kernel k, ProgramBuilder& b, bool nested, const KernelOptions& opt) {
    auto frame = frame_layout(k.abi, FrameKind::CallerSave);
    b.org(layout::kCode);
    b.label("isr");
    k.prologue_begin = k.prologue_end = b.here();
    if (nested) b.csrsi(csr::kMstatus, mstatus::kMie);
    if (opt.fastirq_handler) {
        opt.fastirq_handler(b, frame);
    } else {
        b.marker(kMarkBody);
        // Frame slots read back in the order the drain writes them.
        for (unsigned i = 0; i < opt.early_stack_reads && i < frame.size(); ++i) b.lw(t0, int32_t(4 * i), sp);
    }
    if (nested) b.csrci(csr::kMstatus, mstatus::kMie);
    b.emret();
    emit_fiq_restore(b, k.abi);
    return k;
}

} // namespace

const char* variant_name(KernelVariant v) {
    for (const auto& e : kVariants)
        if (e.v == v) return e.name;
    return "?";
}

KernelVariant parse_variant(const std::string& name) {
    for (const auto& e : kVariants)
        if (name == e.name) return e.v;
    throw ConfigError("unknown kernel variant: " + name);
}

SimConfig kernel_config(KernelVariant v, Abi abi) {
    SimConfig c;
    c.abi = abi;
    c.mode = v == KernelVariant::ClintNested ? ControllerMode::Clint : ControllerMode::Clic;
    c.num_lines = v == KernelVariant::ClintNested ? 32 : 64;
    c.fastirq = v == KernelVariant::Fastirq || v == KernelVariant::FastirqNested;
    return c;
}

uint8_t make_ctl(uint8_t level, uint8_t priority, unsigned nlbits) {
    if (nlbits >= 8) return level;
    if (nlbits == 0) return priority;
    unsigned low = 8 - nlbits;
    return uint8_t((unsigned(level) << low) | (priority & ((1u << low) - 1)));
}

std::vector<unsigned> caller_save_regs(Abi abi) {
    std::vector<unsigned> r;
    for (const auto& s : frame_layout(abi, FrameKind::CallerSave))
        if (s.src == SlotSource::Gpr) r.push_back(s.reg);
    return r;
}

Kernel build_kernel(KernelVariant v, Abi abi, const KernelOptions& opt) {
    Kernel k;
    k.variant = v;
    k.abi = abi;
    k.lines = opt.lines;
    if (k.lines.empty()) k.lines.push_back(LineSpec{});
    SimConfig cfg = kernel_config(v, abi);
    for (const auto& l : k.lines)
        if (l.id >= cfg.num_lines) throw ConfigError("benchmark line out of range for the controller");
    if (v == KernelVariant::ClintNested) {
        // The top line's handler sits in its vector slot; order lines so it is first.
        std::sort(k.lines.begin(), k.lines.end(),
                  [](const LineSpec& a, const LineSpec& b) { return a.id > b.id; });
    }

    InitSpec init;
    init.mode = cfg.mode;
    init.fastirq = cfg.fastirq;
    init.shv = variant_shv(v);
    init.nlbits = opt.nlbits;
    init.lines = k.lines;

    ProgramBuilder b(abi, layout::kEntry);
    b.label("_start");
    emit_trap_setup(b, init);
    if (opt.thread_code) opt.thread_code(b);
    else emit_idle(b, opt.idle_iters);

    switch (v) {
    case KernelVariant::ClintNested:
        k = build_clint_nested(k, b);
        break;
    case KernelVariant::ClicNested:
    case KernelVariant::MinimalInline:
        b.org(layout::kCommon);
        b.label("common");
        b.j("unexpected");
        emit_vtable(b, cfg.num_lines, k.lines, "isr");
        k = build_clic_nested(k, b, v == KernelVariant::MinimalInline);
        break;
    case KernelVariant::XnxtiLoop:
    case KernelVariant::Jalxnxti:
        b.org(layout::kCommon);
        b.label("common");
        k = build_xnxti(k, b, v == KernelVariant::Jalxnxti);
        emit_vtable(b, cfg.num_lines, k.lines, "body");
        b.org(layout::kCode);
        break;
    case KernelVariant::Fastirq:
    case KernelVariant::FastirqNested:
        b.org(layout::kCommon);
        b.label("common");
        b.j("unexpected");
        emit_vtable(b, cfg.num_lines, k.lines, "isr");
        k = build_fastirq(k, b, v == KernelVariant::FastirqNested, opt);
        break;
    }
    emit_body(b);
    emit_unexpected(b);
    k.image = b.finish();
    return k;
}

// ---------------------------------------------------------------------------
// Context switch

namespace {

// TCB: sp, ready-list item {next, owner}, initial task counter. A list is
// {count, index, end item {next, owner}}.
namespace tcb {
constexpr int32_t kSp = 0;
constexpr int32_t kItem = 4;
} // namespace tcb
constexpr int32_t kItemNext = 0;
constexpr int32_t kItemOwner = 4;

// Kernel data in bank 2: current TCB pointer, top ready priority, ready lists
// (count, index, end marker {sentinel, next}) and the two TCBs.
constexpr uint32_t kCurrent = layout::kTaskData;
constexpr uint32_t kTopPrio = layout::kTaskData + 4;
constexpr uint32_t kLists = layout::kTaskData + 0x40;
constexpr uint32_t kListSize = 16;
constexpr uint32_t kTcbA = layout::kTaskData + 0x400;
constexpr uint32_t kTcbB = layout::kTaskData + 0x440;
constexpr uint32_t kStackA = 0x00104000;  // top of bank 0 region used by task A
constexpr uint32_t kStackB = 0x00108000;  // top of bank 1
constexpr unsigned kTaskPrio = 1;
constexpr unsigned kTopPrioStart = 7;     // empty priority levels scanned above the tasks
constexpr uint32_t kSwiLine = 3;

uint32_t list_addr(unsigned prio) { return kLists + kListSize * prio; }

// Picks the next task: scan from the top ready priority down to the first
// non-empty list, then advance that list's round-robin index past the end
// marker. Leaves the new TCB in a4 and its address in current.
void emit_switch_context(ProgramBuilder& b) {
    b.li(t0, int32_t(kTopPrio));
    b.lw(t1, 0, t0);
    b.slli(t2, t1, 4);
    b.li(a0, int32_t(kLists));
    b.add(a0, a0, t2);
    b.label("scan");
    b.lw(a1, 0, a0);
    b.bnez(a1, "found");
    b.addi(t1, t1, -1);
    b.addi(a0, a0, -int32_t(kListSize));
    b.j("scan");
    b.label("found");
    b.lw(a2, 4, a0);
    b.lw(a2, kItemNext, a2);
    b.addi(a3, a0, 8);
    b.bne(a2, a3, "picked");
    b.lw(a2, kItemNext, a2);
    b.label("picked");
    // Both paths reach the index update in the same number of cycles.
    b.li(a5, int32_t(kCurrent));
    b.sw(a2, 4, a0);
    b.lw(a4, kItemOwner, a2);
    b.sw(a4, 0, a5);
}

void emit_task(ProgramBuilder& b, const std::string& name, bool accelerated) {
    b.label(name);
    b.marker(kMarkTaskResume);
    b.label(name + ".loop");
    b.addi(s1, s1, -1);
    b.bnez(s1, name + ".yield");
    b.ebreak();
    b.label(name + ".yield");
    b.marker(kMarkSwitchStart);
    if (accelerated) {
        // Yield is a call: t0/t1 are dead here.
        b.lui(t0, (map::kClicBase + clicreg::line_offset(kSwiLine)) >> 12);
        b.li(t1, 1);
        b.sb(t1, int32_t(clicreg::line_offset(kSwiLine) & 0xfff), t0);
    } else {
        b.ecall();
    }
    b.marker(kMarkTaskResume);
    b.j(name + ".loop");
}

// Restores the task whose TCB is in a4 from its full frame and returns to it.
void emit_restore_task(ProgramBuilder& b, const std::vector<FrameSlot>& frame) {
    b.lw(sp, tcb::kSp, a4);
    b.lw(t0, slot_offset(frame, SlotSource::Mepc), sp);
    b.csrw(csr::kMepc, t0);
    b.lw(t0, slot_offset(frame, SlotSource::Mstatus), sp);
    b.csrw(csr::kMstatus, t0);
    emit_load_gprs(b, frame);
    b.addi(sp, sp, int32_t(4 * frame.size()));
    b.mret();
}

uint32_t task_reg_value(char task, unsigned r) { return (task == 'A' ? 0xa0000000u : 0xb0000000u) | r; }

} // namespace

CtxSwitchProgram build_ctxswitch(Abi abi, bool accelerated, unsigned switches) {
    if (switches < 1) throw ConfigError("context switch program needs at least one switch");
    CtxSwitchProgram p;
    p.abi = abi;
    p.accelerated = accelerated;
    p.line = kSwiLine;
    // Each task decrements its counter once per run and halts at zero. A runs
    // first, so an even count ends in A and an odd count in B.
    unsigned half = (switches + 1) / 2;
    unsigned runs_a = switches % 2 == 0 ? switches / 2 + 1 : half + 1;
    unsigned runs_b = switches % 2 == 0 ? switches / 2 + 1 : half;
    p.switches = switches;
    auto frame = frame_layout(abi, FrameKind::Full);
    const auto regs = full_regs(abi);

    ProgramBuilder b(abi, layout::kEntry);
    b.label("_start");
    InitSpec init;
    init.mode = ControllerMode::Clic;
    init.fastirq = accelerated;
    init.shv = true;
    if (accelerated) init.lines.push_back(LineSpec{kSwiLine, 1, 0, Trigger::EdgeRising});
    emit_trap_setup(b, init);
    b.li(sp, int32_t(kStackA));
    b.li(t0, int32_t(kCurrent));
    b.li(t1, int32_t(kTcbA));
    b.sw(t1, 0, t0);
    b.la(t0, "task_a");
    b.csrw(csr::kMepc, t0);
    b.li(t0, int32_t(mstatus::kMpie));
    b.csrw(csr::kMstatus, t0);
    for (unsigned r : regs) {
        if (r == s1) b.li(r, int32_t(runs_a));
        else if (r != t0) b.li(r, int32_t(task_reg_value('A', r)));
    }
    b.li(t0, int32_t(task_reg_value('A', t0)));
    b.mret();

    b.org(layout::kCommon);
    b.label("common");
    if (!accelerated) {
        b.addi(sp, sp, -int32_t(4 * frame.size()));
        emit_save_gprs(b, frame);
        b.csrr(t0, csr::kMepc);
        b.addi(t0, t0, 4);
        b.sw(t0, slot_offset(frame, SlotSource::Mepc), sp);
        b.csrr(t0, csr::kMstatus);
        b.sw(t0, slot_offset(frame, SlotSource::Mstatus), sp);
        b.j("switch");
    } else {
        b.j("unexpected");
    }

    emit_vtable(b, 64, init.lines, "swi");
    if (accelerated) {
        b.org(layout::kCode);
        // The full frame of the running task is being drained by hardware; sp
        // already points at its base.
        b.label("swi");
        b.j("switch");
    } else {
        b.org(layout::kCode);
    }
    b.label("switch");
    b.li(t0, int32_t(kCurrent));
    b.lw(t1, 0, t0);
    b.sw(sp, tcb::kSp, t1);
    emit_switch_context(b);
    emit_restore_task(b, frame);

    emit_task(b, "task_a", accelerated);
    emit_task(b, "task_b", accelerated);
    if (accelerated) emit_fiq_restore(b, abi);
    emit_unexpected(b);

    // Kernel data.
    b.org(kCurrent);
    b.word(kTcbA);
    b.word(kTopPrioStart);
    for (unsigned prio = 0; prio <= kTopPrioStart; ++prio) {
        b.org(list_addr(prio));
        uint32_t end = list_addr(prio) + 8;
        if (prio == kTaskPrio) {
            b.word(2);
            b.word(kTcbA + tcb::kItem);  // A is running
            b.word(kTcbA + tcb::kItem);
            b.word(0xffffffffu);
        } else {
            b.word(0);
            b.word(end);
            b.word(end);
            b.word(0xffffffffu);
        }
    }
    uint32_t b_frame = kStackB - 4 * uint32_t(frame.size());
    b.org(kTcbA);
    b.word(0);  // sp, filled on the first switch
    b.word(kTcbB + tcb::kItem);
    b.word(kTcbA);
    b.org(kTcbB);
    b.word(b_frame);
    b.word(list_addr(kTaskPrio) + 8);
    b.word(kTcbB);

    // Initial frame of task B: resumes at its entry with interrupts enabled.
    b.org(b_frame);
    for (const auto& s : frame) {
        switch (s.src) {
        case SlotSource::Gpr: b.word(s.reg == s1 ? runs_b : task_reg_value('B', s.reg)); break;
        case SlotSource::Mepc: b.word_label("task_b"); break;
        case SlotSource::Mcause: b.word(0); break;
        case SlotSource::Mstatus: b.word(mstatus::kMpie | mstatus::kMppMask); break;
        }
    }
    p.image = b.finish();
    return p;
}

} // namespace cv32rt
