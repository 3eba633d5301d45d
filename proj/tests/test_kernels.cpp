#include "doctest.h"

#include "cv32rt/core.hpp"
#include "cv32rt/kernels.hpp"
#include "cv32rt/scenario.hpp"

using namespace cv32rt;
using namespace cv32rt::reg;

namespace {

struct Counts {
    unsigned stores = 0, sp_stores = 0, csr_reads = 0, mie_ops = 0;
    bool has_marker = false;
};

// Instructions of [from, to); stops at the body marker.
Counts count(const ProgramImage& img, uint32_t from, uint32_t to, Abi abi) {
    Counts c;
    for (const auto& ins : img.listing(from, to, abi)) {
        if (ins.op == Op::Marker) {
            c.has_marker = true;
            break;
        }
        if (is_store(ins.op)) {
            ++c.stores;
            if (ins.rs1 == sp) ++c.sp_stores;
        }
        if (is_csr(ins.op) && ins.csr != 0 && (ins.op == Op::Csrrs && ins.rs1 == 0)) ++c.csr_reads;
        if (is_csr(ins.op) && ins.csr == csr::kMie) ++c.mie_ops;
    }
    return c;
}

} // namespace

TEST_CASE("software prologues save the caller-save frame") {
    for (Abi abi : {Abi::I, Abi::E}) {
        Kernel k = build_kernel(KernelVariant::ClicNested, abi);
        Counts c = count(k.image, k.prologue_begin, k.prologue_end, abi);
        unsigned gprs = abi == Abi::I ? 16 : 7;
        CAPTURE(abi_name(abi));
        CHECK(c.sp_stores == gprs + 3);
        CHECK(c.csr_reads == 3);
    }
}

TEST_CASE("minimal-inline saves only ra plus the trap CSRs") {
    Kernel k = build_kernel(KernelVariant::MinimalInline, Abi::I);
    Counts c = count(k.image, k.prologue_begin, k.prologue_end, Abi::I);
    CHECK(c.sp_stores == 4);
}

TEST_CASE("fastirq handler has no stores before the body") {
    for (auto v : {KernelVariant::Fastirq, KernelVariant::FastirqNested}) {
        Kernel k = build_kernel(v, Abi::I);
        uint32_t isr = k.image.label("isr");
        Counts c = count(k.image, isr, isr + 64, Abi::I);
        CHECK(c.has_marker);
        CHECK(c.stores == 0);
        CHECK(k.prologue_begin == k.prologue_end);
    }
}

TEST_CASE("CLINT handler masks through mie") {
    Kernel k = build_kernel(KernelVariant::ClintNested, Abi::I);
    Counts c = count(k.image, k.prologue_begin, k.prologue_end, Abi::I);
    CHECK(c.mie_ops >= 1);
    CHECK(kernel_config(KernelVariant::ClintNested, Abi::I).mode == ControllerMode::Clint);
}

TEST_CASE("variant names") {
    for (auto v : {KernelVariant::ClintNested, KernelVariant::ClicNested, KernelVariant::Fastirq,
                   KernelVariant::FastirqNested, KernelVariant::XnxtiLoop, KernelVariant::Jalxnxti,
                   KernelVariant::MinimalInline})
        CHECK(parse_variant(variant_name(v)) == v);
    CHECK_THROWS_AS(parse_variant("nope"), ConfigError);
}

TEST_CASE("E-ABI kernels use only the lower registers") {
    for (auto v : {KernelVariant::ClintNested, KernelVariant::ClicNested, KernelVariant::Fastirq,
                   KernelVariant::XnxtiLoop, KernelVariant::Jalxnxti, KernelVariant::MinimalInline}) {
        Kernel k = build_kernel(v, Abi::E);
        for (const auto& seg : k.image.segments)
            for (uint32_t w : seg.words) {
                Instruction ins = decode(w, Abi::E);
                if (ins.op == Op::Illegal) continue;  // data words
                CHECK(ins.rd < 16);
            }
    }
}

TEST_CASE("make_ctl packs level and priority") {
    CHECK(make_ctl(1, 0, 4) == 0x10);
    CHECK(make_ctl(15, 15, 4) == 0xff);
    CHECK(make_ctl(3, 1, 8) == 3);
    CHECK(make_ctl(0, 5, 0) == 5);
}

TEST_CASE("out-of-range benchmark line") {
    KernelOptions opt;
    opt.lines = {LineSpec{40, 1, 0}};
    CHECK_THROWS_AS(build_kernel(KernelVariant::ClintNested, Abi::I, opt), ConfigError);
}

TEST_CASE("context switches preserve every task register") {
    for (Abi abi : {Abi::I, Abi::E})
        for (bool acc : {false, true}) {
            CAPTURE(abi_name(abi));
            CAPTURE(acc);
            CtxSwitchProgram p = build_ctxswitch(abi, acc, 6);
            SimConfig cfg;
            cfg.abi = abi;
            cfg.mode = ControllerMode::Clic;
            cfg.fastirq = acc;
            if (acc) cfg.ctx_line = p.line;
            Core core(cfg, TraceLevel::Events);
            load_program(core.memory(), p.image);
            core.reset(layout::kEntry);
            core.run(50000);
            REQUIRE(core.halted());
            REQUIRE_FALSE(core.faulted());
            unsigned switches = 0, resumes = 0;
            for (const auto& e : core.trace().events()) {
                if (e.kind == EventKind::Marker && e.id == kMarkSwitchStart) ++switches;
                if (e.kind == EventKind::Marker && e.id == kMarkTaskResume) ++resumes;
            }
            CHECK(switches == 6);
            CHECK(resumes == 7);
            // The halting task sees its own values in every register it
            // does not use itself (s1 counts, t0/t1 are dead at a yield).
            uint32_t tag = core.regs().read(a0) & 0xf0000000u;
            CHECK((tag == 0xa0000000u || tag == 0xb0000000u));
            unsigned nregs = abi == Abi::I ? 32 : 16;
            for (unsigned r = 1; r < nregs; ++r) {
                if (r == sp || r == s1 || r == t0 || r == t1) continue;
                CAPTURE(r);
                CHECK(core.regs().read(r) == (tag | r));
            }
            CHECK(core.regs().read(s1) == 0);
        }
}
