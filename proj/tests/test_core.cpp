#include "doctest.h"

#include "cv32rt/core.hpp"
#include "cv32rt/kernels.hpp"
#include "cv32rt/program.hpp"

using namespace cv32rt;
using namespace cv32rt::reg;

namespace {

struct Run {
    SimConfig cfg;
    std::unique_ptr<Core> core;
    ProgramImage image;
};

// Program at 0 with a trap vector that halts.
Run run_program(const std::function<void(ProgramBuilder&)>& body, SimConfig cfg = {}, uint64_t max = 5000) {
    ProgramBuilder b(cfg.abi, 0);
    b.la(t0, "trap");
    b.csrw(csr::kMtvec, t0);
    body(b);
    b.ebreak();
    b.org(0x400);
    b.label("trap");
    b.ebreak();
    Run r;
    r.cfg = cfg;
    r.image = b.finish();
    r.core = std::make_unique<Core>(cfg, TraceLevel::Full);
    load_program(r.core->memory(), r.image);
    r.core->reset(0);
    r.core->run(max);
    return r;
}

uint64_t exec_cycle(const Core& c, uint32_t pc) {
    for (const auto& e : c.trace().events())
        if (e.kind == EventKind::Exec && e.pc == pc) return e.cycle;
    FAIL("pc never executed");
    return 0;
}

} // namespace

TEST_CASE("arithmetic, loops and memory") {
    Run r = run_program([](ProgramBuilder& b) {
        b.li(a0, 0);
        b.li(a1, 10);
        b.label("loop");
        b.add(a0, a0, a1);
        b.addi(a1, a1, -1);
        b.bnez(a1, "loop");
        b.li(a2, int32_t(map::kDataBase + 0x100));
        b.sw(a0, 0, a2);
        b.lw(a3, 0, a2);
        b.lbu(a4, 0, a2);
        b.li(a5, -8);
        b.srai(a5, a5, 1);
        b.sltu(a6, zero, a5);
    });
    REQUIRE(r.core->halted());
    const auto& rf = r.core->regs();
    CHECK(rf.read(a0) == 55);
    CHECK(rf.read(a3) == 55);
    CHECK(rf.read(a4) == 55);
    CHECK(int32_t(rf.read(a5)) == -4);
    CHECK(rf.read(a6) == 1);
    CHECK(r.core->memory().peek32(map::kDataBase + 0x100) == 55);
}

TEST_CASE("pipeline timing") {
    Run r = run_program([](ProgramBuilder& b) {
        b.label("p0");
        b.addi(a0, zero, 1);
        b.addi(a1, zero, 2);  // back to back
        b.j("p3");
        b.nop();
        b.label("p3");
        b.li(a2, int32_t(map::kDataBase));
        b.label("lw1");
        b.lw(a3, 0, a2);
        b.addi(a4, a3, 1);  // load use
        b.lw(a5, 0, a2);
        b.addi(a6, a0, 1);  // independent of the load
        b.csrci(csr::kMstatus, 8);  // writes mstatus
        b.label("after_csr");
        b.nop();
    });
    const Core& c = *r.core;
    const ProgramImage& img = r.image;
    uint32_t p0 = img.label("p0");
    CHECK(exec_cycle(c, p0 + 4) - exec_cycle(c, p0) == 1);
    CHECK(exec_cycle(c, img.label("p3")) - exec_cycle(c, p0 + 8) == 2);
    uint32_t lw1 = img.label("lw1");
    CHECK(exec_cycle(c, lw1 + 4) - exec_cycle(c, lw1) == 2);
    CHECK(exec_cycle(c, lw1 + 12) - exec_cycle(c, lw1 + 8) == 1);
    CHECK(exec_cycle(c, img.label("after_csr")) - exec_cycle(c, img.label("after_csr") - 4) == 3);
}

TEST_CASE("synchronous exceptions") {
    SUBCASE("ecall") {
        Run r = run_program([](ProgramBuilder& b) {
            b.label("call");
            b.ecall();
        });
        CHECK((r.core->read_csr_debug(csr::kMcause) & mcause::kCodeMask) == exc::kEcallM);
        CHECK(r.core->read_csr_debug(csr::kMepc) == r.image.label("call"));
    }
    SUBCASE("emret without fastirq is illegal") {
        Run r = run_program([](ProgramBuilder& b) { b.emret(); });
        CHECK((r.core->read_csr_debug(csr::kMcause) & mcause::kCodeMask) == exc::kIllegal);
    }
    SUBCASE("load from unmapped space") {
        Run r = run_program([](ProgramBuilder& b) {
            b.li(a0, 0x00500000);
            b.lw(a1, 0, a0);
        });
        CHECK((r.core->read_csr_debug(csr::kMcause) & mcause::kCodeMask) == exc::kLoadFault);
        CHECK(r.core->read_csr_debug(csr::kMtval) == 0x00500000);
    }
    SUBCASE("store to unmapped space") {
        Run r = run_program([](ProgramBuilder& b) {
            b.li(a0, 0x00500000);
            b.sw(a1, 0, a0);
        });
        CHECK((r.core->read_csr_debug(csr::kMcause) & mcause::kCodeMask) == exc::kStoreFault);
    }
}

TEST_CASE("CSR access") {
    Run r = run_program([](ProgramBuilder& b) {
        b.li(a0, 0x55);
        b.csrw(csr::kMscratch, a0);
        b.csrr(a1, csr::kMscratch);
        b.csrr(a2, csr::kMcycle);
        b.csrr(a3, csr::kMcycle);
        b.csrwi(csr::kMintthresh, 7);
        b.csrr(a4, csr::kMintthresh);
    });
    const auto& rf = r.core->regs();
    CHECK(rf.read(a1) == 0x55);
    CHECK(rf.read(a3) > rf.read(a2));
    CHECK(rf.read(a4) == 7);
}

TEST_CASE("an SHV interrupt enters its handler six cycles after assertion") {
    Kernel k = build_kernel(KernelVariant::Fastirq, Abi::I);
    Core core(kernel_config(KernelVariant::Fastirq, Abi::I), TraceLevel::Full);
    load_program(core.memory(), k.image);
    core.reset(layout::kEntry);
    core.schedule({200, 31, true});
    core.schedule({201, 31, false});
    core.run(20000);
    REQUIRE(core.halted());
    uint64_t marker = 0;
    for (const auto& e : core.trace().events())
        if (e.kind == EventKind::Marker) marker = marker ? marker : e.cycle;
    CHECK(marker == 206);
    // Interrupted code sees its registers unchanged and the hardware frame on the stack.
    CHECK(core.regs().active() == 0);
    CHECK(core.regs().read(sp) == layout::kStackTop);
}

TEST_CASE("trace verbosity") {
    SimConfig cfg;
    ProgramBuilder b(Abi::I, 0);
    b.marker(1);
    b.ebreak();
    ProgramImage img = b.finish();
    for (TraceLevel lv : {TraceLevel::Off, TraceLevel::Events, TraceLevel::Full}) {
        Core c(cfg, lv);
        load_program(c.memory(), img);
        c.reset(0);
        c.run(100);
        CHECK(c.halted());
        bool has_exec = false, has_marker = false;
        for (const auto& e : c.trace().events()) {
            has_exec |= e.kind == EventKind::Exec;
            has_marker |= e.kind == EventKind::Marker;
        }
        CHECK(has_exec == (lv == TraceLevel::Full));
        CHECK(has_marker == (lv != TraceLevel::Off));
    }
}

TEST_CASE("trace lines parse back") {
    TraceEvent e;
    e.cycle = 42;
    e.kind = EventKind::DrainStore;
    e.addr = 0x103fc4;
    e.value = 7;
    e.aux = 4;
    TraceEvent back;
    REQUIRE(parse_event(format_event(e), back));
    CHECK(back == e);
    CHECK_FALSE(parse_event("cycle=1 kind=bogus", back));
}

TEST_CASE("configuration validation") {
    SimConfig c;
    c.mode = ControllerMode::Clint;
    c.fastirq = true;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    SimConfig d;
    d.nlbits = 9;
    CHECK_THROWS_AS(d.validate(), ConfigError);
}
