#include "doctest.h"

#include "cv32rt/fastirq.hpp"

using namespace cv32rt;

TEST_CASE("frame layouts") {
    CHECK(frame_words(Abi::I, FrameKind::CallerSave) == 19);
    CHECK(frame_words(Abi::E, FrameKind::CallerSave) == 10);
    CHECK(frame_words(Abi::I, FrameKind::Full) == 33);
    CHECK(frame_words(Abi::E, FrameKind::Full) == 17);
    auto f = frame_layout(Abi::I, FrameKind::CallerSave);
    CHECK(f.front().name == "ra");
    CHECK(f[16].src == SlotSource::Mepc);
    CHECK(f[17].src == SlotSource::Mcause);
    CHECK(f[18].src == SlotSource::Mstatus);
    for (const auto& s : frame_layout(Abi::E, FrameKind::Full))
        if (s.src == SlotSource::Gpr) CHECK(s.reg < 16);
    std::string t = frame_table(Abi::I, FrameKind::CallerSave);
    CHECK(t.find("| 18 | mstatus | 72 |") != std::string::npos);
}

TEST_CASE("stall gate window") {
    StallGate g;
    g.active = true;
    g.base = 0x1000;
    g.len = 4;
    g.saved_watermark = 1;
    CHECK_FALSE(gate_access(g, 0x0ffc));
    CHECK_FALSE(gate_access(g, 0x1000));
    CHECK_FALSE(gate_access(g, 0x1004));
    CHECK(gate_access(g, 0x1008));
    CHECK(gate_access(g, 0x100c));
    CHECK_FALSE(gate_access(g, 0x1010));
    g.active = false;
    CHECK_FALSE(gate_access(g, 0x100c));
}

TEST_CASE("bank switch and drain") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    BankedRegfile rf(Abi::E);
    const uint32_t sp = map::kDataBase + 0x400;
    rf.write(2, sp);
    for (unsigned r = 1; r < 16; ++r)
        if (r != 2) rf.write(r, 0x100 + r);
    rf.latched(1).mepc = 0x44;
    rf.latched(1).mcause = 0x8000001f;
    rf.latched(1).mstatus = 0x1880;
    SaveFsm fsm;
    StallGate gate;
    auto frame = frame_layout(Abi::E, FrameKind::CallerSave);
    uint32_t nsp = bank_switch(rf, fsm, gate, frame);
    CHECK(nsp == sp - 40);
    CHECK(rf.active() == 1);
    CHECK(rf.read(2) == nsp);
    CHECK(rf.read_bank(0, 10) == 0x10a);
    CHECK(fsm.state == SaveState::AdjustSp);
    CHECK(nested_gate(fsm) > 0);

    std::vector<uint32_t> addrs;
    for (uint64_t c = 0; c < 40 && fsm.state != SaveState::Idle; ++c) {
        DrainResult d = drain_step(fsm, gate, mem, c);
        if (d.kind == DrainResult::Store) addrs.push_back(d.addr);
    }
    REQUIRE(addrs.size() == 10);
    for (size_t i = 0; i < addrs.size(); ++i) CHECK(addrs[i] == nsp + 4 * i);
    CHECK(mem.peek32(nsp) == 0x101);       // ra
    CHECK(mem.peek32(nsp + 12) == 0x10a);  // a0
    CHECK(mem.peek32(nsp + 28) == 0x44);   // mepc
    CHECK(mem.peek32(nsp + 36) == 0x1880); // mstatus
    CHECK_FALSE(fsm.busy());
    CHECK(nested_gate(fsm) == 0);
}

TEST_CASE("gate stall estimate shrinks with the watermark") {
    StallGate g;
    g.active = true;
    g.base = 0x2000;
    g.len = 8;
    g.saved_watermark = -1;
    unsigned far = gate_stall_cycles(g, 0x2000 + 4 * 7);
    unsigned near = gate_stall_cycles(g, 0x2000);
    CHECK(far > near);
    g.saved_watermark = 7;
    CHECK(gate_stall_cycles(g, 0x2000 + 4 * 7) == 0);
}

TEST_CASE("emret chaining rule") {
    // Handler at level 5 that interrupted level 2, threshold 0.
    CHECK(emret_chainable(Selection{1, 5, 0}, 5, 0, 2));
    CHECK(emret_chainable(Selection{1, 3, 0}, 5, 0, 2));
    CHECK_FALSE(emret_chainable(Selection{1, 2, 0}, 5, 0, 2));  // no higher than the interrupted level
    CHECK_FALSE(emret_chainable(Selection{1, 3, 0}, 5, 4, 2));  // masked by the threshold
    CHECK_FALSE(emret_resolve(std::nullopt, 5, 0, 2).tail_chain);
    EmretOutcome o = emret_resolve(Selection{9, 4, 1}, 5, 0, 2);
    CHECK(o.tail_chain);
    CHECK(o.sel.id == 9);
}
