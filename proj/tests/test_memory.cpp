#include "doctest.h"

#include "cv32rt/clic.hpp"
#include "cv32rt/memory.hpp"

using namespace cv32rt;

TEST_CASE("default map regions") {
    AddressMap m = AddressMap::default_map(WaitStates{});
    REQUIRE(m.find(map::kInstrBase) != nullptr);
    CHECK(m.find(map::kInstrBase)->kind == RegionKind::InstrSpm);
    CHECK(m.find(map::kDataBase + 0x100)->kind == RegionKind::DataSpm);
    CHECK(m.find(map::kClicBase)->kind == RegionKind::ClicMmio);
    CHECK(m.find(map::kStubBase)->kind == RegionKind::StubDevice);
    CHECK(m.find(0x0040'0000) == nullptr);
}

TEST_CASE("overlapping regions are rejected") {
    AddressMap m;
    m.add(Region{"a", 0x1000, 0x1000, RegionKind::DataSpm, 0, 1});
    CHECK_THROWS_AS(m.add(Region{"b", 0x1800, 0x1000, RegionKind::DataSpm, 0, 1}), ConfigError);
    CHECK_NOTHROW(m.add(Region{"c", 0x2000, 0x10, RegionKind::DataSpm, 0, 1}));
}

TEST_CASE("access latency follows wait states") {
    WaitStates ws;
    ws.data = 2;
    Memory mem(AddressMap::default_map(ws));
    AccessResult w = mem.access(Port::Lsu, map::kDataBase + 8, AccessKind::Write, 0xabcd1234);
    REQUIRE(w.ok);
    CHECK(w.latency == 3);
    AccessResult r = mem.access(Port::Lsu, map::kDataBase + 8, AccessKind::Read, 0);
    CHECK(r.data == 0xabcd1234);
    AccessResult f = mem.access(Port::Fetch, map::kInstrBase, AccessKind::Read, 0);
    CHECK(f.latency == 1);
}

TEST_CASE("byte and half accesses") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    mem.access(Port::Lsu, map::kDataBase, AccessKind::Write, 0x11223344);
    CHECK(mem.access(Port::Lsu, map::kDataBase + 1, AccessKind::Read, 0, 1).data == 0x33);
    CHECK(mem.access(Port::Lsu, map::kDataBase + 2, AccessKind::Read, 0, 2).data == 0x1122);
    mem.access(Port::Lsu, map::kDataBase + 3, AccessKind::Write, 0xee, 1);
    CHECK(mem.peek32(map::kDataBase) == 0xee223344);
}

TEST_CASE("bus errors") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    CHECK_FALSE(mem.access(Port::Lsu, 0x0050'0000, AccessKind::Read, 0).ok);
    CHECK_FALSE(mem.access(Port::Lsu, map::kDataBase + 2, AccessKind::Read, 0, 4).ok);  // misaligned
    CHECK_FALSE(mem.access(Port::Lsu, map::kClicBase, AccessKind::Read, 0).ok);        // no device attached
}

TEST_CASE("device regions route to the attached device") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    Clic clic(ControllerMode::Clic, 8);
    mem.attach(RegionKind::ClicMmio, &clic);
    uint32_t ie = map::kClicBase + clicreg::line_offset(3) + clicreg::kIeByte;
    REQUIRE(mem.access(Port::Lsu, ie, AccessKind::Write, 1, 1).ok);
    CHECK(clic.line(3).enabled);
    CHECK_FALSE(mem.poke(map::kClicBase, 4, 0));  // backdoor is SPM only
}

TEST_CASE("data banks and the shared drain port") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    CHECK(mem.bank_of(map::kDataBase) == 0);
    CHECK(mem.bank_of(map::kDataBase + 0x4000) == 1);
    CHECK(mem.bank_of(map::kDataBase + 0xffff) == 3);
    CHECK(mem.bank_of(map::kInstrBase) == -1);

    PortArbiter dedicated(DrainPort::Dedicated);
    dedicated.note_lsu(10, 2, 1);
    CHECK(dedicated.drain_may_issue(10, 0));
    CHECK_FALSE(dedicated.drain_may_issue(11, 1));
    CHECK(dedicated.drain_may_issue(12, 1));

    PortArbiter shared(DrainPort::Shared);
    shared.note_lsu(10, 1, 1);
    CHECK_FALSE(shared.drain_may_issue(10, 0));
    CHECK(shared.drain_may_issue(11, 0));
}

TEST_CASE("load_image bounds") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    std::vector<uint32_t> words(4, 0x5a5a5a5a);
    CHECK_NOTHROW(mem.load_words(RegionKind::DataSpm, words, 0x10));
    CHECK(mem.peek32(map::kDataBase + 0x1c) == 0x5a5a5a5a);
    CHECK_THROWS_AS(mem.load_words(RegionKind::DataSpm, words, map::kDataSize - 4), ConfigError);
    CHECK_THROWS_AS(mem.load_words(RegionKind::ClicMmio, words), ConfigError);
}

TEST_CASE("address map table lists every region") {
    std::string t = address_map_table(AddressMap::default_map(WaitStates{}));
    CHECK(t.find("0x00100000") != std::string::npos);
    CHECK(t.find("stub") != std::string::npos);
}
