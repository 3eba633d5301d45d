#include "doctest.h"

#include "cv32rt/memory.hpp"
#include "cv32rt/program.hpp"

using namespace cv32rt;
using namespace cv32rt::reg;

TEST_CASE("li uses one word when the value fits 12 bits") {
    ProgramBuilder b(Abi::I, 0);
    b.li(a0, 2047);
    CHECK(b.here() == 4);
    b.li(a0, -2048);
    CHECK(b.here() == 8);
    b.li(a0, 0x12345fff);
    CHECK(b.here() == 16);
    ProgramImage img = b.finish();
    uint32_t w0 = 0, w1 = 0;
    REQUIRE(img.word_at(8, w0));
    REQUIRE(img.word_at(12, w1));
    // lui rounds up so the sign-extended addi lands on the value.
    CHECK(decode(w0).op == Op::Lui);
    CHECK(uint32_t(decode(w0).imm) == 0x12346000u);
    CHECK(decode(w1).imm == -1);
}

TEST_CASE("la resolves hi/lo against a label") {
    ProgramBuilder b(Abi::I, 0);
    b.la(t0, "data");
    b.org(0x1800);
    b.label("data");
    b.word(7);
    ProgramImage img = b.finish();
    uint32_t w0 = 0, w1 = 0;
    REQUIRE(img.word_at(0, w0));
    REQUIRE(img.word_at(4, w1));
    Instruction hi = decode(w0), lo = decode(w1);
    CHECK(uint32_t(hi.imm) + uint32_t(lo.imm) == 0x1800);
    CHECK(img.label("data") == 0x1800);
}

TEST_CASE("builder errors") {
    SUBCASE("duplicate label") {
        ProgramBuilder b(Abi::I, 0);
        b.label("x");
        CHECK_THROWS_AS(b.label("x"), ConfigError);
    }
    SUBCASE("unresolved label") {
        ProgramBuilder b(Abi::I, 0);
        b.j("nowhere");
        CHECK_THROWS_AS(b.finish(), ConfigError);
    }
    SUBCASE("branch out of range") {
        ProgramBuilder b(Abi::I, 0);
        b.beqz(a0, "far");
        b.org(0x2000);
        b.label("far");
        CHECK_THROWS_AS(b.finish(), ConfigError);
    }
    SUBCASE("overlapping segments") {
        ProgramBuilder b(Abi::I, 0);
        b.nop();
        b.nop();
        b.org(4);
        b.nop();
        CHECK_THROWS_AS(b.finish(), ConfigError);
    }
    SUBCASE("E-ABI register limit") {
        ProgramBuilder b(Abi::E, 0);
        CHECK_NOTHROW(b.addi(a5, a5, 1));
        CHECK_THROWS_AS(b.addi(a6, a6, 1), ConfigError);
    }
    SUBCASE("immediate range") {
        ProgramBuilder b(Abi::I, 0);
        CHECK_THROWS_AS(b.addi(a0, a0, 4096), ConfigError);
    }
    SUBCASE("unknown label lookup") {
        ProgramImage img = ProgramBuilder(Abi::I, 0).finish();
        CHECK_THROWS_AS(img.label("none"), ConfigError);
    }
}

TEST_CASE("load_program places segments and rejects non-SPM targets") {
    Memory mem(AddressMap::default_map(WaitStates{}));
    ProgramBuilder b(Abi::I, 0x100);
    b.word(0xdeadbeef);
    b.org(map::kDataBase);
    b.word(0x11223344);
    load_program(mem, b.finish());
    CHECK(mem.peek32(0x100) == 0xdeadbeef);
    CHECK(mem.peek32(map::kDataBase) == 0x11223344);

    ProgramBuilder bad(Abi::I, map::kClicBase);
    bad.word(1);
    CHECK_THROWS_AS(load_program(mem, bad.finish()), ConfigError);
}

TEST_CASE("listing disassembles a range") {
    ProgramBuilder b(Abi::I, 0);
    b.label("start");
    b.addi(a0, a0, 1);
    b.ret();
    ProgramImage img = b.finish();
    auto l = img.listing(0, 8, Abi::I);
    REQUIRE(l.size() == 2);
    CHECK(l[0].op == Op::Addi);
    CHECK(l[1].op == Op::Jalr);
    CHECK(disassemble(l[0]).find("addi") != std::string::npos);
}
