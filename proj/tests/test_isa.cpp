#include "doctest.h"

#include "cv32rt/isa.hpp"
#include "cv32rt/program.hpp"

using namespace cv32rt;
using namespace cv32rt::reg;

// Reference words produced by an external RV32I assembler.
TEST_CASE("encodings match the reference assembler") {
    ProgramBuilder b(Abi::I, 0);
    b.addi(ra, zero, 1);
    b.lw(a0, 4, sp);
    b.sw(ra, 12, sp);
    b.csrrsi(a0, 0x345, 8);
    b.label("back");
    b.jal(ra, "fwd");
    b.bne(s0, zero, "back");
    b.lui(t0, 0x201);
    b.sb(t1, 12, t0);
    b.label("fwd");
    b.mret();
    b.srai(a5, a4, 3);
    b.sub(t3, t4, t5);
    b.csrrc(t1, 0x304, t1);
    ProgramImage img = b.finish();
    const uint32_t want[] = {0x00100093, 0x00412503, 0x00112623, 0x34546573, 0x010000ef, 0xfe041ee3,
                             0x002012b7, 0x00628623, 0x30200073, 0x40375793, 0x41ee8e33, 0x30433373};
    REQUIRE(img.segments.size() == 1);
    REQUIRE(img.segments[0].words.size() == std::size(want));
    for (size_t i = 0; i < std::size(want); ++i) CHECK(img.segments[0].words[i] == want[i]);
}

TEST_CASE("decode recovers fields") {
    Instruction i = decode(0x00412503);
    CHECK(i.op == Op::Lw);
    CHECK(i.rd == a0);
    CHECK(i.rs1 == sp);
    CHECK(i.imm == 4);

    i = decode(0xfe041ee3);
    CHECK(i.op == Op::Bne);
    CHECK(i.imm == -4);

    i = decode(0x34546573);
    CHECK(i.op == Op::Csrrsi);
    CHECK(i.csr == 0x345);
    CHECK(i.imm == 8);  // zimm
    CHECK(i.rs1 == 0);

    CHECK(decode(enc::kMret).op == Op::Mret);
    CHECK(decode(enc::kEmret).op == Op::Emret);
    CHECK(decode(enc::kWfi).op == Op::Wfi);
    CHECK(decode(0xffffffff).op == Op::Illegal);
}

TEST_CASE("custom instructions round-trip") {
    Instruction m = decode(enc_marker(3));
    CHECK(m.op == Op::Marker);
    CHECK(m.imm == 3);
    Instruction j = decode(enc_jalxnxti(ra));
    CHECK(j.op == Op::Jalxnxti);
    CHECK(j.rd == ra);
}

TEST_CASE("E-ABI rejects upper registers") {
    CHECK(decode(0x00100093, Abi::E).op == Op::Addi);
    // addi x16, x0, 1
    CHECK(decode(enc_i(1, 0, 0, 16, 0x13), Abi::E).op == Op::Illegal);
}

TEST_CASE("register names") {
    CHECK(std::string(reg_name(2)) == "sp");
    CHECK(reg_index("a0") == 10);
    CHECK(reg_index("x31") == 31);
    CHECK(reg_index("q9") == -1);
}
