#pragma once

#include <cstdint>
#include <string>

namespace cv32rt {

enum class Abi { I, E };

inline unsigned abi_num_regs(Abi abi) { return abi == Abi::I ? 32u : 16u; }

enum class Op : uint8_t {
    Illegal,
    Lui, Auipc, Jal, Jalr,
    Beq, Bne, Blt, Bge, Bltu, Bgeu,
    Lb, Lh, Lw, Lbu, Lhu,
    Sb, Sh, Sw,
    Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
    Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
    Fence, Ecall, Ebreak, Mret, Emret, Wfi,
    Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
    Marker,   // reserved custom-0 no-op carrying a marker id in imm
    Jalxnxti, // custom-0: claim next non-SHV interrupt and jump through its vector entry
};

struct Instruction {
    Op op = Op::Illegal;
    uint8_t rd = 0;
    uint8_t rs1 = 0;
    uint8_t rs2 = 0;
    int32_t imm = 0;
    uint16_t csr = 0;
    uint32_t raw = 0;
};

// Fixed encodings of the extensions.
namespace enc {
constexpr uint32_t kNop = 0x00000013;
constexpr uint32_t kMret = 0x30200073;
constexpr uint32_t kEmret = 0x30300073;   // funct12 0x303, next to mret
constexpr uint32_t kEcall = 0x00000073;
constexpr uint32_t kEbreak = 0x00100073;  // halt marker for benchmark programs
constexpr uint32_t kWfi = 0x10500073;
constexpr uint32_t kCustom0 = 0x0B;
constexpr uint32_t kMarkerFunct3 = 0;
constexpr uint32_t kJalxnxtiFunct3 = 1;
} // namespace enc

// Marker ids used by bench programs.
enum MarkerId : uint16_t {
    kMarkBody = 1,
    kMarkSwitchStart = 2,
    kMarkTaskResume = 3,
};

Instruction decode(uint32_t word, Abi abi = Abi::I);
std::string disassemble(const Instruction& ins);

bool is_load(Op op);
bool is_store(Op op);
bool is_branch(Op op);
bool is_csr(Op op);
bool writes_rd(const Instruction& ins);
// Registers read by the instruction; unused entries are 0.
void source_regs(const Instruction& ins, uint8_t& a, uint8_t& b);

// Encoders
uint32_t enc_r(uint32_t funct7, uint32_t rs2, uint32_t rs1, uint32_t funct3, uint32_t rd, uint32_t opcode);
uint32_t enc_i(int32_t imm, uint32_t rs1, uint32_t funct3, uint32_t rd, uint32_t opcode);
uint32_t enc_s(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3, uint32_t opcode);
uint32_t enc_b(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3);
uint32_t enc_u(uint32_t imm20, uint32_t rd, uint32_t opcode);
uint32_t enc_j(int32_t imm, uint32_t rd);
uint32_t enc_csr(uint32_t csr, uint32_t rs1_or_uimm, uint32_t funct3, uint32_t rd);
uint32_t enc_marker(uint16_t id);
uint32_t enc_jalxnxti(uint32_t rd);

const char* reg_name(unsigned r);
int reg_index(const std::string& name); // -1 when unknown

} // namespace cv32rt
