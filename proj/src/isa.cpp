#include "cv32rt/isa.hpp"

#include <array>
#include <cstdio>

namespace cv32rt {

namespace {

constexpr std::array<const char*, 32> kRegNames = {
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0",
    "a1",   "a2", "a3", "a4", "a5", "a6", "a7", "s2", "s3", "s4", "s5",
    "s6",   "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

int32_t sext(uint32_t v, unsigned bits) {
    uint32_t m = 1u << (bits - 1);
    return static_cast<int32_t>((v ^ m) - m);
}

uint32_t bits(uint32_t w, unsigned hi, unsigned lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1); }

int32_t imm_i(uint32_t w) { return sext(w >> 20, 12); }
int32_t imm_s(uint32_t w) { return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
int32_t imm_b(uint32_t w) {
    uint32_t v = (bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1);
    return sext(v, 13);
}
int32_t imm_j(uint32_t w) {
    uint32_t v = (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1);
    return sext(v, 21);
}

Instruction decode_raw(uint32_t w) {
    Instruction ins;
    ins.raw = w;
    const uint32_t opcode = w & 0x7f;
    const uint32_t rd = bits(w, 11, 7);
    const uint32_t f3 = bits(w, 14, 12);
    const uint32_t rs1 = bits(w, 19, 15);
    const uint32_t rs2 = bits(w, 24, 20);
    const uint32_t f7 = bits(w, 31, 25);
    ins.rd = static_cast<uint8_t>(rd);
    ins.rs1 = static_cast<uint8_t>(rs1);
    ins.rs2 = static_cast<uint8_t>(rs2);

    auto illegal = [&] {
        Instruction bad;
        bad.raw = w;
        return bad;
    };

    switch (opcode) {
    case 0x37: ins.op = Op::Lui; ins.imm = static_cast<int32_t>(w & 0xfffff000u); ins.rs1 = ins.rs2 = 0; return ins;
    case 0x17: ins.op = Op::Auipc; ins.imm = static_cast<int32_t>(w & 0xfffff000u); ins.rs1 = ins.rs2 = 0; return ins;
    case 0x6f: ins.op = Op::Jal; ins.imm = imm_j(w); ins.rs1 = ins.rs2 = 0; return ins;
    case 0x67:
        if (f3 != 0) return illegal();
        ins.op = Op::Jalr; ins.imm = imm_i(w); ins.rs2 = 0; return ins;
    case 0x63: {
        static constexpr Op ops[8] = {Op::Beq, Op::Bne, Op::Illegal, Op::Illegal, Op::Blt, Op::Bge, Op::Bltu, Op::Bgeu};
        if (ops[f3] == Op::Illegal) return illegal();
        ins.op = ops[f3]; ins.imm = imm_b(w); ins.rd = 0; return ins;
    }
    case 0x03: {
        static constexpr Op ops[8] = {Op::Lb, Op::Lh, Op::Lw, Op::Illegal, Op::Lbu, Op::Lhu, Op::Illegal, Op::Illegal};
        if (ops[f3] == Op::Illegal) return illegal();
        ins.op = ops[f3]; ins.imm = imm_i(w); ins.rs2 = 0; return ins;
    }
    case 0x23: {
        static constexpr Op ops[8] = {Op::Sb, Op::Sh, Op::Sw, Op::Illegal, Op::Illegal, Op::Illegal, Op::Illegal, Op::Illegal};
        if (ops[f3] == Op::Illegal) return illegal();
        ins.op = ops[f3]; ins.imm = imm_s(w); ins.rd = 0; return ins;
    }
    case 0x13: {
        ins.rs2 = 0;
        ins.imm = imm_i(w);
        switch (f3) {
        case 0: ins.op = Op::Addi; return ins;
        case 2: ins.op = Op::Slti; return ins;
        case 3: ins.op = Op::Sltiu; return ins;
        case 4: ins.op = Op::Xori; return ins;
        case 6: ins.op = Op::Ori; return ins;
        case 7: ins.op = Op::Andi; return ins;
        case 1:
            if (f7 != 0) return illegal();
            ins.op = Op::Slli; ins.imm = static_cast<int32_t>(rs2); return ins;
        case 5:
            if (f7 == 0x00) { ins.op = Op::Srli; ins.imm = static_cast<int32_t>(rs2); return ins; }
            if (f7 == 0x20) { ins.op = Op::Srai; ins.imm = static_cast<int32_t>(rs2); return ins; }
            return illegal();
        }
        return illegal();
    }
    case 0x33: {
        if (f7 == 0x00) {
            static constexpr Op ops[8] = {Op::Add, Op::Sll, Op::Slt, Op::Sltu, Op::Xor, Op::Srl, Op::Or, Op::And};
            ins.op = ops[f3];
            return ins;
        }
        if (f7 == 0x20) {
            if (f3 == 0) { ins.op = Op::Sub; return ins; }
            if (f3 == 5) { ins.op = Op::Sra; return ins; }
        }
        return illegal();
    }
    case 0x0f:
        ins.op = Op::Fence; ins.rd = ins.rs1 = ins.rs2 = 0; return ins;
    case 0x73: {
        if (f3 == 0) {
            if (rd != 0 || rs1 != 0) return illegal();
            ins.rs2 = 0;
            switch (w >> 20) {
            case 0x000: ins.op = Op::Ecall; return ins;
            case 0x001: ins.op = Op::Ebreak; return ins;
            case 0x302: ins.op = Op::Mret; return ins;
            case 0x303: ins.op = Op::Emret; return ins;
            case 0x105: ins.op = Op::Wfi; return ins;
            }
            return illegal();
        }
        static constexpr Op ops[8] = {Op::Illegal, Op::Csrrw, Op::Csrrs, Op::Csrrc, Op::Illegal, Op::Csrrwi, Op::Csrrsi, Op::Csrrci};
        if (ops[f3] == Op::Illegal) return illegal();
        ins.op = ops[f3];
        ins.csr = static_cast<uint16_t>(w >> 20);
        ins.rs2 = 0;
        if (f3 >= 5) {
            ins.imm = static_cast<int32_t>(rs1);
            ins.rs1 = 0;
        }
        return ins;
    }
    case enc::kCustom0:
        if (f3 == enc::kMarkerFunct3 && rd == 0 && rs1 == 0) {
            ins.op = Op::Marker; ins.imm = static_cast<int32_t>(w >> 20); ins.rs2 = 0; return ins;
        }
        if (f3 == enc::kJalxnxtiFunct3 && rs1 == 0 && (w >> 20) == 0) {
            ins.op = Op::Jalxnxti; ins.rs2 = 0; return ins;
        }
        return illegal();
    }
    return illegal();
}

} // namespace

Instruction decode(uint32_t word, Abi abi) {
    Instruction ins = decode_raw(word);
    if (ins.op == Op::Illegal) return ins;
    if (abi == Abi::E) {
        uint8_t a = 0, b = 0;
        source_regs(ins, a, b);
        if (a >= 16 || b >= 16 || (writes_rd(ins) && ins.rd >= 16)) {
            Instruction illegal;
            illegal.raw = word;
            return illegal;
        }
    }
    return ins;
}

bool is_load(Op op) { return op == Op::Lb || op == Op::Lh || op == Op::Lw || op == Op::Lbu || op == Op::Lhu; }
bool is_store(Op op) { return op == Op::Sb || op == Op::Sh || op == Op::Sw; }
bool is_branch(Op op) {
    return op == Op::Beq || op == Op::Bne || op == Op::Blt || op == Op::Bge || op == Op::Bltu || op == Op::Bgeu;
}
bool is_csr(Op op) {
    return op == Op::Csrrw || op == Op::Csrrs || op == Op::Csrrc || op == Op::Csrrwi || op == Op::Csrrsi ||
           op == Op::Csrrci;
}

bool writes_rd(const Instruction& ins) {
    if (ins.rd == 0) return false;
    switch (ins.op) {
    case Op::Illegal: case Op::Beq: case Op::Bne: case Op::Blt: case Op::Bge: case Op::Bltu: case Op::Bgeu:
    case Op::Sb: case Op::Sh: case Op::Sw: case Op::Fence: case Op::Ecall: case Op::Ebreak: case Op::Mret:
    case Op::Emret: case Op::Wfi: case Op::Marker:
        return false;
    default:
        return true;
    }
}

void source_regs(const Instruction& ins, uint8_t& a, uint8_t& b) {
    a = b = 0;
    switch (ins.op) {
    case Op::Jalr: case Op::Lb: case Op::Lh: case Op::Lw: case Op::Lbu: case Op::Lhu:
    case Op::Addi: case Op::Slti: case Op::Sltiu: case Op::Xori: case Op::Ori: case Op::Andi:
    case Op::Slli: case Op::Srli: case Op::Srai: case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
        a = ins.rs1;
        break;
    case Op::Beq: case Op::Bne: case Op::Blt: case Op::Bge: case Op::Bltu: case Op::Bgeu:
    case Op::Sb: case Op::Sh: case Op::Sw:
    case Op::Add: case Op::Sub: case Op::Sll: case Op::Slt: case Op::Sltu: case Op::Xor:
    case Op::Srl: case Op::Sra: case Op::Or: case Op::And:
        a = ins.rs1;
        b = ins.rs2;
        break;
    default:
        break;
    }
}

uint32_t enc_r(uint32_t funct7, uint32_t rs2, uint32_t rs1, uint32_t funct3, uint32_t rd, uint32_t opcode) {
    return (funct7 << 25) | ((rs2 & 31) << 20) | ((rs1 & 31) << 15) | ((funct3 & 7) << 12) | ((rd & 31) << 7) |
           (opcode & 0x7f);
}

uint32_t enc_i(int32_t imm, uint32_t rs1, uint32_t funct3, uint32_t rd, uint32_t opcode) {
    return ((static_cast<uint32_t>(imm) & 0xfff) << 20) | ((rs1 & 31) << 15) | ((funct3 & 7) << 12) |
           ((rd & 31) << 7) | (opcode & 0x7f);
}

uint32_t enc_s(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3, uint32_t opcode) {
    uint32_t u = static_cast<uint32_t>(imm);
    return (((u >> 5) & 0x7f) << 25) | ((rs2 & 31) << 20) | ((rs1 & 31) << 15) | ((funct3 & 7) << 12) |
           ((u & 31) << 7) | (opcode & 0x7f);
}

uint32_t enc_b(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3) {
    uint32_t u = static_cast<uint32_t>(imm);
    return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3f) << 25) | ((rs2 & 31) << 20) | ((rs1 & 31) << 15) |
           ((funct3 & 7) << 12) | (((u >> 1) & 0xf) << 8) | (((u >> 11) & 1) << 7) | 0x63;
}

uint32_t enc_u(uint32_t imm20, uint32_t rd, uint32_t opcode) {
    return ((imm20 & 0xfffff) << 12) | ((rd & 31) << 7) | (opcode & 0x7f);
}

uint32_t enc_j(int32_t imm, uint32_t rd) {
    uint32_t u = static_cast<uint32_t>(imm);
    return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3ff) << 21) | (((u >> 11) & 1) << 20) |
           (((u >> 12) & 0xff) << 12) | ((rd & 31) << 7) | 0x6f;
}

uint32_t enc_csr(uint32_t csr, uint32_t rs1_or_uimm, uint32_t funct3, uint32_t rd) {
    return ((csr & 0xfff) << 20) | ((rs1_or_uimm & 31) << 15) | ((funct3 & 7) << 12) | ((rd & 31) << 7) | 0x73;
}

uint32_t enc_marker(uint16_t id) { return (static_cast<uint32_t>(id & 0xfff) << 20) | enc::kCustom0; }

uint32_t enc_jalxnxti(uint32_t rd) { return (enc::kJalxnxtiFunct3 << 12) | ((rd & 31) << 7) | enc::kCustom0; }

const char* reg_name(unsigned r) { return r < 32 ? kRegNames[r] : "?"; }

int reg_index(const std::string& name) {
    for (unsigned i = 0; i < 32; ++i)
        if (name == kRegNames[i]) return static_cast<int>(i);
    if (name == "fp") return 8;
    if (name.size() >= 2 && name[0] == 'x') {
        int v = 0;
        for (size_t i = 1; i < name.size(); ++i) {
            if (name[i] < '0' || name[i] > '9') return -1;
            v = v * 10 + (name[i] - '0');
        }
        return v < 32 ? v : -1;
    }
    return -1;
}

std::string disassemble(const Instruction& ins) {
    static constexpr const char* names[] = {
        "illegal", "lui", "auipc", "jal", "jalr", "beq", "bne", "blt", "bge", "bltu", "bgeu",
        "lb", "lh", "lw", "lbu", "lhu", "sb", "sh", "sw",
        "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
        "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
        "fence", "ecall", "ebreak", "mret", "emret", "wfi",
        "csrrw", "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci", "marker", "jalxnxti"};
    const char* n = names[static_cast<unsigned>(ins.op)];
    char buf[96];
    const char* rd = reg_name(ins.rd);
    const char* r1 = reg_name(ins.rs1);
    const char* r2 = reg_name(ins.rs2);
    switch (ins.op) {
    case Op::Lui: case Op::Auipc:
        std::snprintf(buf, sizeof buf, "%s %s,0x%x", n, rd, static_cast<uint32_t>(ins.imm) >> 12); break;
    case Op::Jal: std::snprintf(buf, sizeof buf, "%s %s,%d", n, rd, ins.imm); break;
    case Op::Jalr: case Op::Lb: case Op::Lh: case Op::Lw: case Op::Lbu: case Op::Lhu:
        std::snprintf(buf, sizeof buf, "%s %s,%d(%s)", n, rd, ins.imm, r1); break;
    case Op::Sb: case Op::Sh: case Op::Sw:
        std::snprintf(buf, sizeof buf, "%s %s,%d(%s)", n, r2, ins.imm, r1); break;
    case Op::Beq: case Op::Bne: case Op::Blt: case Op::Bge: case Op::Bltu: case Op::Bgeu:
        std::snprintf(buf, sizeof buf, "%s %s,%s,%d", n, r1, r2, ins.imm); break;
    case Op::Addi: case Op::Slti: case Op::Sltiu: case Op::Xori: case Op::Ori: case Op::Andi:
    case Op::Slli: case Op::Srli: case Op::Srai:
        std::snprintf(buf, sizeof buf, "%s %s,%s,%d", n, rd, r1, ins.imm); break;
    case Op::Add: case Op::Sub: case Op::Sll: case Op::Slt: case Op::Sltu: case Op::Xor:
    case Op::Srl: case Op::Sra: case Op::Or: case Op::And:
        std::snprintf(buf, sizeof buf, "%s %s,%s,%s", n, rd, r1, r2); break;
    case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
        std::snprintf(buf, sizeof buf, "%s %s,0x%03x,%s", n, rd, ins.csr, r1); break;
    case Op::Csrrwi: case Op::Csrrsi: case Op::Csrrci:
        std::snprintf(buf, sizeof buf, "%s %s,0x%03x,%d", n, rd, ins.csr, ins.imm); break;
    case Op::Marker: std::snprintf(buf, sizeof buf, "%s %d", n, ins.imm); break;
    case Op::Jalxnxti: std::snprintf(buf, sizeof buf, "%s %s", n, rd); break;
    default: std::snprintf(buf, sizeof buf, "%s", n); break;
    }
    return buf;
}

} // namespace cv32rt
