#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cv32rt/isa.hpp"

namespace cv32rt {

class Memory;

namespace reg {
constexpr unsigned zero = 0, ra = 1, sp = 2, gp = 3, tp = 4, t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9;
constexpr unsigned a0 = 10, a1 = 11, a2 = 12, a3 = 13, a4 = 14, a5 = 15, a6 = 16, a7 = 17;
constexpr unsigned s2 = 18, s3 = 19, s4 = 20, s5 = 21, s6 = 22, s7 = 23, s8 = 24, s9 = 25, s10 = 26, s11 = 27;
constexpr unsigned t3 = 28, t4 = 29, t5 = 30, t6 = 31;
} // namespace reg

struct Segment {
    uint32_t base = 0;
    std::vector<uint32_t> words;
};

struct ProgramImage {
    std::vector<Segment> segments;
    std::map<std::string, uint32_t> labels;

    uint32_t label(const std::string& name) const;  // throws ConfigError
    // Decoded instructions of the segment holding [from, to).
    std::vector<Instruction> listing(uint32_t from, uint32_t to, Abi abi = Abi::I) const;
    bool word_at(uint32_t addr, uint32_t& w) const;
};

// Writes every segment through the memory backdoor; throws ConfigError if a
// word falls outside the SPMs.
void load_program(Memory& mem, const ProgramImage& img);

class ProgramBuilder {
public:
    explicit ProgramBuilder(Abi abi = Abi::I, uint32_t origin = 0);

    Abi abi() const { return abi_; }
    void org(uint32_t addr);
    uint32_t here() const;
    void label(const std::string& name);
    bool has_label(const std::string& name) const { return labels_.count(name) != 0; }
    std::string fresh(const std::string& stem);

    void word(uint32_t w);
    void word_label(const std::string& name);
    void space(unsigned words, uint32_t fill = 0);

    void lui(unsigned rd, uint32_t imm20);
    void auipc(unsigned rd, uint32_t imm20);
    void jal(unsigned rd, const std::string& target);
    void jalr(unsigned rd, unsigned rs1, int32_t imm = 0);
    void beq(unsigned rs1, unsigned rs2, const std::string& target);
    void bne(unsigned rs1, unsigned rs2, const std::string& target);
    void blt(unsigned rs1, unsigned rs2, const std::string& target);
    void bge(unsigned rs1, unsigned rs2, const std::string& target);
    void bltu(unsigned rs1, unsigned rs2, const std::string& target);
    void bgeu(unsigned rs1, unsigned rs2, const std::string& target);
    void lb(unsigned rd, int32_t imm, unsigned rs1);
    void lh(unsigned rd, int32_t imm, unsigned rs1);
    void lw(unsigned rd, int32_t imm, unsigned rs1);
    void lbu(unsigned rd, int32_t imm, unsigned rs1);
    void lhu(unsigned rd, int32_t imm, unsigned rs1);
    void sb(unsigned rs2, int32_t imm, unsigned rs1);
    void sh(unsigned rs2, int32_t imm, unsigned rs1);
    void sw(unsigned rs2, int32_t imm, unsigned rs1);
    void addi(unsigned rd, unsigned rs1, int32_t imm);
    void slti(unsigned rd, unsigned rs1, int32_t imm);
    void sltiu(unsigned rd, unsigned rs1, int32_t imm);
    void xori(unsigned rd, unsigned rs1, int32_t imm);
    void ori(unsigned rd, unsigned rs1, int32_t imm);
    void andi(unsigned rd, unsigned rs1, int32_t imm);
    void slli(unsigned rd, unsigned rs1, unsigned sh);
    void srli(unsigned rd, unsigned rs1, unsigned sh);
    void srai(unsigned rd, unsigned rs1, unsigned sh);
    void add(unsigned rd, unsigned rs1, unsigned rs2);
    void sub(unsigned rd, unsigned rs1, unsigned rs2);
    void sll(unsigned rd, unsigned rs1, unsigned rs2);
    void slt(unsigned rd, unsigned rs1, unsigned rs2);
    void sltu(unsigned rd, unsigned rs1, unsigned rs2);
    void xor_(unsigned rd, unsigned rs1, unsigned rs2);
    void srl(unsigned rd, unsigned rs1, unsigned rs2);
    void sra(unsigned rd, unsigned rs1, unsigned rs2);
    void or_(unsigned rd, unsigned rs1, unsigned rs2);
    void and_(unsigned rd, unsigned rs1, unsigned rs2);
    void fence();
    void ecall();
    void ebreak();
    void mret();
    void emret();
    void wfi();
    void csrrw(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrs(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrc(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrwi(unsigned rd, uint16_t csr, unsigned uimm);
    void csrrsi(unsigned rd, uint16_t csr, unsigned uimm);
    void csrrci(unsigned rd, uint16_t csr, unsigned uimm);
    void marker(uint16_t id);
    void jalxnxti(unsigned rd);

    // Pseudo-instructions.
    void nop();
    void li(unsigned rd, int32_t value);  // one word when it fits 12 bits, else lui+addi
    void la(unsigned rd, const std::string& target);  // always lui+addi
    void mv(unsigned rd, unsigned rs);
    void j(const std::string& target);
    void call(const std::string& target);
    void ret();
    void beqz(unsigned rs, const std::string& target);
    void bnez(unsigned rs, const std::string& target);
    void csrr(unsigned rd, uint16_t csr);
    void csrw(uint16_t csr, unsigned rs);
    void csrs(uint16_t csr, unsigned rs);
    void csrc(uint16_t csr, unsigned rs);
    void csrwi(uint16_t csr, unsigned uimm);
    void csrsi(uint16_t csr, unsigned uimm);
    void csrci(uint16_t csr, unsigned uimm);

    // Resolves every fixup; throws ConfigError on an unresolved label or an
    // out-of-range offset.
    ProgramImage finish() const;

private:
    enum class Fix { Branch, Jal, Hi, Lo, Word };
    struct Fixup {
        size_t seg;
        size_t index;
        Fix kind;
        std::string label;
        uint32_t pc;
    };

    void emit(uint32_t w);
    void check_regs(std::initializer_list<unsigned> regs) const;
    void branch(uint32_t funct3, unsigned rs1, unsigned rs2, const std::string& target);
    void load(uint32_t funct3, unsigned rd, int32_t imm, unsigned rs1);
    void store(uint32_t funct3, unsigned rs2, int32_t imm, unsigned rs1);
    void op_imm(uint32_t funct3, unsigned rd, unsigned rs1, int32_t imm);
    void op(uint32_t funct7, uint32_t funct3, unsigned rd, unsigned rs1, unsigned rs2);

    Abi abi_;
    std::vector<Segment> segs_;
    std::map<std::string, uint32_t> labels_;
    std::vector<Fixup> fixups_;
    unsigned fresh_ = 0;
};

} // namespace cv32rt
