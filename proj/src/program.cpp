#include "cv32rt/program.hpp"

#include <algorithm>

#include "cv32rt/config.hpp"
#include "cv32rt/memory.hpp"

namespace cv32rt {

uint32_t ProgramImage::label(const std::string& name) const {
    auto it = labels.find(name);
    if (it == labels.end()) throw ConfigError("unknown label: " + name);
    return it->second;
}

bool ProgramImage::word_at(uint32_t addr, uint32_t& w) const {
    for (const auto& s : segments) {
        if (addr >= s.base && addr - s.base < 4 * s.words.size() && (addr & 3) == 0) {
            w = s.words[(addr - s.base) / 4];
            return true;
        }
    }
    return false;
}

std::vector<Instruction> ProgramImage::listing(uint32_t from, uint32_t to, Abi abi) const {
    std::vector<Instruction> out;
    for (uint32_t a = from; a < to; a += 4) {
        uint32_t w = 0;
        if (!word_at(a, w)) throw ConfigError("listing outside the image");
        out.push_back(decode(w, abi));
    }
    return out;
}

void load_program(Memory& mem, const ProgramImage& img) {
    for (const auto& s : img.segments) {
        for (size_t i = 0; i < s.words.size(); ++i) {
            if (!mem.poke(s.base + 4 * uint32_t(i), 4, s.words[i]))
                throw ConfigError("program word outside the scratchpads");
        }
    }
}

ProgramBuilder::ProgramBuilder(Abi abi, uint32_t origin) : abi_(abi) { segs_.push_back({origin, {}}); }

void ProgramBuilder::org(uint32_t addr) {
    if (addr & 3) throw ConfigError("org must be word aligned");
    if (segs_.back().words.empty())
        segs_.back().base = addr;
    else
        segs_.push_back({addr, {}});
}

uint32_t ProgramBuilder::here() const { return segs_.back().base + 4 * uint32_t(segs_.back().words.size()); }

void ProgramBuilder::label(const std::string& name) {
    if (!labels_.emplace(name, here()).second) throw ConfigError("duplicate label: " + name);
}

std::string ProgramBuilder::fresh(const std::string& stem) { return stem + "." + std::to_string(fresh_++); }

void ProgramBuilder::emit(uint32_t w) { segs_.back().words.push_back(w); }

void ProgramBuilder::check_regs(std::initializer_list<unsigned> regs) const {
    for (unsigned r : regs) {
        if (r >= abi_num_regs(abi_)) throw ConfigError(std::string("register not in ABI: ") + reg_name(r));
    }
}

void ProgramBuilder::word(uint32_t w) { emit(w); }

void ProgramBuilder::word_label(const std::string& name) {
    fixups_.push_back({segs_.size() - 1, segs_.back().words.size(), Fix::Word, name, here()});
    emit(0);
}

void ProgramBuilder::space(unsigned words, uint32_t fill) {
    for (unsigned i = 0; i < words; ++i) emit(fill);
}

void ProgramBuilder::lui(unsigned rd, uint32_t imm20) {
    check_regs({rd});
    emit(enc_u(imm20, rd, 0x37));
}
void ProgramBuilder::auipc(unsigned rd, uint32_t imm20) {
    check_regs({rd});
    emit(enc_u(imm20, rd, 0x17));
}
void ProgramBuilder::jal(unsigned rd, const std::string& target) {
    check_regs({rd});
    fixups_.push_back({segs_.size() - 1, segs_.back().words.size(), Fix::Jal, target, here()});
    emit(enc_j(0, rd));
}
void ProgramBuilder::jalr(unsigned rd, unsigned rs1, int32_t imm) {
    check_regs({rd, rs1});
    emit(enc_i(imm, rs1, 0, rd, 0x67));
}

void ProgramBuilder::branch(uint32_t funct3, unsigned rs1, unsigned rs2, const std::string& target) {
    check_regs({rs1, rs2});
    fixups_.push_back({segs_.size() - 1, segs_.back().words.size(), Fix::Branch, target, here()});
    emit(enc_b(0, rs2, rs1, funct3));
}
void ProgramBuilder::beq(unsigned a, unsigned b, const std::string& t) { branch(0, a, b, t); }
void ProgramBuilder::bne(unsigned a, unsigned b, const std::string& t) { branch(1, a, b, t); }
void ProgramBuilder::blt(unsigned a, unsigned b, const std::string& t) { branch(4, a, b, t); }
void ProgramBuilder::bge(unsigned a, unsigned b, const std::string& t) { branch(5, a, b, t); }
void ProgramBuilder::bltu(unsigned a, unsigned b, const std::string& t) { branch(6, a, b, t); }
void ProgramBuilder::bgeu(unsigned a, unsigned b, const std::string& t) { branch(7, a, b, t); }

void ProgramBuilder::load(uint32_t funct3, unsigned rd, int32_t imm, unsigned rs1) {
    check_regs({rd, rs1});
    emit(enc_i(imm, rs1, funct3, rd, 0x03));
}
void ProgramBuilder::lb(unsigned rd, int32_t imm, unsigned rs1) { load(0, rd, imm, rs1); }
void ProgramBuilder::lh(unsigned rd, int32_t imm, unsigned rs1) { load(1, rd, imm, rs1); }
void ProgramBuilder::lw(unsigned rd, int32_t imm, unsigned rs1) { load(2, rd, imm, rs1); }
void ProgramBuilder::lbu(unsigned rd, int32_t imm, unsigned rs1) { load(4, rd, imm, rs1); }
void ProgramBuilder::lhu(unsigned rd, int32_t imm, unsigned rs1) { load(5, rd, imm, rs1); }

void ProgramBuilder::store(uint32_t funct3, unsigned rs2, int32_t imm, unsigned rs1) {
    check_regs({rs2, rs1});
    emit(enc_s(imm, rs2, rs1, funct3, 0x23));
}
void ProgramBuilder::sb(unsigned rs2, int32_t imm, unsigned rs1) { store(0, rs2, imm, rs1); }
void ProgramBuilder::sh(unsigned rs2, int32_t imm, unsigned rs1) { store(1, rs2, imm, rs1); }
void ProgramBuilder::sw(unsigned rs2, int32_t imm, unsigned rs1) { store(2, rs2, imm, rs1); }

void ProgramBuilder::op_imm(uint32_t funct3, unsigned rd, unsigned rs1, int32_t imm) {
    check_regs({rd, rs1});
    if (imm < -2048 || imm > 2047) throw ConfigError("immediate out of range");
    emit(enc_i(imm, rs1, funct3, rd, 0x13));
}
void ProgramBuilder::addi(unsigned rd, unsigned rs1, int32_t imm) { op_imm(0, rd, rs1, imm); }
void ProgramBuilder::slti(unsigned rd, unsigned rs1, int32_t imm) { op_imm(2, rd, rs1, imm); }
void ProgramBuilder::sltiu(unsigned rd, unsigned rs1, int32_t imm) { op_imm(3, rd, rs1, imm); }
void ProgramBuilder::xori(unsigned rd, unsigned rs1, int32_t imm) { op_imm(4, rd, rs1, imm); }
void ProgramBuilder::ori(unsigned rd, unsigned rs1, int32_t imm) { op_imm(6, rd, rs1, imm); }
void ProgramBuilder::andi(unsigned rd, unsigned rs1, int32_t imm) { op_imm(7, rd, rs1, imm); }
void ProgramBuilder::slli(unsigned rd, unsigned rs1, unsigned sh) { op_imm(1, rd, rs1, int32_t(sh & 31)); }
void ProgramBuilder::srli(unsigned rd, unsigned rs1, unsigned sh) { op_imm(5, rd, rs1, int32_t(sh & 31)); }
void ProgramBuilder::srai(unsigned rd, unsigned rs1, unsigned sh) {
    check_regs({rd, rs1});
    emit(enc_i(int32_t(0x400 | (sh & 31)), rs1, 5, rd, 0x13));
}

void ProgramBuilder::op(uint32_t funct7, uint32_t funct3, unsigned rd, unsigned rs1, unsigned rs2) {
    check_regs({rd, rs1, rs2});
    emit(enc_r(funct7, rs2, rs1, funct3, rd, 0x33));
}
void ProgramBuilder::add(unsigned rd, unsigned a, unsigned b) { op(0, 0, rd, a, b); }
void ProgramBuilder::sub(unsigned rd, unsigned a, unsigned b) { op(0x20, 0, rd, a, b); }
void ProgramBuilder::sll(unsigned rd, unsigned a, unsigned b) { op(0, 1, rd, a, b); }
void ProgramBuilder::slt(unsigned rd, unsigned a, unsigned b) { op(0, 2, rd, a, b); }
void ProgramBuilder::sltu(unsigned rd, unsigned a, unsigned b) { op(0, 3, rd, a, b); }
void ProgramBuilder::xor_(unsigned rd, unsigned a, unsigned b) { op(0, 4, rd, a, b); }
void ProgramBuilder::srl(unsigned rd, unsigned a, unsigned b) { op(0, 5, rd, a, b); }
void ProgramBuilder::sra(unsigned rd, unsigned a, unsigned b) { op(0x20, 5, rd, a, b); }
void ProgramBuilder::or_(unsigned rd, unsigned a, unsigned b) { op(0, 6, rd, a, b); }
void ProgramBuilder::and_(unsigned rd, unsigned a, unsigned b) { op(0, 7, rd, a, b); }

void ProgramBuilder::fence() { emit(0x0ff0000f); }
void ProgramBuilder::ecall() { emit(enc::kEcall); }
void ProgramBuilder::ebreak() { emit(enc::kEbreak); }
void ProgramBuilder::mret() { emit(enc::kMret); }
void ProgramBuilder::emret() { emit(enc::kEmret); }
void ProgramBuilder::wfi() { emit(enc::kWfi); }

void ProgramBuilder::csrrw(unsigned rd, uint16_t csr, unsigned rs1) {
    check_regs({rd, rs1});
    emit(enc_csr(csr, rs1, 1, rd));
}
void ProgramBuilder::csrrs(unsigned rd, uint16_t csr, unsigned rs1) {
    check_regs({rd, rs1});
    emit(enc_csr(csr, rs1, 2, rd));
}
void ProgramBuilder::csrrc(unsigned rd, uint16_t csr, unsigned rs1) {
    check_regs({rd, rs1});
    emit(enc_csr(csr, rs1, 3, rd));
}
void ProgramBuilder::csrrwi(unsigned rd, uint16_t csr, unsigned uimm) {
    check_regs({rd});
    emit(enc_csr(csr, uimm, 5, rd));
}
void ProgramBuilder::csrrsi(unsigned rd, uint16_t csr, unsigned uimm) {
    check_regs({rd});
    emit(enc_csr(csr, uimm, 6, rd));
}
void ProgramBuilder::csrrci(unsigned rd, uint16_t csr, unsigned uimm) {
    check_regs({rd});
    emit(enc_csr(csr, uimm, 7, rd));
}
void ProgramBuilder::marker(uint16_t id) { emit(enc_marker(id)); }
void ProgramBuilder::jalxnxti(unsigned rd) {
    check_regs({rd});
    emit(enc_jalxnxti(rd));
}

void ProgramBuilder::nop() { emit(enc::kNop); }

void ProgramBuilder::li(unsigned rd, int32_t value) {
    if (value >= -2048 && value <= 2047) {
        addi(rd, reg::zero, value);
        return;
    }
    uint32_t u = uint32_t(value);
    uint32_t hi = (u + 0x800) >> 12;
    int32_t lo = int32_t(u - (hi << 12));
    lui(rd, hi);
    if (lo != 0) addi(rd, rd, lo);
}

void ProgramBuilder::la(unsigned rd, const std::string& target) {
    check_regs({rd});
    size_t seg = segs_.size() - 1;
    fixups_.push_back({seg, segs_.back().words.size(), Fix::Hi, target, here()});
    emit(enc_u(0, rd, 0x37));
    fixups_.push_back({seg, segs_.back().words.size(), Fix::Lo, target, here()});
    emit(enc_i(0, rd, 0, rd, 0x13));
}

void ProgramBuilder::mv(unsigned rd, unsigned rs) { addi(rd, rs, 0); }
void ProgramBuilder::j(const std::string& target) { jal(reg::zero, target); }
void ProgramBuilder::call(const std::string& target) { jal(reg::ra, target); }
void ProgramBuilder::ret() { jalr(reg::zero, reg::ra, 0); }
void ProgramBuilder::beqz(unsigned rs, const std::string& t) { beq(rs, reg::zero, t); }
void ProgramBuilder::bnez(unsigned rs, const std::string& t) { bne(rs, reg::zero, t); }
void ProgramBuilder::csrr(unsigned rd, uint16_t csr) { csrrs(rd, csr, reg::zero); }
void ProgramBuilder::csrw(uint16_t csr, unsigned rs) { csrrw(reg::zero, csr, rs); }
void ProgramBuilder::csrs(uint16_t csr, unsigned rs) { csrrs(reg::zero, csr, rs); }
void ProgramBuilder::csrc(uint16_t csr, unsigned rs) { csrrc(reg::zero, csr, rs); }
void ProgramBuilder::csrwi(uint16_t csr, unsigned uimm) { csrrwi(reg::zero, csr, uimm); }
void ProgramBuilder::csrsi(uint16_t csr, unsigned uimm) { csrrsi(reg::zero, csr, uimm); }
void ProgramBuilder::csrci(uint16_t csr, unsigned uimm) { csrrci(reg::zero, csr, uimm); }

ProgramImage ProgramBuilder::finish() const {
    ProgramImage img;
    img.labels = labels_;
    for (const auto& s : segs_) {
        if (!s.words.empty()) img.segments.push_back(s);
    }
    std::vector<Segment> sorted = img.segments;
    std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) { return a.base < b.base; });
    for (size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1].base + 4 * sorted[i - 1].words.size() > sorted[i].base)
            throw ConfigError("overlapping program segments");
    }

    std::vector<Segment> segs = segs_;
    for (const auto& f : fixups_) {
        auto it = labels_.find(f.label);
        if (it == labels_.end()) throw ConfigError("unresolved label: " + f.label);
        uint32_t target = it->second;
        uint32_t& w = segs[f.seg].words[f.index];
        int64_t off = int64_t(target) - int64_t(f.pc);
        switch (f.kind) {
        case Fix::Branch:
            if (off < -4096 || off > 4094) throw ConfigError("branch out of range: " + f.label);
            w |= enc_b(int32_t(off), 0, 0, 0) & ~0x63u;
            break;
        case Fix::Jal:
            if (off < -(1 << 20) || off >= (1 << 20)) throw ConfigError("jump out of range: " + f.label);
            w |= enc_j(int32_t(off), 0) & ~0x6fu;
            break;
        case Fix::Hi:
            w |= ((target + 0x800) & 0xfffff000u);
            break;
        case Fix::Lo: {
            uint32_t lo = target & 0xfff;
            w |= lo << 20;
            break;
        }
        case Fix::Word:
            w = target;
            break;
        }
    }
    img.segments.clear();
    for (const auto& s : segs) {
        if (!s.words.empty()) img.segments.push_back(s);
    }
    return img;
}

} // namespace cv32rt
