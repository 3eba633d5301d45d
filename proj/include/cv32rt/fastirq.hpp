#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cv32rt/clic.hpp"
#include "cv32rt/csr.hpp"
#include "cv32rt/isa.hpp"
#include "cv32rt/memory.hpp"

namespace cv32rt {

// CallerSave is the interrupt frame. Full covers every GPR except x0/sp and
// is used by the context-switch line.
enum class FrameKind { CallerSave, Full };
enum class SlotSource : uint8_t { Gpr, Mepc, Mcause, Mstatus };

struct FrameSlot {
    std::string name;
    SlotSource src = SlotSource::Gpr;
    uint8_t reg = 0;
};

std::vector<FrameSlot> frame_layout(Abi abi, FrameKind kind);
unsigned frame_words(Abi abi, FrameKind kind);
// Markdown table slot -> name -> byte offset.
std::string frame_table(Abi abi, FrameKind kind);

class BankedRegfile {
public:
    explicit BankedRegfile(Abi abi = Abi::I) : abi_(abi) {}

    Abi abi() const { return abi_; }
    unsigned active() const { return active_; }
    unsigned other() const { return active_ ^ 1u; }

    uint32_t read(unsigned r) const { return r == 0 ? 0 : regs_[active_][r]; }
    void write(unsigned r, uint32_t v) {
        if (r != 0) regs_[active_][r] = v;
    }
    uint32_t read_bank(unsigned bank, unsigned r) const { return r == 0 ? 0 : regs_[bank][r]; }
    void write_bank(unsigned bank, unsigned r, uint32_t v) {
        if (r != 0) regs_[bank][r] = v;
    }

    LatchedCsrs& latched(unsigned bank) { return latched_[bank]; }
    const LatchedCsrs& latched(unsigned bank) const { return latched_[bank]; }
    LatchedCsrs& cur() { return latched_[active_]; }
    const LatchedCsrs& cur() const { return latched_[active_]; }

    void set_active(unsigned b) { active_ = b; }

    // live: the bank holds an entered context. clobbered: its caller-save
    // registers were reused by a nested handler and must be reloaded.
    bool live(unsigned b) const { return live_[b]; }
    bool clobbered(unsigned b) const { return clobbered_[b]; }
    void set_live(unsigned b, bool v) { live_[b] = v; }
    void set_clobbered(unsigned b, bool v) { clobbered_[b] = v; }

private:
    Abi abi_;
    std::array<std::array<uint32_t, 32>, 2> regs_{};
    std::array<LatchedCsrs, 2> latched_{};
    unsigned active_ = 0;
    std::array<bool, 2> live_{true, false};
    std::array<bool, 2> clobbered_{false, false};
};

enum class SaveState : uint8_t { Idle, AdjustSp, Draining, Done };

struct SaveFsm {
    SaveState state = SaveState::Idle;
    unsigned src_bank = 0;
    unsigned cursor = 0;  // slots landed in memory
    uint32_t base = 0;
    std::vector<FrameSlot> frame;
    std::vector<uint32_t> snapshot;
    bool inflight = false;
    uint64_t land_cycle = 0;

    bool busy() const { return state == SaveState::AdjustSp || state == SaveState::Draining; }
    unsigned frame_len() const { return unsigned(frame.size()); }
};

struct StallGate {
    bool active = false;
    int saved_watermark = -1;  // highest slot index already in memory
    uint32_t base = 0;
    uint32_t len = 0;          // slots
};

// stall iff the gate is active, addr falls in the frame and its slot is above
// the watermark.
bool gate_access(const StallGate& gate, uint32_t addr);

// Swaps banks, gives the new bank sp - 4*frame_len and arms the drain with a
// snapshot of the leaving bank's slots. The trap CSRs must already be in the
// entered bank's latched copy. Returns the new sp.
uint32_t bank_switch(BankedRegfile& rf, SaveFsm& fsm, StallGate& gate, const std::vector<FrameSlot>& frame);

struct DrainResult {
    enum Kind { None, Store, Deferred, Done, Fault } kind = None;
    unsigned slot = 0;
    uint32_t addr = 0;
    uint32_t value = 0;
    unsigned latency = 0;
};

DrainResult drain_step(SaveFsm& fsm, StallGate& gate, Memory& mem, uint64_t cycle);

// Cycles a preemptor arriving now waits before its bank switch, assuming the
// drain port stays free.
unsigned nested_gate(const SaveFsm& fsm);

// Cycles an LSU access to addr stalls under the gate, with the same assumption.
unsigned gate_stall_cycles(const StallGate& gate, uint32_t addr);

struct EmretOutcome {
    bool tail_chain = false;
    Selection sel;
};

bool emret_chainable(const Selection& sel, uint8_t mil, uint8_t mintthresh, uint8_t mpil);
EmretOutcome emret_resolve(const std::optional<Selection>& presented, uint8_t mil, uint8_t mintthresh,
                           uint8_t mpil);

} // namespace cv32rt
