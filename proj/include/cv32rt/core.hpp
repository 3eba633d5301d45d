#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cv32rt/clic.hpp"
#include "cv32rt/config.hpp"
#include "cv32rt/csr.hpp"
#include "cv32rt/fastirq.hpp"
#include "cv32rt/isa.hpp"
#include "cv32rt/memory.hpp"
#include "cv32rt/trace.hpp"

namespace cv32rt {

struct InputEvent {
    uint64_t cycle = 0;
    uint32_t line = 0;
    bool assert_ = true;
};

enum class CsrOp { Write, Set, Clear };

struct CsrResult {
    bool ok = false;
    uint32_t old = 0;
    bool serialize = false;  // a status CSR was written
    unsigned occupancy = 1;
};

struct TrapEntry {
    bool ok = true;
    uint32_t target = 0;
    unsigned cycles = 0;  // handshake to first handler instruction in execute
};

struct ReturnOutcome {
    uint32_t target = 0;
    bool tail_chain = false;
    bool via_stub = false;
    Selection chained;
};

// Stall reasons carried by Stall events.
enum StallReason : uint32_t { kStallOperand = 1, kStallGate = 2, kStallDrainWait = 3, kStallBlocked = 4 };

class Core {
public:
    explicit Core(const SimConfig& cfg, TraceLevel level = TraceLevel::Events);

    const SimConfig& config() const { return cfg_; }
    Memory& memory() { return *mem_; }
    const Memory& memory() const { return *mem_; }
    Clic& clic() { return *clic_; }
    const Clic& clic() const { return *clic_; }
    BankedRegfile& regs() { return rf_; }
    const BankedRegfile& regs() const { return rf_; }
    CsrFile& csrs() { return csr_; }
    const CsrFile& csrs() const { return csr_; }
    const SaveFsm& save_fsm() const { return fsm_; }
    const StallGate& stall_gate() const { return gate_; }
    const TraceSink& trace() const { return sink_; }

    void reset(uint32_t pc);
    // Inputs must be scheduled in non-decreasing cycle order per line.
    void schedule(const InputEvent& ev);

    // Advances one cycle and returns the events recorded in it.
    std::vector<TraceEvent> step();
    // Steps until halt, fault or max_cycles; returns the cycle count reached.
    uint64_t run(uint64_t max_cycles);

    uint64_t cycle() const { return cycle_; }
    bool halted() const { return halted_; }
    bool faulted() const { return faulted_; }
    uint32_t fetch_pc() const { return fetch_pc_; }
    bool pipeline_empty() const { return !if_.valid && !id_.valid && !ex_.valid && !wb_.valid; }

    // Architectural operations, also used by the pipeline.
    CsrResult csr_op(uint16_t addr, CsrOp op, uint32_t value, bool write);
    // Trap CSR update plus target selection; vectored reads mtvt[id].
    TrapEntry take_trap(const Selection& sel, bool vectored, uint32_t epc);
    ReturnOutcome trap_return(bool emret);
    uint32_t read_csr_debug(uint16_t addr);
    uint8_t mil() const { return csr_.mil; }

private:
    struct FetchSlot {
        bool valid = false;
        uint32_t pc = 0;
        uint32_t word = 0;
        uint64_t ready = 0;
        uint32_t tag = 0;
    };
    struct DecodeSlot {
        bool valid = false;
        uint32_t pc = 0;
        Instruction ins;
        uint32_t tag = 0;
    };
    struct ExSlot {
        bool valid = false;
        uint32_t pc = 0;
        uint64_t done = 0;
        bool retire = true;
        uint32_t tag = 0;
    };
    struct WbSlot {
        bool valid = false;
        uint32_t pc = 0;
        uint32_t tag = 0;
    };
    enum class SeqKind { None, Irq, Exception, Chain };
    struct Sequence {
        SeqKind kind = SeqKind::None;
        Selection sel;
        bool vectored_load = false;  // read the vector table
        bool handshaken = false;
        uint64_t t_handshake = 0;
        uint64_t t_flush = 0;
        uint64_t t_vector = 0;
        uint64_t t_fetch = 0;
        uint32_t epc = 0;
        uint32_t cause = 0;
        uint32_t target = 0;
        bool flushed = false;
    };
    struct Redirect {
        bool valid = false;
        uint64_t at = 0;
        uint32_t target = 0;
    };

    void emit(TraceEvent e);
    void emit_kind(EventKind k, uint32_t pc = 0, uint32_t addr = 0, uint32_t value = 0, uint32_t id = 0,
                   uint32_t level = 0, uint32_t aux = 0);
    void fault(uint32_t pc, uint32_t addr, uint32_t code);
    void kill_front();
    void set_redirect(uint64_t at, uint32_t target);

    bool qualifies(const Selection& sel) const;
    void try_accept();
    void advance_sequence();
    bool try_issue();
    void execute(const Instruction& ins, uint32_t pc, uint32_t tag);
    void raise_exception(uint32_t pc, uint32_t code, uint32_t tval);
    void write_reg(unsigned rd, uint32_t v, uint64_t ready);

    void enter_trap_csrs(unsigned bank, bool interrupt, uint32_t code, uint32_t epc, uint8_t new_mil);
    uint32_t direct_base() const;
    void set_mstatus(LatchedCsrs& l, uint32_t v);
    void set_mcause(LatchedCsrs& l, uint32_t v);
    uint32_t mnxti_access(bool write, CsrOp op, uint32_t value, bool& serialize);

    SimConfig cfg_;
    std::unique_ptr<Memory> mem_;
    std::unique_ptr<Clic> clic_;
    std::unique_ptr<WireStub> stub_;
    BankedRegfile rf_;
    CsrFile csr_;
    SaveFsm fsm_;
    StallGate gate_;
    TraceSink sink_;
    std::vector<TraceEvent> cycle_events_;

    uint64_t cycle_ = 0;
    bool halted_ = false;
    bool faulted_ = false;
    uint32_t fetch_pc_ = 0;
    uint32_t next_tag_ = 1;
    FetchSlot if_;
    DecodeSlot id_;
    ExSlot ex_;
    WbSlot wb_;
    Redirect redirect_;
    Sequence seq_;
    std::array<uint64_t, 32> reg_ready_{};
    uint64_t nested_wait_ = 0;
    std::vector<InputEvent> inputs_;
    size_t next_input_ = 0;
};

} // namespace cv32rt
