#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cv32rt/clic.hpp"
#include "cv32rt/config.hpp"
#include "cv32rt/fastirq.hpp"
#include "cv32rt/program.hpp"

namespace cv32rt {

enum class KernelVariant { ClintNested, ClicNested, Fastirq, FastirqNested, XnxtiLoop, Jalxnxti, MinimalInline };

const char* variant_name(KernelVariant v);
// Throws ConfigError on an unknown name.
KernelVariant parse_variant(const std::string& name);

struct LineSpec {
    uint32_t id = 31;
    uint8_t level = 1;     // level field value, nlbits wide
    uint8_t priority = 0;  // priority field value, 8 - nlbits wide
    Trigger trigger = Trigger::EdgeRising;
};

// Address map of the benchmark programs.
namespace layout {
constexpr uint32_t kEntry = 0x0000;
constexpr uint32_t kCommon = 0x0400;   // mtvec base, 64-byte aligned
constexpr uint32_t kVtable = 0x0800;   // CLIC mtvt
constexpr uint32_t kCode = 0x1000;
constexpr uint32_t kStackTop = 0x00104000;  // top of data bank 0
constexpr uint32_t kTaskData = 0x00108000;  // data bank 2
} // namespace layout

struct KernelOptions {
    std::vector<LineSpec> lines;  // empty: one line 31 at level 1
    unsigned nlbits = 4;
    unsigned idle_iters = 300;
    unsigned early_stack_reads = 0;  // fastirq: frame slots read back after the body, in drain order
    // fastirq: replaces the handler between entry and emret. Receives the
    // caller-save frame layout; must keep sp and end without emret.
    std::function<void(ProgramBuilder&, const std::vector<FrameSlot>&)> fastirq_handler;
    // Replaces the idle loop run with interrupts disabled after setup. Must
    // end in ebreak.
    std::function<void(ProgramBuilder&)> thread_code;
};

struct Kernel {
    KernelVariant variant = KernelVariant::ClicNested;
    Abi abi = Abi::I;
    ProgramImage image;
    std::vector<LineSpec> lines;
    // Handler code between trap entry and the body call. Empty for fastirq.
    uint32_t prologue_begin = 0;
    uint32_t prologue_end = 0;
};

// Controller mode and fastirq flag the variant runs under.
SimConfig kernel_config(KernelVariant v, Abi abi);
uint8_t make_ctl(uint8_t level, uint8_t priority, unsigned nlbits);

Kernel build_kernel(KernelVariant v, Abi abi, const KernelOptions& opt = {});

struct CtxSwitchProgram {
    Abi abi = Abi::I;
    bool accelerated = false;
    ProgramImage image;
    unsigned switches = 0;  // task switches performed before halt
    uint32_t line = 0;      // software-interrupt line on the accelerated path
};

// Two tasks alternating through a round-robin scheduler. switches counts
// task-to-task transfers before the program halts.
CtxSwitchProgram build_ctxswitch(Abi abi, bool accelerated, unsigned switches = 4);

// Registers (besides sp) the benchmark handlers must preserve for the
// interrupted code: the caller-save set of the interrupt frame.
std::vector<unsigned> caller_save_regs(Abi abi);

} // namespace cv32rt
