#pragma once

#include <cstdint>

namespace cv32rt {

namespace csr {
constexpr uint16_t kMstatus = 0x300;
constexpr uint16_t kMisa = 0x301;
constexpr uint16_t kMie = 0x304;
constexpr uint16_t kMtvec = 0x305;
constexpr uint16_t kMtvt = 0x307;
constexpr uint16_t kMscratch = 0x340;
constexpr uint16_t kMepc = 0x341;
constexpr uint16_t kMcause = 0x342;
constexpr uint16_t kMtval = 0x343;
constexpr uint16_t kMip = 0x344;
constexpr uint16_t kMnxti = 0x345;
constexpr uint16_t kMintthresh = 0x347;
constexpr uint16_t kMfiqrst = 0x7c0;     // fastirq software restore stub address
constexpr uint16_t kMcycle = 0xb00;
constexpr uint16_t kMinstret = 0xb02;
constexpr uint16_t kMcycleh = 0xb80;
constexpr uint16_t kMinstreth = 0xb82;
constexpr uint16_t kMhartid = 0xf14;
constexpr uint16_t kMintstatus = 0xfb1;  // read-only, mil in bits 31:24
} // namespace csr

namespace mstatus {
constexpr uint32_t kMie = 1u << 3;
constexpr uint32_t kMpie = 1u << 7;
constexpr uint32_t kMppShift = 11;
constexpr uint32_t kMppMask = 3u << 11;
} // namespace mstatus

// mcause in CLIC mode: interrupt 31, mpp 29:28, mpie 27, mpil 23:16, exccode 11:0.
namespace mcause {
constexpr uint32_t kInterrupt = 1u << 31;
constexpr uint32_t kMpieBit = 1u << 27;
constexpr unsigned kMppShift = 28;
constexpr unsigned kMpilShift = 16;
constexpr uint32_t kMpilMask = 0xffu << 16;
constexpr uint32_t kCodeMask = 0xfff;
inline uint8_t mpil(uint32_t v) { return static_cast<uint8_t>((v >> kMpilShift) & 0xff); }
inline uint32_t code(uint32_t v) { return v & kCodeMask; }
} // namespace mcause

namespace exc {
constexpr uint32_t kIllegal = 2;
constexpr uint32_t kBreakpoint = 3;
constexpr uint32_t kLoadFault = 5;
constexpr uint32_t kStoreFault = 7;
constexpr uint32_t kEcallM = 11;
} // namespace exc

// Trap-context CSRs. With fastirq one copy exists per register bank.
struct LatchedCsrs {
    uint32_t mepc = 0;
    uint32_t mcause = 0;  // mpie/mpp fields mirror mstatus on access
    uint32_t mstatus = mstatus::kMppMask;
};

struct CsrFile {
    uint32_t mtvec = 0;
    uint32_t mtvt = 0;
    uint32_t mscratch = 0;
    uint32_t mtval = 0;
    uint32_t mie = 0;        // CLINT mode only
    uint8_t mil = 0;         // mintstatus.mil
    uint8_t mintthresh = 0;
    uint32_t mfiqrst = 0;
    uint64_t minstret = 0;
};

} // namespace cv32rt
