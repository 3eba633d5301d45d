#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cv32rt/config.hpp"

namespace cv32rt {

namespace map {
constexpr uint32_t kInstrBase = 0x0000'0000;
constexpr uint32_t kInstrSize = 0x1'0000;
constexpr uint32_t kDataBase = 0x0010'0000;
constexpr uint32_t kDataSize = 0x1'0000;
constexpr unsigned kDataBanks = 4;  // 16 KiB each, selected by address bits 15:14
constexpr uint32_t kClicBase = 0x0020'0000;
constexpr uint32_t kClicSize = 0x1'0000;
constexpr uint32_t kStubBase = 0x0030'0000;
constexpr uint32_t kStubSize = 0x4000;  // one word per line, write drives the line wire
} // namespace map

enum class RegionKind { InstrSpm, DataSpm, ClicMmio, StubDevice };
const char* region_kind_name(RegionKind k);

struct Region {
    std::string name;
    uint32_t base = 0;
    uint32_t size = 0;
    RegionKind kind = RegionKind::DataSpm;
    unsigned wait_states = 0;
    unsigned banks = 1;

    bool contains(uint32_t addr) const { return addr - base < size; }
};

class AddressMap {
public:
    // Throws ConfigError if the region overlaps an existing one.
    void add(const Region& r);
    const Region* find(uint32_t addr) const;
    const Region* region(RegionKind kind) const;
    const std::vector<Region>& regions() const { return regions_; }

    static AddressMap default_map(const WaitStates& ws);

private:
    std::vector<Region> regions_;
};

// Markdown table of the regions: base, size, kind, wait states, banks.
std::string address_map_table(const AddressMap& m);

enum class Port : uint8_t { Fetch, Lsu, Drain, Vector };
enum class AccessKind : uint8_t { Read, Write };

// Memory-mapped peripheral behind a region.
class Device {
public:
    virtual ~Device() = default;
    virtual bool read(uint32_t offset, unsigned width, uint32_t& value) = 0;
    virtual bool write(uint32_t offset, unsigned width, uint32_t value) = 0;
};

struct AccessResult {
    bool ok = false;
    uint32_t data = 0;
    unsigned latency = 0;
};

// Decides when a drain store may use the data memory. The LSU always wins.
class PortArbiter {
public:
    explicit PortArbiter(DrainPort policy = DrainPort::Dedicated) : policy_(policy) {}

    DrainPort policy() const { return policy_; }
    // Records an LSU access occupying the data memory for [cycle, cycle+latency).
    void note_lsu(uint64_t cycle, unsigned latency, int bank);
    bool drain_may_issue(uint64_t cycle, int bank) const;
    void reset();

private:
    DrainPort policy_;
    uint64_t lsu_until_ = 0;  // first cycle at which the LSU port is idle
    int lsu_bank_ = -1;
};

class Memory {
public:
    explicit Memory(AddressMap amap, DrainPort drain_port = DrainPort::Dedicated);

    const AddressMap& address_map() const { return map_; }
    PortArbiter& arbiter() { return arbiter_; }
    void attach(RegionKind kind, Device* dev);

    // Timed access; latency = 1 + wait states of the target region.
    AccessResult access(Port port, uint32_t addr, AccessKind kind, uint32_t value, unsigned width = 4);

    // Untimed backdoor used by loaders and tests. Only SPM regions.
    bool peek(uint32_t addr, unsigned width, uint32_t& value) const;
    bool poke(uint32_t addr, unsigned width, uint32_t value);
    uint32_t peek32(uint32_t addr) const;

    // Throws ConfigError on overflow or a non-SPM region.
    void load_image(RegionKind region, std::span<const uint8_t> bytes, uint32_t offset = 0);
    void load_words(RegionKind region, std::span<const uint32_t> words, uint32_t offset = 0);

    // Data-SPM bank index for addr, -1 outside data-SPM.
    int bank_of(uint32_t addr) const;
    uint64_t busy_cycles() const { return busy_cycles_; }

private:
    struct Backing {
        Region region;
        std::vector<uint8_t> bytes;
        Device* device = nullptr;
    };
    Backing* backing_for(uint32_t addr);
    const Backing* backing_for(uint32_t addr) const;

    AddressMap map_;
    std::vector<Backing> backing_;
    PortArbiter arbiter_;
    uint64_t busy_cycles_ = 0;
};

} // namespace cv32rt
