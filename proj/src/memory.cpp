#include "cv32rt/memory.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

namespace cv32rt {

const char* region_kind_name(RegionKind k) {
    switch (k) {
    case RegionKind::InstrSpm: return "instr-spm";
    case RegionKind::DataSpm: return "data-spm";
    case RegionKind::ClicMmio: return "clic-mmio";
    case RegionKind::StubDevice: return "stub-device";
    }
    return "?";
}

void AddressMap::add(const Region& r) {
    if (r.size == 0) throw ConfigError("region " + r.name + " has zero size");
    uint64_t end = uint64_t(r.base) + r.size;
    for (const auto& o : regions_) {
        uint64_t oend = uint64_t(o.base) + o.size;
        if (r.base < oend && o.base < end) throw ConfigError("region " + r.name + " overlaps " + o.name);
    }
    regions_.push_back(r);
}

const Region* AddressMap::find(uint32_t addr) const {
    for (const auto& r : regions_)
        if (r.contains(addr)) return &r;
    return nullptr;
}

const Region* AddressMap::region(RegionKind kind) const {
    for (const auto& r : regions_)
        if (r.kind == kind) return &r;
    return nullptr;
}

AddressMap AddressMap::default_map(const WaitStates& ws) {
    AddressMap m;
    m.add({"instr-spm", map::kInstrBase, map::kInstrSize, RegionKind::InstrSpm, ws.instr, 1});
    m.add({"data-spm", map::kDataBase, map::kDataSize, RegionKind::DataSpm, ws.data, map::kDataBanks});
    m.add({"clic", map::kClicBase, map::kClicSize, RegionKind::ClicMmio, ws.clic, 1});
    m.add({"stub", map::kStubBase, map::kStubSize, RegionKind::StubDevice, ws.stub, 1});
    return m;
}

std::string address_map_table(const AddressMap& m) {
    std::string out = "| region | base | size | kind | wait states | banks |\n|:---|---:|---:|:---|---:|---:|\n";
    for (const auto& r : m.regions()) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "| %s | 0x%08x | 0x%x | %s | %u | %u |\n", r.name.c_str(), r.base, r.size,
                      region_kind_name(r.kind), r.wait_states, r.banks);
        out += buf;
    }
    return out;
}

void PortArbiter::note_lsu(uint64_t cycle, unsigned latency, int bank) {
    lsu_until_ = std::max(lsu_until_, cycle + latency);
    lsu_bank_ = bank;
}

bool PortArbiter::drain_may_issue(uint64_t cycle, int bank) const {
    if (cycle >= lsu_until_) return true;
    if (policy_ == DrainPort::Shared) return false;
    return bank != lsu_bank_;
}

void PortArbiter::reset() {
    lsu_until_ = 0;
    lsu_bank_ = -1;
}

Memory::Memory(AddressMap amap, DrainPort drain_port) : map_(std::move(amap)), arbiter_(drain_port) {
    for (const auto& r : map_.regions()) {
        Backing b;
        b.region = r;
        if (r.kind == RegionKind::InstrSpm || r.kind == RegionKind::DataSpm) b.bytes.assign(r.size, 0);
        backing_.push_back(std::move(b));
    }
}

void Memory::attach(RegionKind kind, Device* dev) {
    for (auto& b : backing_)
        if (b.region.kind == kind) b.device = dev;
}

Memory::Backing* Memory::backing_for(uint32_t addr) {
    for (auto& b : backing_)
        if (b.region.contains(addr)) return &b;
    return nullptr;
}

const Memory::Backing* Memory::backing_for(uint32_t addr) const {
    for (const auto& b : backing_)
        if (b.region.contains(addr)) return &b;
    return nullptr;
}

AccessResult Memory::access(Port port, uint32_t addr, AccessKind kind, uint32_t value, unsigned width) {
    (void)port;
    AccessResult res;
    Backing* b = backing_for(addr);
    if (!b || (addr & (width - 1)) != 0 || !b->region.contains(addr + width - 1)) return res;
    uint32_t off = addr - b->region.base;
    if (b->region.kind == RegionKind::InstrSpm || b->region.kind == RegionKind::DataSpm) {
        if (kind == AccessKind::Read) {
            uint32_t v = 0;
            std::memcpy(&v, &b->bytes[off], width);
            res.data = v;
        } else {
            std::memcpy(&b->bytes[off], &value, width);
        }
    } else {
        if (!b->device) return res;
        bool ok = kind == AccessKind::Read ? b->device->read(off, width, res.data) : b->device->write(off, width, value);
        if (!ok) return res;
    }
    res.ok = true;
    res.latency = 1 + b->region.wait_states;
    busy_cycles_ += res.latency;
    return res;
}

bool Memory::peek(uint32_t addr, unsigned width, uint32_t& value) const {
    const Backing* b = backing_for(addr);
    if (!b || b->bytes.empty() || !b->region.contains(addr + width - 1)) return false;
    value = 0;
    std::memcpy(&value, &b->bytes[addr - b->region.base], width);
    return true;
}

bool Memory::poke(uint32_t addr, unsigned width, uint32_t value) {
    Backing* b = backing_for(addr);
    if (!b || b->bytes.empty() || !b->region.contains(addr + width - 1)) return false;
    std::memcpy(&b->bytes[addr - b->region.base], &value, width);
    return true;
}

uint32_t Memory::peek32(uint32_t addr) const {
    uint32_t v = 0;
    peek(addr, 4, v);
    return v;
}

void Memory::load_image(RegionKind region, std::span<const uint8_t> bytes, uint32_t offset) {
    for (auto& b : backing_) {
        if (b.region.kind != region) continue;
        if (b.bytes.empty()) throw ConfigError(std::string("cannot load an image into ") + region_kind_name(region));
        if (uint64_t(offset) + bytes.size() > b.bytes.size())
            throw ConfigError(std::string("image overflows ") + b.region.name);
        std::copy(bytes.begin(), bytes.end(), b.bytes.begin() + offset);
        return;
    }
    throw ConfigError(std::string("no region of kind ") + region_kind_name(region));
}

void Memory::load_words(RegionKind region, std::span<const uint32_t> words, uint32_t offset) {
    std::vector<uint8_t> bytes(words.size() * 4);
    for (size_t i = 0; i < words.size(); ++i)
        for (int k = 0; k < 4; ++k) bytes[i * 4 + k] = uint8_t(words[i] >> (8 * k));
    load_image(region, bytes, offset);
}

int Memory::bank_of(uint32_t addr) const {
    const Region* r = map_.region(RegionKind::DataSpm);
    if (!r || !r->contains(addr)) return -1;
    return int((addr - r->base) / (r->size / r->banks));
}

} // namespace cv32rt
