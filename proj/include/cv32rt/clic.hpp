#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "cv32rt/config.hpp"
#include "cv32rt/memory.hpp"
#include "cv32rt/trace.hpp"

namespace cv32rt {

enum class Priv : uint8_t { U = 0, S = 1, M = 3 };

// attr bits 2:1. Bit 1 selects edge sensitivity, bit 2 inverts polarity.
enum class Trigger : uint8_t { LevelHigh = 0, EdgeRising = 1, LevelLow = 2, EdgeFalling = 3 };

inline bool trigger_is_edge(Trigger t) { return (static_cast<uint8_t>(t) & 1) != 0; }
inline bool trigger_active_low(Trigger t) { return (static_cast<uint8_t>(t) & 2) != 0; }

struct Selection {
    uint32_t id = 0;
    uint8_t level = 0;
    uint8_t priority = 0;

    bool operator==(const Selection&) const = default;
};

// Lexicographic (level, priority, id) order.
inline bool sel_less(const Selection& a, const Selection& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.id < b.id;
}

struct IrqLine {
    uint32_t id = 0;
    bool enabled = false;
    bool pending = false;
    uint8_t ctl = 0;
    uint8_t level = 0xff;
    uint8_t priority = 0;
    bool shv = false;
    Trigger trigger = Trigger::EdgeRising;
    bool input = false;
};

struct Handshake {
    bool valid = false;
    Selection sel;
    bool kill = false;
    bool accepted = false;
};

// Split of the 8-bit control byte: upper nlbits give the level, missing low
// level bits read as 1; the remaining bits give the priority.
uint8_t ctl_level(uint8_t ctl, unsigned nlbits);
uint8_t ctl_priority(uint8_t ctl, unsigned nlbits);

bool qualify(const Selection& sel, uint8_t mil, uint8_t thresh, Priv priv_in, Priv priv_cur);

// Fixed CLINT ordering: a larger rank wins.
unsigned clint_rank(uint32_t id);

// Binary max-reduction tree over (level, priority, id) of the lines for which
// pick() holds.
template <class Pred>
std::optional<Selection> arbitrate_tree(const std::vector<IrqLine>& lines, Pred pick);

namespace clicreg {
constexpr uint32_t kCliccfg = 0x0000;   // bits 4:1 nlbits
constexpr uint32_t kClicinfo = 0x0004;  // bits 12:0 line count, bits 24:21 ctl bits
constexpr uint32_t kLineBase = 0x1000;  // 4 bytes per line
constexpr uint32_t kIpByte = 0;
constexpr uint32_t kIeByte = 1;
constexpr uint32_t kAttrByte = 2;       // bit 0 shv, bits 2:1 trigger, bits 7:6 mode (reads 3)
constexpr uint32_t kCtlByte = 3;
inline uint32_t line_offset(uint32_t id) { return kLineBase + 4 * id; }
} // namespace clicreg

// Markdown table of the controller aperture: offset, register, access, layout.
std::string clic_register_table(unsigned num_lines);

class Clic : public Device {
public:
    Clic(ControllerMode mode, unsigned num_lines, unsigned nlbits = 4, unsigned arb_stages = 0);

    ControllerMode mode() const { return mode_; }
    unsigned num_lines() const { return unsigned(lines_.size()); }
    unsigned nlbits() const { return nlbits_; }
    const IrqLine& line(uint32_t id) const { return lines_.at(id); }
    const std::vector<IrqLine>& lines() const { return lines_; }

    // Throws ConfigError when id is out of range.
    void set_input(uint32_t id, bool wire);
    // Harness-side line setup, equivalent to the MMIO writes.
    void configure(uint32_t id, bool enabled, uint8_t ctl, bool shv, Trigger trig);
    void set_pending(uint32_t id, bool pending);
    // CLINT mode enable mask, mirrored from the core's mie CSR.
    void set_clint_enable(uint32_t mie) { clint_mie_ = mie; }
    uint32_t pending_mask() const;

    // Combinational max over pending and enabled lines.
    std::optional<Selection> arbitrate() const;
    bool pending_enabled(uint32_t id) const;
    // Best pending, enabled, non-SHV line with level > floor.
    std::optional<Selection> best_nonshv(uint8_t floor) const;
    void claim(uint32_t id);

    // Registered presentation computed at the end of a cycle for the next one.
    void tick(uint64_t cycle, TraceSink& sink);
    const Handshake& handshake() const { return hs_; }
    // Core takes the presented selection. SHV edge lines (all edge lines in
    // CLINT mode) clear pending here; non-SHV lines wait for an mnxti claim.
    void accept();

    bool read(uint32_t offset, unsigned width, uint32_t& value) override;
    bool write(uint32_t offset, unsigned width, uint32_t value) override;

private:
    void set_ctl(IrqLine& l, uint8_t ctl);
    void refresh_level_pending(IrqLine& l);
    uint8_t line_byte(const IrqLine& l, unsigned byte) const;
    void write_line_byte(IrqLine& l, unsigned byte, uint8_t v);

    ControllerMode mode_;
    unsigned nlbits_;
    unsigned arb_stages_;
    std::vector<IrqLine> lines_;
    uint32_t clint_mie_ = 0;
    std::deque<std::optional<Selection>> delay_;
    Handshake hs_;
    bool accepted_ = false;
};

// Stub peripheral: word k drives the wire of line k (write) and reads it back.
class WireStub : public Device {
public:
    explicit WireStub(Clic& clic) : clic_(clic) {}
    bool read(uint32_t offset, unsigned width, uint32_t& value) override;
    bool write(uint32_t offset, unsigned width, uint32_t value) override;

private:
    Clic& clic_;
};

template <class Pred>
std::optional<Selection> arbitrate_tree(const std::vector<IrqLine>& lines, Pred pick) {
    struct Node {
        bool valid;
        Selection sel;
    };
    std::vector<Node> level;
    level.reserve(lines.size());
    for (const auto& l : lines) level.push_back({pick(l), {l.id, l.level, l.priority}});
    if (level.empty()) return std::nullopt;
    while (level.size() > 1) {
        std::vector<Node> next((level.size() + 1) / 2);
        for (size_t i = 0; i < next.size(); ++i) {
            const Node& a = level[2 * i];
            if (2 * i + 1 >= level.size()) {
                next[i] = a;
                continue;
            }
            const Node& b = level[2 * i + 1];
            if (!a.valid) next[i] = b;
            else if (!b.valid) next[i] = a;
            else next[i] = sel_less(a.sel, b.sel) ? b : a;
        }
        level.swap(next);
    }
    if (!level[0].valid) return std::nullopt;
    return level[0].sel;
}

} // namespace cv32rt
