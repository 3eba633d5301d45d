#include "cv32rt/clic.hpp"

#include <array>
#include <cstdio>
#include <string>

namespace cv32rt {

uint8_t ctl_level(uint8_t ctl, unsigned nlbits) {
    if (nlbits == 0) return 0xff;
    if (nlbits >= 8) return ctl;
    unsigned low = 8 - nlbits;
    return uint8_t(((ctl >> low) << low) | ((1u << low) - 1));
}

uint8_t ctl_priority(uint8_t ctl, unsigned nlbits) {
    if (nlbits >= 8) return 0;
    return uint8_t(ctl & ((1u << (8 - nlbits)) - 1));
}

bool qualify(const Selection& sel, uint8_t mil, uint8_t thresh, Priv priv_in, Priv priv_cur) {
    if (priv_in > priv_cur) return true;
    if (priv_in < priv_cur) return false;
    return sel.level > thresh && sel.level > mil;
}

unsigned clint_rank(uint32_t id) {
    static const std::array<unsigned, 32> order = [] {
        std::array<unsigned, 32> seq{};
        size_t n = 0;
        for (int i = 31; i >= 16; --i) seq[n++] = unsigned(i);
        seq[n++] = 11;  // machine external
        seq[n++] = 3;   // machine software
        seq[n++] = 7;   // machine timer
        for (int i = 15; i >= 0; --i)
            if (i != 11 && i != 3 && i != 7) seq[n++] = unsigned(i);
        std::array<unsigned, 32> rank{};
        for (size_t k = 0; k < 32; ++k) rank[seq[k]] = unsigned(32 - k);
        return rank;
    }();
    return id < 32 ? order[id] : 0;
}

std::string clic_register_table(unsigned num_lines) {
    char buf[256];
    std::string out = "| offset | register | access | layout |\n|---:|:---|:---|:---|\n";
    std::snprintf(buf, sizeof buf, "| 0x%04x | cliccfg | rw word | bits 4:1 nlbits |\n", clicreg::kCliccfg);
    out += buf;
    std::snprintf(buf, sizeof buf, "| 0x%04x | clicinfo | ro word | bits 12:0 line count, bits 24:21 ctl bits |\n",
                  clicreg::kClicinfo);
    out += buf;
    struct Field {
        uint32_t byte;
        const char* name;
        const char* layout;
    };
    const Field fields[] = {
        {clicreg::kIpByte, "clicintip", "bit 0 pending; writes ignored for level lines"},
        {clicreg::kIeByte, "clicintie", "bit 0 enable"},
        {clicreg::kAttrByte, "clicintattr", "bit 0 shv, bits 2:1 trigger (edge, low), bits 7:6 mode (reads 3)"},
        {clicreg::kCtlByte, "clicintctl", "upper nlbits level, remaining bits priority"},
    };
    for (const auto& f : fields) {
        std::snprintf(buf, sizeof buf, "| 0x%04x + 4*i | %s[i] | rw byte | %s |\n", clicreg::kLineBase + f.byte,
                      f.name, f.layout);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "\nLines i = 0..%u. Line registers accept byte, half and word accesses.\n",
                  num_lines - 1);
    out += buf;
    return out;
}

Clic::Clic(ControllerMode mode, unsigned num_lines, unsigned nlbits, unsigned arb_stages)
    : mode_(mode), nlbits_(nlbits), arb_stages_(arb_stages) {
    if (num_lines == 0 || num_lines > 4096) throw ConfigError("line count must be in 1..4096");
    if (mode == ControllerMode::Clint && num_lines > 32) throw ConfigError("CLINT mode supports at most 32 lines");
    if (nlbits > 8) throw ConfigError("nlbits must be in 0..8");
    lines_.resize(num_lines);
    for (uint32_t i = 0; i < num_lines; ++i) {
        lines_[i].id = i;
        set_ctl(lines_[i], 0);
    }
}

void Clic::set_ctl(IrqLine& l, uint8_t ctl) {
    l.ctl = ctl;
    l.level = ctl_level(ctl, nlbits_);
    l.priority = ctl_priority(ctl, nlbits_);
}

void Clic::refresh_level_pending(IrqLine& l) {
    if (!trigger_is_edge(l.trigger)) l.pending = l.input != trigger_active_low(l.trigger);
}

void Clic::set_input(uint32_t id, bool wire) {
    if (id >= lines_.size()) throw ConfigError("interrupt line " + std::to_string(id) + " out of range");
    IrqLine& l = lines_[id];
    bool was = l.input != trigger_active_low(l.trigger);
    l.input = wire;
    bool now = wire != trigger_active_low(l.trigger);
    if (trigger_is_edge(l.trigger)) {
        if (now && !was) l.pending = true;
    } else {
        l.pending = now;
    }
}

void Clic::configure(uint32_t id, bool enabled, uint8_t ctl, bool shv, Trigger trig) {
    if (id >= lines_.size()) throw ConfigError("interrupt line " + std::to_string(id) + " out of range");
    IrqLine& l = lines_[id];
    l.enabled = enabled;
    l.shv = shv;
    l.trigger = trig;
    set_ctl(l, ctl);
    refresh_level_pending(l);
}

void Clic::set_pending(uint32_t id, bool pending) {
    if (id >= lines_.size()) throw ConfigError("interrupt line " + std::to_string(id) + " out of range");
    if (trigger_is_edge(lines_[id].trigger)) lines_[id].pending = pending;
}

uint32_t Clic::pending_mask() const {
    uint32_t m = 0;
    for (const auto& l : lines_)
        if (l.id < 32 && l.pending) m |= 1u << l.id;
    return m;
}

bool Clic::pending_enabled(uint32_t id) const {
    if (id >= lines_.size()) return false;
    const IrqLine& l = lines_[id];
    if (mode_ == ControllerMode::Clint) return l.pending && id < 32 && ((clint_mie_ >> id) & 1);
    return l.pending && l.enabled;
}

std::optional<Selection> Clic::arbitrate() const {
    if (mode_ == ControllerMode::Clint) {
        std::optional<Selection> best;
        unsigned best_rank = 0;
        for (const auto& l : lines_) {
            if (!pending_enabled(l.id)) continue;
            unsigned r = clint_rank(l.id);
            if (!best || r > best_rank) {
                best = Selection{l.id, 0, 0};
                best_rank = r;
            }
        }
        return best;
    }
    return arbitrate_tree(lines_, [](const IrqLine& l) { return l.pending && l.enabled; });
}

std::optional<Selection> Clic::best_nonshv(uint8_t floor) const {
    if (mode_ == ControllerMode::Clint) return std::nullopt;
    return arbitrate_tree(lines_, [floor](const IrqLine& l) {
        return l.pending && l.enabled && !l.shv && l.level > floor;
    });
}

void Clic::claim(uint32_t id) {
    if (id < lines_.size() && trigger_is_edge(lines_[id].trigger)) lines_[id].pending = false;
}

void Clic::tick(uint64_t cycle, TraceSink& sink) {
    std::optional<Selection> out = arbitrate();
    if (arb_stages_ > 0) {
        delay_.push_back(out);
        if (delay_.size() > arb_stages_) {
            out = delay_.front();
            delay_.pop_front();
        } else {
            out.reset();
        }
    }
    if (accepted_) {
        accepted_ = false;
        hs_ = Handshake{};
        hs_.valid = out.has_value();
        if (out) hs_.sel = *out;
        return;
    }
    if (hs_.valid && (!out || !(*out == hs_.sel))) {
        TraceEvent e;
        e.cycle = cycle;
        e.kind = EventKind::Kill;
        const Selection& s = out ? *out : hs_.sel;
        e.id = s.id;
        e.level = s.level;
        sink.emit(e);
        hs_.valid = false;
        hs_.kill = true;
        return;
    }
    hs_.kill = false;
    hs_.valid = out.has_value();
    if (out) hs_.sel = *out;
}

void Clic::accept() {
    if (!hs_.valid) return;
    hs_.accepted = true;
    accepted_ = true;
    IrqLine& l = lines_.at(hs_.sel.id);
    if (trigger_is_edge(l.trigger) && (l.shv || mode_ == ControllerMode::Clint)) l.pending = false;
}

uint8_t Clic::line_byte(const IrqLine& l, unsigned byte) const {
    switch (byte) {
    case clicreg::kIpByte: return l.pending ? 1 : 0;
    case clicreg::kIeByte: return l.enabled ? 1 : 0;
    case clicreg::kAttrByte: return uint8_t(0xc0 | (static_cast<uint8_t>(l.trigger) << 1) | (l.shv ? 1 : 0));
    default: return l.ctl;
    }
}

void Clic::write_line_byte(IrqLine& l, unsigned byte, uint8_t v) {
    switch (byte) {
    case clicreg::kIpByte:
        if (trigger_is_edge(l.trigger)) l.pending = (v & 1) != 0;
        break;
    case clicreg::kIeByte: l.enabled = (v & 1) != 0; break;
    case clicreg::kAttrByte:
        l.shv = (v & 1) != 0;
        l.trigger = static_cast<Trigger>((v >> 1) & 3);
        refresh_level_pending(l);
        break;
    default: set_ctl(l, v); break;
    }
}

bool Clic::read(uint32_t offset, unsigned width, uint32_t& value) {
    if (mode_ == ControllerMode::Clint) return false;
    if (offset == clicreg::kCliccfg && width == 4) {
        value = nlbits_ << 1;
        return true;
    }
    if (offset == clicreg::kClicinfo && width == 4) {
        value = (8u << 21) | uint32_t(lines_.size());
        return true;
    }
    if (offset < clicreg::kLineBase) return false;
    uint32_t rel = offset - clicreg::kLineBase;
    uint32_t id = rel / 4;
    if (id >= lines_.size() || (rel % 4) + width > 4) return false;
    value = 0;
    for (unsigned k = 0; k < width; ++k) value |= uint32_t(line_byte(lines_[id], rel % 4 + k)) << (8 * k);
    return true;
}

bool Clic::write(uint32_t offset, unsigned width, uint32_t value) {
    if (mode_ == ControllerMode::Clint) return false;
    if (offset == clicreg::kCliccfg && width == 4) {
        unsigned nl = (value >> 1) & 0xf;
        nlbits_ = nl > 8 ? 8 : nl;
        for (auto& l : lines_) set_ctl(l, l.ctl);
        return true;
    }
    if (offset == clicreg::kClicinfo) return width == 4;  // read-only, write ignored
    if (offset < clicreg::kLineBase) return false;
    uint32_t rel = offset - clicreg::kLineBase;
    uint32_t id = rel / 4;
    if (id >= lines_.size() || (rel % 4) + width > 4) return false;
    for (unsigned k = 0; k < width; ++k) write_line_byte(lines_[id], rel % 4 + k, uint8_t(value >> (8 * k)));
    return true;
}

bool WireStub::read(uint32_t offset, unsigned width, uint32_t& value) {
    uint32_t id = offset / 4;
    if (width != 4 || id >= clic_.num_lines()) return false;
    value = clic_.line(id).input ? 1 : 0;
    return true;
}

bool WireStub::write(uint32_t offset, unsigned width, uint32_t value) {
    uint32_t id = offset / 4;
    if (width != 4 || id >= clic_.num_lines()) return false;
    clic_.set_input(id, (value & 1) != 0);
    return true;
}

} // namespace cv32rt
