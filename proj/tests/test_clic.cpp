#include "doctest.h"

#include <random>

#include "cv32rt/clic.hpp"
#include "cv32rt/memory.hpp"

using namespace cv32rt;

namespace {

Clic make(unsigned n = 16, unsigned nlbits = 4) { return Clic(ControllerMode::Clic, n, nlbits); }

uint8_t ctl(uint8_t level, uint8_t prio) { return uint8_t((level << 4) | prio); }

bool mmio_write(Clic& c, uint32_t id, uint32_t byte, uint8_t v) { return c.write(clicreg::line_offset(id) + byte, 1, v); }

uint32_t mmio_read(Clic& c, uint32_t id, uint32_t byte) {
    uint32_t v = 0;
    c.read(clicreg::line_offset(id) + byte, 1, v);
    return v;
}

} // namespace

TEST_CASE("edge gateway latches and persists") {
    Clic c = make();
    c.configure(5, true, ctl(1, 0), true, Trigger::EdgeRising);
    c.set_input(5, true);
    CHECK(c.line(5).pending);
    c.set_input(5, false);
    CHECK(c.line(5).pending);
}

TEST_CASE("level gateway mirrors the wire") {
    Clic c = make();
    c.configure(5, true, ctl(1, 0), true, Trigger::LevelHigh);
    c.set_input(5, true);
    CHECK(c.line(5).pending);
    c.set_input(5, false);
    CHECK_FALSE(c.line(5).pending);
    c.configure(6, true, ctl(1, 0), true, Trigger::LevelLow);
    CHECK(c.line(6).pending);
    c.set_input(6, true);
    CHECK_FALSE(c.line(6).pending);
}

TEST_CASE("gateway over every two-cycle input sequence") {
    for (Trigger t : {Trigger::EdgeRising, Trigger::EdgeFalling, Trigger::LevelHigh, Trigger::LevelLow}) {
        bool low = t == Trigger::EdgeFalling || t == Trigger::LevelLow;
        bool edge = t == Trigger::EdgeRising || t == Trigger::EdgeFalling;
        for (int w0 = 0; w0 < 2; ++w0)
            for (int w1 = 0; w1 < 2; ++w1)
                for (int w2 = 0; w2 < 2; ++w2) {
                    Clic c = make(4);
                    c.configure(1, true, 0x10, true, t);
                    c.set_input(1, w0);
                    c.set_pending(1, false);
                    c.set_input(1, w1);
                    c.set_input(1, w2);
                    auto active = [&](int w) { return (w != 0) != low; };
                    bool want = edge ? ((!active(w0) && active(w1)) || (!active(w1) && active(w2))) : active(w2);
                    CAPTURE(int(t));
                    CAPTURE(w0);
                    CAPTURE(w1);
                    CAPTURE(w2);
                    CHECK(c.line(1).pending == want);
                }
    }
}

TEST_CASE("set_input range check") {
    Clic c = make(4);
    CHECK_THROWS_AS(c.set_input(4, true), ConfigError);
}

TEST_CASE("arbitration examples") {
    Clic c = make(16, 4);
    CHECK_FALSE(c.arbitrate().has_value());
    c.configure(3, true, ctl(5, 2), true, Trigger::EdgeRising);
    c.configure(7, true, ctl(5, 2), true, Trigger::EdgeRising);
    c.set_pending(3, true);
    c.set_pending(7, true);
    REQUIRE(c.arbitrate());
    CHECK(c.arbitrate()->id == 7);

    Clic d = make(16, 4);
    d.configure(1, true, ctl(9, 0), true, Trigger::EdgeRising);
    d.configure(2, true, ctl(3, 7), true, Trigger::EdgeRising);
    d.set_pending(1, true);
    d.set_pending(2, true);
    CHECK(d.arbitrate()->id == 1);

    d.configure(1, false, ctl(9, 0), true, Trigger::EdgeRising);
    CHECK(d.arbitrate()->id == 2);
}

TEST_CASE("control byte split over every (ctl, nlbits) pair") {
    for (unsigned nl = 0; nl <= 8; ++nl)
        for (unsigned v = 0; v < 256; ++v) {
            // Level: top nl bits kept, the rest forced to one. Priority: the rest.
            unsigned keep = nl == 0 ? 0 : 0xffu & ~((1u << (8 - nl)) - 1);
            unsigned level = (v & keep) | (0xffu & ~keep);
            unsigned prio = v & ~keep & 0xffu;
            CAPTURE(nl);
            CAPTURE(v);
            CHECK(ctl_level(uint8_t(v), nl) == level);
            CHECK(ctl_priority(uint8_t(v), nl) == prio);
        }
    CHECK(ctl_level(0xf0, 4) == 0xff);
    CHECK(ctl_priority(0xf0, 4) == 0);
}

TEST_CASE("qualify examples") {
    CHECK(qualify(Selection{0, 5, 0}, 2, 3, Priv::M, Priv::M));
    CHECK_FALSE(qualify(Selection{0, 5, 0}, 2, 6, Priv::M, Priv::M));
    CHECK(qualify(Selection{0, 0, 0}, 255, 255, Priv::M, Priv::U));
    CHECK_FALSE(qualify(Selection{0, 255, 0}, 0, 0, Priv::U, Priv::M));
}

TEST_CASE("raising the threshold never enlarges the qualified set") {
    std::mt19937 rng(7);
    for (int k = 0; k < 2000; ++k) {
        Selection s{0, uint8_t(rng()), 0};
        uint8_t mil = uint8_t(rng()), t1 = uint8_t(rng()), t2 = uint8_t(rng());
        if (t2 < t1) std::swap(t1, t2);
        if (qualify(s, mil, t2, Priv::M, Priv::M)) CHECK(qualify(s, mil, t1, Priv::M, Priv::M));
    }
}

TEST_CASE("MMIO registers") {
    Clic c = make(16, 4);
    CHECK(mmio_write(c, 12, clicreg::kAttrByte, 0x03));  // shv, rising edge
    CHECK(mmio_write(c, 12, clicreg::kIeByte, 1));
    CHECK(mmio_read(c, 12, clicreg::kIeByte) == 1);
    CHECK(mmio_write(c, 12, clicreg::kCtlByte, 0xf0));
    CHECK(c.line(12).level == 0xff);
    CHECK(c.line(12).priority == 0);
    CHECK(mmio_write(c, 12, clicreg::kIpByte, 1));
    CHECK(c.line(12).pending);
    CHECK(c.arbitrate()->id == 12);
    CHECK((mmio_read(c, 12, clicreg::kAttrByte) & 0xc0) == 0xc0);

    uint32_t v = 0;
    CHECK(c.read(clicreg::kClicinfo, 4, v));
    CHECK((v & 0x1fff) == 16);
    CHECK(c.read(clicreg::kCliccfg, 4, v));
    CHECK(((v >> 1) & 0xf) == 4);
    CHECK_FALSE(c.read(0x0800, 4, v));
    CHECK_FALSE(c.read(clicreg::line_offset(16), 1, v));
    CHECK_FALSE(c.write(clicreg::line_offset(3) + 2, 4, 0));  // crosses the line word
}

TEST_CASE("level lines ignore pending writes") {
    Clic c = make(8);
    c.configure(2, true, 0x10, true, Trigger::LevelHigh);
    mmio_write(c, 2, clicreg::kIpByte, 1);
    CHECK_FALSE(c.line(2).pending);
}

TEST_CASE("presentation and kill") {
    TraceSink sink(TraceLevel::Events);
    SUBCASE("strictly better selection before acceptance") {
        Clic c = make(8);
        c.configure(1, true, ctl(2, 0), true, Trigger::EdgeRising);
        c.configure(2, true, ctl(5, 0), true, Trigger::EdgeRising);
        c.set_pending(1, true);
        c.tick(0, sink);
        CHECK(c.handshake().valid);
        CHECK(c.handshake().sel.id == 1);
        c.set_pending(2, true);
        c.tick(1, sink);
        CHECK(c.handshake().kill);
        CHECK_FALSE(c.handshake().valid);
        c.tick(2, sink);
        CHECK(c.handshake().valid);
        CHECK(c.handshake().sel.id == 2);
        CHECK_FALSE(c.handshake().kill);
        REQUIRE(sink.events().size() == 1);
        CHECK(sink.events()[0].kind == EventKind::Kill);
    }
    SUBCASE("acceptance in the presentation cycle") {
        Clic c = make(8);
        c.configure(1, true, ctl(2, 0), true, Trigger::EdgeRising);
        c.set_pending(1, true);
        c.tick(0, sink);
        c.accept();
        CHECK_FALSE(c.line(1).pending);
        c.tick(1, sink);
        CHECK_FALSE(c.handshake().kill);
        CHECK(sink.events().empty());
    }
    SUBCASE("equal selections in consecutive cycles") {
        Clic c = make(8);
        c.configure(1, true, ctl(2, 0), true, Trigger::EdgeRising);
        c.set_pending(1, true);
        for (uint64_t t = 0; t < 4; ++t) {
            c.tick(t, sink);
            CHECK(c.handshake().valid);
            CHECK_FALSE(c.handshake().kill);
        }
    }
}

TEST_CASE("two-step handshake enumeration") {
    // States: nothing, line 1 (low), line 2 (high). Kill iff a presented
    // selection changes without acceptance.
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int acc = 0; acc < 2; ++acc) {
                TraceSink sink;
                Clic c = make(8);
                c.configure(1, true, ctl(2, 0), false, Trigger::LevelHigh);
                c.configure(2, true, ctl(5, 0), false, Trigger::LevelHigh);
                auto drive = [&](int s) {
                    c.set_input(1, s == 1);
                    c.set_input(2, s == 2);
                };
                drive(a);
                c.tick(0, sink);
                if (acc) c.accept();
                drive(b);
                c.tick(1, sink);
                bool want_kill = a != 0 && a != b && !acc;
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(acc);
                CHECK(c.handshake().kill == want_kill);
                if (!want_kill) CHECK(c.handshake().valid == (b != 0));
            }
}

TEST_CASE("a pending maximum is eventually presented") {
    std::mt19937 rng(11);
    for (int k = 0; k < 200; ++k) {
        TraceSink sink;
        Clic c = make(16);
        for (uint32_t id = 0; id < 16; ++id) c.configure(id, true, uint8_t(rng()), true, Trigger::EdgeRising);
        // Random churn, then the state settles.
        for (uint64_t t = 0; t < 6; ++t) {
            c.set_pending(rng() % 16, rng() & 1);
            c.tick(t, sink);
        }
        auto want = c.arbitrate();
        c.tick(6, sink);
        c.tick(7, sink);
        if (want) {
            CHECK(c.handshake().valid);
            CHECK(c.handshake().sel == *want);
        } else {
            CHECK_FALSE(c.handshake().valid);
        }
    }
}

TEST_CASE("arbitration pipeline stages delay the result") {
    TraceSink sink;
    Clic c(ControllerMode::Clic, 8, 4, 2);
    c.configure(3, true, ctl(1, 0), true, Trigger::EdgeRising);
    c.set_pending(3, true);
    c.tick(0, sink);
    CHECK_FALSE(c.handshake().valid);
    c.tick(1, sink);
    CHECK_FALSE(c.handshake().valid);
    c.tick(2, sink);
    CHECK(c.handshake().valid);
}

TEST_CASE("CLINT mode fixed ordering") {
    // External, then software, then timer, with platform lines above all.
    const uint32_t order[] = {31, 20, 16, 11, 3, 7, 15, 0};
    for (size_t i = 0; i + 1 < std::size(order); ++i) CHECK(clint_rank(order[i]) > clint_rank(order[i + 1]));

    Clic c(ControllerMode::Clint, 32);
    c.set_clint_enable(0xffffffffu);
    for (uint32_t id : {3u, 7u, 11u}) {
        c.configure(id, true, 0, false, Trigger::EdgeRising);
        c.set_pending(id, true);
    }
    CHECK(c.arbitrate()->id == 11);
    c.set_pending(11, false);
    CHECK(c.arbitrate()->id == 3);
    c.set_clint_enable(1u << 7);
    CHECK(c.arbitrate()->id == 7);

    // Scan oracle: the enabled pending line of highest rank.
    std::mt19937 rng(5);
    for (int k = 0; k < 500; ++k) {
        uint32_t pend = uint32_t(rng()), en = uint32_t(rng());
        Clic d(ControllerMode::Clint, 32);
        d.set_clint_enable(en);
        for (uint32_t id = 0; id < 32; ++id) d.set_pending(id, (pend >> id) & 1);
        int best = -1;
        for (uint32_t id = 0; id < 32; ++id)
            if (((pend & en) >> id) & 1)
                if (best < 0 || clint_rank(id) > clint_rank(uint32_t(best))) best = int(id);
        auto got = d.arbitrate();
        if (best < 0) CHECK_FALSE(got.has_value());
        else CHECK(got->id == uint32_t(best));
    }

    uint32_t v = 0;
    CHECK_FALSE(c.read(clicreg::kClicinfo, 4, v));
    CHECK_FALSE(c.write(clicreg::line_offset(0), 1, 1));
}
