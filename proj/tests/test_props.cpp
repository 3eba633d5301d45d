#include "doctest.h"

#include "cv32rt/props.hpp"

using namespace cv32rt;

// Reduced sample counts; the acceptance binary runs the full ones.

TEST_CASE("arbitration matches the scan oracle") {
    auto r = check_arbitration(7, 100);
    CHECK_MESSAGE(r.pass(), r.detail);
    CHECK(r.criterion == 4);
}

TEST_CASE("frame image is exact") {
    auto r = check_frame_image(7, 30);
    CHECK_MESSAGE(r.pass(), r.detail);
}

TEST_CASE("gate policies agree on final state") {
    auto r = check_gate_equivalence(7, 12);
    CHECK_MESSAGE(r.pass(), r.detail);
}

TEST_CASE("chained entries carry no frame traffic") {
    auto r = check_tail_chain_purity(7, 8);
    CHECK_MESSAGE(r.pass(), r.detail);
}

TEST_CASE("an empty property fails") {
    PropertyResult r;
    CHECK_FALSE(r.pass());
    r.cases = 1;
    CHECK(r.pass());
    r.mismatches = 1;
    CHECK_FALSE(r.pass());
}
