#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cv32rt {

struct PropertyResult {
    unsigned criterion = 0;
    std::string name;
    uint64_t cases = 0;
    uint64_t mismatches = 0;
    std::string detail;  // first mismatch, or a summary

    bool pass() const { return cases > 0 && mismatches == 0; }
};

// CV32RT_SIM_SEED when set, else a fixed default.
uint64_t property_seed();

// Random line states per size; nlbits varies per sample.
PropertyResult check_arbitration(uint64_t seed, unsigned samples_per_size = 1000);
// Every privilege pair and every (level, mil, thresh) byte triple.
PropertyResult check_qualify();
// Hardware save of random register files at random stack pointers.
PropertyResult check_frame_image(uint64_t seed, unsigned states_per_abi = 200);
// Random fastirq handlers run under the watermark gate and under
// block-until-drained.
PropertyResult check_gate_equivalence(uint64_t seed, unsigned programs = 100);
// No frame traffic between a chaining emret and the chained body.
PropertyResult check_tail_chain_purity(uint64_t seed, unsigned programs = 50);
// Acceptance sweep twice, sequential and parallel.
PropertyResult check_determinism(unsigned jobs = 4);

} // namespace cv32rt
