#include <algorithm>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "cv32rt/props.hpp"
#include "cv32rt/sweep.hpp"

using namespace cv32rt;

namespace {

struct Line {
    unsigned criterion;
    const char* title;
    bool pass;
    std::string detail;
};

Line from_bands(unsigned crit, const char* title, const std::vector<BandCheck>& all) {
    Line l{crit, title, true, ""};
    unsigned n = 0, ok = 0;
    std::string first_fail;
    for (const auto& b : all) {
        if (b.criterion != crit) continue;
        ++n;
        if (b.pass) ++ok;
        else if (first_fail.empty()) first_fail = b.name + ": " + b.detail;
    }
    l.pass = n > 0 && ok == n;
    l.detail = std::to_string(ok) + "/" + std::to_string(n) + " checks";
    if (!first_fail.empty()) l.detail += "; " + first_fail;
    return l;
}

Line from_prop(const char* title, const PropertyResult& r) {
    return {r.criterion, title, r.pass(),
            std::to_string(r.mismatches) + " mismatches in " + std::to_string(r.cases) + " cases; " + r.detail};
}

} // namespace

int main(int argc, char** argv) {
    bool verbose = argc > 1 && std::strcmp(argv[1], "--verbose") == 0;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    uint64_t seed = property_seed();

    auto reports = run_sweep(acceptance_scenarios(), jobs);
    auto bands = evaluate_bands(reports);

    std::vector<Line> lines = {
        from_bands(1, "interrupt latency ladder", bands),
        from_bands(2, "back-to-back cost", bands),
        from_bands(3, "context-switch savings", bands),
        from_prop("arbitration oracle equivalence", check_arbitration(seed)),
        from_prop("preemption predicate truth table", check_qualify()),
        from_prop("frame image correctness", check_frame_image(seed)),
        from_prop("gated vs blocked equivalence", check_gate_equivalence(seed)),
        from_prop("tail-chain purity", check_tail_chain_purity(seed)),
        from_prop("determinism", check_determinism(jobs)),
    };

    bool all = true;
    for (const auto& l : lines) {
        std::printf("%s %u %-34s %s\n", l.pass ? "PASS" : "FAIL", l.criterion, l.title, l.detail.c_str());
        all = all && l.pass;
    }
    if (verbose) std::printf("\nseed 0x%llx\n%s", (unsigned long long)seed, format_bands(bands).c_str());
    return all ? 0 : 1;
}
