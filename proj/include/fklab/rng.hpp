#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>

namespace fklab {

// Philox-4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so replicates parallelize with no stream state and replay
// is bitwise identical for a fixed master seed on any thread count.
namespace philox {

struct Block {
    std::array<uint32_t, 4> x;
};

inline Block round10(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    constexpr uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
    constexpr uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        const uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
        const uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
        const uint32_t h0 = static_cast<uint32_t>(p0 >> 32), l0 = static_cast<uint32_t>(p0);
        const uint32_t h1 = static_cast<uint32_t>(p1 >> 32), l1 = static_cast<uint32_t>(p1);
        ctr = {h1 ^ ctr[1] ^ key[0], l1, h0 ^ ctr[3] ^ key[1], l0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return Block{ctr};
}

}  // namespace philox

// Purpose tags keep draws for different decisions on disjoint counter lanes.
enum class Draw : uint32_t {
    kInit = 1,        // generation-0 placement
    kSelect = 2,      // ancestor selection
    kMutate = 3,      // kernel step
    kInsertSlot = 4,  // frozen-slot index in the dual model
    kAncestralPick = 5,
    kBackward = 6,    // one per backward level
    kGeneric = 7,
};

// Identifies one independent stream: a (master seed, replicate) pair.
struct StreamKey {
    uint64_t master_seed = 0;
    uint64_t replicate = 0;
};

// One uniform in [0,1) per (stream, generation, slot, purpose).
inline double uniform01(const StreamKey& s, uint32_t generation, uint32_t slot, Draw purpose) {
    const philox::Block b = philox::round10(
        {static_cast<uint32_t>(s.replicate), static_cast<uint32_t>(s.replicate >> 32),
         generation ^ (static_cast<uint32_t>(purpose) << 24), slot},
        {static_cast<uint32_t>(s.master_seed), static_cast<uint32_t>(s.master_seed >> 32)});
    const uint64_t u = (static_cast<uint64_t>(b.x[0]) << 32) | b.x[1];
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Derives an independent 64-bit sub-seed; used to give nested experiments
// (e.g. each step of a Gibbs chain) their own master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
    const philox::Block blk = philox::round10(
        {static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32), static_cast<uint32_t>(b),
         static_cast<uint32_t>(b >> 32) ^ 0xA5A5A5A5u},
        {static_cast<uint32_t>(master), static_cast<uint32_t>(master >> 32)});
    return (static_cast<uint64_t>(blk.x[2]) << 32) | blk.x[3];
}

// First index whose cumulative weight strictly exceeds u * total. The strict
// comparison is the documented tie-breaking rule; weights must be
// non-negative with a positive total.
inline int sample_cdf(std::span<const double> weights, double u) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = u * total;
    double cum = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int i = 0; i < n; ++i) {
        cum += weights[i];
        if (cum > target) return i;
    }
    // Round-off can leave cum == target at the end; the last positive-weight
    // index is the consistent choice.
    for (int i = n - 1; i >= 0; --i)
        if (weights[i] > 0.0) return i;
    return n - 1;
}

// Same selection rule over a precomputed inclusive prefix-sum array, with a
// binary search; identical outcome to the linear scan, O(log N) per draw.
inline int sample_prefix(std::span<const double> prefix, double u) {
    const double target = u * prefix.back();
    auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
    if (it != prefix.end()) return static_cast<int>(it - prefix.begin());
    // target == total after rounding: last index carrying positive mass.
    int i = static_cast<int>(prefix.size()) - 1;
    while (i > 0 && prefix[i] == prefix[i - 1]) --i;
    return i;
}

inline int sample_uniform_index(int n, double u) {
    const int i = static_cast<int>(u * n);
    return i >= n ? n - 1 : i;
}

}  // namespace fklab
