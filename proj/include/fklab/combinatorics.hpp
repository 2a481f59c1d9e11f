#pragma once

#include <cstdint>

namespace fklab {

// Exact integer combinatorics used by the coalescence machinery. All results
// are checked 64-bit; anything past that throws OverflowError (the verified
// grids stay far below the threshold, e.g. falling(64, 10) is the largest
// exact value the suites request).

// Falling factorial (m)_p = m (m-1) ... (m-p+1); zero when p > m.
uint64_t falling_factorial(uint64_t m, uint64_t p);

// Stirling number of the second kind S(q, k): partitions of a q-set into k
// non-empty blocks.
uint64_t stirling2(int q, int k);

uint64_t binomial(int n, int k);

// (m)_p / m^p evaluated in floating point for grids where the exact integers
// overflow; each factor is exact, the product is correct to ~1e-15.
double falling_ratio(int m, int p);

}  // namespace fklab
