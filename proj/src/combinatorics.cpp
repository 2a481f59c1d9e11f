#include "fklab/combinatorics.hpp"

#include <string>
#include <vector>

#include "fklab/errors.hpp"

namespace fklab {

uint64_t falling_factorial(uint64_t m, uint64_t p) {
    if (p > m) return 0;
    uint64_t r = 1;
    for (uint64_t i = 0; i < p; ++i) {
        const uint64_t f = m - i;
        if (r != 0 && f > UINT64_MAX / r)
            throw OverflowError("falling_factorial(" + std::to_string(m) + "," + std::to_string(p) +
                                ") exceeds 64 bits");
        r *= f;
    }
    return r;
}

uint64_t stirling2(int q, int k) {
    if (k < 0 || k > q) return 0;
    if (q == 0) return k == 0 ? 1 : 0;
    // S(q,k) = k S(q-1,k) + S(q-1,k-1)
    std::vector<uint64_t> row(q + 1, 0);
    row[0] = 1;
    for (int n = 1; n <= q; ++n) {
        std::vector<uint64_t> next(q + 1, 0);
        for (int j = 1; j <= n; ++j) {
            const uint64_t a = row[j];
            if (a != 0 && static_cast<uint64_t>(j) > UINT64_MAX / a)
                throw OverflowError("stirling2(" + std::to_string(q) + "," + std::to_string(k) +
                                    ") exceeds 64 bits");
            const uint64_t t = static_cast<uint64_t>(j) * a;
            if (t > UINT64_MAX - row[j - 1])
                throw OverflowError("stirling2(" + std::to_string(q) + "," + std::to_string(k) +
                                    ") exceeds 64 bits");
            next[j] = t + row[j - 1];
        }
        next[0] = 0;
        row = std::move(next);
    }
    return row[k];
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n-k+i) cannot overflow before division on the verified grids,
        // but check anyway.
        const uint64_t f = static_cast<uint64_t>(n - k + i);
        if (r > UINT64_MAX / f)
            throw OverflowError("binomial(" + std::to_string(n) + "," + std::to_string(k) +
                                ") exceeds 64 bits");
        r = r * f / i;
    }
    return r;
}

double falling_ratio(int m, int p) {
    if (p > m) return 0.0;
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= static_cast<double>(m - i) / m;
    return r;
}

}  // namespace fklab
