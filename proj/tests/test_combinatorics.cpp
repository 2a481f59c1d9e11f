#include "doctest.h"
#include "fklab/combinatorics.hpp"
#include "fklab/errors.hpp"

using namespace fklab;

TEST_CASE("stirling numbers and falling factorials") {
    CHECK(stirling2(3, 2) == 3);
    CHECK(stirling2(4, 2) == 7);
    CHECK(stirling2(5, 3) == 25);
    CHECK(stirling2(0, 0) == 1);
    CHECK(stirling2(4, 0) == 0);
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(6, 0) == 1);
    CHECK(falling_factorial(3, 5) == 0);
    CHECK(binomial(6, 2) == 15);
}

TEST_CASE("vandermonde convolution at N=10, q=3") {
    uint64_t s = 0;
    const int N = 10, q = 3;
    for (int k = 0; k <= q; ++k)
        s += binomial(q, k) * falling_factorial(q, k) * falling_factorial(N - q, q - k);
    CHECK(s == falling_factorial(N, q));
}

TEST_CASE("64-bit overflow raises an explicit error") {
    CHECK_THROWS_AS(falling_factorial(1000, 12), OverflowError);
    CHECK(falling_factorial(64, 10) > 0);  // documented largest grid request
}

TEST_CASE("floating falling ratio matches exact integers on small inputs") {
    for (int m = 2; m <= 20; ++m)
        for (int p = 1; p < m && p <= 5; ++p) {
            const double exact = static_cast<double>(falling_factorial(m, p));
            double mp = 1.0;
            for (int i = 0; i < p; ++i) mp *= m;
            CHECK(falling_ratio(m, p) == doctest::Approx(exact / mp).epsilon(1e-14));
        }
}
