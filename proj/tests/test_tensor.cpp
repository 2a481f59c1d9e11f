#include <cmath>

#include "doctest.h"
#include "fklab/corpus.hpp"
#include "fklab/errors.hpp"
#include "fklab/oracle.hpp"
#include "fklab/smc.hpp"

using namespace fklab;

namespace {

// Kronecker tensor square of a matrix, as an independent construction.
Matrix kron2(const Matrix& a) {
    Matrix out(a.rows * a.rows, a.cols * a.cols);
    for (int r1 = 0; r1 < a.rows; ++r1)
        for (int r2 = 0; r2 < a.rows; ++r2)
            for (int c1 = 0; c1 < a.cols; ++c1)
                for (int c2 = 0; c2 < a.cols; ++c2)
                    out(r1 * a.rows + r2, c1 * a.cols + c2) = a(r1, c1) * a(r2, c2);
    return out;
}

}  // namespace

TEST_CASE("coalescence operator: identity cases and row sums") {
    const Matrix id = oracle::coalescence_matrix(ParticleCount::of(9), 1, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(id(r, c) == (r == c ? 1.0 : 0.0));

    const Matrix inf = oracle::coalescence_matrix(ParticleCount::infinite(), 3, 2);
    CHECK(inf(5, 5) == 1.0);

    const Matrix c = oracle::coalescence_matrix(ParticleCount::of(5), 3, 2);
    for (int r = 0; r < c.rows; ++r) {
        double s = 0.0;
        for (int col = 0; col < c.cols; ++col) {
            CHECK(c(r, col) >= 0.0);
            s += c(r, col);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }

    CHECK_THROWS_AS(oracle::coalescence_matrix(ParticleCount::of(3), 3, 2), ValidationError);
}

TEST_CASE("coalescence reproduces the full product measure, q=3 N=5 exhaustive") {
    const int N = 5, q = 3, d = 2;
    const Matrix c = oracle::coalescence_matrix(ParticleCount::of(N), q, d);
    const int64_t dq = oracle::tuple_count(d, q);

    for (int assign = 0; assign < (1 << N); ++assign) {
        std::vector<int> values(N);
        for (int i = 0; i < N; ++i) values[i] = (assign >> i) & 1;
        for (int64_t fi = 0; fi < dq; ++fi) {
            Vector f(dq, 0.0);
            f[fi] = 1.0;
            // Full product average over all N^q tuples.
            double full = 0.0;
            std::vector<int> t(q, 0);
            while (true) {
                int64_t idx = 0;
                for (int a = 0; a < q; ++a) idx = idx * d + values[t[a]];
                if (idx == fi) full += 1.0;
                int j = q - 1;
                while (j >= 0 && ++t[j] == N) t[j--] = 0;
                if (j < 0) break;
            }
            full /= std::pow(static_cast<double>(N), q);
            const double via =
                empirical_tensor({values.data(), values.size()}, d, q, matvec(c, f));
            CHECK(via == doctest::Approx(full).epsilon(1e-12));
        }
    }
}

TEST_CASE("tensor law: q=1 is the plain law, infinite N is the product law") {
    const FkModel m = corpus::mixing_2state(3);
    const auto em = oracle::exact_measures(m);

    const auto t1 = oracle::tensor_fk(m, 1, ParticleCount::of(10));
    for (int k = 0; k <= 3; ++k)
        for (int x = 0; x < 2; ++x)
            CHECK(t1.eta[k][x] == doctest::Approx(em.eta[k][x]).epsilon(1e-13));

    const auto t2 = oracle::tensor_fk(m, 2, ParticleCount::infinite());
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            CHECK(t2.eta[3][x * 2 + y] ==
                  doctest::Approx(em.eta[3][x] * em.eta[3][y]).epsilon(1e-13));
}

TEST_CASE("tensor law q=2 N=6 against an independent dense matrix recursion") {
    const FkModel m = corpus::mixing_2state(3);
    const ParticleCount N = ParticleCount::of(6);
    const auto tm = oracle::tensor_fk(m, 2, N);

    // Independent route: explicit Kronecker matrices of the one-step
    // weighted kernel, coalescence applied before each tensor step.
    const Matrix c = oracle::coalescence_matrix(N, 2, 2);
    Vector gamma = oracle::tensor_power_measure(m.initial, 2);
    for (int k = 1; k <= 3; ++k) {
        Matrix step(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int col = 0; col < 2; ++col)
                step(r, col) = m.potentials[k - 1][r] * m.kernel(k)(r, col);
        gamma = measure_apply(measure_apply(gamma, c), kron2(step));
    }
    const double mass = sum(gamma);
    for (int i = 0; i < 4; ++i)
        CHECK(tm.eta[3][i] == doctest::Approx(gamma[i] / mass).epsilon(1e-12));
    CHECK(tm.mass[3] == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("tensor one-step matrices agree with the structural recursion") {
    const FkModel m = corpus::weak_mixing_3state(2);
    const ParticleCount N = ParticleCount::of(5);
    const auto tm = oracle::tensor_fk(m, 2, N);
    Vector gamma = oracle::tensor_power_measure(m.initial, 2);
    for (int k = 1; k <= 2; ++k)
        gamma = measure_apply(gamma, oracle::tensor_step_matrix(m, k, 2, N));
    for (size_t i = 0; i < gamma.size(); ++i)
        CHECK(tm.gamma[2][i] == doctest::Approx(gamma[i]).epsilon(1e-12));
}

TEST_CASE("frozen tensor law: no insertion reduces to the tensor law") {
    const FkModel m = corpus::mixing_2state(3);
    const FrozenPath z{{0, 1, 0, 1}};
    const auto plain = oracle::tensor_fk(m, 2, ParticleCount::of(8));
    const auto frozen =
        oracle::frozen_tensor_fk(m, z, 2, ParticleCount::of(8), oracle::InsertionMode::kNone);
    for (size_t i = 0; i < plain.eta[3].size(); ++i)
        CHECK(frozen.eta[3][i] == doctest::Approx(plain.eta[3][i]).epsilon(1e-13));
}

TEST_CASE("frozen tensor law: q=1 mixture insertion is the frozen path law") {
    const FkModel m = corpus::mixing_2state(3);
    PathIndexer ix(m.space_sizes);
    const FrozenPath z{{1, 1, 0, 0}};
    const FkModel lifted = lift_to_path(m);
    FrozenPath zl;
    zl.coords.resize(4);
    for (int k = 0; k <= 3; ++k) zl.coords[k] = static_cast<int>(z.prefix_linear(ix, k));

    const auto via_tensor =
        oracle::frozen_tensor_fk(lifted, zl, 1, ParticleCount::of(6), oracle::InsertionMode::kMixture);
    const auto via_frozen = oracle::frozen_path_measures(m, z, ParticleCount::of(6));
    for (size_t i = 0; i < via_frozen.eta[3].size(); ++i)
        CHECK(via_tensor.eta[3][i] == doctest::Approx(via_frozen.eta[3][i]).epsilon(1e-12));
}

TEST_CASE("frozen tensor law: full insertion collapses to the frozen point, q=1") {
    const FkModel m = corpus::mixing_2state(2);
    const FrozenPath z{{1, 0, 1}};
    const auto full =
        oracle::frozen_tensor_fk(m, z, 1, ParticleCount::of(4), oracle::InsertionMode::kFull);
    for (int k = 0; k <= 2; ++k)
        for (int x = 0; x < 2; ++x)
            CHECK(full.eta[k][x] == doctest::Approx(x == z.coords[k] ? 1.0 : 0.0));
}

TEST_CASE("empirical tensor: trivial cases and the direct pair loop") {
    std::vector<int> values{0, 1, 1, 2, 0};
    Vector g{1.0, 2.0, 4.0};

    // q = 1 is the plain mean.
    Vector f1 = g;
    double mean = 0.0;
    for (int v : values) mean += g[v];
    mean /= 5.0;
    CHECK(empirical_tensor({values.data(), values.size()}, 3, 1, f1) ==
          doctest::Approx(mean).epsilon(1e-14));

    // Constant function integrates to one.
    Vector ones(9, 1.0);
    CHECK(empirical_tensor({values.data(), values.size()}, 3, 2, ones) == doctest::Approx(1.0));

    // Direct O(N^2) reference for a dense pair function.
    Vector f2(9);
    for (int i = 0; i < 9; ++i) f2[i] = 0.3 + 0.21 * i;
    double direct = 0.0;
    int pairs = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i == j) continue;
            direct += f2[values[i] * 3 + values[j]];
            ++pairs;
        }
    direct /= pairs;
    CHECK(empirical_tensor({values.data(), values.size()}, 3, 2, f2) ==
          doctest::Approx(direct).epsilon(1e-14));

    // Product form agrees with direct enumeration for q = 2 and 3.
    for (int q : {2, 3}) {
        Vector fq = oracle::tensor_power_function(g, q);
        CHECK(empirical_tensor_product({values.data(), values.size()}, g, q) ==
              doctest::Approx(empirical_tensor({values.data(), values.size()}, 3, q, fq))
                  .epsilon(1e-13));
    }

    CHECK_THROWS_AS(empirical_tensor({values.data(), values.size()}, 3, 5, ones),
                    ValidationError);
}
