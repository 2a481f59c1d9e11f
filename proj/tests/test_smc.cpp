#include <cmath>

#include "doctest.h"
#include "fklab/corpus.hpp"
#include "fklab/errors.hpp"
#include "fklab/oracle.hpp"
#include "fklab/smc.hpp"
#include "fklab/verify.hpp"

using namespace fklab;

TEST_CASE("identical seeds replay bitwise-identical runs") {
    const FkModel m = corpus::qmc_4state(5);
    const ParticleRun a = run_smc(m, 64, StreamKey{77, 5});
    const ParticleRun b = run_smc(m, 64, StreamKey{77, 5});
    CHECK(a.states == b.states);
    CHECK(a.ancestors == b.ancestors);
    CHECK(a.potential_mean == b.potential_mean);
    const ParticleRun c = run_smc(m, 64, StreamKey{77, 6});
    CHECK(a.states != c.states);
}

TEST_CASE("degenerate dynamics: identity kernel and a point initial law") {
    FkModel m = corpus::unit_potential_2state(4);
    for (auto& k : m.kernels) k = Matrix::identity(2);
    m.initial = {0.0, 1.0};
    const ParticleRun run = run_smc(m, 16, StreamKey{1, 1});
    for (int k = 0; k <= 4; ++k)
        for (int i = 0; i < 16; ++i) CHECK(run.states[k][i] == 1);
    CHECK(run.normalizer(4) == doctest::Approx(1.0));
}

TEST_CASE("a single particle follows the twisted chain and carries its weight") {
    const FkModel m = corpus::mixing_2state(3);
    const ParticleRun run = run_smc(m, 1, StreamKey{3, 9});
    double w = 1.0;
    for (int p = 0; p < 3; ++p) w *= m.potentials[p][run.states[p][0]];
    CHECK(run.normalizer(3) == doctest::Approx(w).epsilon(1e-14));
    CHECK(std::exp(run.log_normalizer(3)) == doctest::Approx(run.normalizer(3)).epsilon(1e-12));
}

TEST_CASE("ancestor indices stay in range and lines are consistent") {
    const FkModel m = corpus::weak_mixing_3state(4);
    const ParticleRun run = run_smc(m, 32, StreamKey{11, 0});
    for (int k = 1; k <= 4; ++k)
        for (int i = 0; i < 32; ++i) {
            CHECK(run.ancestors[k - 1][i] >= 0);
            CHECK(run.ancestors[k - 1][i] < 32);
        }
    const auto line = run.line(7, 4);
    CHECK(line.size() == 5);
    CHECK(line[4] == run.states[4][7]);
    int anc = 7;
    for (int k = 4; k >= 1; --k) {
        anc = run.ancestors[k - 1][anc];
        CHECK(line[k - 1] == run.states[k - 1][anc]);
    }
}

TEST_CASE("unnormalized estimator is unbiased against the exact law") {
    const FkModel m = corpus::mixing_2state(3);
    const auto em = oracle::exact_measures(m);
    const double target = em.gamma[3][0];

    const int64_t R = 20000;
    double acc = 0.0, acc2 = 0.0;
    for (int64_t r = 0; r < R; ++r) {
        const ParticleRun run = run_smc(m, 50, StreamKey{555, static_cast<uint64_t>(r)});
        double s = 0.0;
        for (int i = 0; i < 50; ++i) s += run.states[3][i] == 0 ? 1.0 : 0.0;
        const double v = run.normalizer(3) * s / 50;
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / R;
    const double se = std::sqrt((acc2 / R - mean * mean) / R);
    CHECK(std::abs(mean - target) <= 5.0 * se);
}

TEST_CASE("ancestral sampling: single particle and degenerate runs") {
    const FkModel m = corpus::mixing_2state(3);
    const ParticleRun run = run_smc(m, 1, StreamKey{42, 0});
    const SampledPath p = sample_ancestral_line(run, StreamKey{42, 0});
    CHECK(p.coords == run.line(0, 3));
    CHECK(p.provenance == SampledPath::Provenance::kAncestral);
}

TEST_CASE("backward sampling: single particle path and support property") {
    const FkModel m = corpus::mixing_2state(4);
    const ParticleRun one = run_smc(m, 1, StreamKey{9, 4});
    const SampledPath p = backward_sample(one, m, StreamKey{9, 4});
    CHECK(p.coords == one.line(0, 4));
    CHECK(p.provenance == SampledPath::Provenance::kBackward);

    const ParticleRun run = run_smc(m, 20, StreamKey{10, 0});
    const SampledPath q = backward_sample(run, m, StreamKey{10, 0});
    for (int k = 0; k <= 4; ++k) {
        bool found = false;
        for (int i = 0; i < 20; ++i) found = found || run.states[k][i] == q.coords[k];
        CHECK(found);
    }
}

TEST_CASE("backward sampling raises on unreachable transitions") {
    FkModel m = corpus::unit_potential_2state(1);
    m.kernels[0] = Matrix::identity(2);
    ParticleRun run;
    run.num_particles = 1;
    run.horizon = 1;
    run.states = {{0}, {1}};  // terminal state 1 cannot come from state 0
    run.ancestors = {{0}};
    run.potential_mean = {1.0, 1.0};
    CHECK_THROWS_AS(backward_sample(run, m, StreamKey{0, 0}), UnreachableTransitionError);
}

TEST_CASE("ancestral-line histogram sits inside the first-order window") {
    const FkModel m = corpus::normalized(corpus::mixing_2state(3));
    const double rho = oracle::assumption_constants(m).rho_n;
    const double c1 = verify::constants::c1_bias(rho);
    const double c2 = verify::constants::c2_bias(rho);
    const int N = std::max(64, static_cast<int>(std::ceil(c2 * 3)));
    PathIndexer ix(m.space_sizes);
    const auto pm = oracle::path_measures(m);

    const int64_t R = 20000;
    std::vector<int64_t> counts(ix.count(3), 0);
    for (int64_t r = 0; r < R; ++r) {
        const StreamKey key{808, static_cast<uint64_t>(r)};
        const ParticleRun run = run_smc(m, N, key);
        const SampledPath p = sample_ancestral_line(run, key);
        ++counts[ix.encode({p.coords.data(), p.coords.size()})];
    }
    // Each cell's draw frequency estimates E m(xi_n)(1_path), which must sit
    // inside the bias window around eta_n; the CI widens the test.
    for (int64_t s = 0; s < ix.count(3); ++s) {
        const double phat = static_cast<double>(counts[s]) / R;
        const double se = std::sqrt(std::max(phat * (1.0 - phat), 1e-9) / R);
        const double eta = pm.eta[3][s];
        CHECK(phat + 5.0 * se >= (1.0 - c1 * 3.0 / N) * eta);
        CHECK(phat - 5.0 * se <= (1.0 + c2 * 3.0 / N) * eta);
    }
}

TEST_CASE("empirical pair products match the coalescence identity on live runs") {
    const FkModel m = corpus::qmc_4state(3);
    for (int q : {2, 3}) {
        const int N = 9;
        const ParticleRun run = run_smc(m, N, StreamKey{2024, static_cast<uint64_t>(q)});
        const Matrix c = oracle::coalescence_matrix(ParticleCount::of(N), q, 4);
        const int64_t dq = oracle::tuple_count(4, q);
        Vector f(dq);
        for (int64_t i = 0; i < dq; ++i) f[i] = 0.1 + ((i * 31) % 7) * 0.2;
        // Full product measure average via the coalescence of the
        // distinct-tuple average.
        double full = 0.0;
        std::vector<int> t(q, 0);
        while (true) {
            int64_t idx = 0;
            for (int a = 0; a < q; ++a) idx = idx * 4 + run.states[3][t[a]];
            full += f[idx];
            int j = q - 1;
            while (j >= 0 && ++t[j] == N) t[j--] = 0;
            if (j < 0) break;
        }
        full /= std::pow(static_cast<double>(N), q);
        CHECK(empirical_tensor(run, 3, q, 4, matvec(c, f)) ==
              doctest::Approx(full).epsilon(1e-12));
    }
}
