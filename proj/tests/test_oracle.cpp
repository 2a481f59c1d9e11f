#include <cmath>

#include "doctest.h"
#include "fklab/corpus.hpp"
#include "fklab/errors.hpp"
#include "fklab/oracle.hpp"
#include "fklab/rng.hpp"

using namespace fklab;

namespace {

// Brute-force reference: sum over every trajectory of the product of
// initial mass, kernel steps, and potentials.
double brute_force_gamma_mass(const FkModel& m) {
    PathIndexer ix(m.space_sizes);
    const int n = m.horizon;
    double total = 0.0;
    for (int64_t p = 0; p < ix.count(n); ++p) {
        const auto coords = ix.decode(p, n);
        double w = m.initial[coords[0]];
        for (int k = 1; k <= n; ++k) w *= m.kernel(k)(coords[k - 1], coords[k]);
        for (int k = 0; k < n; ++k) w *= m.potentials[k][coords[k]];
        total += w;
    }
    return total;
}

}  // namespace

TEST_CASE("exact measures: unit potentials give chain marginals with mass one") {
    const FkModel m = corpus::unit_potential_2state(5);
    const auto em = oracle::exact_measures(m);
    Vector mu = m.initial;
    for (int k = 0; k <= 5; ++k) {
        CHECK(em.mass[k] == doctest::Approx(1.0).epsilon(1e-14));
        for (int x = 0; x < 2; ++x) CHECK(em.eta[k][x] == doctest::Approx(mu[x]).epsilon(1e-14));
        if (k < 5) mu = measure_apply(mu, m.kernel(k + 1));
    }
}

TEST_CASE("exact measures: horizon zero returns the initial law") {
    FkModel m;
    m.horizon = 0;
    m.space_sizes = {3};
    m.potentials = {{1.0, 2.0, 3.0}};
    m.initial = {0.5, 0.25, 0.25};
    m.validate();
    const auto em = oracle::exact_measures(m);
    CHECK(em.eta[0] == m.initial);
    CHECK(em.mass[0] == doctest::Approx(1.0));
}

TEST_CASE("exact measures: three-state horizon five against exhaustive enumeration") {
    const FkModel m = corpus::weak_mixing_3state(5);
    const auto em = oracle::exact_measures(m);
    CHECK(em.mass[5] == doctest::Approx(brute_force_gamma_mass(m)).epsilon(1e-12));
}

TEST_CASE("product formula on the whole corpus") {
    for (const auto& [name, m] : corpus::all(6)) {
        const auto em = oracle::exact_measures(m);
        const int n = m.horizon;
        double prod = 1.0;
        for (int p = 0; p < n; ++p) prod *= em.potential_mean[p];
        for (int x = 0; x < m.space_sizes[n]; ++x)
            CHECK(em.gamma[n][x] == doctest::Approx(em.eta[n][x] * prod).epsilon(1e-10));
    }
}

TEST_CASE("semigroup: identity at p=n, unit-potential rows sum to one") {
    const FkModel unit = corpus::unit_potential_2state(4);
    const Matrix id = oracle::semigroup(unit, 2, 2);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(0, 1) == 0.0);
    const Matrix q = oracle::semigroup(unit, 0, 4);
    for (int r = 0; r < q.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < q.cols; ++c) s += q(r, c);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("semigroup composition at every split point") {
    for (const auto& [name, m] : corpus::all(4)) {
        const Matrix whole = oracle::semigroup(m, 0, 4);
        for (int split = 0; split <= 4; ++split) {
            const Matrix a = oracle::semigroup(m, 0, split);
            const Matrix b = oracle::semigroup(m, split, 4);
            const Matrix ab = matmul(a, b);
            for (size_t i = 0; i < whole.a.size(); ++i)
                CHECK(ab.a[i] == doctest::Approx(whole.a[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalized semigroup has unit mean mass under eta_p") {
    const FkModel m = corpus::mixing_2state(5);
    const auto em = oracle::exact_measures(m);
    const Matrix qbar = oracle::normalized_semigroup(m, 1, 4, em.eta[1]);
    double mean = 0.0;
    for (int r = 0; r < qbar.rows; ++r) {
        double mass = 0.0;
        for (int c = 0; c < qbar.cols; ++c) mass += qbar(r, c);
        mean += em.eta[1][r] * mass;
    }
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized potentials make the normalized semigroup the plain one") {
    const FkModel m = corpus::normalized(corpus::qmc_4state(4));
    const auto em = oracle::exact_measures(m);
    for (int p = 0; p <= 3; ++p) {
        const Matrix plain = oracle::semigroup(m, p, 4);
        const Matrix norm = oracle::normalized_semigroup(m, p, 4, em.eta[p]);
        for (size_t i = 0; i < plain.a.size(); ++i)
            CHECK(norm.a[i] == doctest::Approx(plain.a[i]).epsilon(1e-12));
    }
}

TEST_CASE("assumption constants: rank-one and unit-potential cases") {
    // Perfectly mixing kernel with unit potentials: ratio one, no memory.
    FkModel m = corpus::unit_potential_2state(3);
    Matrix rank_one(2, 2);
    rank_one(0, 0) = rank_one(1, 0) = 0.3;
    rank_one(0, 1) = rank_one(1, 1) = 0.7;
    m.kernels.assign(3, rank_one);
    const auto rep = oracle::assumption_constants(m);
    CHECK(rep.rho_n == doctest::Approx(1.0));
    for (int k = 1; k <= 3; ++k) CHECK(rep.alpha[k] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rep.alpha[0] == doctest::Approx(2.0).epsilon(1e-12));

    // Any kernel with unit potentials keeps the mass function constant.
    const auto rep2 = oracle::assumption_constants(corpus::unit_potential_2state(5));
    CHECK(rep2.rho_n == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("assumption constants: two-state tilt against direct enumeration") {
    FkModel m = corpus::unit_potential_2state(2);
    for (auto& g : m.potentials) g = {2.0, 1.0};
    const auto rep = oracle::assumption_constants(m);

    // All Q_{p,q}(1) vectors by hand.
    double worst = 1.0;
    for (int p = 0; p <= 2; ++p)
        for (int q = p; q <= 2; ++q) {
            const Matrix qm = oracle::semigroup(m, p, q);
            Vector mass(2);
            for (int r = 0; r < 2; ++r) mass[r] = qm(r, 0) + qm(r, 1);
            worst = std::max(worst, max_element(mass) / min_element(mass));
        }
    CHECK(rep.rho_n == doctest::Approx(worst).epsilon(1e-13));
    CHECK(rep.beta1 == doctest::Approx(1.0));
    CHECK(rep.beta2 == doctest::Approx(2.0));
}

TEST_CASE("dobrushin coefficient: trivial and hand-computed cases") {
    Matrix same(3, 3, 1.0 / 3.0);
    CHECK(oracle::dobrushin_beta(same) == doctest::Approx(0.0));
    CHECK(oracle::dobrushin_beta(Matrix::identity(2)) == doctest::Approx(1.0));

    Matrix m(2, 2);
    m(0, 0) = 0.7;
    m(0, 1) = 0.3;
    m(1, 0) = 0.4;
    m(1, 1) = 0.6;
    CHECK(oracle::dobrushin_beta(m) == doctest::Approx(0.3).epsilon(1e-14));

    // Brute force over the extreme test functions (indicator oscillations).
    double worst = 0.0;
    for (int mask = 0; mask < 4; ++mask) {
        Vector f{static_cast<double>(mask & 1), static_cast<double>((mask >> 1) & 1)};
        const Vector mf = matvec(m, f);
        worst = std::max(worst, std::abs(mf[0] - mf[1]));
    }
    CHECK(oracle::dobrushin_beta(m) == doctest::Approx(worst).epsilon(1e-14));

    Matrix bad(2, 2, 0.4);
    CHECK_THROWS_AS(oracle::dobrushin_beta(bad), ValidationError);
}

TEST_CASE("path measures agree with exact measures of the lifted model") {
    const FkModel m = corpus::qmc_4state(3);
    const auto pm = oracle::path_measures(m);
    const auto em = oracle::exact_measures(lift_to_path(m));
    for (int k = 0; k <= 3; ++k) {
        CHECK(pm.mass[k] == doctest::Approx(em.mass[k]).epsilon(1e-12));
        for (size_t i = 0; i < pm.gamma[k].size(); ++i)
            CHECK(pm.gamma[k][i] == doctest::Approx(em.gamma[k][i]).epsilon(1e-12));
    }
    // And the path mass equals the marginal mass.
    const auto em_marginal = oracle::exact_measures(m);
    CHECK(pm.mass[3] == doctest::Approx(em_marginal.mass[3]).epsilon(1e-12));
}

TEST_CASE("lifted semigroup mass depends only on the terminal coordinate") {
    const FkModel m = corpus::mixing_2state(4);
    const FkModel lifted = lift_to_path(m);
    PathIndexer ix(m.space_sizes);
    for (int p = 0; p <= 3; ++p) {
        const Matrix qp = oracle::semigroup(lifted, p, 4);
        const Matrix qm = oracle::semigroup(m, p, 4);
        for (int64_t row = 0; row < ix.count(p); ++row) {
            double mass = 0.0;
            for (int c = 0; c < qp.cols; ++c) mass += qp(static_cast<int>(row), c);
            double mmass = 0.0;
            for (int c = 0; c < qm.cols; ++c) mmass += qm(ix.terminal(row, p), c);
            CHECK(mass == doctest::Approx(mmass).epsilon(1e-12));
        }
    }
}

TEST_CASE("frozen measures: infinite N reduces to the plain path law") {
    const FkModel m = corpus::mixing_2state(3);
    PathIndexer ix(m.space_sizes);
    const FrozenPath z{{1, 0, 1, 0}};
    const auto fm = oracle::frozen_path_measures(m, z, ParticleCount::infinite());
    const auto pm = oracle::path_measures(m);
    for (size_t i = 0; i < pm.eta[3].size(); ++i)
        CHECK(fm.eta[3][i] == doctest::Approx(pm.eta[3][i]).epsilon(1e-14));
}

TEST_CASE("frozen measures: level zero is the insertion mixture") {
    const FkModel m = corpus::mixing_2state(1);
    const FrozenPath z{{1, 0}};
    const auto fm = oracle::frozen_path_measures(m, z, ParticleCount::of(10));
    CHECK(fm.mu0[0] == doctest::Approx(0.9 * m.initial[0]));
    CHECK(fm.mu0[1] == doctest::Approx(0.9 * m.initial[1] + 0.1));
}

TEST_CASE("frozen path measures equal the dense frozen semigroup route") {
    const FkModel m = corpus::weak_mixing_3state(3);
    PathIndexer ix(m.space_sizes);
    const FkModel lifted = lift_to_path(m);
    const FrozenPath z{{2, 1, 0, 2}};
    const ParticleCount N = ParticleCount::of(7);

    std::vector<int64_t> frozen(m.horizon + 1);
    for (int k = 0; k <= m.horizon; ++k) frozen[k] = z.prefix_linear(ix, k);

    const auto fm = oracle::frozen_path_measures(m, z, N);
    // mu0 Q_{0,n} on the lifted model.
    Vector mu0(ix.count(0), 0.0);
    for (int x = 0; x < m.size_at(0); ++x) mu0[x] = fm.mu0[x];
    const Matrix q0n = oracle::frozen_semigroup(lifted, frozen, N, 0, m.horizon);
    const Vector via_matrix = measure_apply(mu0, q0n);
    for (size_t i = 0; i < via_matrix.size(); ++i)
        CHECK(fm.gamma[m.horizon][i] == doctest::Approx(via_matrix[i]).epsilon(1e-12));
}

TEST_CASE("frozen semigroup: infinite N and empty range") {
    const FkModel m = corpus::mixing_2state(3);
    std::vector<int64_t> frozen{0, 1, 0, 1};
    const Matrix a = oracle::frozen_semigroup(m, frozen, ParticleCount::infinite(), 0, 3);
    const Matrix b = oracle::semigroup(m, 0, 3);
    for (size_t i = 0; i < a.a.size(); ++i) CHECK(a.a[i] == doctest::Approx(b.a[i]).epsilon(1e-14));

    const Matrix id = oracle::frozen_semigroup(m, frozen, ParticleCount::of(5), 2, 2);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(1, 0) == 0.0);
}

TEST_CASE("frozen semigroup matches the insertion-pattern expansion") {
    // Two steps: mix over the four insertion patterns with binomial weights.
    const FkModel m = corpus::mixing_2state(2);
    const int N = 5;
    std::vector<int64_t> frozen{1, 0, 1};

    const Matrix direct = oracle::frozen_semigroup(m, frozen, ParticleCount::of(N), 0, 2);

    auto pattern_step = [&](int k, bool insert) {
        Matrix q = oracle::semigroup(m, k - 1, k);
        if (!insert) return q;
        Matrix out(q.rows, q.cols, 0.0);
        for (int r = 0; r < q.rows; ++r) {
            double mass = 0.0;
            for (int c = 0; c < q.cols; ++c) mass += q(r, c);
            out(r, static_cast<int>(frozen[k])) = mass;
        }
        return out;
    };
    Matrix mix(2, 2, 0.0);
    for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2) {
            const double w = std::pow(1.0 / N, e1 + e2) * std::pow(1.0 - 1.0 / N, 2 - e1 - e2);
            const Matrix prod = matmul(pattern_step(1, e1 == 1), pattern_step(2, e2 == 1));
            for (size_t i = 0; i < mix.a.size(); ++i) mix.a[i] += w * prod.a[i];
        }
    for (size_t i = 0; i < mix.a.size(); ++i)
        CHECK(direct.a[i] == doctest::Approx(mix.a[i]).epsilon(1e-13));
}

TEST_CASE("frozen mass cross-checked by importance-weighted simulation") {
    const FkModel m = corpus::mixing_2state(3);
    const FrozenPath z{{0, 1, 1, 0}};
    const ParticleCount N = ParticleCount::of(10);
    const auto fm = oracle::frozen_path_measures(m, z, N);

    // Simulate the insertion-mixture chain and average the potential product.
    const int64_t R = 400000;
    double acc = 0.0, acc2 = 0.0;
    const StreamKey key{20240808ull, 0ull};
    for (int64_t r = 0; r < R; ++r) {
        int state;
        {
            const double u = uniform01({key.master_seed, static_cast<uint64_t>(r)}, 0, 0,
                                       Draw::kInit);
            state = u < 0.1 ? z.coords[0] : sample_cdf(m.initial, (u - 0.1) / 0.9);
        }
        double w = 1.0;
        for (int k = 1; k <= 3; ++k) {
            w *= m.potentials[k - 1][state];
            const StreamKey rk{key.master_seed, static_cast<uint64_t>(r)};
            const int y = sample_cdf(m.kernel(k).row(state),
                                     uniform01(rk, static_cast<uint32_t>(k), 0, Draw::kMutate));
            const double v = uniform01(rk, static_cast<uint32_t>(k), 1, Draw::kGeneric);
            state = v < 0.1 ? z.coords[k] : y;
        }
        acc += w;
        acc2 += w * w;
    }
    const double mean = acc / R;
    const double se = std::sqrt((acc2 / R - mean * mean) / R);
    CHECK(std::abs(mean - fm.mass[3]) <= 4.0 * se);
}

TEST_CASE("frozen path kernel matrix rows are probability vectors") {
    const FkModel m = corpus::mixing_2state(3);
    const Matrix f = oracle::frozen_path_kernel_matrix(m, ParticleCount::of(8));
    for (int r = 0; r < f.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < f.cols; ++c) {
            CHECK(f(r, c) >= 0.0);
            s += f(r, c);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("oracle dump is valid JSON with the advertised fields") {
    const std::string dump = oracle::oracle_dump_json(corpus::mixing_2state(3), 2,
                                                      ParticleCount::of(8));
    CHECK(dump.find("\"rho_n\"") != std::string::npos);
    CHECK(dump.find("\"alpha\"") != std::string::npos);
    CHECK(dump.find("\"tensor_eta\"") != std::string::npos);
}
