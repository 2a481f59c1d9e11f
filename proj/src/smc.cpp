#include "fklab/smc.hpp"

#include <cmath>

#include "fklab/errors.hpp"
#include "json.hpp"

namespace fklab {

double ParticleRun::log_normalizer(int upto) const {
    double s = 0.0;
    for (int p = 0; p < upto; ++p) s += std::log(potential_mean[p]);
    return s;
}

double ParticleRun::normalizer(int upto) const {
    double z = 1.0;
    for (int p = 0; p < upto; ++p) z *= potential_mean[p];
    return z;
}

std::vector<int> ParticleRun::line(int particle, int level) const {
    std::vector<int> coords(level + 1);
    int i = particle;
    for (int k = level; k >= 0; --k) {
        coords[k] = states[k][i];
        if (k > 0) i = ancestors[k - 1][i];
    }
    return coords;
}

ParticleRun run_smc(const FkModel& model, int num_particles, StreamKey key) {
    if (num_particles < 1) throw ValidationError("run_smc: need at least one particle");
    const int n = model.horizon;

    ParticleRun run;
    run.num_particles = num_particles;
    run.horizon = n;
    run.key = key;
    run.states.assign(n + 1, std::vector<int>(num_particles));
    run.ancestors.assign(n, std::vector<int>(num_particles));
    run.potential_mean.assign(n + 1, 0.0);

    for (int i = 0; i < num_particles; ++i)
        run.states[0][i] = sample_cdf(model.initial, uniform01(key, 0, i, Draw::kInit));

    Vector prefix(num_particles);
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            const std::vector<int>& prev = run.states[k - 1];
            const Vector& g = model.potentials[k - 1];
            double cum = 0.0;
            for (int i = 0; i < num_particles; ++i) prefix[i] = cum += g[prev[i]];
            const Matrix& m = model.kernel(k);
            for (int i = 0; i < num_particles; ++i) {
                const int a = sample_prefix(prefix, uniform01(key, k, i, Draw::kSelect));
                run.ancestors[k - 1][i] = a;
                run.states[k][i] = sample_cdf(m.row(prev[a]), uniform01(key, k, i, Draw::kMutate));
            }
        }
        double s = 0.0;
        const Vector& g = model.potentials[k];
        for (int i = 0; i < num_particles; ++i) s += g[run.states[k][i]];
        run.potential_mean[k] = s / num_particles;
    }
    return run;
}

SampledPath sample_ancestral_line(const ParticleRun& run, StreamKey key) {
    const int i = sample_uniform_index(run.num_particles,
                                       uniform01(key, run.horizon, 0, Draw::kAncestralPick));
    SampledPath p;
    p.coords = run.line(i, run.horizon);
    p.provenance = SampledPath::Provenance::kAncestral;
    return p;
}

SampledPath backward_sample(const ParticleRun& run, const FkModel& model, StreamKey key) {
    const int n = run.horizon;
    SampledPath p;
    p.coords.resize(n + 1);
    p.provenance = SampledPath::Provenance::kBackward;

    const int term =
        sample_uniform_index(run.num_particles, uniform01(key, n, 0, Draw::kBackward));
    p.coords[n] = run.states[n][term];

    Vector w(run.num_particles);
    for (int k = n - 1; k >= 0; --k) {
        const Matrix& m = model.kernel(k + 1);
        const Vector& g = model.potentials[k];
        const int next = p.coords[k + 1];
        double total = 0.0;
        for (int i = 0; i < run.num_particles; ++i) {
            const int x = run.states[k][i];
            w[i] = g[x] * m(x, next);
            total += w[i];
        }
        if (!(total > 0.0))
            throw UnreachableTransitionError("backward_sample: no particle at level " +
                                             std::to_string(k) + " can reach the sampled state");
        const int i = sample_cdf(w, uniform01(key, k, 0, Draw::kBackward));
        p.coords[k] = run.states[k][i];
    }
    return p;
}

double empirical_tensor(std::span<const int> values, int value_count, int q, const Vector& f) {
    const int n = static_cast<int>(values.size());
    if (q >= n) throw ValidationError("empirical_tensor: requires q < N");
    if (q >= 3 && n > 12)
        throw ValidationError("empirical_tensor: direct enumeration needs N <= 12 for q >= 3");

    double total = 0.0;
    int64_t tuples = 0;
    std::vector<int> pick(q, 0);
    // Ordered tuples of distinct indices, by odometer with a distinctness
    // check; fine at these sizes.
    std::vector<int> c(q, 0);
    while (true) {
        bool distinct = true;
        for (int a = 0; a < q && distinct; ++a)
            for (int b = a + 1; b < q; ++b)
                if (c[a] == c[b]) {
                    distinct = false;
                    break;
                }
        if (distinct) {
            int64_t idx = 0;
            for (int a = 0; a < q; ++a) idx = idx * value_count + values[c[a]];
            total += f[idx];
            ++tuples;
        }
        int j = q - 1;
        while (j >= 0 && ++c[j] == n) c[j--] = 0;
        if (j < 0) break;
    }
    return total / static_cast<double>(tuples);
}

double empirical_tensor_product(std::span<const int> values, const Vector& g, int q) {
    const int n = static_cast<int>(values.size());
    if (q >= n) throw ValidationError("empirical_tensor_product: requires q < N");

    // Power sums s_j = sum_i g(x_i)^j feed the standard recursion for sums
    // over injective index tuples:
    //   T_m = sum_{j=1..m} (-1)^{j-1} (m-1)!/(m-j)! s_j T_{m-j},  T_0 = 1.
    std::vector<double> s(q + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        const double v = g[values[i]];
        for (int j = 1; j <= q; ++j) {
            p *= v;
            s[j] += p;
        }
    }
    std::vector<double> t(q + 1, 0.0);
    t[0] = 1.0;
    for (int m = 1; m <= q; ++m) {
        double acc = 0.0;
        double coef = 1.0;  // (m-1)!/(m-j)! built incrementally
        for (int j = 1; j <= m; ++j) {
            acc += (j % 2 == 1 ? 1.0 : -1.0) * coef * s[j] * t[m - j];
            coef *= m - j;
        }
        t[m] = acc;
    }
    double denom = 1.0;
    for (int j = 0; j < q; ++j) denom *= n - j;
    return t[q] / denom;
}

double empirical_tensor(const ParticleRun& run, int level, int q, int value_count,
                        const Vector& f) {
    return empirical_tensor({run.states[level].data(), run.states[level].size()}, value_count, q,
                            f);
}

double empirical_tensor_product(const ParticleRun& run, int level, int q, const Vector& g) {
    return empirical_tensor_product({run.states[level].data(), run.states[level].size()}, g, q);
}

std::string run_to_json(const ParticleRun& run) {
    nlohmann::json j;
    j["num_particles"] = run.num_particles;
    j["horizon"] = run.horizon;
    j["master_seed"] = run.key.master_seed;
    j["replicate"] = run.key.replicate;
    j["states"] = run.states;
    j["ancestors"] = run.ancestors;
    j["potential_mean"] = run.potential_mean;
    j["log_normalizer"] = run.log_normalizer(run.horizon);
    return j.dump(2);
}

}  // namespace fklab
