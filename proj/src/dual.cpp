#include "fklab/dual.hpp"

#include "fklab/errors.hpp"

namespace fklab {

double DualRun::normalizer(int upto) const {
    double z = 1.0;
    for (int p = 0; p < upto; ++p) z *= potential_mean[p];
    return z;
}

std::vector<int> DualRun::line(int particle, int level) const {
    std::vector<int> coords(level + 1);
    int i = particle;
    for (int k = level; k >= 0; --k) {
        coords[k] = states[k][i];
        if (k > 0) i = ancestors[k - 1][i];
    }
    return coords;
}

DualRun run_dual(const FkModel& model, const FrozenPath& z, int num_particles, StreamKey key) {
    if (num_particles < 2)
        throw ValidationError("run_dual: N must be >= 2 (N = 1 degenerates to the frozen path)");
    if (z.level() < model.horizon)
        throw ValidationError("run_dual: frozen path shorter than horizon");
    const int n = model.horizon;

    DualRun run;
    run.frozen = z;
    run.num_particles = num_particles;
    run.horizon = n;
    run.key = key;
    run.insertion_slot.assign(n + 1, 0);
    run.states.assign(n + 1, std::vector<int>(num_particles));
    run.ancestors.assign(n, std::vector<int>(num_particles));
    run.potential_mean.assign(n + 1, 0.0);

    Vector weights(num_particles);
    for (int k = 0; k <= n; ++k) {
        const int slot =
            sample_uniform_index(num_particles, uniform01(key, k, 0, Draw::kInsertSlot));
        run.insertion_slot[k] = slot;

        if (k == 0) {
            for (int i = 0; i < num_particles; ++i)
                run.states[0][i] =
                    i == slot ? z.coords[0]
                              : sample_cdf(model.initial, uniform01(key, 0, i, Draw::kInit));
        } else {
            const std::vector<int>& prev = run.states[k - 1];
            const Vector& g = model.potentials[k - 1];
            double cum = 0.0;
            for (int i = 0; i < num_particles; ++i) weights[i] = cum += g[prev[i]];
            const Matrix& m = model.kernel(k);
            for (int i = 0; i < num_particles; ++i) {
                if (i == slot) {
                    run.states[k][i] = z.coords[k];
                    run.ancestors[k - 1][i] = run.insertion_slot[k - 1];
                    continue;
                }
                const int a = sample_prefix(weights, uniform01(key, k, i, Draw::kSelect));
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

namespace {

SampledPath ancestral_from_dual(const DualRun& run, StreamKey key) {
    const int i = sample_uniform_index(run.num_particles,
                                       uniform01(key, run.horizon, 1, Draw::kAncestralPick));
    SampledPath p;
    p.coords = run.line(i, run.horizon);
    p.provenance = SampledPath::Provenance::kAncestral;
    return p;
}

SampledPath backward_from_dual(const DualRun& run, const FkModel& model, StreamKey key) {
    const int n = run.horizon;
    SampledPath p;
    p.coords.resize(n + 1);
    p.provenance = SampledPath::Provenance::kBackward;

    const int term =
        sample_uniform_index(run.num_particles, uniform01(key, n, 1, Draw::kBackward));
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
            throw UnreachableTransitionError("pg_step_backward: unreachable transition at level " +
                                             std::to_string(k));
        const int i = sample_cdf(w, uniform01(key, k, 1, Draw::kBackward));
        p.coords[k] = run.states[k][i];
    }
    return p;
}

}  // namespace

SampledPath pg_step_ancestral(const FkModel& model, const FrozenPath& z, int num_particles,
                              StreamKey key) {
    return ancestral_from_dual(run_dual(model, z, num_particles, key), key);
}

SampledPath pg_step_backward(const FkModel& model, const FrozenPath& z, int num_particles,
                             StreamKey key) {
    return backward_from_dual(run_dual(model, z, num_particles, key), model, key);
}

PgChainRecord pg_chain(const FkModel& model, const FrozenPath& z0, int num_particles, int steps,
                       PgMode mode, uint64_t master_seed, uint64_t chain_id) {
    if (z0.level() < model.horizon) throw ValidationError("pg_chain: start path too short");

    PgChainRecord rec;
    rec.mode = mode;
    rec.path.push_back(z0);

    FrozenPath cur = z0;
    for (int t = 1; t <= steps; ++t) {
        StreamKey key{derive_seed(master_seed, chain_id, static_cast<uint64_t>(t)), 0};
        const DualRun run = run_dual(model, cur, num_particles, key);
        SampledPath next = mode == PgMode::kAncestral ? ancestral_from_dual(run, key)
                                                      : backward_from_dual(run, model, key);
        cur = FrozenPath{next.coords};
        rec.path.push_back(cur);
        rec.normalizer.push_back(run.normalizer(run.horizon));
        rec.slots.push_back(run.insertion_slot);
    }
    return rec;
}

}  // namespace fklab
