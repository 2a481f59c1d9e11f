#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fklab/model.hpp"
#include "fklab/rng.hpp"

namespace fklab {

/// One realized particle system on a marginal model: per-generation states,
/// ancestor links, and the running selection normalizer. Path particles are
/// the ancestral lines and are reconstructed on demand, so memory is O(N n).
struct ParticleRun {
    int num_particles = 0;
    int horizon = 0;
    StreamKey key;
    std::vector<std::vector<int>> states;     // [level][particle], level 0..n
    std::vector<std::vector<int>> ancestors;  // [level-1][particle], level 1..n
    std::vector<double> potential_mean;       // m(xi_k)(G_k), k = 0..n

    // log prod_{p<upto} m(xi_p)(G_p); the empty product is 1.
    double log_normalizer(int upto) const;
    double normalizer(int upto) const;

    // Ancestral line of particle i: trace ancestor links from level `level`
    // back to generation 0.
    std::vector<int> line(int particle, int level) const;
};

struct SampledPath {
    enum class Provenance { kAncestral, kBackward };
    std::vector<int> coords;
    Provenance provenance = Provenance::kAncestral;
};

/// Mean-field particle system: generation 0 is iid from eta_0; afterwards
/// each particle independently picks an ancestor with probability
/// proportional to its potential and takes one kernel step. Multinomial
/// selection only: this is the model every bound in the suite is about.
ParticleRun run_smc(const FkModel& model, int num_particles, StreamKey key);

/// Uniformly chosen ancestral line of a completed run.
SampledPath sample_ancestral_line(const ParticleRun& run, StreamKey key);

/// Backward-sampled trajectory: terminal state uniform over the final cloud,
/// then at each earlier level a particle is drawn with weight
/// G_k(x) M_{k+1}(x, next) and contributes its state. Throws
/// UnreachableTransitionError if no particle can explain the next state.
SampledPath backward_sample(const ParticleRun& run, const FkModel& model, StreamKey key);

/// Exact empirical average over ordered q-tuples of distinct particles at
/// one level, for a dense function on value tuples. `values` gives each
/// particle's value index and `f` is dense over value_count^q tuples
/// (tuple coordinate 1 most significant). Direct enumeration; for q >= 3 the
/// particle count must stay small.
double empirical_tensor(std::span<const int> values, int value_count, int q, const Vector& f);

/// Same average for a product function f = g tensor ... tensor g, via the
/// power-sum expansion over coincident indices; exact for any N.
double empirical_tensor_product(std::span<const int> values, const Vector& g, int q);

/// Convenience wrappers over the marginal states at one level.
double empirical_tensor(const ParticleRun& run, int level, int q, int value_count, const Vector& f);
double empirical_tensor_product(const ParticleRun& run, int level, int q, const Vector& g);

/// Debug dump: particles, ancestors, per-level potential means, normalizer.
std::string run_to_json(const ParticleRun& run);

}  // namespace fklab
