#pragma once

#include <cstdint>
#include <vector>

#include "fklab/model.hpp"
#include "fklab/rng.hpp"
#include "fklab/smc.hpp"

namespace fklab {

/// A conditional particle system: at every generation a uniformly chosen
/// slot is forced to the frozen trajectory, the remaining N-1 particles make
/// a plain selection-mutation move over the full previous cloud (the frozen
/// particle weighs in like any other). Ancestor links of the frozen slot
/// chain to the previous frozen slot, so its ancestral line is the frozen
/// trajectory prefix.
struct DualRun {
    FrozenPath frozen;
    int num_particles = 0;
    int horizon = 0;
    StreamKey key;
    std::vector<int> insertion_slot;          // I_k, k = 0..n
    std::vector<std::vector<int>> states;     // [level][particle]
    std::vector<std::vector<int>> ancestors;  // [level-1][particle]
    std::vector<double> potential_mean;       // m(X_{z,k})(G_k)

    double normalizer(int upto) const;
    std::vector<int> line(int particle, int level) const;
};

enum class PgMode { kAncestral, kBackward };

/// Runs the dual system. Requires N >= 2: with a single slot the dynamics
/// degenerate to the frozen path itself.
DualRun run_dual(const FkModel& model, const FrozenPath& z, int num_particles, StreamKey key);

/// One Gibbs sweep with ancestral-line selection: run the dual system, then
/// return a uniformly chosen ancestral line.
SampledPath pg_step_ancestral(const FkModel& model, const FrozenPath& z, int num_particles,
                              StreamKey key);

/// One Gibbs sweep with backward selection: run the dual system on the
/// marginal model, then backward-sample a trajectory through its clouds.
SampledPath pg_step_backward(const FkModel& model, const FrozenPath& z, int num_particles,
                             StreamKey key);

struct PgChainRecord {
    PgMode mode = PgMode::kAncestral;
    std::vector<FrozenPath> path;        // z^(0), z^(1), ...
    std::vector<double> normalizer;      // dual-run normalizer behind each step
    std::vector<std::vector<int>> slots; // insertion slots behind each step
};

/// Iterates Gibbs sweeps from z0. Every accepted path is recorded; the move
/// is always accepted (it is an exact conditional draw).
PgChainRecord pg_chain(const FkModel& model, const FrozenPath& z0, int num_particles, int steps,
                       PgMode mode, uint64_t master_seed, uint64_t chain_id = 0);

}  // namespace fklab
