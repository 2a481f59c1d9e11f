#pragma once

#include <string>
#include <vector>

#include "fklab/model.hpp"

namespace fklab {
namespace oracle {

/// Exact unnormalized/normalized laws per level, computed by dense forward
/// recursion gamma_{k} = gamma_{k-1} Q_k with Q_k = G_{k-1}-weighted M_k.
struct ExactMeasures {
    std::vector<Vector> gamma;      // gamma_k, total mass gamma_k(1) != 1 in general
    std::vector<Vector> eta;        // eta_k = gamma_k / gamma_k(1)
    std::vector<double> mass;       // gamma_k(1)
    std::vector<double> potential_mean;  // eta_k(G_k)
};

ExactMeasures exact_measures(const FkModel& model, int64_t state_cap = kDefaultStateCap);

/// Q_{p,n} = Q_{p+1} ... Q_n as a dense |S_p| x |S_n| matrix; Q_{p,p} = Id.
Matrix semigroup(const FkModel& model, int p, int n);

/// Normalized variant: Q_{p,n} / eta_p Q_{p,n}(1).
Matrix normalized_semigroup(const FkModel& model, int p, int n, const Vector& eta_p);

/// All semigroup matrices Q_{p,q} for 0 <= p <= q <= n, indexed [p][q-p].
std::vector<std::vector<Matrix>> semigroup_table(const FkModel& model);

/// The constants under which every first-order bound in this project is
/// stated: the uniform mass-ratio bound rho, the total-variation contraction
/// profile alpha, and the potential envelope.
struct AssumptionReport {
    double rho_n = 1.0;              // max over p<=q<=n of max/min of Q_{p,q}(1)
    std::vector<double> rho_by_horizon;  // rho_k for k = 0..n (nondecreasing)
    double rho_sup_estimate = 1.0;   // max over computed horizons
    std::vector<double> alpha;       // alpha[k]: worst TV distance at lag k
    double beta1 = 0.0;              // inf of all potentials
    double beta2 = 0.0;              // sup of all potentials
};

AssumptionReport assumption_constants(const FkModel& model);

/// Dobrushin contraction coefficient of a row-stochastic matrix:
/// (1/2) max_{x,y} sum_z |M(x,z) - M(y,z)|, the exact value of the
/// oscillation supremum on a finite space.
double dobrushin_beta(const Matrix& kernel);

/// Exact measures of the path-space lift, as dense vectors over trajectory
/// prefixes, computed structurally (no dense lifted kernels are formed).
struct PathMeasures {
    std::vector<Vector> gamma;  // over S_0 x ... x S_k at level k
    std::vector<Vector> eta;
    std::vector<double> mass;
};

PathMeasures path_measures(const FkModel& model, int64_t state_cap = kDefaultStateCap);

/// Feynman-Kac measures of the model whose kernel jumps to the frozen
/// trajectory with probability 1/N after every transition (and whose initial
/// law is the same 1/N mixture). Path-space semantics: the level-k frozen
/// point is the whole prefix of z. At N = infinity this is path_measures.
struct FrozenMeasures {
    Vector mu0;                 // initial mixture over S'_0
    std::vector<Vector> gamma;  // gamma_{z,k} over path prefixes
    std::vector<Vector> eta;
    std::vector<double> mass;   // gamma_{z,k}(1)
};

FrozenMeasures frozen_path_measures(const FkModel& model, const FrozenPath& z, ParticleCount N,
                                    int64_t state_cap = kDefaultStateCap);

/// Per-step frozen operator on the model's own space: Q_k followed by the
/// 1/N insertion mixture targeting frozen_states[k].
Matrix frozen_step(const FkModel& model, int k, int64_t frozen_state, ParticleCount N);

/// Frozen semigroup between levels p and n on the model's own space
/// (frozen_states[k] must be a valid state index of S_k for p < k <= n).
Matrix frozen_semigroup(const FkModel& model, const std::vector<int64_t>& frozen_states,
                        ParticleCount N, int p, int n);

/// The Markov matrix z |-> eta_{z,n} over the whole path space: row z is the
/// frozen-path law started from trajectory z. This is the exact limiting
/// kernel the Gibbs chain is compared against.
Matrix frozen_path_kernel_matrix(const FkModel& model, ParticleCount N,
                                 int64_t state_cap = kDefaultStateCap);

/// Coalescence operator on q-tuples over a d-point space: the row-stochastic
/// mixture of index-remapping operators that converts the empirical measure
/// over distinct q-tuples into the plain q-fold product measure. Requires
/// q < N; the infinite-N flag yields the identity.
Matrix coalescence_matrix(ParticleCount N, int q, int d);

/// Exact q-tensor Feynman-Kac measures over (S'_k)^q: the coalescence
/// operator acts before each tensorized transition, matching the one-step
/// conditional law of q distinct particles. Level 0 is the plain q-fold
/// product of eta_0.
struct TensorMeasures {
    std::vector<Vector> gamma;  // over (S_k)^q
    std::vector<Vector> eta;
    std::vector<double> mass;
};

TensorMeasures tensor_fk(const FkModel& model, int q, ParticleCount N,
                         int64_t state_cap = kDefaultStateCap);

/// How the frozen trajectory enters the q-tensor recursion.
enum class InsertionMode {
    kMixture,  // replace a uniformly chosen coordinate with prob q/N (the
               // one-step law of q distinct particles in the frozen model)
    kFull,     // always replace a uniformly chosen coordinate
    kNone,     // no insertion: reduces to tensor_fk
};

/// q-tensor measures of the frozen model: coalescence, tensorized transition,
/// then the frozen-coordinate insertion operator, per level.
TensorMeasures frozen_tensor_fk(const FkModel& model, const FrozenPath& z, int q, ParticleCount N,
                                InsertionMode mode = InsertionMode::kMixture,
                                int64_t state_cap = kDefaultStateCap);

/// Dense one-step tensor operator on tuple spaces: coalescence on (S_{k-1})^q,
/// q-fold tensor of Q_k, then insertion for the frozen variant. Used by the
/// enumeration tests; rows index (S_{k-1})^q, columns (S_k)^q.
Matrix tensor_step_matrix(const FkModel& model, int k, int q, ParticleCount N);
Matrix frozen_tensor_step_matrix(const FkModel& model, const FrozenPath& z, int k, int q,
                                 ParticleCount N, InsertionMode mode);

/// Insertion operator on q-tuples: (1 - q/N) identity + (q/N) uniform
/// replacement of one coordinate by `state` (kFull drops the identity part).
Matrix insertion_matrix(int d, int q, int64_t state, ParticleCount N, InsertionMode mode);

// Tuple-space helpers shared by the tensor machinery and its tests.
int64_t tuple_count(int d, int q);
Vector tensor_power_measure(const Vector& mu, int q);          // mu^{tensor q}
Vector tensor_power_function(const Vector& f, int q);          // f^{tensor q}
Vector product_potential(const Vector& g, int q);              // same, by-value alias

/// JSON dump of everything deterministic about a model: gamma/eta tables,
/// assumption constants, and optional tensor marginals.
std::string oracle_dump_json(const FkModel& model, int tensor_q = 0,
                             ParticleCount tensor_N = ParticleCount::infinite());

}  // namespace oracle
}  // namespace fklab
