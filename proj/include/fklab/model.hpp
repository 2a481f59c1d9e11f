#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fklab/errors.hpp"
#include "fklab/linalg.hpp"

namespace fklab {

inline constexpr double kStochasticTol = 1e-12;
inline constexpr int64_t kDefaultStateCap = 10'000'000;

/// Discrete-time Feynman-Kac model on explicitly enumerated finite state
/// spaces: strictly positive potentials G_0..G_n, row-stochastic transition
/// kernels M_1..M_n and an initial law eta_0. The same struct represents both
/// marginal models and their path-space lift (a lifted model is just a model
/// whose states happen to encode trajectories).
struct FkModel {
    int horizon = 0;                 // n
    std::vector<int> space_sizes;    // d_0..d_n
    std::vector<Matrix> kernels;     // kernels[k-1] = M_k, shape d_{k-1} x d_k
    std::vector<Vector> potentials;  // G_0..G_n
    Vector initial;                  // eta_0

    int size_at(int level) const { return space_sizes[level]; }
    const Matrix& kernel(int k) const { return kernels[k - 1]; }  // M_k, k in [1, n]

    // Throws ValidationError naming the first offending entry.
    void validate() const;
};

/// Mixed-radix linearization of trajectories (x_0,...,x_k), x_0 most
/// significant. Level-k paths index the product space S'_0 x ... x S'_k.
class PathIndexer {
  public:
    explicit PathIndexer(const std::vector<int>& space_sizes);

    int levels() const { return static_cast<int>(sizes_.size()) - 1; }
    int64_t count(int level) const { return counts_[level]; }

    int64_t encode(std::span<const int> coords) const;
    std::vector<int> decode(int64_t linear, int level) const;

    // Linear index of the path extended by one coordinate.
    int64_t extend(int64_t linear, int level_from, int next_coord) const {
        return linear * sizes_[level_from + 1] + next_coord;
    }
    // Terminal coordinate of a level-k path.
    int terminal(int64_t linear, int level) const {
        return static_cast<int>(linear % sizes_[level]);
    }

  private:
    std::vector<int> sizes_;
    std::vector<int64_t> counts_;  // counts_[k] = prod_{j<=k} d_j
};

/// A reference trajectory (z'_0,...,z'_n) in marginal coordinates. In the
/// path-space model the level-k point of this trajectory is the whole prefix
/// (z'_0,...,z'_k).
struct FrozenPath {
    std::vector<int> coords;

    int level() const { return static_cast<int>(coords.size()) - 1; }
    int64_t prefix_linear(const PathIndexer& ix, int level) const {
        return ix.encode({coords.data(), static_cast<size_t>(level) + 1});
    }
};

/// Particle count that may be the exact infinite-population limit. The limit
/// is a flag, not a large number: limiting identities are evaluated exactly.
struct ParticleCount {
    static ParticleCount infinite() { return ParticleCount{}; }
    static ParticleCount of(int n) {
        ParticleCount c;
        c.n_ = n;
        return c;
    }

    bool is_infinite() const { return n_ < 0; }
    int value() const { return n_; }
    // 1/N, zero in the limit.
    double insertion_rate() const { return is_infinite() ? 0.0 : 1.0 / n_; }

  private:
    int n_ = -1;
};

/// Path-space lift: the state at level k is the full trajectory prefix, the
/// potential reads the terminal coordinate, the kernel extends the prefix by
/// one step. Dense kernels, so this is gated by `state_cap` total entries.
FkModel lift_to_path(const FkModel& model, int64_t state_cap = kDefaultStateCap);

/// Rescale every potential so that eta_k(G_k) = 1; the normalized laws and
/// the normalized semigroups are unchanged. `exact_etas` must be the exact
/// eta_k of this model (see oracle::exact_measures).
FkModel normalize_potentials(const FkModel& model, const std::vector<Vector>& exact_etas);

/// prod_{p < upto} G_p(x_p) along a trajectory; the empty product is 1.
double eval_product_weight(const FkModel& model, std::span<const int> path, int upto);

/// Same weight accumulated in log domain, as a guard against input mistakes.
double eval_product_weight_log(const FkModel& model, std::span<const int> path, int upto);

// JSON model file I/O. Schema: {"horizon", "space_sizes", "kernels",
// "potentials", "initial"} with kernels as row-major matrices.
FkModel load_model_json(const std::string& path);
FkModel parse_model_json(const std::string& text);
std::string model_to_json(const FkModel& model);

// FNV-1a over the canonical serialization; identifies a model in manifests.
std::string model_hash(const FkModel& model);

}  // namespace fklab
