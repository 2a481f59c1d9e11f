#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fklab/model.hpp"
#include "fklab/oracle.hpp"

namespace fklab {
namespace verify {

enum class Verdict { kPass, kFail, kInconclusive, kSkipped, kConstantDisputed };
std::string to_string(Verdict v);

/// Replicated Monte Carlo point estimate with its standard error.
struct Estimate {
    std::string name;
    double point = 0.0;
    double std_error = 0.0;
    int64_t replicates = 0;
    double ci_level = 0.9999;

    double half_width() const;
};

/// One verified inequality: theoretical interval, estimate, verdict.
struct BoundsReport {
    std::string id;
    std::string model;
    int n = 0;
    int N = 0;
    int q = 0;
    std::string f_id;
    std::string z_id;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double estimate = 0.0;
    double std_error = 0.0;
    Verdict verdict = Verdict::kSkipped;
    std::string context;
};

double normal_quantile(double p);

/// Mean and standard error over R independent replicates. Replicates run in
/// parallel but land in a fixed-order buffer, and aggregation is order-fixed
/// pairwise summation, so the result is bitwise identical for any thread
/// count. A non-finite replicate value aborts with its replicate id.
Estimate replicate_mean(const std::string& name, int64_t replicates,
                        const std::function<double(uint64_t)>& fn, int threads,
                        double ci_level = 0.9999);

/// PASS if the confidence interval lies strictly inside [lower, upper], FAIL
/// if strictly outside, INCONCLUSIVE if it straddles a bound edge.
Verdict check_sandwich(const Estimate& est, double lower, double upper);

/// Equality target: PASS if the target lies inside the confidence interval.
Verdict check_equality(const Estimate& est, double target);

/// Deterministic quantity against exact bounds with absolute slack.
Verdict check_exact(double value, double lower, double upper, double slack = 1e-9);

/// Every first-order constant used by the bound suites, in one place.
namespace constants {
// c2-style chain: 2 c1 (2 c1 (c1 + 1) + 1).
double chain(double c1);
// Bias sandwich constants for the plain particle system.
double c1_bias(double rho);  // rho^2 - 1
double c2_bias(double rho);
// Gibbs-kernel expansion constants (the frozen-semigroup mass ratio is
// (5/2) rho^2 for normalized potentials, hence this c1).
double c1_pg(double rho);  // (5/2) rho^2 - 1
double c2_pg(double rho);
// Oscillation bound for the frozen-path kernel, from the frozen-measure
// sandwich with [0,1]-valued test functions.
double c_osc(double rho);  // 6 (1 + 2 rho^2)
// Tensor-suite constants: c = b/a - 1 for the tensor semigroup mass ratio.
double c1_tensor(int q, double c);  // 2 q^2 c
double c2_tensor(int q, double c);  // 2 c1 (1 + 2 c (c + 1))
}  // namespace constants

struct StatParams {
    int64_t replicates = 100000;
    uint64_t master_seed = 20240801;
    int threads = 0;  // 0: hardware concurrency
    double ci_level = 0.9999;
};

int resolve_threads(int requested);

// ---- Exact suites (dense linear algebra, zero-tolerance) -------------------

/// Frozen one-step/semigroup sandwiches and mass bounds on the path space of
/// a normalized model, over every frozen trajectory and every [0,1]-valued
/// test function (checked at the extreme points). `scale` rescales the bound
/// constants; 1.0 for verification, <1 for the negative control.
std::vector<BoundsReport> frozen_semigroup_suite(const FkModel& normalized, double rho,
                                                 const std::vector<int>& particle_grid,
                                                 double scale = 1.0);

/// Frozen-measure sandwiches (unnormalized and normalized) plus the
/// oscillation/Dobrushin bound on the frozen-path kernel.
std::vector<BoundsReport> frozen_measure_suite(const FkModel& normalized, double rho,
                                               const std::vector<int>& particle_grid,
                                               double scale = 1.0);

/// Exhaustive one-step identity for tensor empirical measures of the dual
/// system at N = 3: enumeration of the insertion slot and all particle
/// placements against the frozen tensor one-step operator.
std::vector<BoundsReport> dual_tensor_identity_suite(const FkModel& model);

/// Exact transfer identity between forward extension and backward
/// reconstruction on explicit particle clouds.
std::vector<BoundsReport> backward_transfer_suite(const FkModel& model);

// ---- Enumeration suites (exhaustive, exact) -------------------------

std::vector<BoundsReport> empirical_stability_suite();
std::vector<BoundsReport> empirical_ratio_suite();
std::vector<BoundsReport> tensor_enumeration_suite();
std::vector<BoundsReport> combinatorics_suite();

// ---- Statistical suites ------------------------------------------------------

/// E[Z_n m(xi_n)(g)] = gamma_n(g), the unbiasedness of the unnormalized flow.
std::vector<BoundsReport> unbiasedness_suite(const FkModel& model, int num_particles,
                                             const StatParams& sp);

/// Bias sandwich and |bias| bound over a particle grid, plus the 1/N scaling
/// checks (positive slope, quartering between N and 4N).
std::vector<BoundsReport> bias_sandwich_suite(const FkModel& normalized, double rho,
                                              const std::vector<int>& particle_grid,
                                              const StatParams& sp, double scale = 1.0);

/// Ancestral and backward path laws agree: two-sample equality per test
/// function, including per-level marginals.
std::vector<BoundsReport> backward_equality_suite(const FkModel& model, int num_particles,
                                                  const StatParams& sp);

/// Propagation-of-chaos sandwiches for q-tuple empirical products: against
/// the exact q-tensor law and against the plain q-th power of the limit.
std::vector<BoundsReport> chaos_suite(const FkModel& normalized, double rho, int q,
                                      const std::vector<int>& particle_grid, const StatParams& sp);

/// Gibbs-kernel expansion around the frozen-path law, backward minorization,
/// and the combined minorization by the target law.
std::vector<BoundsReport> pg_kernel_suite(const FkModel& normalized, double rho,
                                          const std::vector<int>& particle_grid,
                                          const StatParams& sp);

/// Start exactly at the target law, take one sweep, still at the target law.
std::vector<BoundsReport> pg_invariance_suite(const FkModel& normalized, int num_particles,
                                              const StatParams& sp);

/// Geometric decay of the Gibbs chain toward the target, fitted rate against
/// the minorization-implied rate.
std::vector<BoundsReport> pg_contraction_suite(const FkModel& normalized, double rho,
                                               int num_particles, int steps, const StatParams& sp);

/// Dual-system tensor sandwich against the frozen tensor law, plus the dual
/// unnormalized first-moment identity.
std::vector<BoundsReport> dual_chaos_suite(const FkModel& normalized, double rho, int q,
                                           const std::vector<int>& particle_grid,
                                           const StatParams& sp);

/// Corrupted-constant run: shrinks every bound constant by 1/100; must
/// produce failures, guarding the power of the whole harness.
std::vector<BoundsReport> negative_control_suite(const FkModel& normalized, double rho,
                                                 const StatParams& sp);

// ---- Helpers shared by suites and tests -------------------------------------

/// Path linear index of the lowest-probability trajectory under eta_n.
int64_t worst_case_path(const FkModel& model);

/// [0,1]-valued path test functions with stable ids (dense over the path
/// space of the model).
std::vector<std::pair<std::string, Vector>> path_test_functions(const FkModel& model);

/// Marginal test functions on the terminal space.
std::vector<std::pair<std::string, Vector>> terminal_test_functions(const FkModel& model);

struct SuiteSummary {
    int pass = 0, fail = 0, inconclusive = 0, skipped = 0, disputed = 0;
};
SuiteSummary summarize(const std::vector<BoundsReport>& reports);

}  // namespace verify
}  // namespace fklab
