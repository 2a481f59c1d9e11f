#include <algorithm>
#include <cmath>
#include <functional>

#include "fklab/combinatorics.hpp"
#include "fklab/smc.hpp"
#include "fklab/verify.hpp"

namespace fklab {
namespace verify {

namespace {

constexpr double kSlack = 1e-9;

BoundsReport exact_report(const std::string& id, double margin, const std::string& where,
                          const std::string& context = "") {
    BoundsReport r;
    r.id = id;
    r.lower = 0.0;
    r.estimate = margin;
    r.z_id = where;
    r.context = context;
    r.verdict = check_exact(margin, 0.0, std::numeric_limits<double>::infinity(), kSlack);
    return r;
}

BoundsReport skipped(const std::string& id, const std::string& why) {
    BoundsReport r;
    r.id = id;
    r.verdict = Verdict::kSkipped;
    r.context = why;
    return r;
}

// Enumerates all d^N iid outcomes and accumulates fn(values, probability).
void enumerate_iid(int d, int N, const Vector& p,
                   const std::function<void(const std::vector<int>&, double)>& fn) {
    std::vector<int> values(N, 0);
    while (true) {
        double prob = 1.0;
        for (int i = 0; i < N; ++i) prob *= p[values[i]];
        fn(values, prob);
        int j = N - 1;
        while (j >= 0 && ++values[j] == d) values[j--] = 0;
        if (j < 0) break;
    }
}

double mean_of(const Vector& p, const Vector& f) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += p[i] * f[i];
    return s;
}

struct RatioCase {
    std::string name;
    int d;
    int N;
    Vector p;
    Vector f;
};

}  // namespace

std::vector<BoundsReport> empirical_stability_suite() {
    std::vector<RatioCase> cases = {
        {"two_point", 2, 3, {0.5, 0.5}, {1.0, 2.0}},
        {"constant_f", 2, 4, {0.3, 0.7}, {2.0, 2.0}},
        {"three_point", 3, 5, {0.2, 0.5, 0.3}, {1.0, 1.5, 3.0}},
        {"skewed", 2, 6, {0.1, 0.9}, {1.0, 1.25}},
        {"three_point_small", 3, 6, {0.25, 0.25, 0.5}, {2.0, 2.5, 2.2}},
    };

    std::vector<BoundsReport> out;
    for (const auto& c : cases) {
        const double a = min_element(c.f), b = max_element(c.f);
        const double ratio = b / a;
        const double mu = mean_of(c.p, c.f);

        // Leave-one-in conditional mean against the full mean.
        double margin1 = std::numeric_limits<double>::infinity();
        for (int v = 0; v < c.d; ++v) {
            const double cond = c.f[v] / c.N + (1.0 - 1.0 / c.N) * mu;
            margin1 = std::min(margin1, (ratio - 1.0) / c.N - std::abs(cond / mu - 1.0));
        }
        BoundsReport r1 = exact_report("empirical.leave_one_in_ratio", margin1, c.name);
        r1.N = c.N;
        out.push_back(r1);

        // Jensen gap of the inverse empirical mean, by full outcome
        // enumeration.
        double inv_mean = 0.0;
        enumerate_iid(c.d, c.N, c.p, [&](const std::vector<int>& values, double prob) {
            double m = 0.0;
            for (int v : values) m += c.f[v];
            inv_mean += prob / (m / c.N);
        });
        const double product = mu * inv_mean;
        const double upper = 1.0 + ratio * (ratio - 1.0) * (ratio - 1.0) / c.N;
        BoundsReport r2;
        r2.id = "empirical.inverse_mean_product";
        r2.z_id = c.name;
        r2.N = c.N;
        r2.lower = 1.0;
        r2.upper = upper;
        r2.estimate = product;
        r2.verdict = check_exact(product, 1.0, upper, kSlack);
        out.push_back(r2);
    }
    return out;
}

std::vector<BoundsReport> empirical_ratio_suite() {
    struct Case {
        std::string name;
        int d;
        int N;
        Vector p;
        Vector f;
        Vector g;
    };
    std::vector<Case> cases = {
        {"indicator_over_tilt", 2, 6, {0.5, 0.5}, {0.0, 1.0}, {1.0, 1.2}},
        {"below_threshold", 2, 2, {0.5, 0.5}, {0.0, 1.0}, {1.0, 1.2}},
        {"f_equals_g", 2, 5, {0.4, 0.6}, {1.0, 1.5}, {1.0, 1.5}},
        {"three_point", 3, 6, {0.3, 0.4, 0.3}, {0.5, 0.0, 2.0}, {1.0, 1.3, 1.1}},
        {"wide_g", 2, 6, {0.5, 0.5}, {1.0, 0.0}, {1.0, 1.5}},
    };

    std::vector<BoundsReport> out;
    for (const auto& c : cases) {
        const double a = min_element(c.g), b = max_element(c.g);
        const double c1 = b / a - 1.0;
        const double c2 = constants::chain(c1);
        if (c.N <= 2.0 * (c1 + 1.0)) {
            out.push_back(skipped("empirical.ratio_sandwich", c.name + ": N <= 2(c1+1)"));
            continue;
        }

        double expect_ratio = 0.0;
        enumerate_iid(c.d, c.N, c.p, [&](const std::vector<int>& values, double prob) {
            double mf = 0.0, mg = 0.0;
            for (int v : values) {
                mf += c.f[v];
                mg += c.g[v];
            }
            expect_ratio += prob * (mf / mg);
        });
        const double reference = mean_of(c.p, c.f) / mean_of(c.p, c.g);
        BoundsReport r;
        r.id = "empirical.ratio_sandwich";
        r.N = c.N;
        r.z_id = c.name;
        r.lower = (1.0 - c1 / c.N) * reference;
        r.upper = (1.0 + c2 / c.N) * reference;
        r.estimate = expect_ratio;
        r.verdict = check_exact(expect_ratio, r.lower, r.upper, kSlack);
        out.push_back(r);
    }
    return out;
}

namespace {

// Average of f over all ordered N^q tuples (with repetition).
double full_tensor_average(const std::vector<int>& values, int d, int q, const Vector& f) {
    const int n = static_cast<int>(values.size());
    double total = 0.0;
    std::vector<int> c(q, 0);
    while (true) {
        int64_t idx = 0;
        for (int a = 0; a < q; ++a) idx = idx * d + values[c[a]];
        total += f[idx];
        int j = q - 1;
        while (j >= 0 && ++c[j] == n) c[j--] = 0;
        if (j < 0) break;
    }
    return total / std::pow(static_cast<double>(n), q);
}

// m(X)^{distinct q} over indices outside J.
double tensor_average_excluding(const std::vector<int>& values, int d, int q, const Vector& f,
                                int exclude_first) {
    std::vector<int> rest(values.begin() + exclude_first, values.end());
    return empirical_tensor({rest.data(), rest.size()}, d, q, f);
}

// m-average of f depending only on the count of ones, |E| = 2: exact value
// of the distinct-q-tuple average for a sample with t ones among N.
double tensor_average_by_count(int N, int q, int t, const Vector& f) {
    const int patterns = 1 << q;
    double total = 0.0;
    for (int b = 0; b < patterns; ++b) {
        int ones = 0;
        for (int j = 0; j < q; ++j)
            if (b & (1 << j)) ++ones;
        // Pattern bit j maps to tuple coordinate j (most significant first);
        // the dense index of the pattern as a tuple over {0,1}.
        int64_t idx = 0;
        for (int j = 0; j < q; ++j) idx = idx * 2 + ((b >> (q - 1 - j)) & 1);
        const double ways = static_cast<double>(falling_factorial(t, ones)) *
                            static_cast<double>(falling_factorial(N - t, q - ones));
        total += f[idx] * ways;
    }
    return total / static_cast<double>(falling_factorial(N, q));
}

double binom_pmf(int n, int k, double p) {
    return static_cast<double>(binomial(n, k)) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace

std::vector<BoundsReport> tensor_enumeration_suite() {
    std::vector<BoundsReport> out;

    // Coalescence identity: the distinct-tuple measure composed with the
    // coalescence operator reproduces the full product measure, exhaustively
    // over all two-point samples.
    for (auto [N, q] : std::vector<std::pair<int, int>>{{4, 2}, {5, 2}, {6, 2}, {4, 3}, {5, 3}}) {
        const int d = 2;
        const Matrix C = oracle::coalescence_matrix(ParticleCount::of(N), q, d);
        const int64_t dq = oracle::tuple_count(d, q);
        std::vector<Vector> fs;
        for (int64_t i = 0; i < dq; ++i) {
            Vector f(dq, 0.0);
            f[i] = 1.0;
            fs.push_back(std::move(f));
        }
        Vector dense(dq);
        for (int64_t i = 0; i < dq; ++i) dense[i] = 0.3 + 0.11 * static_cast<double>(i);
        fs.push_back(std::move(dense));

        double margin = std::numeric_limits<double>::infinity();
        for (int assign = 0; assign < (1 << N); ++assign) {
            std::vector<int> values(N);
            for (int i = 0; i < N; ++i) values[i] = (assign >> i) & 1;
            for (const Vector& f : fs) {
                const Vector cf = matvec(C, f);
                const double lhs = full_tensor_average(values, d, q, f);
                const double rhs = empirical_tensor({values.data(), values.size()}, d, q, cf);
                margin = std::min(margin, 1e-12 - std::abs(lhs - rhs));
            }
        }
        BoundsReport r = exact_report("tensor.coalescence_identity", margin,
                                      "N" + std::to_string(N) + ".q" + std::to_string(q));
        r.N = N;
        r.q = q;
        out.push_back(r);
    }

    // Two-particle coalescence weights: the (1-1/N, 1/N) two-term form gives
    // the same distinct-pair averages as the general operator.
    {
        const int N = 4, d = 3, q = 2;
        const Matrix C = oracle::coalescence_matrix(ParticleCount::of(N), q, d);
        double margin = std::numeric_limits<double>::infinity();
        Vector f(d * d);
        for (int i = 0; i < d * d; ++i) f[i] = 0.2 + 0.13 * i;
        Vector f_diag(d * d);
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) f_diag[x * d + y] = f[x * d + x];
        for (int assign = 0; assign < 81; ++assign) {
            std::vector<int> values(N);
            int rem = assign;
            for (int i = 0; i < N; ++i) {
                values[i] = rem % d;
                rem /= d;
            }
            const Vector cf = matvec(C, f);
            const double general = empirical_tensor({values.data(), values.size()}, d, q, cf);
            const double two_term =
                (1.0 - 1.0 / N) * empirical_tensor({values.data(), values.size()}, d, q, f) +
                (1.0 / N) * empirical_tensor({values.data(), values.size()}, d, q, f_diag);
            margin = std::min(margin, 1e-12 - std::abs(general - two_term));
        }
        BoundsReport r = exact_report("tensor.pair_weights", margin, "N4.q2.d3");
        r.N = N;
        r.q = q;
        out.push_back(r);
    }

    // Falling-factorial decomposition: the distinct-tuple average equals the
    // J-avoiding average of the mixed function, for every sample. The
    // decomposition reorders tuple slots, so it is stated for symmetric
    // functions; symmetrize the dense test function first.
    for (auto [N, q] : std::vector<std::pair<int, int>>{{5, 2}, {7, 3}}) {
        const int d = 2;
        const int64_t dq = oracle::tuple_count(d, q);
        Vector f(dq, 0.0);
        {
            Vector raw(dq);
            for (int64_t i = 0; i < dq; ++i) raw[i] = 1.0 + 0.37 * static_cast<double>(i);
            std::vector<int> perm(q);
            for (int j = 0; j < q; ++j) perm[j] = j;
            int n_perm = 0;
            do {
                ++n_perm;
                std::vector<int> coords(q);
                for (int64_t t = 0; t < dq; ++t) {
                    int64_t rem = t;
                    for (int j = q - 1; j >= 0; --j) {
                        coords[j] = static_cast<int>(rem % d);
                        rem /= d;
                    }
                    int64_t src = 0;
                    for (int j = 0; j < q; ++j) src = src * d + coords[perm[j]];
                    f[t] += raw[src];
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            for (double& v : f) v /= n_perm;
        }

        double margin = std::numeric_limits<double>::infinity();
        for (int assign = 0; assign < (1 << N); ++assign) {
            std::vector<int> values(N);
            for (int i = 0; i < N; ++i) values[i] = (assign >> i) & 1;

            const double lhs = empirical_tensor({values.data(), values.size()}, d, q, f);

            // f_J: mixture over k of partial substitutions of J-values into
            // the leading k tuple slots.
            Vector f_J(dq, 0.0);
            const double nq = static_cast<double>(falling_factorial(N, q));
            for (int k = 0; k <= q; ++k) {
                Vector fk(dq, 0.0);
                // All injective maps from the first k slots into J = {0..q-1}.
                std::vector<int> a(k, 0);
                int inj_count = 0;
                std::function<void(int, uint32_t)> rec = [&](int pos, uint32_t used) {
                    if (pos == k) {
                        ++inj_count;
                        for (int64_t t = 0; t < dq; ++t) {
                            // Replace the leading k coordinates of tuple t by
                            // the values X^{a(1)},...,X^{a(k)}.
                            int64_t idx = 0;
                            int64_t rem = t;
                            std::vector<int> coords(q);
                            for (int j = q - 1; j >= 0; --j) {
                                coords[j] = static_cast<int>(rem % d);
                                rem /= d;
                            }
                            for (int j = 0; j < k; ++j) coords[j] = values[a[j]];
                            for (int j = 0; j < q; ++j) idx = idx * d + coords[j];
                            fk[t] += f[idx];
                        }
                        return;
                    }
                    for (int j = 0; j < q; ++j) {
                        if (used & (1u << j)) continue;
                        a[pos] = j;
                        rec(pos + 1, used | (1u << j));
                    }
                };
                rec(0, 0);
                const double qk = static_cast<double>(falling_factorial(q, k));
                for (double& v : fk) v /= qk;
                const double coef = static_cast<double>(binomial(q, k)) * qk *
                                    static_cast<double>(falling_factorial(N - q, q - k)) / nq;
                for (int64_t t = 0; t < dq; ++t) f_J[t] += coef * fk[t];
                (void)inj_count;
            }
            const double rhs = tensor_average_excluding(values, d, q, f_J, q);
            margin = std::min(margin, 1e-12 - std::abs(lhs - rhs));
        }
        BoundsReport r = exact_report("tensor.falling_factorial_decomposition", margin,
                                      "N" + std::to_string(N) + ".q" + std::to_string(q));
        r.N = N;
        r.q = q;
        out.push_back(r);
    }

    // Conditional stability of distinct-tuple averages (and the inverse-mean
    // product), at the particle counts where the stated thresholds hold.
    {
        struct Case {
            int N;
            int q;
            double p;
        };
        for (const Case c : std::vector<Case>{{8, 2, 0.5}, {8, 2, 0.3}, {18, 3, 0.4}}) {
            if (c.N < 2 * c.q * c.q) {
                out.push_back(skipped("tensor.conditional_stability", "N < 2 q^2"));
                continue;
            }
            const int64_t dq = oracle::tuple_count(2, c.q);
            Vector f(dq);
            for (int64_t i = 0; i < dq; ++i) f[i] = 1.0 + static_cast<double>(i) / (dq - 1);
            const double ratio = max_element(f) / min_element(f);

            // Unconditional and J-conditional means, exactly, via the
            // ones-count representation.
            double uncond = 0.0;
            double inv_mean = 0.0;
            for (int t = 0; t <= c.N; ++t) {
                const double pt = binom_pmf(c.N, t, c.p);
                const double v = tensor_average_by_count(c.N, c.q, t, f);
                uncond += pt * v;
                inv_mean += pt / v;
            }
            double margin_ratio = std::numeric_limits<double>::infinity();
            for (int tj = 0; tj <= c.q; ++tj) {
                double cond = 0.0;
                for (int s = 0; s <= c.N - c.q; ++s)
                    cond += binom_pmf(c.N - c.q, s, c.p) *
                            tensor_average_by_count(c.N, c.q, tj + s, f);
                const double bound = 2.0 * c.q * c.q / c.N * (ratio - 1.0);
                margin_ratio = std::min(margin_ratio, bound - std::abs(cond / uncond - 1.0));
            }
            BoundsReport r1 =
                exact_report("tensor.conditional_stability", margin_ratio,
                             "N" + std::to_string(c.N) + ".q" + std::to_string(c.q));
            r1.N = c.N;
            r1.q = c.q;
            out.push_back(r1);

            const double product = uncond * inv_mean;
            const double upper =
                1.0 + 2.0 * c.q * c.q / c.N * ratio * (ratio - 1.0) * (ratio - 1.0);
            BoundsReport r2;
            r2.id = "tensor.inverse_mean_product";
            r2.N = c.N;
            r2.q = c.q;
            r2.lower = 1.0;
            r2.upper = upper;
            r2.estimate = product;
            r2.verdict = check_exact(product, 1.0, upper, kSlack);
            out.push_back(r2);
        }
    }

    // Distinct-tuple ratio sandwich.
    {
        struct Case {
            int N;
            int q;
            double p;
        };
        for (const Case c : std::vector<Case>{{6, 2, 0.5}, {5, 2, 0.4}, {8, 3, 0.5}}) {
            const int d = 2;
            const int64_t dq = oracle::tuple_count(d, c.q);
            Vector f(dq), g(dq);
            for (int64_t i = 0; i < dq; ++i) {
                f[i] = (i % 3 == 0) ? 0.0 : 1.0 + 0.2 * static_cast<double>(i % 2);
                g[i] = 1.0 + 0.2 * static_cast<double>(i) / (dq - 1);
            }
            const double cc = max_element(g) / min_element(g) - 1.0;
            const double c1 = constants::c1_tensor(c.q, cc);
            const double c2 = constants::c2_tensor(c.q, cc);
            if (c.N <= 4.0 * cc * c.q * c.q || c.N < 2 * c.q) {
                out.push_back(skipped("tensor.ratio_sandwich", "threshold not met"));
                continue;
            }

            Vector pvec{1.0 - c.p, c.p};
            double expect_ratio = 0.0;
            double ef = 0.0, eg = 0.0;
            enumerate_iid(d, c.N, pvec, [&](const std::vector<int>& values, double prob) {
                const double mf = empirical_tensor({values.data(), values.size()}, d, c.q, f);
                const double mg = empirical_tensor({values.data(), values.size()}, d, c.q, g);
                expect_ratio += prob * (mf / mg);
                ef += prob * mf;
                eg += prob * mg;
            });
            BoundsReport r;
            r.id = "tensor.ratio_sandwich";
            r.N = c.N;
            r.q = c.q;
            r.z_id = "p" + std::to_string(c.p);
            r.lower = (1.0 - c1 / c.N) * ef / eg;
            r.upper = (1.0 + c2 / c.N) * ef / eg;
            r.estimate = expect_ratio;
            r.verdict = check_exact(expect_ratio, r.lower, r.upper, kSlack);
            out.push_back(r);
        }
    }

    return out;
}

std::vector<BoundsReport> combinatorics_suite() {
    std::vector<BoundsReport> out;

    // Falling-factorial convolution, exact integers on a small grid.
    {
        double margin = std::numeric_limits<double>::infinity();
        std::string where;
        for (int N = 2; N <= 12; ++N)
            for (int q = 1; q < N && q <= 4; ++q) {
                uint64_t s = 0;
                for (int k = 0; k <= q; ++k)
                    s += binomial(q, k) * falling_factorial(q, k) *
                         falling_factorial(N - q, q - k);
                const double diff = s == falling_factorial(N, q) ? 0.0 : -1.0;
                if (diff < margin) {
                    margin = diff;
                    where = "N" + std::to_string(N) + ".q" + std::to_string(q);
                }
            }
        out.push_back(exact_report("comb.vandermonde_exact", margin, where));
    }

    // Same identity in floating point up to N = 64.
    {
        double margin = std::numeric_limits<double>::infinity();
        std::string where;
        for (int N = 2; N <= 64; ++N)
            for (int q = 1; q < N && q <= 6; ++q) {
                double s = 0.0;
                for (int k = 0; k <= q; ++k) {
                    double term = static_cast<double>(binomial(q, k)) *
                                  static_cast<double>(falling_factorial(q, k));
                    for (int i = 0; i < q - k; ++i) term *= static_cast<double>(N - q - i);
                    for (int i = 0; i < q; ++i) term /= static_cast<double>(N - i);
                    s += term;
                }
                const double m = 1e-12 - std::abs(s - 1.0);
                if (m < margin) {
                    margin = m;
                    where = "N" + std::to_string(N) + ".q" + std::to_string(q);
                }
            }
        out.push_back(exact_report("comb.vandermonde_double", margin, where));
    }

    // Distinct-fraction envelope: 1 - (q-1)^2/N <= (1-(q-1)/N)^{q-1}
    // <= (N)_q / N^q <= 1, for 2 <= q < N <= 64.
    {
        double margin = std::numeric_limits<double>::infinity();
        std::string where;
        for (int N = 3; N <= 64; ++N)
            for (int q = 2; q < N; ++q) {
                const double r = falling_ratio(N, q);
                const double mid = std::pow(1.0 - static_cast<double>(q - 1) / N, q - 1);
                const double lo = 1.0 - static_cast<double>(q - 1) * (q - 1) / N;
                const double m = std::min({mid - lo, r - mid, 1.0 - r});
                if (m < margin) {
                    margin = m;
                    where = "N" + std::to_string(N) + ".q" + std::to_string(q);
                }
            }
        out.push_back(exact_report("comb.distinct_fraction_envelope", margin, where));
    }

    // Collision excess: 1 - (N-q)_q/(N)_q <= 2 q^2 / N on the same grid.
    {
        double margin = std::numeric_limits<double>::infinity();
        std::string where;
        for (int N = 3; N <= 64; ++N)
            for (int q = 2; q < N; ++q) {
                double ratio = 1.0;
                for (int i = 0; i < q; ++i) {
                    const double num = static_cast<double>(N - q - i);
                    ratio *= num > 0.0 ? num / (N - i) : 0.0;
                }
                const double m = 2.0 * q * q / N - (1.0 - ratio);
                if (m < margin) {
                    margin = m;
                    where = "N" + std::to_string(N) + ".q" + std::to_string(q);
                }
            }
        out.push_back(exact_report("comb.collision_excess", margin, where));
    }

    // Stirling growth bounds. The halved form needs l >= 1 (at l = 0 it
    // would read 1 <= 1/2); the plain form holds from l = 0.
    {
        double margin = std::numeric_limits<double>::infinity();
        std::string where;
        for (int q = 2; q <= 10; ++q)
            for (int l = 0; l < q; ++l) {
                const double s = static_cast<double>(stirling2(q, q - l));
                const double plain =
                    static_cast<double>(binomial(q, l)) * std::pow(static_cast<double>(q), l) - s;
                double m = plain;
                if (l >= 1) {
                    const double halved = 0.5 * static_cast<double>(binomial(q, l)) *
                                              std::pow(static_cast<double>(q - l), l) -
                                          s;
                    m = std::min(m, halved);
                }
                if (m < margin) {
                    margin = m;
                    where = "q" + std::to_string(q) + ".l" + std::to_string(l);
                }
            }
        out.push_back(exact_report("comb.stirling_growth", margin, where));
    }

    return out;
}

}  // namespace verify
}  // namespace fklab
