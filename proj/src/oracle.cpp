#include "fklab/oracle.hpp"

#include <cmath>
#include <string>

#include "fklab/combinatorics.hpp"
#include "fklab/errors.hpp"
#include "json.hpp"

namespace fklab {
namespace oracle {

namespace {

// Q_k applied to a measure on S_{k-1}: weight by G_{k-1}, transport by M_k.
Vector fk_step(const FkModel& model, int k, const Vector& mu) {
    Vector weighted(mu.size());
    const Vector& g = model.potentials[k - 1];
    for (size_t x = 0; x < mu.size(); ++x) weighted[x] = mu[x] * g[x];
    return measure_apply(weighted, model.kernel(k));
}

// Dense Q_k matrix.
Matrix fk_step_matrix(const FkModel& model, int k) {
    const Matrix& m = model.kernel(k);
    Matrix q(m.rows, m.cols);
    const Vector& g = model.potentials[k - 1];
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) q(r, c) = g[r] * m(r, c);
    return q;
}

}  // namespace

ExactMeasures exact_measures(const FkModel& model, int64_t state_cap) {
    model.validate();
    for (int d : model.space_sizes)
        if (d > state_cap) throw CapacityError("state space exceeds cap");

    ExactMeasures out;
    out.gamma.resize(model.horizon + 1);
    out.eta.resize(model.horizon + 1);
    out.mass.resize(model.horizon + 1);
    out.potential_mean.resize(model.horizon + 1);

    out.gamma[0] = model.initial;
    for (int k = 1; k <= model.horizon; ++k) out.gamma[k] = fk_step(model, k, out.gamma[k - 1]);
    for (int k = 0; k <= model.horizon; ++k) {
        out.mass[k] = sum(out.gamma[k]);
        out.eta[k] = scaled(out.gamma[k], 1.0 / out.mass[k]);
        out.potential_mean[k] = dot(out.eta[k], model.potentials[k]);
    }
    return out;
}

Matrix semigroup(const FkModel& model, int p, int n) {
    if (p < 0 || n > model.horizon || p > n) throw ValidationError("semigroup: level out of range");
    Matrix q = Matrix::identity(model.size_at(p));
    for (int k = p + 1; k <= n; ++k) q = matmul(q, fk_step_matrix(model, k));
    return q;
}

Matrix normalized_semigroup(const FkModel& model, int p, int n, const Vector& eta_p) {
    Matrix q = semigroup(model, p, n);
    Vector mass(q.rows);
    for (int r = 0; r < q.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < q.cols; ++c) s += q(r, c);
        mass[r] = s;
    }
    const double scale = dot(eta_p, mass);
    for (double& v : q.a) v /= scale;
    return q;
}

std::vector<std::vector<Matrix>> semigroup_table(const FkModel& model) {
    const int n = model.horizon;
    std::vector<Matrix> steps;
    steps.reserve(n);
    for (int k = 1; k <= n; ++k) steps.push_back(fk_step_matrix(model, k));

    std::vector<std::vector<Matrix>> table(n + 1);
    for (int p = 0; p <= n; ++p) {
        table[p].push_back(Matrix::identity(model.size_at(p)));
        for (int q = p + 1; q <= n; ++q) table[p].push_back(matmul(table[p].back(), steps[q - 1]));
    }
    return table;
}

AssumptionReport assumption_constants(const FkModel& model) {
    model.validate();
    const int n = model.horizon;
    auto table = semigroup_table(model);

    AssumptionReport rep;
    rep.rho_by_horizon.assign(n + 1, 1.0);
    rep.alpha.assign(n + 1, 0.0);

    for (int p = 0; p <= n; ++p) {
        for (int q = p; q <= n; ++q) {
            const Matrix& m = table[p][q - p];
            Vector mass(m.rows);
            for (int r = 0; r < m.rows; ++r) {
                double s = 0.0;
                for (int c = 0; c < m.cols; ++c) s += m(r, c);
                mass[r] = s;
            }
            const double lo = min_element(mass);
            if (!(lo > 0.0)) throw ValidationError("assumption_constants: zero semigroup mass");
            const double ratio = max_element(mass) / lo;
            for (int h = q; h <= n; ++h)
                if (ratio > rep.rho_by_horizon[h]) rep.rho_by_horizon[h] = ratio;

            // Worst TV distance between the normalized rows at lag q - p.
            double worst = 0.0;
            for (int x = 0; x < m.rows; ++x) {
                for (int y = x + 1; y < m.rows; ++y) {
                    double d = 0.0;
                    for (int c = 0; c < m.cols; ++c)
                        d += std::abs(m(x, c) / mass[x] - m(y, c) / mass[y]);
                    if (d > worst) worst = d;
                }
            }
            if (worst > rep.alpha[q - p]) rep.alpha[q - p] = worst;
        }
    }
    rep.rho_n = rep.rho_by_horizon[n];
    rep.rho_sup_estimate = rep.rho_n;

    rep.beta1 = model.potentials[0][0];
    rep.beta2 = model.potentials[0][0];
    for (const Vector& g : model.potentials) {
        rep.beta1 = std::min(rep.beta1, min_element(g));
        rep.beta2 = std::max(rep.beta2, max_element(g));
    }
    return rep;
}

double dobrushin_beta(const Matrix& kernel) {
    for (int r = 0; r < kernel.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < kernel.cols; ++c) {
            if (kernel(r, c) < -1e-12) throw ValidationError("dobrushin_beta: negative entry");
            s += kernel(r, c);
        }
        if (std::abs(s - 1.0) > 1e-9) throw ValidationError("dobrushin_beta: non-stochastic row");
    }
    double worst = 0.0;
    for (int x = 0; x < kernel.rows; ++x)
        for (int y = x + 1; y < kernel.rows; ++y) {
            double d = 0.0;
            for (int c = 0; c < kernel.cols; ++c) d += std::abs(kernel(x, c) - kernel(y, c));
            worst = std::max(worst, 0.5 * d);
        }
    return worst;
}

namespace {

// Extends a path-space measure one level: mass at prefix p flows to p.y with
// weight G_{k-1}(terminal(p)) M_k(terminal(p), y).
Vector extend_path_measure(const FkModel& model, const PathIndexer& ix, int k, const Vector& mu) {
    const Matrix& m = model.kernel(k);
    const Vector& g = model.potentials[k - 1];
    Vector out(ix.count(k), 0.0);
    const int d_next = model.size_at(k);
    for (int64_t p = 0; p < static_cast<int64_t>(mu.size()); ++p) {
        if (mu[p] == 0.0) continue;
        const int t = ix.terminal(p, k - 1);
        const double w = mu[p] * g[t];
        const int64_t base = ix.extend(p, k - 1, 0);
        for (int y = 0; y < d_next; ++y) out[base + y] += w * m(t, y);
    }
    return out;
}

}  // namespace

PathMeasures path_measures(const FkModel& model, int64_t state_cap) {
    model.validate();
    PathIndexer ix(model.space_sizes);
    if (ix.count(model.horizon) > state_cap)
        throw CapacityError("path space exceeds cap at level " + std::to_string(model.horizon));

    PathMeasures out;
    out.gamma.resize(model.horizon + 1);
    out.eta.resize(model.horizon + 1);
    out.mass.resize(model.horizon + 1);
    out.gamma[0] = model.initial;
    for (int k = 1; k <= model.horizon; ++k)
        out.gamma[k] = extend_path_measure(model, ix, k, out.gamma[k - 1]);
    for (int k = 0; k <= model.horizon; ++k) {
        out.mass[k] = sum(out.gamma[k]);
        out.eta[k] = scaled(out.gamma[k], 1.0 / out.mass[k]);
    }
    return out;
}

FrozenMeasures frozen_path_measures(const FkModel& model, const FrozenPath& z, ParticleCount N,
                                    int64_t state_cap) {
    model.validate();
    if (z.level() < model.horizon)
        throw ValidationError("frozen_path_measures: frozen path shorter than horizon");
    for (int k = 0; k <= model.horizon; ++k)
        if (z.coords[k] < 0 || z.coords[k] >= model.size_at(k))
            throw ValidationError("frozen_path_measures: invalid frozen coordinate at level " +
                                  std::to_string(k));
    PathIndexer ix(model.space_sizes);
    if (ix.count(model.horizon) > state_cap) throw CapacityError("path space exceeds cap");

    const double r = N.insertion_rate();

    FrozenMeasures out;
    out.gamma.resize(model.horizon + 1);
    out.eta.resize(model.horizon + 1);
    out.mass.resize(model.horizon + 1);

    out.mu0 = scaled(model.initial, 1.0 - r);
    out.mu0[z.coords[0]] += r;
    out.gamma[0] = out.mu0;

    for (int k = 1; k <= model.horizon; ++k) {
        Vector v = extend_path_measure(model, ix, k, out.gamma[k - 1]);
        const double mass = sum(v);
        for (double& x : v) x *= 1.0 - r;
        v[z.prefix_linear(ix, k)] += r * mass;
        out.gamma[k] = std::move(v);
    }
    for (int k = 0; k <= model.horizon; ++k) {
        out.mass[k] = sum(out.gamma[k]);
        out.eta[k] = scaled(out.gamma[k], 1.0 / out.mass[k]);
    }
    return out;
}

Matrix frozen_step(const FkModel& model, int k, int64_t frozen_state, ParticleCount N) {
    Matrix q = fk_step_matrix(model, k);
    const double r = N.insertion_rate();
    if (r == 0.0) return q;
    // Q_k followed by the insertion mixture: rows keep (1-1/N) of their mass
    // in place and send 1/N of it to the frozen column.
    const int fc = static_cast<int>(frozen_state);
    for (int row = 0; row < q.rows; ++row) {
        double mass = 0.0;
        for (int c = 0; c < q.cols; ++c) {
            mass += q(row, c);
            q(row, c) *= 1.0 - r;
        }
        q(row, fc) += r * mass;
    }
    return q;
}

Matrix frozen_semigroup(const FkModel& model, const std::vector<int64_t>& frozen_states,
                        ParticleCount N, int p, int n) {
    if (p < 0 || n > model.horizon || p > n)
        throw ValidationError("frozen_semigroup: level out of range");
    for (int k = p + 1; k <= n; ++k)
        if (frozen_states[k] < 0 || frozen_states[k] >= model.size_at(k))
            throw ValidationError("frozen_semigroup: invalid frozen state at level " +
                                  std::to_string(k));
    Matrix q = Matrix::identity(model.size_at(p));
    for (int k = p + 1; k <= n; ++k) q = matmul(q, frozen_step(model, k, frozen_states[k], N));
    return q;
}

Matrix frozen_path_kernel_matrix(const FkModel& model, ParticleCount N, int64_t state_cap) {
    PathIndexer ix(model.space_sizes);
    const int64_t paths = ix.count(model.horizon);
    if (paths * paths > state_cap) throw CapacityError("frozen kernel matrix exceeds cap");

    Matrix f(static_cast<int>(paths), static_cast<int>(paths));
    for (int64_t zi = 0; zi < paths; ++zi) {
        FrozenPath z{ix.decode(zi, model.horizon)};
        FrozenMeasures fm = frozen_path_measures(model, z, N, state_cap);
        const Vector& row = fm.eta[model.horizon];
        for (int64_t c = 0; c < paths; ++c) f(static_cast<int>(zi), static_cast<int>(c)) = row[c];
    }
    return f;
}

int64_t tuple_count(int d, int q) {
    int64_t c = 1;
    for (int i = 0; i < q; ++i) c *= d;
    return c;
}

Matrix coalescence_matrix(ParticleCount N, int q, int d) {
    const int64_t dq = tuple_count(d, q);
    if (N.is_infinite() || q == 1) return Matrix::identity(static_cast<int>(dq));
    if (q >= N.value()) throw ValidationError("coalescence_matrix: requires q < N");

    // Enumerate all q^q index maps c : [q] -> [q]; the weight of the
    // remapping x -> (x_{c(1)},...,x_{c(q)}) is (N)_{|c|} / ((q)_{|c|} N^q).
    const int64_t n_maps = tuple_count(q, q);
    std::vector<int> image(q);
    Matrix op(static_cast<int>(dq), static_cast<int>(dq));
    const double nq = std::pow(static_cast<double>(N.value()), q);

    for (int64_t mi = 0; mi < n_maps; ++mi) {
        int64_t rem = mi;
        for (int j = q - 1; j >= 0; --j) {
            image[j] = static_cast<int>(rem % q);
            rem /= q;
        }
        int distinct = 0;
        bool seen[32] = {};
        for (int j = 0; j < q; ++j)
            if (!seen[image[j]]) {
                seen[image[j]] = true;
                ++distinct;
            }
        const double w = static_cast<double>(falling_factorial(N.value(), distinct)) /
                         (static_cast<double>(falling_factorial(q, distinct)) * nq);

        std::vector<int> x(q);
        for (int64_t xi = 0; xi < dq; ++xi) {
            int64_t r2 = xi;
            for (int j = q - 1; j >= 0; --j) {
                x[j] = static_cast<int>(r2 % d);
                r2 /= d;
            }
            int64_t target = 0;
            for (int j = 0; j < q; ++j) target = target * d + x[image[j]];
            op(static_cast<int>(xi), static_cast<int>(target)) += w;
        }
    }
    return op;
}

Vector tensor_power_measure(const Vector& mu, int q) {
    Vector out = mu;
    for (int j = 1; j < q; ++j) {
        Vector next(out.size() * mu.size());
        size_t i = 0;
        for (double a : out)
            for (double b : mu) next[i++] = a * b;
        out = std::move(next);
    }
    return out;
}

Vector tensor_power_function(const Vector& f, int q) { return tensor_power_measure(f, q); }
Vector product_potential(const Vector& g, int q) { return tensor_power_measure(g, q); }

namespace {

// mu |-> mu C without materializing the dense operator: enumerate the q^q
// index maps and move mass tuple by tuple. O(q^q d^q) per call.
Vector apply_coalescence(const Vector& mu, int d, int q, ParticleCount N) {
    if (N.is_infinite() || q == 1) return mu;
    const int64_t dq = tuple_count(d, q);
    const int64_t n_maps = tuple_count(q, q);
    const double nq = std::pow(static_cast<double>(N.value()), q);

    Vector out(dq, 0.0);
    std::vector<int> image(q);
    std::vector<int> x(q);
    for (int64_t mi = 0; mi < n_maps; ++mi) {
        int64_t rem = mi;
        for (int j = q - 1; j >= 0; --j) {
            image[j] = static_cast<int>(rem % q);
            rem /= q;
        }
        int distinct = 0;
        bool seen[32] = {};
        for (int j = 0; j < q; ++j)
            if (!seen[image[j]]) {
                seen[image[j]] = true;
                ++distinct;
            }
        const double w = static_cast<double>(falling_factorial(N.value(), distinct)) /
                         (static_cast<double>(falling_factorial(q, distinct)) * nq);
        for (int64_t xi = 0; xi < dq; ++xi) {
            if (mu[xi] == 0.0) continue;
            int64_t r2 = xi;
            for (int j = q - 1; j >= 0; --j) {
                x[j] = static_cast<int>(r2 % d);
                r2 /= d;
            }
            int64_t target = 0;
            for (int j = 0; j < q; ++j) target = target * d + x[image[j]];
            out[target] += w * mu[xi];
        }
    }
    return out;
}

// nu' = nu transported by M along one tuple axis; dims gives the current
// per-axis sizes (they differ mid-transition).
Vector transport_axis(const Vector& nu, std::vector<int64_t>& dims, int axis, const Matrix& m) {
    int64_t outer = 1, inner = 1;
    for (int j = 0; j < axis; ++j) outer *= dims[j];
    for (size_t j = axis + 1; j < dims.size(); ++j) inner *= dims[j];
    const int64_t d_in = dims[axis], d_out = m.cols;

    Vector out(outer * d_out * inner, 0.0);
    for (int64_t o = 0; o < outer; ++o) {
        for (int64_t x = 0; x < d_in; ++x) {
            const double* src = nu.data() + (o * d_in + x) * inner;
            for (int64_t y = 0; y < d_out; ++y) {
                const double w = m(static_cast<int>(x), static_cast<int>(y));
                if (w == 0.0) continue;
                double* dst = out.data() + (o * d_out + y) * inner;
                for (int64_t i = 0; i < inner; ++i) dst[i] += w * src[i];
            }
        }
    }
    dims[axis] = d_out;
    return out;
}

// Collapses one tuple axis onto a fixed state: the mass of every tuple moves
// to the tuple with that coordinate replaced.
Vector collapse_axis(const Vector& nu, const std::vector<int64_t>& dims, int axis, int64_t state) {
    int64_t outer = 1, inner = 1;
    for (int j = 0; j < axis; ++j) outer *= dims[j];
    for (size_t j = axis + 1; j < dims.size(); ++j) inner *= dims[j];
    const int64_t d = dims[axis];

    Vector out(nu.size(), 0.0);
    for (int64_t o = 0; o < outer; ++o) {
        double* dst = out.data() + (o * d + state) * inner;
        for (int64_t x = 0; x < d; ++x) {
            const double* src = nu.data() + (o * d + x) * inner;
            for (int64_t i = 0; i < inner; ++i) dst[i] += src[i];
        }
    }
    return out;
}

Vector apply_insertion(const Vector& nu, int q, int d, int64_t state, ParticleCount N,
                       InsertionMode mode) {
    if (mode == InsertionMode::kNone) return nu;
    std::vector<int64_t> dims(q, d);
    Vector replaced(nu.size(), 0.0);
    for (int axis = 0; axis < q; ++axis) {
        Vector c = collapse_axis(nu, dims, axis, state);
        for (size_t i = 0; i < replaced.size(); ++i) replaced[i] += c[i] / q;
    }
    if (mode == InsertionMode::kFull) return replaced;
    const double rate = static_cast<double>(q) * N.insertion_rate();
    Vector out(nu.size());
    for (size_t i = 0; i < nu.size(); ++i) out[i] = (1.0 - rate) * nu[i] + rate * replaced[i];
    return out;
}

Vector weight_by_product_potential(Vector nu, const Vector& g, int q, int d) {
    std::vector<int> x(q);
    for (size_t i = 0; i < nu.size(); ++i) {
        int64_t rem = static_cast<int64_t>(i);
        double w = 1.0;
        for (int j = q - 1; j >= 0; --j) {
            w *= g[rem % d];
            rem /= d;
        }
        nu[i] *= w;
    }
    return nu;
}

struct TensorRecursionOpts {
    const FrozenPath* z = nullptr;  // null: plain tensor recursion
    InsertionMode mode = InsertionMode::kNone;
};

TensorMeasures tensor_recursion(const FkModel& model, int q, ParticleCount N,
                                const TensorRecursionOpts& opts, int64_t state_cap) {
    model.validate();
    if (q < 1) throw ValidationError("tensor recursion: q must be >= 1");
    if (!N.is_infinite() && q >= N.value())
        throw ValidationError("tensor recursion: requires q < N");
    for (int k = 0; k <= model.horizon; ++k)
        if (tuple_count(model.size_at(k), q) > state_cap)
            throw CapacityError("tuple space exceeds cap at level " + std::to_string(k));

    TensorMeasures out;
    out.gamma.resize(model.horizon + 1);
    out.eta.resize(model.horizon + 1);
    out.mass.resize(model.horizon + 1);

    Vector cur = tensor_power_measure(model.initial, q);
    if (opts.z)
        cur = apply_insertion(cur, q, model.size_at(0), opts.z->coords[0], N, opts.mode);
    out.gamma[0] = cur;

    for (int k = 1; k <= model.horizon; ++k) {
        const int d_prev = model.size_at(k - 1);
        Vector v = apply_coalescence(cur, d_prev, q, N);
        v = weight_by_product_potential(std::move(v), model.potentials[k - 1], q, d_prev);
        std::vector<int64_t> dims(q, d_prev);
        for (int axis = 0; axis < q; ++axis) v = transport_axis(v, dims, axis, model.kernel(k));
        if (opts.z)
            v = apply_insertion(v, q, model.size_at(k), opts.z->coords[k], N, opts.mode);
        cur = std::move(v);
        out.gamma[k] = cur;
    }
    for (int k = 0; k <= model.horizon; ++k) {
        out.mass[k] = sum(out.gamma[k]);
        out.eta[k] = scaled(out.gamma[k], 1.0 / out.mass[k]);
    }
    return out;
}

}  // namespace

TensorMeasures tensor_fk(const FkModel& model, int q, ParticleCount N, int64_t state_cap) {
    return tensor_recursion(model, q, N, TensorRecursionOpts{}, state_cap);
}

TensorMeasures frozen_tensor_fk(const FkModel& model, const FrozenPath& z, int q, ParticleCount N,
                                InsertionMode mode, int64_t state_cap) {
    if (z.level() < model.horizon)
        throw ValidationError("frozen_tensor_fk: frozen path shorter than horizon");
    TensorRecursionOpts opts;
    opts.z = &z;
    opts.mode = mode;
    return tensor_recursion(model, q, N, opts, state_cap);
}

Matrix insertion_matrix(int d, int q, int64_t state, ParticleCount N, InsertionMode mode) {
    const int64_t dq = tuple_count(d, q);
    Matrix op(static_cast<int>(dq), static_cast<int>(dq));
    if (mode == InsertionMode::kNone) return Matrix::identity(static_cast<int>(dq));
    const double rate =
        mode == InsertionMode::kFull ? 1.0 : static_cast<double>(q) * N.insertion_rate();
    std::vector<int> x(q);
    for (int64_t xi = 0; xi < dq; ++xi) {
        int64_t rem = xi;
        for (int j = q - 1; j >= 0; --j) {
            x[j] = static_cast<int>(rem % d);
            rem /= d;
        }
        op(static_cast<int>(xi), static_cast<int>(xi)) += 1.0 - rate;
        for (int j = 0; j < q; ++j) {
            int64_t target = 0;
            for (int l = 0; l < q; ++l) target = target * d + (l == j ? state : x[l]);
            op(static_cast<int>(xi), static_cast<int>(target)) += rate / q;
        }
    }
    return op;
}

Matrix tensor_step_matrix(const FkModel& model, int k, int q, ParticleCount N) {
    const int d_prev = model.size_at(k - 1);
    const int64_t rows = tuple_count(d_prev, q);
    Matrix qk = Matrix::identity(static_cast<int>(rows));
    qk = matmul(qk, coalescence_matrix(N, q, d_prev));
    // Tensorized one-step operator, built densely row by row.
    const Matrix step = fk_step_matrix(model, k);
    Matrix tensor_q(static_cast<int>(rows), static_cast<int>(tuple_count(model.size_at(k), q)));
    std::vector<int> x(q);
    const int d_next = model.size_at(k);
    for (int64_t xi = 0; xi < rows; ++xi) {
        int64_t rem = xi;
        for (int j = q - 1; j >= 0; --j) {
            x[j] = static_cast<int>(rem % d_prev);
            rem /= d_prev;
        }
        std::vector<int> y(q, 0);
        const int64_t cols = tuple_count(d_next, q);
        for (int64_t yi = 0; yi < cols; ++yi) {
            int64_t r2 = yi;
            double w = 1.0;
            for (int j = q - 1; j >= 0; --j) {
                y[j] = static_cast<int>(r2 % d_next);
                r2 /= d_next;
            }
            for (int j = 0; j < q; ++j) w *= step(x[j], y[j]);
            tensor_q(static_cast<int>(xi), static_cast<int>(yi)) = w;
        }
    }
    return matmul(qk, tensor_q);
}

Matrix frozen_tensor_step_matrix(const FkModel& model, const FrozenPath& z, int k, int q,
                                 ParticleCount N, InsertionMode mode) {
    Matrix base = tensor_step_matrix(model, k, q, N);
    return matmul(base, insertion_matrix(model.size_at(k), q, z.coords[k], N, mode));
}

std::string oracle_dump_json(const FkModel& model, int tensor_q, ParticleCount tensor_N) {
    using nlohmann::json;
    ExactMeasures em = exact_measures(model);
    AssumptionReport ar = assumption_constants(model);

    json j;
    j["model_hash"] = model_hash(model);
    j["horizon"] = model.horizon;
    j["gamma"] = em.gamma;
    j["eta"] = em.eta;
    j["gamma_mass"] = em.mass;
    j["eta_potential_mean"] = em.potential_mean;
    j["rho_n"] = ar.rho_n;
    j["rho_by_horizon"] = ar.rho_by_horizon;
    j["alpha"] = ar.alpha;
    j["beta1"] = ar.beta1;
    j["beta2"] = ar.beta2;
    if (tensor_q >= 2) {
        TensorMeasures tm = tensor_fk(model, tensor_q, tensor_N);
        j["tensor_q"] = tensor_q;
        j["tensor_N"] = tensor_N.is_infinite() ? -1 : tensor_N.value();
        j["tensor_eta"] = tm.eta;
    }
    return j.dump(2);
}

}  // namespace oracle
}  // namespace fklab
