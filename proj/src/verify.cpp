#include "fklab/verify.hpp"

#include <cmath>
#include <thread>

#include "fklab/errors.hpp"

namespace fklab {
namespace verify {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "PASS";
        case Verdict::kFail: return "FAIL";
        case Verdict::kInconclusive: return "INCONCLUSIVE";
        case Verdict::kSkipped: return "SKIPPED";
        case Verdict::kConstantDisputed: return "CONSTANT_DISPUTED";
    }
    return "?";
}

double Estimate::half_width() const { return normal_quantile(0.5 + ci_level / 2.0) * std_error; }

// Acklam's rational approximation of the standard normal quantile; absolute
// error below 1.2e-9, far tighter than any tolerance used here.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

Estimate replicate_mean(const std::string& name, int64_t replicates,
                        const std::function<double(uint64_t)>& fn, int threads, double ci_level) {
    if (replicates < 2) throw ValidationError("replicate_mean: need at least two replicates");
    std::vector<double> values(replicates);

    const int t = resolve_threads(threads);
    if (t <= 1 || replicates < 256) {
        for (int64_t r = 0; r < replicates; ++r) values[r] = fn(static_cast<uint64_t>(r));
    } else {
        const int64_t chunk = (replicates + t - 1) / t;
        std::vector<std::thread> pool;
        pool.reserve(t);
        for (int w = 0; w < t; ++w) {
            const int64_t lo = w * chunk;
            const int64_t hi = std::min(replicates, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (int64_t r = lo; r < hi; ++r) values[r] = fn(static_cast<uint64_t>(r));
            });
        }
        for (auto& th : pool) th.join();
    }

    for (int64_t r = 0; r < replicates; ++r)
        if (!std::isfinite(values[r]))
            throw ValidationError(name + ": non-finite value at replicate " + std::to_string(r));

    const double mean = pairwise_sum({values.data(), values.size()}) / replicates;
    std::vector<double> sq(replicates);
    for (int64_t r = 0; r < replicates; ++r) {
        const double d = values[r] - mean;
        sq[r] = d * d;
    }
    const double var = pairwise_sum({sq.data(), sq.size()}) / (replicates - 1);

    Estimate e;
    e.name = name;
    e.point = mean;
    e.std_error = std::sqrt(var / replicates);
    e.replicates = replicates;
    e.ci_level = ci_level;
    return e;
}

Verdict check_sandwich(const Estimate& est, double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper)) throw ValidationError("check_sandwich: NaN bound");
    const double h = est.half_width();
    const double lo = est.point - h, hi = est.point + h;
    if (lo >= lower && hi <= upper) return Verdict::kPass;
    if (hi < lower || lo > upper) return Verdict::kFail;
    return Verdict::kInconclusive;
}

Verdict check_equality(const Estimate& est, double target) {
    const double h = est.half_width();
    return std::abs(est.point - target) <= h ? Verdict::kPass : Verdict::kFail;
}

Verdict check_exact(double value, double lower, double upper, double slack) {
    if (std::isnan(value)) throw ValidationError("check_exact: NaN value");
    return (value >= lower - slack && value <= upper + slack) ? Verdict::kPass : Verdict::kFail;
}

namespace constants {

double chain(double c1) { return 2.0 * c1 * (2.0 * c1 * (c1 + 1.0) + 1.0); }
double c1_bias(double rho) { return rho * rho - 1.0; }
double c2_bias(double rho) { return chain(c1_bias(rho)); }
double c1_pg(double rho) { return 2.5 * rho * rho - 1.0; }
double c2_pg(double rho) { return chain(c1_pg(rho)); }
double c_osc(double rho) { return 6.0 * (1.0 + 2.0 * rho * rho); }
double c1_tensor(int q, double c) { return 2.0 * q * q * c; }
double c2_tensor(int q, double c) { return 2.0 * c1_tensor(q, c) * (1.0 + 2.0 * c * (c + 1.0)); }

}  // namespace constants

SuiteSummary summarize(const std::vector<BoundsReport>& reports) {
    SuiteSummary s;
    for (const auto& r : reports) {
        switch (r.verdict) {
            case Verdict::kPass: ++s.pass; break;
            case Verdict::kFail: ++s.fail; break;
            case Verdict::kInconclusive: ++s.inconclusive; break;
            case Verdict::kSkipped: ++s.skipped; break;
            case Verdict::kConstantDisputed: ++s.disputed; break;
        }
    }
    return s;
}

int64_t worst_case_path(const FkModel& model) {
    const auto pm = oracle::path_measures(model);
    const Vector& eta = pm.eta[model.horizon];
    int64_t arg = 0;
    for (size_t i = 1; i < eta.size(); ++i)
        if (eta[i] < eta[arg]) arg = static_cast<int64_t>(i);
    return arg;
}

std::vector<std::pair<std::string, Vector>> path_test_functions(const FkModel& model) {
    PathIndexer ix(model.space_sizes);
    const int n = model.horizon;
    const int64_t paths = ix.count(n);
    std::vector<std::pair<std::string, Vector>> fs;

    // Terminal-coordinate indicators.
    for (int s = 0; s < model.size_at(n); ++s) {
        Vector f(paths, 0.0);
        for (int64_t p = 0; p < paths; ++p)
            if (ix.terminal(p, n) == s) f[p] = 1.0;
        fs.emplace_back("term" + std::to_string(s), std::move(f));
    }
    // Constant-trajectory indicator (well-defined when all spaces share d_0).
    bool uniform_sizes = true;
    for (int d : model.space_sizes) uniform_sizes = uniform_sizes && d == model.space_sizes[0];
    if (uniform_sizes) {
        Vector f(paths, 0.0);
        for (int64_t p = 0; p < paths; ++p) {
            const auto coords = ix.decode(p, n);
            bool constant = true;
            for (int k = 1; k <= n; ++k) constant = constant && coords[k] == coords[0];
            if (constant) f[p] = 1.0;
        }
        fs.emplace_back("const_path", std::move(f));
    }
    // Mid-level coordinate indicator.
    if (n >= 2) {
        const int mid = n / 2;
        Vector f(paths, 0.0);
        for (int64_t p = 0; p < paths; ++p) {
            const auto coords = ix.decode(p, n);
            if (coords[mid] == 0) f[p] = 1.0;
        }
        fs.emplace_back("mid0", std::move(f));
    }
    return fs;
}

std::vector<std::pair<std::string, Vector>> terminal_test_functions(const FkModel& model) {
    const int d = model.size_at(model.horizon);
    std::vector<std::pair<std::string, Vector>> fs;
    for (int s = 0; s < d; ++s) {
        Vector f(d, 0.0);
        f[s] = 1.0;
        fs.emplace_back("ind" + std::to_string(s), std::move(f));
    }
    Vector ramp(d);
    for (int s = 0; s < d; ++s) ramp[s] = (s + 1.0) / d;
    fs.emplace_back("ramp", std::move(ramp));
    return fs;
}

}  // namespace verify
}  // namespace fklab
