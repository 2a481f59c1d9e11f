#include "fklab/model.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fklab {

namespace {

std::string idx(const std::string& name, int i) {
    return name + "[" + std::to_string(i) + "]";
}

}  // namespace

void FkModel::validate() const {
    if (horizon < 0) throw ValidationError("horizon: must be >= 0");
    if (static_cast<int>(space_sizes.size()) != horizon + 1)
        throw ValidationError("space_sizes: expected " + std::to_string(horizon + 1) + " entries");
    for (int k = 0; k <= horizon; ++k)
        if (space_sizes[k] <= 0) throw ValidationError(idx("space_sizes", k) + ": must be positive");

    if (static_cast<int>(kernels.size()) != horizon)
        throw ValidationError("kernels: expected " + std::to_string(horizon) + " matrices");
    for (int k = 1; k <= horizon; ++k) {
        const Matrix& m = kernels[k - 1];
        if (m.rows != space_sizes[k - 1] || m.cols != space_sizes[k])
            throw ValidationError(idx("kernels", k - 1) + ": shape " + std::to_string(m.rows) + "x" +
                                  std::to_string(m.cols) + " does not match spaces");
        for (int r = 0; r < m.rows; ++r) {
            double s = 0.0;
            for (int c = 0; c < m.cols; ++c) {
                if (m(r, c) < 0.0)
                    throw ValidationError(idx("kernels", k - 1) + "[" + std::to_string(r) + "][" +
                                          std::to_string(c) + "]: negative entry");
                s += m(r, c);
            }
            if (std::abs(s - 1.0) > kStochasticTol)
                throw ValidationError(idx("kernels", k - 1) + "[" + std::to_string(r) +
                                      "]: row sums to " + std::to_string(s));
        }
    }

    if (static_cast<int>(potentials.size()) != horizon + 1)
        throw ValidationError("potentials: expected " + std::to_string(horizon + 1) + " vectors");
    for (int k = 0; k <= horizon; ++k) {
        if (static_cast<int>(potentials[k].size()) != space_sizes[k])
            throw ValidationError(idx("potentials", k) + ": length mismatch");
        for (int x = 0; x < space_sizes[k]; ++x) {
            const double g = potentials[k][x];
            if (!(g > 0.0) || !std::isfinite(g))
                throw ValidationError(idx("potentials", k) + "[" + std::to_string(x) +
                                      "]: must be strictly positive and finite");
        }
    }

    if (static_cast<int>(initial.size()) != space_sizes[0])
        throw ValidationError("initial: length mismatch");
    double s = 0.0;
    for (int x = 0; x < space_sizes[0]; ++x) {
        if (initial[x] < 0.0) throw ValidationError(idx("initial", x) + ": negative entry");
        s += initial[x];
    }
    if (std::abs(s - 1.0) > kStochasticTol)
        throw ValidationError("initial: sums to " + std::to_string(s));
}

PathIndexer::PathIndexer(const std::vector<int>& space_sizes) : sizes_(space_sizes) {
    counts_.resize(sizes_.size());
    int64_t c = 1;
    for (size_t k = 0; k < sizes_.size(); ++k) {
        c *= sizes_[k];
        counts_[k] = c;
    }
}

int64_t PathIndexer::encode(std::span<const int> coords) const {
    int64_t linear = 0;
    for (size_t k = 0; k < coords.size(); ++k) linear = linear * sizes_[k] + coords[k];
    return linear;
}

std::vector<int> PathIndexer::decode(int64_t linear, int level) const {
    std::vector<int> coords(level + 1);
    for (int k = level; k >= 0; --k) {
        coords[k] = static_cast<int>(linear % sizes_[k]);
        linear /= sizes_[k];
    }
    return coords;
}

FkModel lift_to_path(const FkModel& model, int64_t state_cap) {
    model.validate();
    PathIndexer ix(model.space_sizes);
    if (ix.count(model.horizon) > state_cap)
        throw CapacityError("path space has " + std::to_string(ix.count(model.horizon)) +
                            " states at level " + std::to_string(model.horizon) + ", cap is " +
                            std::to_string(state_cap));

    FkModel lifted;
    lifted.horizon = model.horizon;
    lifted.space_sizes.resize(model.horizon + 1);
    for (int k = 0; k <= model.horizon; ++k) lifted.space_sizes[k] = static_cast<int>(ix.count(k));

    lifted.initial = model.initial;
    lifted.potentials.resize(model.horizon + 1);
    for (int k = 0; k <= model.horizon; ++k) {
        Vector g(ix.count(k));
        for (int64_t p = 0; p < ix.count(k); ++p) g[p] = model.potentials[k][ix.terminal(p, k)];
        lifted.potentials[k] = std::move(g);
    }

    lifted.kernels.resize(model.horizon);
    for (int k = 1; k <= model.horizon; ++k) {
        Matrix m(static_cast<int>(ix.count(k - 1)), static_cast<int>(ix.count(k)));
        const Matrix& step = model.kernel(k);
        for (int64_t p = 0; p < ix.count(k - 1); ++p) {
            const int t = ix.terminal(p, k - 1);
            for (int y = 0; y < model.size_at(k); ++y)
                m(static_cast<int>(p), static_cast<int>(ix.extend(p, k - 1, y))) = step(t, y);
        }
        lifted.kernels[k - 1] = std::move(m);
    }
    return lifted;
}

FkModel normalize_potentials(const FkModel& model, const std::vector<Vector>& exact_etas) {
    if (static_cast<int>(exact_etas.size()) != model.horizon + 1)
        throw ValidationError("normalize_potentials: expected one eta per level");
    FkModel out = model;
    for (int k = 0; k <= model.horizon; ++k) {
        if (static_cast<int>(exact_etas[k].size()) != model.space_sizes[k])
            throw ValidationError("normalize_potentials: eta[" + std::to_string(k) +
                                  "] length mismatch");
        const double mean = dot(exact_etas[k], model.potentials[k]);
        for (double& g : out.potentials[k]) g /= mean;
    }
    return out;
}

double eval_product_weight(const FkModel& model, std::span<const int> path, int upto) {
    double w = 1.0;
    for (int p = 0; p < upto; ++p) w *= model.potentials[p][path[p]];
    return w;
}

double eval_product_weight_log(const FkModel& model, std::span<const int> path, int upto) {
    double lw = 0.0;
    for (int p = 0; p < upto; ++p) lw += std::log(model.potentials[p][path[p]]);
    return lw;
}

namespace {

using nlohmann::json;

Vector to_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected array");
    Vector v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError(where + ": expected numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

}  // namespace

FkModel parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("model file: invalid JSON: ") + e.what());
    }
    for (const char* field : {"horizon", "space_sizes", "kernels", "potentials", "initial"})
        if (!j.contains(field)) throw ValidationError(std::string(field) + ": missing");

    FkModel m;
    m.horizon = j["horizon"].get<int>();
    for (const auto& d : j["space_sizes"]) m.space_sizes.push_back(d.get<int>());
    if (static_cast<int>(m.space_sizes.size()) != m.horizon + 1)
        throw ValidationError("space_sizes: expected " + std::to_string(m.horizon + 1) + " entries");

    const auto& ks = j["kernels"];
    for (size_t i = 0; i < ks.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        Matrix mat(m.space_sizes[k - 1], m.space_sizes[k]);
        const auto& rows = ks[i];
        if (!rows.is_array() || static_cast<int>(rows.size()) != mat.rows)
            throw ValidationError(idx("kernels", static_cast<int>(i)) + ": expected " +
                                  std::to_string(mat.rows) + " rows");
        for (int r = 0; r < mat.rows; ++r) {
            Vector row = to_vector(rows[r], idx("kernels", static_cast<int>(i)) + "[" +
                                                std::to_string(r) + "]");
            if (static_cast<int>(row.size()) != mat.cols)
                throw ValidationError(idx("kernels", static_cast<int>(i)) + "[" +
                                      std::to_string(r) + "]: expected " +
                                      std::to_string(mat.cols) + " entries");
            for (int c = 0; c < mat.cols; ++c) mat(r, c) = row[c];
        }
        m.kernels.push_back(std::move(mat));
    }
    for (size_t i = 0; i < j["potentials"].size(); ++i)
        m.potentials.push_back(to_vector(j["potentials"][i], idx("potentials", static_cast<int>(i))));
    m.initial = to_vector(j["initial"], "initial");

    m.validate();
    return m;
}

FkModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str());
}

namespace {

// Shortest round-trip decimal form, locale independent.
std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string model_to_json(const FkModel& model) {
    using nlohmann::json;
    json j;
    j["horizon"] = model.horizon;
    j["space_sizes"] = model.space_sizes;
    json ks = json::array();
    for (const Matrix& m : model.kernels) {
        json rows = json::array();
        for (int r = 0; r < m.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        ks.push_back(std::move(rows));
    }
    j["kernels"] = std::move(ks);
    j["potentials"] = model.potentials;
    j["initial"] = model.initial;
    return j.dump(2);
}

std::string model_hash(const FkModel& model) {
    std::string canon = std::to_string(model.horizon);
    for (int d : model.space_sizes) canon += "," + std::to_string(d);
    for (const Matrix& m : model.kernels)
        for (double v : m.a) canon += "," + num(v);
    for (const Vector& g : model.potentials)
        for (double v : g) canon += "," + num(v);
    for (double v : model.initial) canon += "," + num(v);

    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace fklab
