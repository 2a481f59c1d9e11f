#include "fklab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fklab/errors.hpp"
#include "json.hpp"

namespace fklab {
namespace report_io {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string bounds_csv(const std::vector<verify::BoundsReport>& reports) {
    std::string out = "inequality_id,model,n,N,q,f_id,z_id,lower,upper,estimate,stderr,verdict\n";
    for (const auto& r : reports) {
        out += r.id + "," + r.model + "," + std::to_string(r.n) + "," + std::to_string(r.N) + "," +
               std::to_string(r.q) + "," + r.f_id + "," + r.z_id + "," + format_double(r.lower) +
               "," + format_double(r.upper) + "," + format_double(r.estimate) + "," +
               format_double(r.std_error) + "," + verify::to_string(r.verdict) + "\n";
    }
    return out;
}

std::string estimates_csv(const std::vector<EstimateRow>& rows) {
    std::string out = "replicate_id,estimator_name,value\n";
    for (const auto& r : rows)
        out += std::to_string(r.replicate_id) + "," + r.estimator + "," + format_double(r.value) +
               "\n";
    return out;
}

std::string summary_json(const std::vector<verify::BoundsReport>& reports) {
    const verify::SuiteSummary s = verify::summarize(reports);
    nlohmann::json j;
    j["reports"] = reports.size();
    j["pass"] = s.pass;
    j["fail"] = s.fail;
    j["inconclusive"] = s.inconclusive;
    j["skipped"] = s.skipped;
    j["constant_disputed"] = s.disputed;
    return j.dump(2);
}

std::string manifest_json(const std::string& command, const std::string& model_hash, int N,
                          int64_t R, uint64_t master_seed, int threads) {
    nlohmann::json j;
    j["command"] = command;
    j["model_hash"] = model_hash;
    j["N"] = N;
    j["replicates"] = R;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
}

}  // namespace report_io
}  // namespace fklab
