#pragma once

#include <string>
#include <vector>

#include "fklab/verify.hpp"

namespace fklab {
namespace report_io {

// CSV with '.' decimal separator, LF line endings, a header row, and
// shortest-round-trip number formatting: byte-stable for golden files.

std::string format_double(double v);

std::string bounds_csv(const std::vector<verify::BoundsReport>& reports);

struct EstimateRow {
    int64_t replicate_id = 0;
    std::string estimator;
    double value = 0.0;
};
std::string estimates_csv(const std::vector<EstimateRow>& rows);

std::string summary_json(const std::vector<verify::BoundsReport>& reports);

std::string manifest_json(const std::string& command, const std::string& model_hash, int N,
                          int64_t R, uint64_t master_seed, int threads);

void write_file(const std::string& path, const std::string& content);

}  // namespace report_io
}  // namespace fklab
