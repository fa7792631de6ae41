#pragma once

#include <span>
#include <string>
#include <vector>

#include "unbias/extraction.hpp"
#include "unbias/metrics.hpp"
#include "unbias/popmodel.hpp"
#include "unbias/prediction.hpp"

namespace unbias::csvio {

// Shortest exact decimal form of a double (round-trips through strtod).
std::string fmt_double(double v);

std::string tensor_csv(const MeasurementTensor& tensor);
MeasurementTensor parse_tensor_csv(const std::string& text, const PopulationConfig& cfg);

std::string reference_csv(const ResponseMatrix& reference);
std::string per_repeat_csv(const ResponseMatrix& per_repeat);
ResponseMatrix parse_reference_csv(const std::string& text, int bit_index = 0);
ResponseMatrix parse_per_repeat_csv(const std::string& text, int bit_index = 0);

std::string fhd_summary_csv(const FhdSummary& summary);
FhdSummary parse_fhd_summary_csv(const std::string& text);

std::string bit_report_csv(std::span<const BitReport> reports);
std::vector<BitReport> parse_bit_report_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace unbias::csvio
