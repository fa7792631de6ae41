#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unbias/config.hpp"
#include "unbias/prediction.hpp"

namespace unbias {

struct RunOptions {
    bool strict_overflow = false;            // any overflow flag -> OverflowError
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_dir_override;
    bool write_files = true;
};

struct StressRow {
    std::string label;
    double noise_multiplier = 1.0;
    double drift_std = 0.0;
    double intra_mean = 0.0; // against nominal references, at the selected bit
};

struct RunSummary {
    int selected_bit = -1;
    double selected_w = 0.0;
    double sigma_used = 0.0;     // what predictions were computed with
    double sigma_estimate = 0.0; // estimate_sigma on the nominal tensor
    // Sweep-mode predictions at the selected bit (NaN unless sweeping).
    double sweep_lb_low = 0.0, sweep_lb_center = 0.0, sweep_lb_high = 0.0;
    double pred_intra = 0.0, pred_inter_lb = 0.0;
    double meas_intra = 0.0, meas_inter = 0.0;
    std::size_t overflow_count = 0;
    std::vector<BitReport> bit_reports;
    std::vector<StressRow> stress_rows;
    std::vector<std::string> files; // relative file names written
};

// Full pipeline: simulate, extract over the requested bits, measure FHDs,
// predict, select the inspection bit, rerun the stress conditions, and
// write the report bundle into the output directory.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct BaselineRow {
    std::string extraction; // "msb" or "selected"
    int bit_index = 0;
    double inter_fhd = 0.0;
    double intra_fhd = 0.0;
};

struct BaselineReport {
    BaselineRow msb;
    BaselineRow selected;
    double pred_inter_lb_selected = 0.0;
};

// MSB extraction versus selected-bit extraction on one tensor; shows the
// constant-generator collapse of sign-based readout under routing bias.
BaselineReport compare_msb_baseline(const ExperimentConfig& cfg, const RunOptions& opts = {});

std::string summary_json_text(const RunSummary& summary, const ExperimentConfig& cfg);

std::string stress_table_csv(std::span<const StressRow> rows);
std::vector<StressRow> parse_stress_table_csv(const std::string& text);

} // namespace unbias
