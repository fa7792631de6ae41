#pragma once

#include <string>
#include <vector>

#include "unbias/extraction.hpp"
#include "unbias/popmodel.hpp"

namespace unbias {

struct StressEntry {
    std::string label;
    StressConfig stress;
};

struct SigmaSource {
    enum class Mode { Estimate, Fixed, Sweep };
    Mode mode = Mode::Estimate;
    double value = 0.0;     // Fixed: sigma; Sweep: center
    double sweep_pct = 0.0; // Sweep only, in (0, 100)
};

struct ExperimentConfig {
    PopulationConfig population;
    std::vector<StressEntry> stress;
    std::vector<int> inspection_bits; // empty = all bits 0..W-1
    double intra_threshold = 0.10;
    SigmaSource sigma_source;
    std::string output_dir = "out";
    std::vector<std::string> formats = {"csv"};

    void validate() const; // throws ConfigError
};

// Strict parse: unknown keys anywhere are hard errors so silently
// misspelled statistical parameters cannot slip through.
ExperimentConfig experiment_config_from_json_text(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json_text(const ExperimentConfig& cfg);

// Built-in profiles: the 7-board hardware-scale setup and a 200-chip
// desk-scale profile with tighter statistics.
ExperimentConfig paper_profile();
ExperimentConfig desk_profile();

} // namespace unbias
