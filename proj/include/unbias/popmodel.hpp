#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace unbias {

enum class ModelKind {
    Independent,  // per-challenge offsets, no cross-challenge correlation
    StageAdditive // additive delay stages with +/-1 parity challenge transform
};

struct PopulationConfig {
    ModelKind model_kind = ModelKind::Independent;
    int register_width = 19; // W, bits of the 2's-complement difference register
    int challenge_width = 10; // m, number of path configurations
    int num_chips = 7;
    int num_challenges = 120;
    int num_repeats = 10; // t, measurements per chip per challenge
    double bias_mean = 0.0; // systematic (routing) offset, ticks
    double bias_std = 0.0; // spread of per-challenge systematic offsets, ticks
    double inter_std = 521.0; // inter-chip variation, ticks
    double noise_std = 0.0; // per-measurement noise, ticks
    std::uint64_t seed = 1;

    // Throws ConfigError on invalid fields. Overflow headroom is reported
    // separately: configs without headroom are constructible on purpose so
    // the clamp/flag path can be exercised; strict mode refuses them.
    void validate() const;

    // |bias_mean| + 6*(bias_std + inter_std + noise_std) fits in W-1 bits.
    bool has_overflow_headroom() const;

    std::int64_t min_value() const; // -2^(W-1)
    std::int64_t max_value() const; // 2^(W-1)-1
};

struct ChipInstance {
    int chip_id = 0;
    // Independent: per-challenge offsets (length num_challenges).
    // StageAdditive: per-stage delay deltas (length challenge_width + 1).
    std::vector<double> latent;
};

struct StressConfig {
    double noise_multiplier = 1.0; // alpha >= 1
    double drift_std = 0.0;        // per-chip mean shift drawn once per condition

    void validate() const;
};

struct Population {
    PopulationConfig cfg;
    std::vector<ChipInstance> chips;
    // Per-challenge systematic offset mu_k shared by all chips (derived
    // from the stage biases for StageAdditive).
    std::vector<double> systematic;
    // StageAdditive only: shared per-stage biases b_j (length m+1).
    std::vector<double> stage_bias;
    // StageAdditive only: challenge bit patterns, one m-bit word each.
    std::vector<std::uint64_t> challenges;

    // Noise-free expected difference value of (chip, challenge).
    double cell_mean(int chip, int challenge) const;
};

struct MeasurementTensor {
    PopulationConfig cfg; // config echo
    int num_chips = 0;
    int num_challenges = 0;
    int num_repeats = 0;
    std::vector<int> challenge_ids;   // column -> population challenge index
    std::vector<std::int64_t> values; // row-major (chip, challenge, repeat)
    std::vector<std::uint8_t> overflow;

    std::size_t index(int chip, int challenge, int repeat) const {
        return (static_cast<std::size_t>(chip) * num_challenges + challenge) * num_repeats +
               repeat;
    }
    std::int64_t value(int chip, int challenge, int repeat) const {
        return values[index(chip, challenge, repeat)];
    }
    bool overflowed(int chip, int challenge, int repeat) const {
        return overflow[index(chip, challenge, repeat)] != 0;
    }
    std::size_t overflow_count() const;
    bool any_overflow() const { return overflow_count() > 0; }
};

// +/-1 parity transform of the additive stage model: phi_j(C) for stages
// j = 0..m-1 is the product of (1 - 2*C_l) over challenge bits l >= j;
// phi_m(C) = +1 (constant stage).
double stage_parity(std::uint64_t challenge_bits, int stage, int challenge_width);

// Draws the population latents; deterministic in cfg.seed.
Population generate_population(const PopulationConfig& cfg);

// One measurement cell: round(mu_k + chip effect + drift + noise), clamped
// into the W-bit range. Returns (value, overflowed). Pure in its arguments.
std::pair<std::int64_t, bool> measure_cell(const Population& pop, int chip, int challenge,
                                           int repeat, const StressConfig* stress = nullptr,
                                           std::uint64_t stress_index = 0);

// Full (chips x challenges x repeats) tensor over a challenge subset or,
// by default, all challenges. Cells are keyed streams: identical values
// regardless of evaluation order.
MeasurementTensor measure(const Population& pop, std::span<const int> challenge_subset,
                          const StressConfig* stress = nullptr, std::uint64_t stress_index = 0);
MeasurementTensor measure(const Population& pop, const StressConfig* stress = nullptr,
                          std::uint64_t stress_index = 0);

} // namespace unbias
