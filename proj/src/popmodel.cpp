#include "unbias/popmodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_set>

#include "unbias/errors.hpp"
#include "unbias/rng.hpp"

namespace unbias {

void PopulationConfig::validate() const {
    if (register_width < 2 || register_width > 63)
        throw ConfigError("register_width must be in [2, 63], got " +
                          std::to_string(register_width));
    if (challenge_width < 1)
        throw ConfigError("challenge_width must be >= 1");
    if (num_chips < 1) throw ConfigError("num_chips must be >= 1");
    if (num_challenges < 1) throw ConfigError("num_challenges must be >= 1");
    if (num_repeats < 1) throw ConfigError("num_repeats must be >= 1");
    if (!(bias_std >= 0.0) || !std::isfinite(bias_std))
        throw ConfigError("bias_std must be finite and >= 0");
    if (!(inter_std > 0.0) || !std::isfinite(inter_std))
        throw ConfigError("inter_std must be finite and > 0");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw ConfigError("noise_std must be finite and >= 0");
    if (!std::isfinite(bias_mean)) throw ConfigError("bias_mean must be finite");
    if (model_kind == ModelKind::StageAdditive && challenge_width < 63 &&
        static_cast<std::uint64_t>(num_challenges) > (std::uint64_t{1} << challenge_width))
        throw ConfigError("num_challenges exceeds the 2^challenge_width distinct patterns");
}

bool PopulationConfig::has_overflow_headroom() const {
    const double reach = std::fabs(bias_mean) + 6.0 * (bias_std + inter_std + noise_std);
    return reach < std::ldexp(1.0, register_width - 1);
}

std::int64_t PopulationConfig::min_value() const {
    return -(std::int64_t{1} << (register_width - 1));
}

std::int64_t PopulationConfig::max_value() const {
    return (std::int64_t{1} << (register_width - 1)) - 1;
}

void StressConfig::validate() const {
    if (!(noise_multiplier >= 1.0) || !std::isfinite(noise_multiplier))
        throw ConfigError("noise_multiplier must be finite and >= 1");
    if (!(drift_std >= 0.0) || !std::isfinite(drift_std))
        throw ConfigError("drift_std must be finite and >= 0");
}

std::size_t MeasurementTensor::overflow_count() const {
    return static_cast<std::size_t>(std::count(overflow.begin(), overflow.end(), 1));
}

double stage_parity(std::uint64_t challenge_bits, int stage, int challenge_width) {
    if (stage >= challenge_width) return 1.0;
    const std::uint64_t suffix = challenge_bits >> stage;
    return (std::popcount(suffix) & 1) ? -1.0 : 1.0;
}

double Population::cell_mean(int chip, int challenge) const {
    const ChipInstance& inst = chips[chip];
    if (cfg.model_kind == ModelKind::Independent)
        return systematic[challenge] + inst.latent[challenge];
    const std::uint64_t bits = challenges[challenge];
    double chip_part = 0.0;
    for (int j = 0; j <= cfg.challenge_width; ++j)
        chip_part += inst.latent[j] * stage_parity(bits, j, cfg.challenge_width);
    return systematic[challenge] + chip_part;
}

namespace {

// Distinct m-bit challenge patterns, sampled from the keyed stream with
// rejection on duplicates.
std::vector<std::uint64_t> draw_challenges(const PopulationConfig& cfg) {
    const std::uint64_t mask = cfg.challenge_width >= 64
                                   ? ~std::uint64_t{0}
                                   : (std::uint64_t{1} << cfg.challenge_width) - 1;
    std::vector<std::uint64_t> out;
    out.reserve(cfg.num_challenges);
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t counter = 0;
    while (out.size() < static_cast<std::size_t>(cfg.num_challenges)) {
        const std::uint64_t pattern =
            rng::cell_key(cfg.seed, rng::Domain::Challenge, counter++) & mask;
        if (seen.insert(pattern).second) out.push_back(pattern);
    }
    return out;
}

} // namespace

Population generate_population(const PopulationConfig& cfg) {
    cfg.validate();
    Population pop;
    pop.cfg = cfg;
    pop.chips.resize(cfg.num_chips);
    pop.systematic.resize(cfg.num_challenges);

    if (cfg.model_kind == ModelKind::Independent) {
        for (int k = 0; k < cfg.num_challenges; ++k)
            pop.systematic[k] =
                cfg.bias_mean + cfg.bias_std * rng::normal(cfg.seed, rng::Domain::Systematic, k);
        for (int c = 0; c < cfg.num_chips; ++c) {
            ChipInstance& inst = pop.chips[c];
            inst.chip_id = c;
            inst.latent.resize(cfg.num_challenges);
            for (int k = 0; k < cfg.num_challenges; ++k)
                inst.latent[k] = cfg.inter_std * rng::normal(cfg.seed, rng::Domain::ChipOffset,
                                                             c, k);
        }
        return pop;
    }

    // StageAdditive: m+1 stages, per-stage variance scaled by 1/m so the
    // per-challenge totals stay comparable to the Independent model.
    const int m = cfg.challenge_width;
    const double stage_bias_mean = cfg.bias_mean / m;
    const double stage_bias_std = cfg.bias_std / std::sqrt(static_cast<double>(m));
    const double stage_delta_std = cfg.inter_std / std::sqrt(static_cast<double>(m));

    pop.stage_bias.resize(m + 1);
    for (int j = 0; j <= m; ++j)
        pop.stage_bias[j] =
            stage_bias_mean + stage_bias_std * rng::normal(cfg.seed, rng::Domain::StageBias, j);

    pop.challenges = draw_challenges(cfg);
    for (int k = 0; k < cfg.num_challenges; ++k) {
        double mu = 0.0;
        for (int j = 0; j <= m; ++j)
            mu += pop.stage_bias[j] * stage_parity(pop.challenges[k], j, m);
        pop.systematic[k] = mu;
    }

    for (int c = 0; c < cfg.num_chips; ++c) {
        ChipInstance& inst = pop.chips[c];
        inst.chip_id = c;
        inst.latent.resize(m + 1);
        for (int j = 0; j <= m; ++j)
            inst.latent[j] =
                stage_delta_std * rng::normal(cfg.seed, rng::Domain::StageDelta, c, j);
    }
    return pop;
}

std::pair<std::int64_t, bool> measure_cell(const Population& pop, int chip, int challenge,
                                           int repeat, const StressConfig* stress,
                                           std::uint64_t stress_index) {
    const PopulationConfig& cfg = pop.cfg;
    double x = pop.cell_mean(chip, challenge);
    double noise_scale = cfg.noise_std;
    if (stress != nullptr) {
        noise_scale *= stress->noise_multiplier;
        if (stress->drift_std > 0.0)
            x += stress->drift_std *
                 rng::normal(cfg.seed, rng::Domain::Drift, stress_index, chip);
    }
    if (noise_scale > 0.0)
        x += noise_scale * rng::normal(cfg.seed, rng::Domain::Noise, chip, challenge, repeat);

    // Counters quantize: nearest integer, ties away from zero.
    const std::int64_t rounded = std::llround(x);
    const std::int64_t lo = cfg.min_value();
    const std::int64_t hi = cfg.max_value();
    if (rounded < lo) return {lo, true};
    if (rounded > hi) return {hi, true};
    return {rounded, false};
}

MeasurementTensor measure(const Population& pop, std::span<const int> challenge_subset,
                          const StressConfig* stress, std::uint64_t stress_index) {
    const PopulationConfig& cfg = pop.cfg;
    if (stress != nullptr) stress->validate();
    for (int k : challenge_subset)
        if (k < 0 || k >= cfg.num_challenges)
            throw ContractViolation("challenge index out of range: " + std::to_string(k));

    MeasurementTensor t;
    t.cfg = cfg;
    t.num_chips = cfg.num_chips;
    t.num_challenges = static_cast<int>(challenge_subset.size());
    t.num_repeats = cfg.num_repeats;
    t.challenge_ids.assign(challenge_subset.begin(), challenge_subset.end());
    t.values.resize(static_cast<std::size_t>(t.num_chips) * t.num_challenges * t.num_repeats);
    t.overflow.resize(t.values.size());

    for (int c = 0; c < t.num_chips; ++c)
        for (int kk = 0; kk < t.num_challenges; ++kk)
            for (int r = 0; r < t.num_repeats; ++r) {
                const auto [v, ov] =
                    measure_cell(pop, c, t.challenge_ids[kk], r, stress, stress_index);
                const std::size_t idx = t.index(c, kk, r);
                t.values[idx] = v;
                t.overflow[idx] = ov ? 1 : 0;
            }
    return t;
}

MeasurementTensor measure(const Population& pop, const StressConfig* stress,
                          std::uint64_t stress_index) {
    std::vector<int> all(pop.cfg.num_challenges);
    for (int k = 0; k < pop.cfg.num_challenges; ++k) all[k] = k;
    return measure(pop, all, stress, stress_index);
}

} // namespace unbias
