#include "unbias/config.hpp"

#include <set>

#include <json.hpp>

#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"

namespace unbias {

using nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const ordered_json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_field(const ordered_json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const ordered_json::exception& e) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " +
                          e.what());
    }
}

PopulationConfig population_from_json(const ordered_json& j) {
    reject_unknown_keys(j,
                        {"model_kind", "register_width", "challenge_width", "num_chips",
                         "num_challenges", "num_repeats", "bias_mean", "bias_std", "inter_std",
                         "noise_std", "seed"},
                        "population");
    PopulationConfig cfg;
    std::string kind = "Independent";
    read_field(j, "model_kind", kind, "population");
    if (kind == "Independent") cfg.model_kind = ModelKind::Independent;
    else if (kind == "StageAdditive") cfg.model_kind = ModelKind::StageAdditive;
    else throw ConfigError("model_kind must be Independent or StageAdditive, got '" + kind + "'");
    read_field(j, "register_width", cfg.register_width, "population");
    read_field(j, "challenge_width", cfg.challenge_width, "population");
    read_field(j, "num_chips", cfg.num_chips, "population");
    read_field(j, "num_challenges", cfg.num_challenges, "population");
    read_field(j, "num_repeats", cfg.num_repeats, "population");
    read_field(j, "bias_mean", cfg.bias_mean, "population");
    read_field(j, "bias_std", cfg.bias_std, "population");
    read_field(j, "inter_std", cfg.inter_std, "population");
    read_field(j, "noise_std", cfg.noise_std, "population");
    read_field(j, "seed", cfg.seed, "population");
    return cfg;
}

SigmaSource sigma_from_json(const ordered_json& j) {
    reject_unknown_keys(j, {"mode", "value", "center", "pct"}, "sigma_source");
    SigmaSource s;
    std::string mode;
    read_field(j, "mode", mode, "sigma_source");
    if (mode == "estimate") {
        s.mode = SigmaSource::Mode::Estimate;
    } else if (mode == "fixed") {
        s.mode = SigmaSource::Mode::Fixed;
        if (!j.contains("value")) throw ConfigError("sigma_source fixed needs 'value'");
        read_field(j, "value", s.value, "sigma_source");
    } else if (mode == "sweep") {
        s.mode = SigmaSource::Mode::Sweep;
        if (!j.contains("center") || !j.contains("pct"))
            throw ConfigError("sigma_source sweep needs 'center' and 'pct'");
        read_field(j, "center", s.value, "sigma_source");
        read_field(j, "pct", s.sweep_pct, "sigma_source");
    } else {
        throw ConfigError("sigma_source mode must be estimate, fixed or sweep");
    }
    return s;
}

} // namespace

void ExperimentConfig::validate() const {
    population.validate();
    for (const StressEntry& e : stress) {
        e.stress.validate();
        if (e.label.empty()) throw ConfigError("stress entries need a non-empty label");
    }
    for (int bit : inspection_bits)
        if (bit < 0 || bit >= population.register_width)
            throw ConfigError("inspection bit " + std::to_string(bit) +
                              " out of register range");
    if (!(intra_threshold > 0.0 && intra_threshold < 1.0))
        throw ConfigError("intra_threshold must lie in (0, 1)");
    if (sigma_source.mode == SigmaSource::Mode::Fixed && !(sigma_source.value > 0.0))
        throw ConfigError("fixed sigma must be > 0");
    if (sigma_source.mode == SigmaSource::Mode::Sweep) {
        if (!(sigma_source.value > 0.0)) throw ConfigError("sweep center must be > 0");
        if (!(sigma_source.sweep_pct > 0.0 && sigma_source.sweep_pct < 100.0))
            throw ConfigError("sweep pct must lie in (0, 100)");
    }
    for (const std::string& f : formats)
        if (f != "csv") throw ConfigError("unsupported output format '" + f + "'");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"population", "stress", "inspection_bits", "intra_threshold",
                         "sigma_source", "output_dir", "formats"},
                        "experiment config");
    ExperimentConfig cfg;
    if (j.contains("population")) cfg.population = population_from_json(j.at("population"));
    if (j.contains("stress")) {
        for (const auto& entry : j.at("stress")) {
            reject_unknown_keys(entry, {"label", "noise_multiplier", "drift_std"}, "stress");
            StressEntry e;
            read_field(entry, "label", e.label, "stress");
            read_field(entry, "noise_multiplier", e.stress.noise_multiplier, "stress");
            read_field(entry, "drift_std", e.stress.drift_std, "stress");
            cfg.stress.push_back(e);
        }
    }
    if (j.contains("inspection_bits")) {
        const auto& bits = j.at("inspection_bits");
        if (bits.is_string()) {
            if (bits.get<std::string>() != "all")
                throw ConfigError("inspection_bits must be 'all' or a list of bit indices");
        } else {
            cfg.inspection_bits = bits.get<std::vector<int>>();
        }
    }
    read_field(j, "intra_threshold", cfg.intra_threshold, "experiment config");
    if (j.contains("sigma_source")) cfg.sigma_source = sigma_from_json(j.at("sigma_source"));
    read_field(j, "output_dir", cfg.output_dir, "experiment config");
    read_field(j, "formats", cfg.formats, "experiment config");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from_json_text(csvio::read_file(path));
}

std::string experiment_config_to_json_text(const ExperimentConfig& cfg) {
    ordered_json j;
    ordered_json pop;
    pop["model_kind"] =
        cfg.population.model_kind == ModelKind::Independent ? "Independent" : "StageAdditive";
    pop["register_width"] = cfg.population.register_width;
    pop["challenge_width"] = cfg.population.challenge_width;
    pop["num_chips"] = cfg.population.num_chips;
    pop["num_challenges"] = cfg.population.num_challenges;
    pop["num_repeats"] = cfg.population.num_repeats;
    pop["bias_mean"] = cfg.population.bias_mean;
    pop["bias_std"] = cfg.population.bias_std;
    pop["inter_std"] = cfg.population.inter_std;
    pop["noise_std"] = cfg.population.noise_std;
    pop["seed"] = cfg.population.seed;
    j["population"] = pop;
    ordered_json stress = ordered_json::array();
    for (const StressEntry& e : cfg.stress) {
        ordered_json s;
        s["label"] = e.label;
        s["noise_multiplier"] = e.stress.noise_multiplier;
        s["drift_std"] = e.stress.drift_std;
        stress.push_back(s);
    }
    j["stress"] = stress;
    if (cfg.inspection_bits.empty()) j["inspection_bits"] = "all";
    else j["inspection_bits"] = cfg.inspection_bits;
    j["intra_threshold"] = cfg.intra_threshold;
    ordered_json sig;
    switch (cfg.sigma_source.mode) {
        case SigmaSource::Mode::Estimate: sig["mode"] = "estimate"; break;
        case SigmaSource::Mode::Fixed:
            sig["mode"] = "fixed";
            sig["value"] = cfg.sigma_source.value;
            break;
        case SigmaSource::Mode::Sweep:
            sig["mode"] = "sweep";
            sig["center"] = cfg.sigma_source.value;
            sig["pct"] = cfg.sigma_source.sweep_pct;
            break;
    }
    j["sigma_source"] = sig;
    j["output_dir"] = cfg.output_dir;
    j["formats"] = cfg.formats;
    return j.dump(2) + "\n";
}

ExperimentConfig paper_profile() {
    ExperimentConfig cfg;
    cfg.population.model_kind = ModelKind::Independent;
    cfg.population.register_width = 19;
    cfg.population.challenge_width = 10;
    cfg.population.num_chips = 7;
    cfg.population.num_challenges = 120;
    cfg.population.num_repeats = 10;
    cfg.population.bias_mean = 4000.0;
    cfg.population.bias_std = 800.0;
    cfg.population.inter_std = 521.0;
    cfg.population.noise_std = 60.0;
    cfg.population.seed = 1;
    cfg.stress = {{"nominal", {1.0, 0.0}},
                  {"hot_noisy", {2.0, 150.0}}};
    cfg.intra_threshold = 0.10;
    cfg.sigma_source = {SigmaSource::Mode::Estimate, 0.0, 0.0};
    cfg.output_dir = "out";
    return cfg;
}

ExperimentConfig desk_profile() {
    ExperimentConfig cfg = paper_profile();
    cfg.population.num_chips = 200;
    cfg.sigma_source = {SigmaSource::Mode::Sweep, 521.0, 15.0};
    return cfg;
}

} // namespace unbias
