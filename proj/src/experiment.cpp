#include "unbias/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"
#include "unbias/metrics.hpp"

namespace unbias {

using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ExperimentConfig effective_config(const ExperimentConfig& cfg, const RunOptions& opts) {
    ExperimentConfig out = cfg;
    if (opts.seed_override) out.population.seed = *opts.seed_override;
    if (opts.out_dir_override) out.output_dir = *opts.out_dir_override;
    out.validate();
    return out;
}

std::vector<int> bits_to_sweep(const ExperimentConfig& cfg) {
    if (!cfg.inspection_bits.empty()) return cfg.inspection_bits;
    std::vector<int> bits(cfg.population.register_width);
    for (int i = 0; i < cfg.population.register_width; ++i) bits[i] = i;
    return bits;
}

void check_overflow(const MeasurementTensor& tensor, const RunOptions& opts) {
    if (opts.strict_overflow && tensor.any_overflow())
        throw OverflowError("difference register overflow under strict-overflow mode (" +
                            std::to_string(tensor.overflow_count()) + " cells clamped)");
}

struct Writer {
    std::filesystem::path dir;
    bool enabled;
    std::vector<std::string>* files;

    void operator()(const std::string& name, const std::string& content) const {
        if (!enabled) return;
        csvio::write_file((dir / name).string(), content);
        files->push_back(name);
    }
};

} // namespace

RunSummary run_experiment(const ExperimentConfig& raw_cfg, const RunOptions& opts) {
    const ExperimentConfig cfg = effective_config(raw_cfg, opts);
    if (cfg.population.num_chips < 2)
        throw ConfigError("inter-FHD needs num_chips >= 2");
    if (cfg.population.num_repeats < 2)
        throw ConfigError("intra-FHD needs num_repeats >= 2");

    RunSummary sum;
    if (opts.write_files) std::filesystem::create_directories(cfg.output_dir);
    Writer write{cfg.output_dir, opts.write_files, &sum.files};

    const Population pop = generate_population(cfg.population);
    const MeasurementTensor tensor = measure(pop);
    check_overflow(tensor, opts);
    sum.overflow_count = tensor.overflow_count();
    write("measurements.csv", csvio::tensor_csv(tensor));

    sum.sigma_estimate = estimate_sigma(tensor);
    double sigma = sum.sigma_estimate;
    double sweep_frac = 0.0;
    switch (cfg.sigma_source.mode) {
        case SigmaSource::Mode::Estimate: break;
        case SigmaSource::Mode::Fixed: sigma = cfg.sigma_source.value; break;
        case SigmaSource::Mode::Sweep:
            sigma = cfg.sigma_source.value;
            sweep_frac = cfg.sigma_source.sweep_pct / 100.0;
            break;
    }
    sum.sigma_used = sigma;

    // Per-bit measured metrics and single-chip predictions.
    const std::vector<int> bits = bits_to_sweep(cfg);
    const int width = cfg.population.register_width;
    const std::vector<double> pred_per_bit = per_bit_intra_prediction(tensor, 0);
    std::vector<double> meas_intra(width, kNaN), meas_inter(width, kNaN);
    for (int bit : bits) {
        const ResponseMatrix per_rep = extract_per_repeat(tensor, {bit});
        const ResponseMatrix ref = reduce_responses(per_rep, Reducer::MajorityVote);
        meas_intra[bit] = intra_fhd(per_rep).mean;
        meas_inter[bit] = inter_fhd(ref, false).mean;
    }

    // Select on the swept candidates only: mask others out of reach.
    std::vector<double> pred_for_selection(width, 2.0);
    for (int bit : bits) pred_for_selection[bit] = pred_per_bit[bit];
    Selection sel = select_inspection_bit(pred_for_selection, sigma, cfg.intra_threshold,
                                          meas_intra, meas_inter);
    // Keep reports only for swept bits; restore true predictions.
    std::vector<BitReport> reports;
    for (int bit : bits) {
        BitReport r = sel.reports[bit];
        r.pred_intra = pred_per_bit[bit];
        reports.push_back(r);
    }
    sum.bit_reports = reports;
    sum.selected_bit = sel.bit_index;
    sum.selected_w = std::ldexp(1.0, sel.bit_index);
    sum.pred_intra = pred_per_bit[sel.bit_index];
    sum.pred_inter_lb = predict_inter_lb(sum.selected_w, sigma);
    sum.meas_intra = meas_intra[sel.bit_index];
    sum.meas_inter = meas_inter[sel.bit_index];
    if (sweep_frac > 0.0) {
        sum.sweep_lb_low = predict_inter_lb(sum.selected_w, sigma * (1.0 - sweep_frac));
        sum.sweep_lb_center = sum.pred_inter_lb;
        sum.sweep_lb_high = predict_inter_lb(sum.selected_w, sigma * (1.0 + sweep_frac));
    } else {
        sum.sweep_lb_low = sum.sweep_lb_center = sum.sweep_lb_high = kNaN;
    }
    write("bit_report.csv", csvio::bit_report_csv(reports));
    {
        ordered_json sel_record;
        sel_record["selected_bit"] = sum.selected_bit;
        sel_record["w"] = sum.selected_w;
        sel_record["sigma_used"] = sum.sigma_used;
        sel_record["pred_intra"] = sum.pred_intra;
        sel_record["pred_inter_lb"] = sum.pred_inter_lb;
        sel_record["meas_intra"] = sum.meas_intra;
        sel_record["meas_inter"] = sum.meas_inter;
        sel_record["intra_threshold"] = cfg.intra_threshold;
        write("selection.json", sel_record.dump(2) + "\n");
    }

    // Responses and FHD summary at the selected bit.
    const InspectionBit chosen{sel.bit_index};
    const ResponseMatrix per_rep = extract_per_repeat(tensor, chosen);
    const ResponseMatrix ref = reduce_responses(per_rep, Reducer::MajorityVote);
    write("responses_per_repeat.csv", csvio::per_repeat_csv(per_rep));
    write("responses_reference.csv", csvio::reference_csv(ref));
    const bool keep_pairwise = cfg.population.num_chips <= 1024;
    write("fhd_summary.csv", csvio::fhd_summary_csv(make_fhd_summary(
                                 intra_fhd(per_rep), inter_fhd(ref, keep_pairwise))));

    // Stress conditions, reliability against the nominal references.
    for (std::size_t s = 0; s < cfg.stress.size(); ++s) {
        const StressEntry& entry = cfg.stress[s];
        const MeasurementTensor stressed = measure(pop, &entry.stress, s);
        check_overflow(stressed, opts);
        const ResponseMatrix stressed_rep = extract_per_repeat(stressed, chosen);
        StressRow row;
        row.label = entry.label;
        row.noise_multiplier = entry.stress.noise_multiplier;
        row.drift_std = entry.stress.drift_std;
        row.intra_mean = fhd_to_reference(ref, stressed_rep).mean;
        sum.stress_rows.push_back(row);
    }
    write("stress_intra.csv", stress_table_csv(sum.stress_rows));
    write("summary.json", summary_json_text(sum, cfg));
    return sum;
}

BaselineReport compare_msb_baseline(const ExperimentConfig& raw_cfg, const RunOptions& opts) {
    const ExperimentConfig cfg = effective_config(raw_cfg, opts);
    if (cfg.population.num_chips < 2)
        throw ConfigError("inter-FHD needs num_chips >= 2");
    if (cfg.population.num_repeats < 2)
        throw ConfigError("intra-FHD needs num_repeats >= 2");

    const Population pop = generate_population(cfg.population);
    const MeasurementTensor tensor = measure(pop);
    check_overflow(tensor, opts);

    double sigma = cfg.sigma_source.mode == SigmaSource::Mode::Estimate
                       ? estimate_sigma(tensor)
                       : cfg.sigma_source.value;
    const std::vector<double> pred_per_bit = per_bit_intra_prediction(tensor, 0);
    const Selection sel =
        select_inspection_bit(pred_per_bit, sigma, cfg.intra_threshold);

    auto row_for = [&](int bit, const std::string& name) {
        const ResponseMatrix per_rep = extract_per_repeat(tensor, {bit});
        const ResponseMatrix ref = reduce_responses(per_rep, Reducer::MajorityVote);
        BaselineRow row;
        row.extraction = name;
        row.bit_index = bit;
        row.intra_fhd = intra_fhd(per_rep).mean;
        row.inter_fhd = inter_fhd(ref, false).mean;
        return row;
    };

    BaselineReport rep;
    rep.msb = row_for(cfg.population.register_width - 1, "msb");
    rep.selected = row_for(sel.bit_index, "selected");
    rep.pred_inter_lb_selected = predict_inter_lb(std::ldexp(1.0, sel.bit_index), sigma);

    if (opts.write_files) {
        std::filesystem::create_directories(cfg.output_dir);
        std::string csv = "extraction,bit_index,inter_fhd,intra_fhd\n";
        for (const BaselineRow* r : {&rep.msb, &rep.selected})
            csv += r->extraction + ',' + std::to_string(r->bit_index) + ',' +
                   csvio::fmt_double(r->inter_fhd) + ',' + csvio::fmt_double(r->intra_fhd) +
                   '\n';
        csvio::write_file(
            (std::filesystem::path(cfg.output_dir) / "baseline.csv").string(), csv);
    }
    return rep;
}

std::string stress_table_csv(std::span<const StressRow> rows) {
    std::string csv = "label,noise_multiplier,drift_std,intra_mean\n";
    for (const StressRow& row : rows)
        csv += row.label + ',' + csvio::fmt_double(row.noise_multiplier) + ',' +
               csvio::fmt_double(row.drift_std) + ',' + csvio::fmt_double(row.intra_mean) +
               '\n';
    return csv;
}

std::vector<StressRow> parse_stress_table_csv(const std::string& text) {
    std::vector<StressRow> rows;
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos ||
        text.substr(0, pos) != "label,noise_multiplier,drift_std,intra_mean")
        throw IoError("unexpected stress table header");
    while (pos + 1 < text.size()) {
        const std::size_t eol = text.find('\n', pos + 1);
        const std::string line =
            text.substr(pos + 1, (eol == std::string::npos ? text.size() : eol) - pos - 1);
        pos = eol == std::string::npos ? text.size() : eol;
        if (line.empty()) continue;
        StressRow row;
        std::size_t a = line.find(',');
        std::size_t b = line.find(',', a + 1);
        std::size_t c = line.find(',', b + 1);
        if (a == std::string::npos || b == std::string::npos || c == std::string::npos)
            throw IoError("stress table row needs 4 fields");
        row.label = line.substr(0, a);
        row.noise_multiplier = std::strtod(line.substr(a + 1, b - a - 1).c_str(), nullptr);
        row.drift_std = std::strtod(line.substr(b + 1, c - b - 1).c_str(), nullptr);
        row.intra_mean = std::strtod(line.substr(c + 1).c_str(), nullptr);
        rows.push_back(row);
    }
    return rows;
}

std::string summary_json_text(const RunSummary& s, const ExperimentConfig& cfg) {
    auto num = [](double v) -> ordered_json {
        if (std::isnan(v)) return nullptr;
        return v;
    };
    ordered_json j;
    j["selected_bit"] = s.selected_bit;
    j["selected_w"] = s.selected_w;
    j["sigma_used"] = s.sigma_used;
    j["sigma_estimate"] = s.sigma_estimate;
    j["pred_intra"] = num(s.pred_intra);
    j["pred_inter_lb"] = num(s.pred_inter_lb);
    j["meas_intra"] = num(s.meas_intra);
    j["meas_inter"] = num(s.meas_inter);
    j["sweep_lb"] = ordered_json{{"low", num(s.sweep_lb_low)},
                                 {"center", num(s.sweep_lb_center)},
                                 {"high", num(s.sweep_lb_high)}};
    j["overflow_count"] = s.overflow_count;
    ordered_json stress = ordered_json::array();
    for (const StressRow& r : s.stress_rows)
        stress.push_back(ordered_json{{"label", r.label},
                                      {"noise_multiplier", r.noise_multiplier},
                                      {"drift_std", r.drift_std},
                                      {"intra_mean", r.intra_mean}});
    j["stress"] = stress;
    ordered_json files = ordered_json::array();
    for (const std::string& f : s.files) files.push_back(f);
    files.push_back("summary.json");
    j["files"] = files;
    // Config echo (population + analysis knobs, no paths).
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
    j["intra_threshold"] = cfg.intra_threshold;
    return j.dump(2) + "\n";
}

} // namespace unbias
