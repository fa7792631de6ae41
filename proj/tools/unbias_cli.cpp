// Command-line front end for the UNBIAS PUF laboratory: population
// simulation, response extraction, FHD metrics, inspection-bit prediction
// and selection, stress reporting, and RTL emission.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unbias/config.hpp"
#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"
#include "unbias/experiment.hpp"
#include "unbias/metrics.hpp"
#include "unbias/prediction.hpp"
#include "unbias/rtlgen.hpp"

namespace {

// Exit codes: 0 ok, 2 config, 3 overflow (strict), 4 no feasible bit, 5 I/O.
enum ExitCode { kOk = 0, kConfig = 2, kOverflow = 3, kNoFeasibleBit = 4, kIo = 5 };

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool strict_overflow = false;
    std::string format = "csv";
};

unbias::ExperimentConfig load_config(const CommonArgs& args) {
    unbias::ExperimentConfig cfg =
        args.config_path.empty() ? unbias::desk_profile()
                                 : unbias::load_experiment_config(args.config_path);
    if (args.seed) cfg.population.seed = *args.seed;
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (args.format != "csv") throw unbias::ConfigError("only --format csv is supported");
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out_dir = true) {
    cmd->add_option("--config", args.config_path,
                    "Experiment config JSON (defaults to the built-in desk profile)");
    cmd->add_option("--seed", args.seed, "Override the population seed");
    if (with_out_dir) cmd->add_option("--out-dir", args.out_dir, "Output directory");
    cmd->add_flag("--strict-overflow", args.strict_overflow,
                  "Fail when any difference value had to be clamped");
    cmd->add_option("--format", args.format, "Output format (csv)");
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

unbias::MeasurementTensor simulate_tensor(const unbias::ExperimentConfig& cfg,
                                          bool strict_overflow) {
    const unbias::Population pop = unbias::generate_population(cfg.population);
    unbias::MeasurementTensor tensor = unbias::measure(pop);
    if (strict_overflow && tensor.any_overflow())
        throw unbias::OverflowError("difference register overflow under strict-overflow mode");
    if (!cfg.population.has_overflow_headroom())
        std::fprintf(stderr,
                     "warning: configuration leaves no 6-sigma overflow headroom in the "
                     "%d-bit register (%zu cells clamped)\n",
                     cfg.population.register_width, tensor.overflow_count());
    return tensor;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong UNBIAS PUF laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    int bit = -1;
    double sigma_flag = 0.0;
    int chip = 0;
    std::string reducer_name = "majority";
    std::string rtl_out = "unbias_puf.v";
    unbias::RtlParams rtl;

    CLI::App* simulate = app.add_subcommand("simulate", "Generate a population and write measurements.csv");
    add_common(simulate, args);

    CLI::App* extract = app.add_subcommand("extract", "Extract response bits from a simulated tensor");
    add_common(extract, args);
    extract->add_option("--bit", bit, "Inspection bit index (default: MSB)")
        ->check(CLI::Range(0, 62));
    extract->add_option("--reducer", reducer_name, "Reference reducer: majority|first");

    CLI::App* metrics_cmd = app.add_subcommand("metrics", "Intra/inter-FHD and sigma estimate at one bit");
    add_common(metrics_cmd, args);
    metrics_cmd->add_option("--bit", bit, "Inspection bit index (default: MSB)")
        ->check(CLI::Range(0, 62));

    CLI::App* predict = app.add_subcommand("predict", "Per-bit intra prediction and inter-FHD lower bound");
    add_common(predict, args);
    predict->add_option("--sigma", sigma_flag, "Inter-chip sigma (default: estimate from simulation)");
    predict->add_option("--chip", chip, "Chip used for the intra prediction");

    CLI::App* select = app.add_subcommand("select", "Choose the inspection bit from one chip's predictions");
    add_common(select, args);
    select->add_option("--sigma", sigma_flag, "Inter-chip sigma (default: per sigma_source)");

    CLI::App* emit = app.add_subcommand("emit-rtl", "Write the parameterized Verilog design");
    emit->add_option("--module-name", rtl.module_name, "Top module name");
    emit->add_option("--challenge-width", rtl.challenge_width, "Path-configuration stages (m)");
    emit->add_option("--register-width", rtl.register_width, "Difference register bits (W)");
    emit->add_option("--ro-inverters", rtl.ro_inverters, "Inverters per ring oscillator (odd)");
    emit->add_option("--threshold", rtl.ro_count_threshold, "RO counter threshold");
    emit->add_option("--out", rtl_out, "Output file");

    CLI::App* report = app.add_subcommand("report", "Full pipeline: simulate, sweep bits, select, stress table");
    add_common(report, args);

    CLI::App* baseline = app.add_subcommand("baseline", "MSB extraction vs selected-bit extraction");
    add_common(baseline, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto cfg = load_config(args);
            const auto tensor = simulate_tensor(cfg, args.strict_overflow);
            ensure_dir(cfg.output_dir);
            const auto path = std::filesystem::path(cfg.output_dir) / "measurements.csv";
            unbias::csvio::write_file(path.string(), unbias::csvio::tensor_csv(tensor));
            std::printf("wrote %s (%d chips x %d challenges x %d repeats, %zu overflows)\n",
                        path.c_str(), tensor.num_chips, tensor.num_challenges,
                        tensor.num_repeats, tensor.overflow_count());
        } else if (extract->parsed()) {
            const auto cfg = load_config(args);
            const auto tensor = simulate_tensor(cfg, args.strict_overflow);
            const int use_bit = bit < 0 ? cfg.population.register_width - 1 : bit;
            const unbias::Reducer reducer = reducer_name == "first"
                                                ? unbias::Reducer::FirstRepeat
                                                : unbias::Reducer::MajorityVote;
            const auto per_rep = unbias::extract_per_repeat(tensor, {use_bit});
            const auto ref = unbias::reduce_responses(per_rep, reducer);
            ensure_dir(cfg.output_dir);
            const std::filesystem::path dir(cfg.output_dir);
            unbias::csvio::write_file((dir / "responses_per_repeat.csv").string(),
                                      unbias::csvio::per_repeat_csv(per_rep));
            unbias::csvio::write_file((dir / "responses_reference.csv").string(),
                                      unbias::csvio::reference_csv(ref));
            std::printf("extracted bit %d responses into %s\n", use_bit, cfg.output_dir.c_str());
        } else if (metrics_cmd->parsed()) {
            const auto cfg = load_config(args);
            const auto tensor = simulate_tensor(cfg, args.strict_overflow);
            const int use_bit = bit < 0 ? cfg.population.register_width - 1 : bit;
            const auto per_rep = unbias::extract_per_repeat(tensor, {use_bit});
            const auto ref = unbias::reduce_responses(per_rep, unbias::Reducer::MajorityVote);
            const auto intra = unbias::intra_fhd(per_rep);
            const auto inter = unbias::inter_fhd(ref, cfg.population.num_chips <= 1024);
            ensure_dir(cfg.output_dir);
            const auto path = std::filesystem::path(cfg.output_dir) / "fhd_summary.csv";
            unbias::csvio::write_file(
                path.string(), unbias::csvio::fhd_summary_csv(make_fhd_summary(intra, inter)));
            std::printf("bit %d: intra-FHD %.4f, inter-FHD %.4f, sigma estimate %.2f\n",
                        use_bit, intra.mean, inter.mean, unbias::estimate_sigma(tensor));
        } else if (predict->parsed()) {
            const auto cfg = load_config(args);
            const auto tensor = simulate_tensor(cfg, args.strict_overflow);
            const double sigma =
                sigma_flag > 0.0 ? sigma_flag : unbias::estimate_sigma(tensor);
            const auto pred = unbias::per_bit_intra_prediction(tensor, chip);
            std::printf("bit_index,w,pred_intra,pred_inter_lb\n");
            for (int i = 0; i < cfg.population.register_width; ++i)
                std::printf("%d,%.0f,%s,%s\n", i, std::ldexp(1.0, i),
                            unbias::csvio::fmt_double(pred[i]).c_str(),
                            unbias::csvio::fmt_double(
                                unbias::predict_inter_lb(std::ldexp(1.0, i), sigma))
                                .c_str());
        } else if (select->parsed()) {
            auto cfg = load_config(args);
            if (sigma_flag > 0.0)
                cfg.sigma_source = {unbias::SigmaSource::Mode::Fixed, sigma_flag, 0.0};
            unbias::RunOptions opts;
            opts.strict_overflow = args.strict_overflow;
            const auto sum = unbias::run_experiment(cfg, opts);
            std::printf("selected bit %d (w = %.0f): pred intra %.4f, pred inter lb %.4f, "
                        "measured intra %.4f, measured inter %.4f\n",
                        sum.selected_bit, sum.selected_w, sum.pred_intra, sum.pred_inter_lb,
                        sum.meas_intra, sum.meas_inter);
        } else if (emit->parsed()) {
            const std::string text = unbias::emit_rtl(rtl);
            const auto issues = unbias::lint_rtl(text);
            if (!issues.empty()) {
                for (const auto& issue : issues)
                    std::fprintf(stderr, "lint: %s\n", issue.c_str());
                return kConfig;
            }
            unbias::csvio::write_file(rtl_out, text);
            std::printf("wrote %s (%d switch stages, %d RO gates, %d-bit register)\n",
                        rtl_out.c_str(), rtl.challenge_width,
                        2 * (rtl.challenge_width + 1), rtl.register_width);
        } else if (report->parsed()) {
            const auto cfg = load_config(args);
            unbias::RunOptions opts;
            opts.strict_overflow = args.strict_overflow;
            const auto sum = unbias::run_experiment(cfg, opts);
            if (sum.overflow_count > 0)
                std::fprintf(stderr, "warning: %zu difference values were clamped\n",
                             sum.overflow_count);
            std::printf("report in %s: selected bit %d, measured intra %.4f / inter %.4f, "
                        "sigma estimate %.2f\n",
                        cfg.output_dir.c_str(), sum.selected_bit, sum.meas_intra,
                        sum.meas_inter, sum.sigma_estimate);
        } else if (baseline->parsed()) {
            const auto cfg = load_config(args);
            unbias::RunOptions opts;
            opts.strict_overflow = args.strict_overflow;
            const auto rep = unbias::compare_msb_baseline(cfg, opts);
            std::printf("extraction,bit_index,inter_fhd,intra_fhd\n");
            std::printf("msb,%d,%.4f,%.4f\n", rep.msb.bit_index, rep.msb.inter_fhd,
                        rep.msb.intra_fhd);
            std::printf("selected,%d,%.4f,%.4f\n", rep.selected.bit_index,
                        rep.selected.inter_fhd, rep.selected.intra_fhd);
        }
    } catch (const unbias::OverflowError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kOverflow;
    } catch (const unbias::NoFeasibleBitError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNoFeasibleBit;
    } catch (const unbias::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const unbias::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kOk;
}
