#include <doctest.h>

#include <filesystem>
#include <set>

#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"
#include "unbias/experiment.hpp"

using namespace unbias;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.population.num_chips = 12;
    cfg.population.num_challenges = 24;
    cfg.population.num_repeats = 4;
    cfg.population.bias_mean = 4000.0;
    cfg.population.bias_std = 800.0;
    cfg.population.inter_std = 521.0;
    cfg.population.noise_std = 60.0;
    cfg.population.seed = 8;
    cfg.stress = {{"nominal", {1.0, 0.0}}, {"stressed", {2.0, 150.0}}};
    cfg.inspection_bits = {6, 10, 14, 18};
    cfg.intra_threshold = 0.2;
    cfg.sigma_source = {SigmaSource::Mode::Fixed, 521.0, 0.0};
    cfg.output_dir = (fs::temp_directory_path() / "unbias_exp_test").string();
    return cfg;
}

} // namespace

TEST_CASE("the full pipeline writes a consistent bundle") {
    ExperimentConfig cfg = tiny_config();
    fs::remove_all(cfg.output_dir);
    const RunSummary sum = run_experiment(cfg);

    CHECK(sum.selected_bit == 10); // pred intra: bit 6 noisy, 10 clean, bound decreasing after
    CHECK(sum.sigma_used == 521.0);
    CHECK(sum.bit_reports.size() == 4);

    const std::set<std::string> expected = {
        "measurements.csv",        "bit_report.csv",  "selection.json",
        "responses_per_repeat.csv", "responses_reference.csv",
        "fhd_summary.csv",         "stress_intra.csv", "summary.json"};
    std::set<std::string> written(sum.files.begin(), sum.files.end());
    CHECK(written == expected);
    for (const std::string& f : expected) CHECK(fs::exists(fs::path(cfg.output_dir) / f));

    // every CSV parses back into the in-memory structures
    const std::string dir = cfg.output_dir;
    const MeasurementTensor tensor = csvio::parse_tensor_csv(
        csvio::read_file(dir + "/measurements.csv"), cfg.population);
    CHECK(tensor.num_chips == cfg.population.num_chips);
    const auto reports =
        csvio::parse_bit_report_csv(csvio::read_file(dir + "/bit_report.csv"));
    REQUIRE(reports.size() == sum.bit_reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].bit_index == sum.bit_reports[i].bit_index);
        CHECK(reports[i].pred_intra == sum.bit_reports[i].pred_intra);
        CHECK(reports[i].pred_inter_lb == sum.bit_reports[i].pred_inter_lb);
    }
    const ResponseMatrix per_rep = csvio::parse_per_repeat_csv(
        csvio::read_file(dir + "/responses_per_repeat.csv"), sum.selected_bit);
    const ResponseMatrix from_tensor =
        extract_per_repeat(tensor, {sum.selected_bit});
    CHECK(per_rep.bits == from_tensor.bits);
    const FhdSummary fhd =
        csvio::parse_fhd_summary_csv(csvio::read_file(dir + "/fhd_summary.csv"));
    CHECK(fhd.num_chips == cfg.population.num_chips);
    CHECK(fhd.intra_mean == sum.meas_intra);
    CHECK(fhd.inter_mean == sum.meas_inter);
    const auto stress_rows =
        parse_stress_table_csv(csvio::read_file(dir + "/stress_intra.csv"));
    REQUIRE(stress_rows.size() == sum.stress_rows.size());
    for (std::size_t i = 0; i < stress_rows.size(); ++i) {
        CHECK(stress_rows[i].label == sum.stress_rows[i].label);
        CHECK(stress_rows[i].noise_multiplier == sum.stress_rows[i].noise_multiplier);
        CHECK(stress_rows[i].drift_std == sum.stress_rows[i].drift_std);
        CHECK(stress_rows[i].intra_mean == sum.stress_rows[i].intra_mean);
    }

    // stress rows echo the configured grid
    REQUIRE(sum.stress_rows.size() == 2);
    CHECK(sum.stress_rows[0].label == "nominal");
    CHECK(sum.stress_rows[1].drift_std == 150.0);
    CHECK(sum.stress_rows[1].intra_mean > sum.stress_rows[0].intra_mean);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("identical config and seed produce byte-identical bundles") {
    ExperimentConfig cfg = tiny_config();
    RunOptions opts;
    opts.out_dir_override = (fs::temp_directory_path() / "unbias_det_a").string();
    fs::remove_all(*opts.out_dir_override);
    const RunSummary a = run_experiment(cfg, opts);
    RunOptions opts2 = opts;
    opts2.out_dir_override = (fs::temp_directory_path() / "unbias_det_b").string();
    fs::remove_all(*opts2.out_dir_override);
    const RunSummary b = run_experiment(cfg, opts2);
    REQUIRE(a.files == b.files);
    for (const std::string& f : a.files) {
        const std::string fa = csvio::read_file(*opts.out_dir_override + "/" + f);
        const std::string fb = csvio::read_file(*opts2.out_dir_override + "/" + f);
        CHECK(fa == fb);
    }
    fs::remove_all(*opts.out_dir_override);
    fs::remove_all(*opts2.out_dir_override);
}

TEST_CASE("the hardware-scale profile produces a selection summary") {
    ExperimentConfig cfg = paper_profile(); // 7 chips, 120 challenges, t = 10
    RunOptions opts;
    opts.write_files = false;
    const RunSummary sum = run_experiment(cfg, opts);
    CHECK(sum.selected_bit >= 0);
    CHECK(sum.selected_bit < cfg.population.register_width);
    CHECK(sum.meas_intra >= 0.0);
    CHECK(sum.meas_intra <= 1.0);
    CHECK(sum.meas_inter >= 0.0);
    CHECK(sum.meas_inter <= 1.0);
    CHECK(sum.sigma_estimate > 0.0);
    CHECK(sum.bit_reports.size() == 19);
}

TEST_CASE("single-chip configs are rejected before simulation") {
    ExperimentConfig cfg = tiny_config();
    cfg.population.num_chips = 1;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    cfg = tiny_config();
    cfg.population.num_repeats = 1;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("strict overflow fails exactly when cells clamp") {
    ExperimentConfig cfg = tiny_config();
    cfg.population.bias_mean = 262144.0; // 2^18: clamps half the population
    RunOptions strict;
    strict.strict_overflow = true;
    strict.write_files = false;
    CHECK_THROWS_AS(run_experiment(cfg, strict), OverflowError);

    RunOptions lax;
    lax.write_files = false;
    const RunSummary sum = run_experiment(cfg, lax);
    CHECK(sum.overflow_count > 0);

    ExperimentConfig clean = tiny_config();
    CHECK_NOTHROW(run_experiment(clean, strict));
}

TEST_CASE("seed override changes the bundle, not the config") {
    ExperimentConfig cfg = tiny_config();
    RunOptions opts;
    opts.write_files = false;
    const RunSummary a = run_experiment(cfg, opts);
    opts.seed_override = 99;
    const RunSummary b = run_experiment(cfg, opts);
    CHECK(a.sigma_estimate != b.sigma_estimate);
}

TEST_CASE("MSB baseline collapses under routing bias") {
    ExperimentConfig cfg = tiny_config();
    cfg.population.num_chips = 200;
    cfg.population.num_challenges = 40;
    cfg.population.num_repeats = 2;
    cfg.population.noise_std = 0.0;
    cfg.population.bias_std = 0.0;
    cfg.population.bias_mean = 8.0 * cfg.population.inter_std; // far from the sign boundary
    cfg.inspection_bits.clear();
    RunOptions opts;
    opts.write_files = false;
    const BaselineReport rep = compare_msb_baseline(cfg, opts);
    CHECK(rep.msb.bit_index == 18);
    CHECK(rep.msb.inter_fhd < 0.05); // constant-generator behavior
    CHECK(rep.selected.inter_fhd >= rep.pred_inter_lb_selected - 0.03);
    CHECK(rep.selected.inter_fhd > 0.4);

    // unbiased population: the sign bit is a fair coin across chips
    cfg.population.bias_mean = 0.0;
    const BaselineReport fair = compare_msb_baseline(cfg, opts);
    CHECK(fair.msb.inter_fhd == doctest::Approx(0.5).epsilon(0.06));
}
