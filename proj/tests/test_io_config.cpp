#include <doctest.h>

#include <cmath>
#include <limits>

#include "unbias/config.hpp"
#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"
#include "unbias/metrics.hpp"
#include "unbias/rng.hpp"

using namespace unbias;

TEST_CASE("doubles survive the text round trip") {
    const double values[] = {0.0,    -0.0,   1.0 / 3.0, 0.025, 521.0, 736.8098984235,
                             1e-300, 1e300,  -4.625e-5, 0.1,   2.5};
    for (double v : values) {
        const std::string s = csvio::fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    for (int i = 0; i < 2000; ++i) {
        const double v =
            std::ldexp(static_cast<double>(rng::cell_key(4, rng::Domain::Noise, i)), -64) *
            std::pow(10.0, static_cast<int>(i % 60) - 30);
        const std::string s = csvio::fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(std::isnan(std::strtod(csvio::fmt_double(
        std::numeric_limits<double>::quiet_NaN()).c_str(), nullptr)));
}

TEST_CASE("measurement tensors round trip through CSV") {
    PopulationConfig cfg;
    cfg.num_chips = 4;
    cfg.num_challenges = 6;
    cfg.num_repeats = 3;
    cfg.bias_mean = 260000.0; // deliberately clipping to exercise overflow flags
    cfg.bias_std = 3000.0;
    cfg.inter_std = 400.0;
    cfg.noise_std = 100.0;
    cfg.seed = 2;
    const MeasurementTensor t = measure(generate_population(cfg));
    CHECK(t.any_overflow());
    const std::string text = csvio::tensor_csv(t);
    CHECK(text.rfind("chip_id,challenge_index,repeat,diff_value,overflow\n", 0) == 0);
    const MeasurementTensor back = csvio::parse_tensor_csv(text, cfg);
    CHECK(back.num_chips == t.num_chips);
    CHECK(back.num_challenges == t.num_challenges);
    CHECK(back.num_repeats == t.num_repeats);
    CHECK(back.values == t.values);
    CHECK(back.overflow == t.overflow);
    CHECK(back.challenge_ids == t.challenge_ids);
}

TEST_CASE("response matrices round trip through CSV") {
    ResponseMatrix m;
    m.num_chips = 3;
    m.num_challenges = 5;
    m.num_repeats = 4;
    m.bit_index = 10;
    m.bits.resize(60);
    for (std::size_t i = 0; i < m.bits.size(); ++i)
        m.bits[i] = static_cast<std::uint8_t>(rng::cell_key(9, rng::Domain::Noise, i) & 1);

    const ResponseMatrix per = csvio::parse_per_repeat_csv(csvio::per_repeat_csv(m), 10);
    CHECK(per.bits == m.bits);
    CHECK(per.num_repeats == 4);
    CHECK(per.bit_index == 10);

    const ResponseMatrix ref0 = reduce_responses(m, Reducer::MajorityVote);
    const ResponseMatrix ref1 = csvio::parse_reference_csv(csvio::reference_csv(ref0), 10);
    CHECK(ref1.bits == ref0.bits);
    CHECK(ref1.num_repeats == 1);
}

TEST_CASE("FHD summaries round trip through CSV") {
    FhdSummary s;
    s.intra_per_chip = {0.05, 0.0, 1.0 / 3.0};
    s.intra_mean = (0.05 + 0.0 + 1.0 / 3.0) / 3.0;
    s.inter_pairwise = {0.5, 0.45, 0.41};
    s.inter_mean = (0.5 + 0.45 + 0.41) / 3.0;
    s.num_chips = 3;
    s.n_challenges = 120;
    s.t = 10;
    const FhdSummary back = csvio::parse_fhd_summary_csv(csvio::fhd_summary_csv(s));
    CHECK(back.intra_per_chip == s.intra_per_chip);
    CHECK(back.inter_pairwise == s.inter_pairwise);
    CHECK(back.intra_mean == s.intra_mean);
    CHECK(back.inter_mean == s.inter_mean);
    CHECK(back.num_chips == 3);
    CHECK(back.n_challenges == 120);
    CHECK(back.t == 10);
}

TEST_CASE("bit reports round trip through CSV including absent measurements") {
    std::vector<BitReport> reports;
    BitReport a{10, 1024.0, 0.0653, 0.0648, 0.437, 0.4739};
    BitReport b{18, 262144.0, 0.0, std::numeric_limits<double>::quiet_NaN(), 1.2e-9,
                std::numeric_limits<double>::quiet_NaN()};
    reports.push_back(a);
    reports.push_back(b);
    const auto back = csvio::parse_bit_report_csv(csvio::bit_report_csv(reports));
    REQUIRE(back.size() == 2);
    CHECK(back[0].bit_index == 10);
    CHECK(back[0].w == 1024.0);
    CHECK(back[0].pred_intra == a.pred_intra);
    CHECK(back[0].meas_inter == a.meas_inter);
    CHECK(back[1].pred_inter_lb == b.pred_inter_lb);
    CHECK(std::isnan(back[1].meas_intra));
    CHECK(std::isnan(back[1].meas_inter));
}

TEST_CASE("malformed CSV inputs are rejected") {
    PopulationConfig cfg;
    CHECK_THROWS_AS(csvio::parse_tensor_csv("", cfg), IoError);
    CHECK_THROWS_AS(csvio::parse_tensor_csv("wrong,header\n", cfg), IoError);
    CHECK_THROWS_AS(
        csvio::parse_tensor_csv("chip_id,challenge_index,repeat,diff_value,overflow\n0,0,0,x,0\n",
                                cfg),
        IoError);
    CHECK_THROWS_AS(
        csvio::parse_reference_csv("chip_id,challenge_index,bit\n0,0,2\n"), IoError);
    CHECK_THROWS_AS(
        csvio::parse_reference_csv("chip_id,challenge_index,bit\n-1,0,1\n"), IoError);
    CHECK_THROWS_AS(
        csvio::parse_tensor_csv("chip_id,challenge_index,repeat,diff_value,overflow\n0,-2,0,5,0\n",
                                cfg),
        IoError);
}

TEST_CASE("experiment config parses exact key names and rejects strangers") {
    const std::string good = R"({
      "population": {
        "model_kind": "Independent",
        "register_width": 19,
        "challenge_width": 10,
        "num_chips": 7,
        "num_challenges": 120,
        "num_repeats": 10,
        "bias_mean": 4000.0,
        "bias_std": 800.0,
        "inter_std": 521.0,
        "noise_std": 60.0,
        "seed": 37
      },
      "stress": [
        {"label": "nominal", "noise_multiplier": 1.0, "drift_std": 0.0},
        {"label": "hot", "noise_multiplier": 2.0, "drift_std": 150.0}
      ],
      "inspection_bits": "all",
      "intra_threshold": 0.1,
      "sigma_source": {"mode": "sweep", "center": 521.0, "pct": 15.0},
      "output_dir": "out",
      "formats": ["csv"]
    })";
    const ExperimentConfig cfg = experiment_config_from_json_text(good);
    CHECK(cfg.population.num_chips == 7);
    CHECK(cfg.population.seed == 37);
    CHECK(cfg.stress.size() == 2);
    CHECK(cfg.stress[1].stress.drift_std == 150.0);
    CHECK(cfg.inspection_bits.empty());
    CHECK(cfg.sigma_source.mode == SigmaSource::Mode::Sweep);
    CHECK(cfg.sigma_source.value == 521.0);

    // round trip through the emitter
    const ExperimentConfig again =
        experiment_config_from_json_text(experiment_config_to_json_text(cfg));
    CHECK(again.population.seed == cfg.population.seed);
    CHECK(again.stress.size() == cfg.stress.size());
    CHECK(again.intra_threshold == cfg.intra_threshold);
    CHECK(again.sigma_source.sweep_pct == cfg.sigma_source.sweep_pct);

    CHECK_THROWS_AS(experiment_config_from_json_text(R"({"populaton": {}})"), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"population": {"sigma_inter": 521}})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"population": {"model_kind": "Quadratic"}})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"sigma_source": {"mode": "fixed"}})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"stress": [{"label": "x", "alpha": 2.0}]})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"intra_threshold": 1.5})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"inspection_bits": [40]})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"formats": ["parquet"]})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json_text(
                        R"({"sigma_source": {"mode": "sweep", "center": 521.0, "pct": 150.0}})"),
                    ConfigError);
}

TEST_CASE("built-in profiles validate") {
    CHECK_NOTHROW(paper_profile().validate());
    CHECK_NOTHROW(desk_profile().validate());
    CHECK(paper_profile().population.num_chips == 7);
    CHECK(desk_profile().population.num_chips == 200);
    CHECK(desk_profile().population.has_overflow_headroom());
}
