#include <doctest.h>

#include <regex>
#include <string>

#include "unbias/csvio.hpp"
#include "unbias/errors.hpp"
#include "unbias/rtlgen.hpp"

using namespace unbias;

namespace {

RtlParams reference_params() {
    RtlParams p;
    p.challenge_width = 10;
    p.register_width = 19;
    p.ro_inverters = 19;
    p.ro_count_threshold = 50000;
    p.module_name = "unbias_puf";
    return p;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

} // namespace

TEST_CASE("parameter validation") {
    RtlParams p = reference_params();
    p.ro_inverters = 18;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = reference_params();
    p.ro_inverters = 1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = reference_params();
    p.challenge_width = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = reference_params();
    p.module_name = "9starts_with_digit";
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = reference_params();
    p.module_name = "module";
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = reference_params();
    p.register_width = 1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("emission is deterministic") {
    const RtlParams p = reference_params();
    CHECK(emit_rtl(p) == emit_rtl(p));
}

TEST_CASE("the reference parameter set matches the committed golden file") {
    const std::string text = emit_rtl(reference_params());
    const std::string golden =
        csvio::read_file(std::string(UNBIAS_TESTS_DIR) + "/goldens/unbias_puf_m10_w19.v");
    CHECK(text == golden);
}

TEST_CASE("one RO gate per inter-stage link per lane") {
    for (int m : {1, 3, 10}) {
        RtlParams p = reference_params();
        p.challenge_width = m;
        const std::string text = emit_rtl(p);
        // 2*(m+1) instances plus the module declaration itself
        CHECK(count_occurrences(text, p.module_name + "_ro_gate #(") ==
              static_cast<std::size_t>(2 * (m + 1)) + 1);
        CHECK(count_occurrences(text, "module " + p.module_name + "_ro_gate") == 1);
        CHECK(count_occurrences(text, p.module_name + "_switch sw_") ==
              static_cast<std::size_t>(m));
    }
}

TEST_CASE("generated text lints clean across parameter corners") {
    for (int m : {1, 2, 10}) {
        for (int w : {2, 19, 48}) {
            RtlParams p = reference_params();
            p.challenge_width = m;
            p.register_width = w;
            p.module_name = "core_" + std::to_string(m) + "_" + std::to_string(w);
            const std::string text = emit_rtl(p);
            const auto issues = lint_rtl(text);
            for (const auto& issue : issues) MESSAGE(issue);
            CHECK(issues.empty());
            CHECK(check_parameter_fidelity(text, p));
        }
    }
}

TEST_CASE("the minimal instance keeps the port contract") {
    RtlParams p = reference_params();
    p.challenge_width = 1;
    const std::string text = emit_rtl(p);
    CHECK(text.find("input  wire clk") != std::string::npos);
    CHECK(text.find("input  wire trigger") != std::string::npos);
    CHECK(text.find("input  wire [0:0] challenge") != std::string::npos);
    CHECK(text.find("output reg  done") != std::string::npos);
    CHECK(text.find("output reg  signed [18:0] diff") != std::string::npos);
    CHECK(lint_rtl(text).empty());
}

TEST_CASE("lint flags broken structures") {
    const std::string text = emit_rtl(reference_params());

    // unbalanced module tokens
    std::string truncated = text;
    truncated.resize(text.rfind("endmodule"));
    CHECK_FALSE(lint_rtl(truncated).empty());

    // an undeclared identifier in an expression
    std::string renamed = text;
    const std::string from = "assign stop_a = gate_a_10;";
    const std::string to = "assign stop_a = gate_a_zz;";
    renamed.replace(renamed.find(from), from.size(), to);
    bool found_undeclared = false;
    for (const auto& issue : lint_rtl(renamed))
        found_undeclared |= issue.find("gate_a_zz") != std::string::npos;
    CHECK(found_undeclared);

    // a duplicated declaration
    std::string duplicated = text;
    const std::string decl = "    wire start_a;\n";
    duplicated.replace(duplicated.find(decl), decl.size(), decl + decl);
    bool found_duplicate = false;
    for (const auto& issue : lint_rtl(duplicated))
        found_duplicate |= issue.find("duplicate") != std::string::npos;
    CHECK(found_duplicate);
}

TEST_CASE("parameter fidelity catches tampered literals") {
    const RtlParams p = reference_params();
    const std::string text = emit_rtl(p);
    CHECK(check_parameter_fidelity(text, p));

    std::string tampered = text;
    const std::string from = "localparam integer REGISTER_WIDTH = 19;";
    const std::string to = "localparam integer REGISTER_WIDTH = 18;";
    tampered.replace(tampered.find(from), from.size(), to);
    std::string why;
    CHECK_FALSE(check_parameter_fidelity(tampered, p, &why));
    CHECK(why.find("REGISTER_WIDTH") != std::string::npos);

    std::string wrong_thr = text;
    const std::string tf = ".RO_COUNT_THRESHOLD(50000),";
    wrong_thr.replace(wrong_thr.find(tf), tf.size(), ".RO_COUNT_THRESHOLD(49999),");
    CHECK_FALSE(check_parameter_fidelity(wrong_thr, p, &why));
}
