#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace unbias {

struct RtlParams {
    int challenge_width = 10;              // m: path-configuration switch stages
    int register_width = 19;               // W: difference register bits
    int ro_inverters = 19;                 // odd, >= 3
    std::int64_t ro_count_threshold = 50000;
    std::string module_name = "unbias_puf";

    void validate() const; // throws ConfigError
};

// Synthesizable Verilog for the dual-chain delay-difference PUF core:
// m 2x2 challenge switches per chain pair, a ring-oscillator counter gate
// on every inter-stage link (2*(m+1) instances), two clock counters and a
// registered subtractor. Deterministic, byte-identical text for identical
// params; LF line endings.
std::string emit_rtl(const RtlParams& params);

// Structural lint: balanced module/endmodule, begin/end and
// generate/endgenerate, unique declarations, and no use of undeclared
// identifiers. Returns human-readable issues; empty means clean.
std::vector<std::string> lint_rtl(const std::string& verilog);

// Confirms the parameter literals embedded in the text (widths, inverter
// count, threshold, port ranges, RO instance count) match params exactly.
bool check_parameter_fidelity(const std::string& verilog, const RtlParams& params,
                              std::string* mismatch = nullptr);

} // namespace unbias
