#include "unbias/rtlgen.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "unbias/errors.hpp"

namespace unbias {

namespace {

const std::set<std::string> kVerilogKeywords = {
    "module", "endmodule", "input",  "output",   "inout",       "wire",
    "reg",    "signed",    "integer", "parameter", "localparam", "assign",
    "always", "begin",     "end",    "if",       "else",        "posedge",
    "negedge", "or",       "and",    "not",      "genvar",      "generate",
    "endgenerate", "for",  "case",   "endcase",  "function",    "endfunction",
    "default",
};

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return !kVerilogKeywords.count(s);
}

int bit_width_for(std::int64_t value) {
    int bits = 1;
    while ((std::int64_t{1} << bits) <= value) ++bits;
    return bits;
}

} // namespace

void RtlParams::validate() const {
    if (challenge_width < 1) throw ConfigError("challenge_width must be >= 1");
    if (register_width < 2 || register_width > 63)
        throw ConfigError("register_width must be in [2, 63]");
    if (ro_inverters < 3 || ro_inverters % 2 == 0)
        throw ConfigError("ro_inverters must be an odd integer >= 3 (even rings do not oscillate)");
    if (ro_count_threshold < 1) throw ConfigError("ro_count_threshold must be >= 1");
    if (!valid_identifier(module_name))
        throw ConfigError("module_name is not a valid HDL identifier: " + module_name);
}

std::string emit_rtl(const RtlParams& p) {
    p.validate();
    const int m = p.challenge_width;
    const int w = p.register_width;
    const int cnt_w = bit_width_for(p.ro_count_threshold);
    std::ostringstream o;

    o << "// " << p.module_name << ": dual-chain delay-difference PUF core.\n"
      << "//\n"
      << "// Two delay chains race from trigger through " << m
      << " challenge-controlled 2x2\n"
      << "// switch stages. Every inter-stage link carries a ring-oscillator counter\n"
      << "// gate that forwards its edge only after " << p.ro_count_threshold
      << " oscillations, stretching\n"
      << "// the race across many clk cycles. Two clock counters time the chains and\n"
      << "// their difference lands in a " << w << "-bit 2's-complement register.\n"
      << "// The design is plain RTL: no placement, routing or delay-matching\n"
      << "// constraints are needed for any instance.\n"
      << "\n"
      << "`timescale 1ns / 1ps\n"
      << "\n";

    // 2x2 switch
    o << "// Path-configuration switch: sel = 0 routes straight, sel = 1 crosses.\n"
      << "module " << p.module_name << "_switch (\n"
      << "    input  wire sel,\n"
      << "    input  wire a_in,\n"
      << "    input  wire b_in,\n"
      << "    output wire a_out,\n"
      << "    output wire b_out\n"
      << ");\n"
      << "    assign a_out = sel ? b_in : a_in;\n"
      << "    assign b_out = sel ? a_in : b_in;\n"
      << "endmodule\n"
      << "\n";

    // RO gate
    o << "// Ring-oscillator counter gate. While armed and fed, an odd inverter loop\n"
      << "// oscillates and its edges are counted; the incoming edge is forwarded\n"
      << "// once the count reaches RO_COUNT_THRESHOLD.\n"
      << "//\n"
      << "// The ring is a deliberate combinational cycle. A synthesis flow must keep\n"
      << "// it intact (e.g. KEEP / DONT_TOUCH on ring_node); the #1 stage delay\n"
      << "// below only makes behavioral simulation oscillate.\n"
      << "module " << p.module_name << "_ro_gate #(\n"
      << "    parameter integer RO_INVERTERS = " << p.ro_inverters << ",\n"
      << "    parameter integer RO_COUNT_THRESHOLD = " << p.ro_count_threshold << ",\n"
      << "    parameter integer RO_COUNTER_WIDTH = " << cnt_w << "\n"
      << ") (\n"
      << "    input  wire arm,\n"
      << "    input  wire in_valid,\n"
      << "    output wire out_valid\n"
      << ");\n"
      << "    wire ring_en;\n"
      << "    (* keep = \"true\" *) wire [RO_INVERTERS:0] ring_node;\n"
      << "    assign ring_en = in_valid & ~out_valid;\n"
      << "    assign ring_node[0] = ring_en & ring_node[RO_INVERTERS];\n"
      << "    genvar gi;\n"
      << "    generate\n"
      << "        for (gi = 0; gi < RO_INVERTERS; gi = gi + 1) begin : ring\n"
      << "            assign #1 ring_node[gi + 1] = ~ring_node[gi];\n"
      << "        end\n"
      << "    endgenerate\n"
      << "\n"
      << "    reg [RO_COUNTER_WIDTH-1:0] osc_count;\n"
      << "    always @(posedge ring_node[RO_INVERTERS] or negedge arm) begin\n"
      << "        if (!arm)\n"
      << "            osc_count <= {RO_COUNTER_WIDTH{1'b0}};\n"
      << "        else if (!out_valid)\n"
      << "            osc_count <= osc_count + 1'b1;\n"
      << "    end\n"
      << "    assign out_valid = (osc_count >= RO_COUNT_THRESHOLD);\n"
      << "endmodule\n"
      << "\n";

    // top module
    o << "module " << p.module_name << " (\n"
      << "    input  wire clk,\n"
      << "    input  wire trigger,\n"
      << "    input  wire [" << (m - 1) << ":0] challenge,\n"
      << "    output reg  done,\n"
      << "    output reg  signed [" << (w - 1) << ":0] diff\n"
      << ");\n"
      << "    localparam integer CHALLENGE_WIDTH = " << m << ";\n"
      << "    localparam integer REGISTER_WIDTH = " << w << ";\n"
      << "    localparam integer RO_INVERTERS = " << p.ro_inverters << ";\n"
      << "    localparam integer RO_COUNT_THRESHOLD = " << p.ro_count_threshold << ";\n"
      << "\n";

    for (int j = 0; j <= m; ++j)
        o << "    wire gate_a_" << j << ";\n"
          << "    wire gate_b_" << j << ";\n";
    for (int j = 1; j <= m; ++j)
        o << "    wire sw_a_" << j << ";\n"
          << "    wire sw_b_" << j << ";\n";
    o << "\n";

    auto emit_gate = [&](char lane, int j, const std::string& in) {
        o << "    " << p.module_name << "_ro_gate #(\n"
          << "        .RO_INVERTERS(" << p.ro_inverters << "),\n"
          << "        .RO_COUNT_THRESHOLD(" << p.ro_count_threshold << "),\n"
          << "        .RO_COUNTER_WIDTH(" << cnt_w << ")\n"
          << "    ) gate_" << lane << j << "_inst (\n"
          << "        .arm(trigger),\n"
          << "        .in_valid(" << in << "),\n"
          << "        .out_valid(gate_" << lane << "_" << j << ")\n"
          << "    );\n";
    };

    o << "    // Chain entry: the trigger edge enters both lanes through gate layer 0.\n";
    emit_gate('a', 0, "trigger");
    emit_gate('b', 0, "trigger");
    for (int j = 1; j <= m; ++j) {
        o << "\n    // Stage " << j << ": switch then one gate per lane.\n";
        o << "    " << p.module_name << "_switch sw_" << j << "_inst (\n"
          << "        .sel(challenge[" << (j - 1) << "]),\n"
          << "        .a_in(gate_a_" << (j - 1) << "),\n"
          << "        .b_in(gate_b_" << (j - 1) << "),\n"
          << "        .a_out(sw_a_" << j << "),\n"
          << "        .b_out(sw_b_" << j << ")\n"
          << "    );\n";
        emit_gate('a', j, "sw_a_" + std::to_string(j));
        emit_gate('b', j, "sw_b_" + std::to_string(j));
    }

    o << "\n"
      << "    // Lane counters: START when the edge reaches stage 1, STOP at the\n"
      << "    // lane's end. The counters run on the shared system clock.\n"
      << "    wire start_a;\n"
      << "    wire start_b;\n"
      << "    wire stop_a;\n"
      << "    wire stop_b;\n"
      << "    assign start_a = gate_a_0;\n"
      << "    assign start_b = gate_b_0;\n"
      << "    assign stop_a = gate_a_" << m << ";\n"
      << "    assign stop_b = gate_b_" << m << ";\n"
      << "\n"
      << "    reg [REGISTER_WIDTH-1:0] count_a;\n"
      << "    reg [REGISTER_WIDTH-1:0] count_b;\n"
      << "    always @(posedge clk or negedge trigger) begin\n"
      << "        if (!trigger)\n"
      << "            count_a <= {REGISTER_WIDTH{1'b0}};\n"
      << "        else if (start_a && !stop_a)\n"
      << "            count_a <= count_a + 1'b1;\n"
      << "    end\n"
      << "    always @(posedge clk or negedge trigger) begin\n"
      << "        if (!trigger)\n"
      << "            count_b <= {REGISTER_WIDTH{1'b0}};\n"
      << "        else if (start_b && !stop_b)\n"
      << "            count_b <= count_b + 1'b1;\n"
      << "    end\n"
      << "\n"
      << "    // Difference register: counterA - counterB once both lanes finished.\n"
      << "    always @(posedge clk or negedge trigger) begin\n"
      << "        if (!trigger) begin\n"
      << "            diff <= {REGISTER_WIDTH{1'b0}};\n"
      << "            done <= 1'b0;\n"
      << "        end else if (stop_a && stop_b && !done) begin\n"
      << "            diff <= count_a - count_b;\n"
      << "            done <= 1'b1;\n"
      << "        end\n"
      << "    end\n"
      << "endmodule\n";

    return o.str();
}

// --- structural lint ---------------------------------------------------

namespace {

struct Token {
    std::string text;
    bool is_ident = false;
};

std::string strip_comments(const std::string& src) {
    std::string out;
    out.reserve(src.size());
    for (std::size_t i = 0; i < src.size();) {
        if (src.compare(i, 2, "//") == 0) {
            while (i < src.size() && src[i] != '\n') ++i;
        } else if (src.compare(i, 2, "/*") == 0) {
            i += 2;
            while (i + 1 < src.size() && src.compare(i, 2, "*/") != 0) ++i;
            i += 2;
        } else if (src.compare(i, 2, "(*") == 0) { // attribute instance
            i += 2;
            while (i + 1 < src.size() && src.compare(i, 2, "*)") != 0) ++i;
            i += 2;
        } else if (src[i] == '`') { // compiler directive: skip the line
            while (i < src.size() && src[i] != '\n') ++i;
        } else if (src[i] == '"') {
            ++i;
            while (i < src.size() && src[i] != '"') ++i;
            ++i;
        } else {
            out.push_back(src[i++]);
        }
    }
    return out;
}

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> toks;
    const std::string text = strip_comments(src);
    for (std::size_t i = 0; i < text.size();) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                    text[j] == '$'))
                ++j;
            toks.push_back({text.substr(i, j - i), true});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            // number, possibly sized like 19'b0 or 1'b1
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '\''))
                ++j;
            toks.push_back({text.substr(i, j - i), false});
            i = j;
        } else if (c == '\'' ) {
            std::size_t j = i + 1;
            while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
            toks.push_back({text.substr(i, j - i), false});
            i = j;
        } else {
            toks.push_back({std::string(1, c), false});
            ++i;
        }
    }
    return toks;
}

} // namespace

std::vector<std::string> lint_rtl(const std::string& verilog) {
    std::vector<std::string> issues;
    const std::vector<Token> toks = tokenize(verilog);

    // token balance
    const std::pair<const char*, const char*> pairs[] = {
        {"module", "endmodule"},
        {"begin", "end"},
        {"generate", "endgenerate"},
        {"case", "endcase"},
        {"function", "endfunction"},
    };
    for (const auto& [open, close] : pairs) {
        long depth = 0;
        bool negative = false;
        for (const Token& t : toks) {
            if (t.text == open) ++depth;
            else if (t.text == close) --depth;
            if (depth < 0) negative = true;
        }
        if (depth != 0 || negative)
            issues.push_back(std::string(open) + "/" + close + " tokens unbalanced");
    }

    // First pass: module names and their port name sets.
    std::map<std::string, std::set<std::string>> module_ports;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].text != "module" || i + 1 >= toks.size()) continue;
        const std::string name = toks[i + 1].text;
        std::set<std::string> ports;
        std::size_t j = i + 2;
        // optional #( ... parameter header ... )
        if (j < toks.size() && toks[j].text == "#") {
            int depth = 0;
            for (++j; j < toks.size(); ++j) {
                if (toks[j].text == "(") ++depth;
                else if (toks[j].text == ")" && --depth == 0) { ++j; break; }
            }
        }
        if (j < toks.size() && toks[j].text == "(") {
            int depth = 1;
            std::string last_ident;
            for (++j; j < toks.size() && depth > 0; ++j) {
                if (toks[j].text == "(") ++depth;
                else if (toks[j].text == ")") { --depth; }
                else if (toks[j].is_ident && !kVerilogKeywords.count(toks[j].text))
                    last_ident = toks[j].text;
                if (depth == 1 && (toks[j].text == "," )) {
                    if (!last_ident.empty()) ports.insert(last_ident);
                    last_ident.clear();
                }
            }
            if (!last_ident.empty()) ports.insert(last_ident);
        }
        module_ports[name] = ports;
    }

    // Second pass: per module, declarations then identifier usage.
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].text != "module") continue;
        std::size_t end = i + 1;
        for (; end < toks.size() && toks[end].text != "endmodule"; ++end) {}
        const std::string mod_name = i + 1 < toks.size() ? toks[i + 1].text : "?";

        std::set<std::string> declared;
        auto declare = [&](const std::string& n) {
            if (!declared.insert(n).second)
                issues.push_back("duplicate declaration of '" + n + "' in module " + mod_name);
        };
        declare(mod_name);

        // declarations
        const std::set<std::string> decl_keywords = {"wire",  "reg",        "genvar",
                                                     "input", "output",     "inout",
                                                     "parameter", "localparam"};
        for (std::size_t j = i; j < end; ++j) {
            const std::string& t = toks[j].text;
            if (decl_keywords.count(t)) {
                // consume one declaration: names separated by commas, until a
                // ';', the closing ')' of a header, or the next decl keyword
                std::size_t k = j + 1;
                int brdepth = 0;
                std::string pending;
                const auto flush = [&] {
                    if (!pending.empty()) {
                        declare(pending);
                        pending.clear();
                    }
                };
                for (; k < end; ++k) {
                    const std::string& u = toks[k].text;
                    if (u == "[") { ++brdepth; continue; }
                    if (u == "]") { --brdepth; continue; }
                    if (brdepth > 0) continue;
                    if (u == ";" || u == ")") break;
                    if (u == "=") {
                        flush();
                        int pd = 0;
                        for (++k; k < end; ++k) {
                            const std::string& v = toks[k].text;
                            if (v == "(" || v == "[" || v == "{") ++pd;
                            else if (v == ")" || v == "]" || v == "}") {
                                if (pd == 0) break;
                                --pd;
                            } else if (pd == 0 && (v == "," || v == ";")) break;
                        }
                        if (k >= end || toks[k].text != ",") break;
                    }
                    if (toks[k].text == ",") {
                        flush();
                        if (k + 1 < end && decl_keywords.count(toks[k + 1].text)) break;
                        continue;
                    }
                    if (toks[k].is_ident && !kVerilogKeywords.count(toks[k].text))
                        pending = toks[k].text;
                }
                flush();
                j = k;
                continue;
            }
            // generate-for block label: "begin : label"
            if (t == "begin" && j + 2 < end && toks[j + 1].text == ":" && toks[j + 2].is_ident)
                declare(toks[j + 2].text);
            // instance names: known_module [#(..)] inst_name (
            if (toks[j].is_ident && module_ports.count(t) && t != mod_name && j > i + 1) {
                std::size_t k = j + 1;
                if (k < end && toks[k].text == "#") {
                    int depth = 0;
                    for (++k; k < end; ++k) {
                        if (toks[k].text == "(") ++depth;
                        else if (toks[k].text == ")" && --depth == 0) { ++k; break; }
                    }
                }
                if (k < end && toks[k].is_ident) declare(toks[k].text);
            }
        }

        // usage scan
        for (std::size_t j = i + 2; j < end; ++j) {
            const Token& t = toks[j];
            if (!t.is_ident || t.text[0] == '$' || kVerilogKeywords.count(t.text)) continue;
            if (j > 0 && toks[j - 1].text == ".") {
                // named port/parameter reference: resolve against the instantiated module
                continue;
            }
            if (declared.count(t.text) || module_ports.count(t.text)) continue;
            issues.push_back("undeclared identifier '" + t.text + "' in module " + mod_name);
        }

        i = end;
    }
    return issues;
}

bool check_parameter_fidelity(const std::string& verilog, const RtlParams& p,
                              std::string* mismatch) {
    auto fail = [&](const std::string& why) {
        if (mismatch) *mismatch = why;
        return false;
    };
    auto find_int = [&](const std::string& pattern, long long expected,
                        const std::string& what) {
        const std::regex re(pattern);
        auto begin = std::sregex_iterator(verilog.begin(), verilog.end(), re);
        auto endit = std::sregex_iterator();
        if (begin == endit) return std::string("missing ") + what;
        for (auto it = begin; it != endit; ++it)
            if (std::stoll((*it)[1].str()) != expected)
                return what + " literal " + (*it)[1].str() + " != expected " +
                       std::to_string(expected);
        return std::string{};
    };

    std::string why;
    why = find_int(R"(localparam integer CHALLENGE_WIDTH = (\d+);)", p.challenge_width,
                   "CHALLENGE_WIDTH");
    if (!why.empty()) return fail(why);
    why = find_int(R"(localparam integer REGISTER_WIDTH = (\d+);)", p.register_width,
                   "REGISTER_WIDTH");
    if (!why.empty()) return fail(why);
    why = find_int(R"(RO_INVERTERS = (\d+))", p.ro_inverters, "RO_INVERTERS");
    if (!why.empty()) return fail(why);
    why = find_int(R"(RO_INVERTERS\((\d+)\))", p.ro_inverters, "RO_INVERTERS instance");
    if (!why.empty()) return fail(why);
    why = find_int(R"(RO_COUNT_THRESHOLD = (\d+))", p.ro_count_threshold, "RO_COUNT_THRESHOLD");
    if (!why.empty()) return fail(why);
    why = find_int(R"(RO_COUNT_THRESHOLD\((\d+)\))", p.ro_count_threshold,
                   "RO_COUNT_THRESHOLD instance");
    if (!why.empty()) return fail(why);
    why = find_int(R"(\[(\d+):0\] challenge)", p.challenge_width - 1, "challenge port range");
    if (!why.empty()) return fail(why);
    why = find_int(R"(signed \[(\d+):0\] diff)", p.register_width - 1, "diff port range");
    if (!why.empty()) return fail(why);

    // one RO gate per inter-stage link per lane (the declaration also
    // matches the instantiation pattern, so discount it)
    const std::regex inst_re(p.module_name + R"(_ro_gate\s*#\()");
    const std::regex decl_re("module " + p.module_name + R"(_ro_gate\s*#\()");
    const auto inst_count =
        std::distance(std::sregex_iterator(verilog.begin(), verilog.end(), inst_re),
                      std::sregex_iterator()) -
        std::distance(std::sregex_iterator(verilog.begin(), verilog.end(), decl_re),
                      std::sregex_iterator());
    if (inst_count != 2 * (p.challenge_width + 1))
        return fail("expected " + std::to_string(2 * (p.challenge_width + 1)) +
                    " RO gate instances, found " + std::to_string(inst_count));

    if (verilog.find("module " + p.module_name + " (") == std::string::npos)
        return fail("top module declaration not found");
    if (mismatch) mismatch->clear();
    return true;
}

} // namespace unbias
