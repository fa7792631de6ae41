#include "unbias/csvio.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "unbias/errors.hpp"

namespace unbias::csvio {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::vector<std::string>> parse_rows(const std::string& text,
                                                 const std::string& expected_header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw IoError("unexpected CSV header '" + line + "', want '" + expected_header + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split(line));
    }
    return rows;
}

long long to_ll(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw IoError("bad integer field '" + s + "'");
    return v;
}

long long to_index(const std::string& s) {
    const long long v = to_ll(s);
    if (v < 0 || v > (1 << 30)) throw IoError("index field out of range: '" + s + "'");
    return v;
}

double to_d(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("bad numeric field '" + s + "'");
    return v;
}

} // namespace

std::string fmt_double(double v) {
    // Shortest representation that parses back to the same bits.
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v || v != v) break;
    }
    return buf;
}

std::string tensor_csv(const MeasurementTensor& t) {
    std::ostringstream o;
    o << "chip_id,challenge_index,repeat,diff_value,overflow\n";
    for (int c = 0; c < t.num_chips; ++c)
        for (int k = 0; k < t.num_challenges; ++k)
            for (int r = 0; r < t.num_repeats; ++r)
                o << c << ',' << t.challenge_ids[k] << ',' << r << ',' << t.value(c, k, r)
                  << ',' << (t.overflowed(c, k, r) ? 1 : 0) << '\n';
    return o.str();
}

MeasurementTensor parse_tensor_csv(const std::string& text, const PopulationConfig& cfg) {
    const auto rows = parse_rows(text, "chip_id,challenge_index,repeat,diff_value,overflow");
    MeasurementTensor t;
    t.cfg = cfg;
    int max_chip = -1, max_rep = -1;
    std::vector<int> ids;
    for (const auto& row : rows) {
        if (row.size() != 5) throw IoError("tensor row needs 5 fields");
        const int chip = static_cast<int>(to_index(row[0]));
        const int challenge = static_cast<int>(to_index(row[1]));
        const int rep = static_cast<int>(to_index(row[2]));
        max_chip = std::max(max_chip, chip);
        max_rep = std::max(max_rep, rep);
        if (ids.empty() || ids.back() != challenge) {
            bool known = false;
            for (int id : ids) known = known || id == challenge;
            if (!known) ids.push_back(challenge);
        }
    }
    t.num_chips = max_chip + 1;
    t.num_repeats = max_rep + 1;
    t.num_challenges = static_cast<int>(ids.size());
    t.challenge_ids = ids;
    t.values.assign(static_cast<std::size_t>(t.num_chips) * t.num_challenges * t.num_repeats, 0);
    t.overflow.assign(t.values.size(), 0);
    std::vector<int> col_of(ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1, -1);
    for (std::size_t i = 0; i < ids.size(); ++i) col_of[ids[i]] = static_cast<int>(i);
    for (const auto& row : rows) {
        const int chip = static_cast<int>(to_index(row[0]));
        const int col = col_of[static_cast<int>(to_index(row[1]))];
        const int rep = static_cast<int>(to_index(row[2]));
        const std::size_t idx = t.index(chip, col, rep);
        t.values[idx] = to_ll(row[3]);
        t.overflow[idx] = to_ll(row[4]) ? 1 : 0;
    }
    return t;
}

std::string reference_csv(const ResponseMatrix& m) {
    std::ostringstream o;
    o << "chip_id,challenge_index,bit\n";
    for (int c = 0; c < m.num_chips; ++c)
        for (int k = 0; k < m.num_challenges; ++k)
            o << c << ',' << k << ',' << static_cast<int>(m.bit(c, k)) << '\n';
    return o.str();
}

std::string per_repeat_csv(const ResponseMatrix& m) {
    std::ostringstream o;
    o << "chip_id,challenge_index,repeat,bit\n";
    for (int c = 0; c < m.num_chips; ++c)
        for (int k = 0; k < m.num_challenges; ++k)
            for (int r = 0; r < m.num_repeats; ++r)
                o << c << ',' << k << ',' << r << ',' << static_cast<int>(m.bit(c, k, r))
                  << '\n';
    return o.str();
}

namespace {

ResponseMatrix parse_bits(const std::string& text, const std::string& header, bool with_repeat,
                          int bit_index) {
    const auto rows = parse_rows(text, header);
    ResponseMatrix m;
    m.bit_index = bit_index;
    int max_chip = -1, max_ch = -1, max_rep = 0;
    for (const auto& row : rows) {
        if (row.size() != (with_repeat ? 4u : 3u))
            throw IoError("response row has wrong field count");
        max_chip = std::max(max_chip, static_cast<int>(to_index(row[0])));
        max_ch = std::max(max_ch, static_cast<int>(to_index(row[1])));
        if (with_repeat) max_rep = std::max(max_rep, static_cast<int>(to_index(row[2])));
    }
    m.num_chips = max_chip + 1;
    m.num_challenges = max_ch + 1;
    m.num_repeats = with_repeat ? max_rep + 1 : 1;
    m.bits.assign(static_cast<std::size_t>(m.num_chips) * m.num_challenges * m.num_repeats, 0);
    for (const auto& row : rows) {
        const int c = static_cast<int>(to_index(row[0]));
        const int k = static_cast<int>(to_index(row[1]));
        const int r = with_repeat ? static_cast<int>(to_index(row[2])) : 0;
        const long long bit = to_ll(row[with_repeat ? 3 : 2]);
        if (bit != 0 && bit != 1) throw IoError("response bit must be 0 or 1");
        m.bits[m.index(c, k, r)] = static_cast<std::uint8_t>(bit);
    }
    return m;
}

} // namespace

ResponseMatrix parse_reference_csv(const std::string& text, int bit_index) {
    return parse_bits(text, "chip_id,challenge_index,bit", false, bit_index);
}

ResponseMatrix parse_per_repeat_csv(const std::string& text, int bit_index) {
    return parse_bits(text, "chip_id,challenge_index,repeat,bit", true, bit_index);
}

std::string fhd_summary_csv(const FhdSummary& s) {
    std::ostringstream o;
    o << "metric,scope_id,value\n";
    for (std::size_t c = 0; c < s.intra_per_chip.size(); ++c)
        o << "intra,chip_" << c << ',' << fmt_double(s.intra_per_chip[c]) << '\n';
    std::size_t p = 0;
    for (int a = 0; a < s.num_chips && p < s.inter_pairwise.size(); ++a)
        for (int b = a + 1; b < s.num_chips && p < s.inter_pairwise.size(); ++b, ++p)
            o << "inter,chip_" << a << ":chip_" << b << ',' << fmt_double(s.inter_pairwise[p])
              << '\n';
    o << "intra_mean,all," << fmt_double(s.intra_mean) << '\n';
    o << "inter_mean,all," << fmt_double(s.inter_mean) << '\n';
    o << "num_chips,all," << s.num_chips << '\n';
    o << "n_challenges,all," << s.n_challenges << '\n';
    o << "num_repeats,all," << s.t << '\n';
    return o.str();
}

FhdSummary parse_fhd_summary_csv(const std::string& text) {
    const auto rows = parse_rows(text, "metric,scope_id,value");
    FhdSummary s;
    for (const auto& row : rows) {
        if (row.size() != 3) throw IoError("summary row needs 3 fields");
        const std::string& metric = row[0];
        if (metric == "intra") s.intra_per_chip.push_back(to_d(row[2]));
        else if (metric == "inter") s.inter_pairwise.push_back(to_d(row[2]));
        else if (metric == "intra_mean") s.intra_mean = to_d(row[2]);
        else if (metric == "inter_mean") s.inter_mean = to_d(row[2]);
        else if (metric == "num_chips") s.num_chips = static_cast<int>(to_ll(row[2]));
        else if (metric == "n_challenges") s.n_challenges = static_cast<int>(to_ll(row[2]));
        else if (metric == "num_repeats") s.t = static_cast<int>(to_ll(row[2]));
        else throw IoError("unknown summary metric '" + metric + "'");
    }
    return s;
}

std::string bit_report_csv(std::span<const BitReport> reports) {
    std::ostringstream o;
    o << "bit_index,w,pred_intra,meas_intra,pred_inter_lb,meas_inter\n";
    for (const BitReport& r : reports)
        o << r.bit_index << ',' << fmt_double(r.w) << ',' << fmt_double(r.pred_intra) << ','
          << fmt_double(r.meas_intra) << ',' << fmt_double(r.pred_inter_lb) << ','
          << fmt_double(r.meas_inter) << '\n';
    return o.str();
}

std::vector<BitReport> parse_bit_report_csv(const std::string& text) {
    const auto rows =
        parse_rows(text, "bit_index,w,pred_intra,meas_intra,pred_inter_lb,meas_inter");
    std::vector<BitReport> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 6) throw IoError("bit report row needs 6 fields");
        BitReport r;
        r.bit_index = static_cast<int>(to_ll(row[0]));
        r.w = to_d(row[1]);
        r.pred_intra = to_d(row[2]);
        r.meas_intra = to_d(row[3]);
        r.pred_inter_lb = to_d(row[4]);
        r.meas_inter = to_d(row[5]);
        out.push_back(r);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace unbias::csvio
