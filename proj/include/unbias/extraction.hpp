#pragma once

#include <cstdint>
#include <vector>

#include "unbias/popmodel.hpp"

namespace unbias {

// A signed difference-register reading together with its register width.
struct DifferenceValue {
    std::int64_t value = 0;
    int width = 19;

    bool in_range() const {
        const std::int64_t half = std::int64_t{1} << (width - 1);
        return value >= -half && value <= half - 1;
    }
};

// Inspection bit i; induces alternating bins of width 2^i over the
// register's value range.
struct InspectionBit {
    int index = 0;

    std::uint64_t bin_width() const { return std::uint64_t{1} << index; }
};

// 2's-complement image of v in [0, 2^W).
std::uint64_t unsigned_image(DifferenceValue v);

// Bin ordinal floor(u / 2^i) of the unsigned image.
std::uint64_t bin_index(DifferenceValue v, InspectionBit ins);

// Response bit: bit i of the unsigned image, equivalently the parity of
// the bin ordinal. For i = W-1 this is the sign (MSB) rule.
int extract_bit(DifferenceValue v, InspectionBit ins);

enum class Reducer {
    FirstRepeat,
    MajorityVote, // ties (even t) break toward 0
};

struct ResponseMatrix {
    int num_chips = 0;
    int num_challenges = 0;
    int num_repeats = 1; // 1 for reduced reference responses
    int bit_index = 0;   // provenance echo
    std::vector<std::uint8_t> bits;

    std::size_t index(int chip, int challenge, int repeat = 0) const {
        return (static_cast<std::size_t>(chip) * num_challenges + challenge) * num_repeats +
               repeat;
    }
    std::uint8_t bit(int chip, int challenge, int repeat = 0) const {
        return bits[index(chip, challenge, repeat)];
    }
};

// Per-repeat response bits of a whole tensor.
ResponseMatrix extract_per_repeat(const MeasurementTensor& tensor, InspectionBit ins);

// Reduce a per-repeat matrix to one reference response per (chip, challenge).
ResponseMatrix reduce_responses(const ResponseMatrix& per_repeat, Reducer reducer);

// extract_per_repeat followed by reduce_responses.
ResponseMatrix extract_matrix(const MeasurementTensor& tensor, InspectionBit ins,
                              Reducer reducer);

} // namespace unbias
