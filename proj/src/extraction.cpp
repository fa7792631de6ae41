#include "unbias/extraction.hpp"

#include <string>

#include "unbias/errors.hpp"

namespace unbias {

namespace {

void check_bit(DifferenceValue v, InspectionBit ins) {
    if (ins.index < 0 || ins.index >= v.width)
        throw ContractViolation("inspection bit " + std::to_string(ins.index) +
                                " out of range for width " + std::to_string(v.width));
    if (!v.in_range())
        throw ContractViolation("difference value " + std::to_string(v.value) +
                                " not representable in " + std::to_string(v.width) + " bits");
}

} // namespace

std::uint64_t unsigned_image(DifferenceValue v) {
    const std::uint64_t mask = (v.width >= 64) ? ~std::uint64_t{0}
                                               : (std::uint64_t{1} << v.width) - 1;
    return static_cast<std::uint64_t>(v.value) & mask;
}

std::uint64_t bin_index(DifferenceValue v, InspectionBit ins) {
    check_bit(v, ins);
    return unsigned_image(v) >> ins.index;
}

int extract_bit(DifferenceValue v, InspectionBit ins) {
    check_bit(v, ins);
    return static_cast<int>((unsigned_image(v) >> ins.index) & 1u);
}

ResponseMatrix extract_per_repeat(const MeasurementTensor& tensor, InspectionBit ins) {
    if (ins.index < 0 || ins.index >= tensor.cfg.register_width)
        throw ContractViolation("inspection bit out of range for tensor width");
    ResponseMatrix m;
    m.num_chips = tensor.num_chips;
    m.num_challenges = tensor.num_challenges;
    m.num_repeats = tensor.num_repeats;
    m.bit_index = ins.index;
    m.bits.resize(tensor.values.size());
    const int w = tensor.cfg.register_width;
    for (std::size_t i = 0; i < tensor.values.size(); ++i)
        m.bits[i] = static_cast<std::uint8_t>(extract_bit({tensor.values[i], w}, ins));
    return m;
}

ResponseMatrix reduce_responses(const ResponseMatrix& per_repeat, Reducer reducer) {
    ResponseMatrix ref;
    ref.num_chips = per_repeat.num_chips;
    ref.num_challenges = per_repeat.num_challenges;
    ref.num_repeats = 1;
    ref.bit_index = per_repeat.bit_index;
    ref.bits.resize(static_cast<std::size_t>(ref.num_chips) * ref.num_challenges);
    const int t = per_repeat.num_repeats;
    for (int c = 0; c < ref.num_chips; ++c)
        for (int k = 0; k < ref.num_challenges; ++k) {
            std::uint8_t out;
            if (reducer == Reducer::FirstRepeat) {
                out = per_repeat.bit(c, k, 0);
            } else {
                int ones = 0;
                for (int r = 0; r < t; ++r) ones += per_repeat.bit(c, k, r);
                out = (2 * ones > t) ? 1 : 0;
            }
            ref.bits[ref.index(c, k)] = out;
        }
    return ref;
}

ResponseMatrix extract_matrix(const MeasurementTensor& tensor, InspectionBit ins,
                              Reducer reducer) {
    return reduce_responses(extract_per_repeat(tensor, ins), reducer);
}

} // namespace unbias
