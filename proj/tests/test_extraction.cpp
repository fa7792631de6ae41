#include <doctest.h>

#include <cstdint>

#include "unbias/errors.hpp"
#include "unbias/extraction.hpp"
#include "unbias/rng.hpp"

using namespace unbias;

namespace {

MeasurementTensor hand_tensor(int num_chips, int num_challenges, int num_repeats, int width,
                              const std::vector<std::int64_t>& values) {
    MeasurementTensor t;
    t.cfg.register_width = width;
    t.cfg.num_chips = num_chips;
    t.cfg.num_challenges = num_challenges;
    t.cfg.num_repeats = num_repeats;
    t.num_chips = num_chips;
    t.num_challenges = num_challenges;
    t.num_repeats = num_repeats;
    t.challenge_ids.resize(num_challenges);
    for (int k = 0; k < num_challenges; ++k) t.challenge_ids[k] = k;
    t.values = values;
    t.overflow.assign(values.size(), 0);
    return t;
}

} // namespace

TEST_CASE("extract_bit matches the register-bit contract") {
    CHECK(extract_bit({-5, 22}, {21}) == 1); // MSB is the sign bit
    CHECK(extract_bit({0, 19}, {10}) == 0);
    CHECK(extract_bit({1024, 19}, {10}) == 1);
    CHECK(extract_bit({-1, 19}, {10}) == 1); // u = 2^19-1, bin 511, odd
    CHECK(extract_bit({5, 19}, {0}) == 1);
    CHECK(extract_bit({4, 19}, {0}) == 0);
}

TEST_CASE("bin_index is the unsigned image divided by the bin width") {
    CHECK(bin_index({0, 19}, {10}) == 0);
    CHECK(bin_index({2047, 19}, {10}) == 1);
    CHECK(bin_index({-2048, 19}, {10}) == 510); // u = 522240
    CHECK(bin_index({-1, 19}, {10}) == 511);
    for (int i = 0; i < 19; ++i)
        CHECK(extract_bit({-77, 19}, {i}) == static_cast<int>(bin_index({-77, 19}, {i}) % 2));
}

TEST_CASE("out-of-range inspection bits and values are contract violations") {
    CHECK_THROWS_AS(extract_bit({0, 19}, {19}), ContractViolation);
    CHECK_THROWS_AS(extract_bit({0, 19}, {-1}), ContractViolation);
    CHECK_THROWS_AS(bin_index({0, 19}, {19}), ContractViolation);
    CHECK_THROWS_AS(extract_bit({1 << 20, 19}, {3}), ContractViolation);
}

TEST_CASE("three formulations agree exhaustively for small widths") {
    for (int width = 2; width <= 12; ++width) {
        const std::int64_t half = std::int64_t{1} << (width - 1);
        const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
        for (std::int64_t v = -half; v < half; ++v) {
            const std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
            for (int i = 0; i < width; ++i) {
                const int by_mask = (u & (std::uint64_t{1} << i)) != 0;
                const int by_shift = static_cast<int>((u >> i) & 1u);
                const int by_division = static_cast<int>((u / (std::uint64_t{1} << i)) % 2);
                const int got = extract_bit({v, width}, {i});
                REQUIRE(got == by_mask);
                REQUIRE(got == by_shift);
                REQUIRE(got == by_division);
            }
        }
    }
}

TEST_CASE("the top inspection bit is the sign") {
    for (int width = 2; width <= 12; ++width) {
        const std::int64_t half = std::int64_t{1} << (width - 1);
        for (std::int64_t v = -half; v < half; ++v)
            REQUIRE(extract_bit({v, width}, {width - 1}) == (v < 0 ? 1 : 0));
    }
}

TEST_CASE("bin geometry: one-bin steps flip, two-bin steps do not") {
    const int width = 24;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t word = rng::cell_key(42, rng::Domain::Noise, trial);
        const int i = static_cast<int>(word % (width - 2));
        const std::int64_t half = std::int64_t{1} << (width - 1);
        std::int64_t v = static_cast<std::int64_t>(word >> 8) % half;
        const std::int64_t step = std::int64_t{1} << i;
        if (v + 2 * step >= half) v -= 4 * step; // stay clear of the wrap
        const int b0 = extract_bit({v, width}, {i});
        const int b1 = extract_bit({v + step, width}, {i});
        const int b2 = extract_bit({v + 2 * step, width}, {i});
        REQUIRE(b1 == 1 - b0); // adjacent bin, parity flips
        REQUIRE(b2 == b0);     // two bins over, parity restored
    }
}

TEST_CASE("reducers agree on noise-free tensors") {
    // three identical repeats per cell
    std::vector<std::int64_t> vals;
    for (std::int64_t base : {100, -4000, 77, 1023}) vals.insert(vals.end(), 3, base);
    const MeasurementTensor t = hand_tensor(2, 2, 3, 19, vals);
    const ResponseMatrix first = extract_matrix(t, {5}, Reducer::FirstRepeat);
    const ResponseMatrix majority = extract_matrix(t, {5}, Reducer::MajorityVote);
    CHECK(first.bits == majority.bits);
}

TEST_CASE("a challenge confined to one bin yields a constant column") {
    // all chips land in bin [1024, 2048) for challenge 0
    const MeasurementTensor t =
        hand_tensor(3, 1, 2, 19, {1030, 1500, 1200, 1400, 2000, 1100});
    const ResponseMatrix ref = extract_matrix(t, {10}, Reducer::MajorityVote);
    CHECK(ref.bit(0, 0) == 1);
    CHECK(ref.bit(1, 0) == 1);
    CHECK(ref.bit(2, 0) == 1);
}

TEST_CASE("majority vote settles {1023, 1025, 1025} to 1 at bit 10") {
    const MeasurementTensor t =
        hand_tensor(2, 1, 3, 19, {1023, 1025, 1025, 10, 10, 10});
    const ResponseMatrix per_rep = extract_per_repeat(t, {10});
    CHECK(per_rep.bit(0, 0, 0) == 0);
    CHECK(per_rep.bit(0, 0, 1) == 1);
    CHECK(per_rep.bit(0, 0, 2) == 1);
    const ResponseMatrix ref = reduce_responses(per_rep, Reducer::MajorityVote);
    CHECK(ref.bit(0, 0) == 1);
    CHECK(ref.bit(1, 0) == 0);
}

TEST_CASE("even-repeat majority ties break toward zero") {
    const MeasurementTensor t = hand_tensor(1, 1, 2, 19, {1023, 1025});
    const ResponseMatrix ref = extract_matrix(t, {10}, Reducer::MajorityVote);
    CHECK(ref.bit(0, 0) == 0);
    const MeasurementTensor t2 = hand_tensor(1, 1, 4, 19, {1023, 1025, 1025, 1025});
    CHECK(extract_matrix(t2, {10}, Reducer::MajorityVote).bit(0, 0) == 1);
}
