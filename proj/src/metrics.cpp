#include "unbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "unbias/errors.hpp"

namespace unbias {

IntraFhd intra_fhd(const ResponseMatrix& per_repeat) {
    const int t = per_repeat.num_repeats;
    const int K = per_repeat.num_challenges;
    if (t < 2) throw ContractViolation("intra_fhd needs at least 2 repeats");

    IntraFhd out;
    out.num_chips = per_repeat.num_chips;
    out.num_challenges = K;
    out.num_repeats = t;
    out.per_chip.resize(per_repeat.num_chips);

    const std::uint64_t denom =
        static_cast<std::uint64_t>(t) * (t - 1) / 2 * static_cast<std::uint64_t>(K);
    for (int c = 0; c < per_repeat.num_chips; ++c) {
        std::uint64_t differing = 0;
        for (int r1 = 0; r1 < t; ++r1)
            for (int r2 = r1 + 1; r2 < t; ++r2)
                for (int k = 0; k < K; ++k)
                    differing += per_repeat.bit(c, k, r1) != per_repeat.bit(c, k, r2);
        out.per_chip[c] = static_cast<double>(differing) / static_cast<double>(denom);
    }
    double sum = 0.0;
    for (double v : out.per_chip) sum += v;
    out.mean = sum / out.per_chip.size();
    return out;
}

InterFhd inter_fhd(const ResponseMatrix& reference, bool keep_pairwise) {
    const int n = reference.num_chips;
    const int K = reference.num_challenges;
    if (n < 2) throw ContractViolation("inter_fhd needs at least 2 chips");
    if (reference.num_repeats != 1)
        throw ContractViolation("inter_fhd expects reduced reference responses");

    InterFhd out;
    out.num_chips = n;
    out.num_challenges = K;

    // Mean over pairs from per-challenge one-counts: the total number of
    // differing (pair, challenge) combinations is sum_k n1_k * n0_k.
    std::uint64_t total = 0;
    for (int k = 0; k < K; ++k) {
        std::uint64_t ones = 0;
        for (int c = 0; c < n; ++c) ones += reference.bit(c, k);
        total += ones * (static_cast<std::uint64_t>(n) - ones);
    }
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    out.mean = static_cast<double>(total) /
               (static_cast<double>(pairs) * static_cast<double>(K));

    if (keep_pairwise) {
        out.pairwise.reserve(pairs);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                std::uint64_t hd = 0;
                for (int k = 0; k < K; ++k) hd += reference.bit(a, k) != reference.bit(b, k);
                out.pairwise.push_back(static_cast<double>(hd) / K);
            }
    }
    return out;
}

IntraFhd fhd_to_reference(const ResponseMatrix& reference, const ResponseMatrix& per_repeat) {
    if (reference.num_chips != per_repeat.num_chips ||
        reference.num_challenges != per_repeat.num_challenges)
        throw ContractViolation("reference and per-repeat dimensions differ");
    if (reference.num_repeats != 1)
        throw ContractViolation("reference matrix must be reduced");

    const int t = per_repeat.num_repeats;
    const int K = per_repeat.num_challenges;
    IntraFhd out;
    out.num_chips = per_repeat.num_chips;
    out.num_challenges = K;
    out.num_repeats = t;
    out.per_chip.resize(per_repeat.num_chips);
    const std::uint64_t denom = static_cast<std::uint64_t>(t) * K;
    for (int c = 0; c < per_repeat.num_chips; ++c) {
        std::uint64_t differing = 0;
        for (int k = 0; k < K; ++k)
            for (int r = 0; r < t; ++r)
                differing += per_repeat.bit(c, k, r) != reference.bit(c, k);
        out.per_chip[c] = static_cast<double>(differing) / static_cast<double>(denom);
    }
    double sum = 0.0;
    for (double v : out.per_chip) sum += v;
    out.mean = sum / out.per_chip.size();
    return out;
}

double estimate_sigma(const MeasurementTensor& tensor) {
    const int n = tensor.num_chips;
    const int K = tensor.num_challenges;
    const int t = tensor.num_repeats;
    if (n < 2) throw ContractViolation("estimate_sigma needs at least 2 chips");

    std::vector<double> stds(K);
    std::vector<double> chip_means(n);
    for (int k = 0; k < K; ++k) {
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int r = 0; r < t; ++r) s += static_cast<double>(tensor.value(c, k, r));
            chip_means[c] = s / t;
        }
        double mean = 0.0;
        for (double m : chip_means) mean += m;
        mean /= n;
        double ss = 0.0;
        for (double m : chip_means) ss += (m - mean) * (m - mean);
        stds[k] = std::sqrt(ss / (n - 1));
    }
    std::sort(stds.begin(), stds.end());
    if (K % 2 == 1) return stds[K / 2];
    return 0.5 * (stds[K / 2 - 1] + stds[K / 2]);
}

FhdSummary make_fhd_summary(const IntraFhd& intra, const InterFhd& inter) {
    FhdSummary s;
    s.intra_per_chip = intra.per_chip;
    s.intra_mean = intra.mean;
    s.inter_pairwise = inter.pairwise;
    s.inter_mean = inter.mean;
    s.num_chips = intra.num_chips;
    s.n_challenges = intra.num_challenges;
    s.t = intra.num_repeats;
    return s;
}

} // namespace unbias
