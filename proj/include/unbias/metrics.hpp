#pragma once

#include <vector>

#include "unbias/extraction.hpp"
#include "unbias/popmodel.hpp"

namespace unbias {

struct IntraFhd {
    std::vector<double> per_chip;
    double mean = 0.0;
    int num_chips = 0;
    int num_challenges = 0;
    int num_repeats = 0;
};

struct InterFhd {
    std::vector<double> pairwise; // C(num_chips, 2) entries; empty when skipped
    double mean = 0.0;
    int num_chips = 0;
    int num_challenges = 0;
};

struct FhdSummary {
    std::vector<double> intra_per_chip;
    double intra_mean = 0.0;
    std::vector<double> inter_pairwise;
    double inter_mean = 0.0;
    int num_chips = 0;
    int n_challenges = 0;
    int t = 0;
};

// Mean over all C(t,2) repeat pairs of the normalized Hamming distance
// between the two response vectors, per chip; the mean divides a single
// integer pair count, so it is exact in the rational sense.
IntraFhd intra_fhd(const ResponseMatrix& per_repeat);

// Normalized Hamming distance between reference responses for every chip
// pair. The mean is computed from integer per-challenge counts; pairwise
// entries can be skipped for very large populations.
InterFhd inter_fhd(const ResponseMatrix& reference, bool keep_pairwise = true);

// Reliability against enrolled references: per chip, the mean over repeats
// of the normalized Hamming distance to that chip's reference vector.
IntraFhd fhd_to_reference(const ResponseMatrix& reference, const ResponseMatrix& per_repeat);

// Per challenge, the sample standard deviation (n-1) of per-chip
// repeat-mean difference values; returns the median over challenges
// (mean of the two central values for even counts).
double estimate_sigma(const MeasurementTensor& tensor);

FhdSummary make_fhd_summary(const IntraFhd& intra, const InterFhd& inter);

} // namespace unbias
