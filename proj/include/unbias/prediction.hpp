#pragma once

#include <span>
#include <vector>

#include "unbias/popmodel.hpp"

namespace unbias {

// Predicted intra-FHD from per-challenge response counts: a challenge with
// n_one ones among t repeats contributes n_one * n_zero / C(t,2).
struct IntraPrediction {
    std::vector<double> per_challenge;
    double mean = 0.0; // sum of integer pair counts over one denominator
    int t = 0;
};

IntraPrediction predict_intra(std::span<const int> ones_per_challenge, int t);

// Alternating-bin model of the inter-chip Normal distribution: bins of
// width w tile the axis, every other bin is type 1, and epsilon is the
// distance from the mean (taken as origin) to the nearest type-1 left
// boundary, 0 < epsilon <= w.
struct BinModel {
    double bin_width = 0.0; // w; 2^i for a register inspection bit
    double sigma = 0.0;     // inter-chip standard deviation
    double epsilon = 0.0;

    void validate() const;
};

// A0 = 1 - A1 counts as zero below this; Ratio saturates there.
inline constexpr double kSaturationA0 = 1e-15;

// Probability mass falling in type-1 bins: sum over n of
// F(-eps + 2nw + w) - F(-eps + 2nw), truncated to boundaries within
// 10 sigma of the mean (discarded tail mass < 1e-23).
double area_bin1(const BinModel& model);

// Type-0 mass summed directly over its own bins rather than as 1 - A1;
// keeps full relative accuracy when A1 is within an ulp of 1.
double area_bin0_direct(const BinModel& model);

// A1 / A0. Throws SaturationError once A0 < kSaturationA0.
double ratio(const BinModel& model);

// Probability that two chips drawn from the model disagree: 2 * A1 * A0.
// Uses the direct type-0 summation when A0 saturates.
double inter_fhd_at(const BinModel& model);

// The unbalance extremum sits at half a bin width.
double worst_case_epsilon(double w, double sigma);

struct WorstCaseVerification {
    double derivative_at_half = 0.0; // dA1/deps at eps = w/2, via the pdf-difference sum
    double grid_best_epsilon = 0.0;  // arg-extremum of |log Ratio| on the grid
    double grid_step = 0.0;
    bool derivative_ok = false;
    bool grid_ok = false; // extremum within one step of w/2
};

// Numerical confirmation that eps = w/2 extremizes the unbalance: the
// derivative sum of pdf differences vanishes there, and a grid scan of
// |log Ratio| peaks within one step of w/2.
WorstCaseVerification verify_worst_case(double w, double sigma, int grid_points = 10000,
                                        double derivative_tolerance = 1e-8);

// Predicted inter-FHD lower bound for bin width w: 2R/(1+R)^2 with
// R = Ratio at the worst-case eps = w/2; algebraically equal to 2*A1*A0.
double predict_inter_lb(double w, double sigma);

struct BitReport {
    int bit_index = 0;
    double w = 0.0;
    double pred_intra = 0.0;
    double meas_intra = 0.0; // NaN when not measured
    double pred_inter_lb = 0.0;
    double meas_inter = 0.0; // NaN when not measured
};

struct Selection {
    int bit_index = 0;
    std::vector<BitReport> reports; // one per inspection bit
};

// Candidate bits satisfy pred_intra <= intra_threshold; among those the
// winner maximizes predict_inter_lb(2^i, sigma), ties toward smaller i.
// Throws NoFeasibleBitError when no bit qualifies. Optional measured
// columns are copied into the reports when provided.
Selection select_inspection_bit(std::span<const double> pred_intra_per_bit, double sigma,
                                double intra_threshold,
                                std::span<const double> measured_intra = {},
                                std::span<const double> measured_inter = {});

// Per-challenge one-counts of a single chip at every inspection bit,
// folded through predict_intra; the input to selection.
std::vector<double> per_bit_intra_prediction(const MeasurementTensor& tensor, int chip);

} // namespace unbias
