#include "unbias/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "unbias/errors.hpp"
#include "unbias/extraction.hpp"
#include "unbias/gauss.hpp"

namespace unbias {

IntraPrediction predict_intra(std::span<const int> ones_per_challenge, int t) {
    if (t < 2) throw ContractViolation("predict_intra needs t >= 2");
    IntraPrediction out;
    out.t = t;
    out.per_challenge.reserve(ones_per_challenge.size());
    const std::uint64_t pairs = static_cast<std::uint64_t>(t) * (t - 1) / 2;
    std::uint64_t total = 0;
    for (int n_one : ones_per_challenge) {
        if (n_one < 0 || n_one > t)
            throw ContractViolation("count " + std::to_string(n_one) +
                                    " inconsistent with t = " + std::to_string(t));
        const std::uint64_t d = static_cast<std::uint64_t>(n_one) * (t - n_one);
        total += d;
        out.per_challenge.push_back(static_cast<double>(d) / static_cast<double>(pairs));
    }
    out.mean = static_cast<double>(total) /
               (static_cast<double>(pairs) * static_cast<double>(ones_per_challenge.size()));
    return out;
}

void BinModel::validate() const {
    if (!std::isfinite(bin_width) || !(bin_width > 0.0))
        throw ContractViolation("bin_width must be finite and > 0");
    if (!std::isfinite(sigma) || !(sigma > 0.0))
        throw ContractViolation("sigma must be finite and > 0");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0) || epsilon > bin_width)
        throw ContractViolation("epsilon must lie in (0, bin_width]");
}

namespace {

constexpr double kTailSigmas = 10.0;

// Indices n whose bin [-eps + 2nw, -eps + 2nw + w) intersects
// [-kTailSigmas*sigma, kTailSigmas*sigma]; offset selects the type-0
// lattice (shift by w) instead.
std::pair<std::int64_t, std::int64_t> bin_range(const BinModel& m, double offset) {
    const double reach = kTailSigmas * m.sigma;
    const double lo = (-reach + m.epsilon - offset - m.bin_width) / (2.0 * m.bin_width);
    const double hi = (reach + m.epsilon - offset) / (2.0 * m.bin_width);
    return {static_cast<std::int64_t>(std::floor(lo)), static_cast<std::int64_t>(std::ceil(hi))};
}

double bin_mass_sum(const BinModel& m, double offset) {
    const auto [n_lo, n_hi] = bin_range(m, offset);
    double total = 0.0;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const double left = -m.epsilon + 2.0 * n * m.bin_width + offset;
        total += gauss::cdf((left + m.bin_width) / m.sigma) - gauss::cdf(left / m.sigma);
    }
    return total;
}

} // namespace

double area_bin1(const BinModel& model) {
    model.validate();
    return std::min(1.0, bin_mass_sum(model, 0.0));
}

double area_bin0_direct(const BinModel& model) {
    model.validate();
    return std::min(1.0, bin_mass_sum(model, model.bin_width));
}

double ratio(const BinModel& model) {
    const double a1 = area_bin1(model);
    const double a0 = 1.0 - a1;
    if (a0 < kSaturationA0)
        throw SaturationError("A0 < 1e-15: Ratio saturated, inter-FHD ~ 2*A0");
    return a1 / a0;
}

double inter_fhd_at(const BinModel& model) {
    const double a1 = area_bin1(model);
    const double a0 = 1.0 - a1;
    if (a0 < kSaturationA0) return 2.0 * a1 * area_bin0_direct(model);
    return 2.0 * a1 * a0;
}

double worst_case_epsilon(double w, double sigma) {
    BinModel{w, sigma, 0.5 * w}.validate();
    return 0.5 * w;
}

WorstCaseVerification verify_worst_case(double w, double sigma, int grid_points,
                                        double derivative_tolerance) {
    WorstCaseVerification v;
    const BinModel half{w, sigma, 0.5 * w};
    half.validate();

    // dA1/deps = sum over bins of [f(left) - f(right)] / sigma; the terms
    // pair off symmetrically at eps = w/2.
    const auto [n_lo, n_hi] = bin_range(half, 0.0);
    double derivative = 0.0;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const double left = -half.epsilon + 2.0 * n * w;
        derivative +=
            (gauss::pdf(left / sigma) - gauss::pdf((left + w) / sigma)) / sigma;
    }
    v.derivative_at_half = derivative;
    v.derivative_ok = std::fabs(derivative) <= derivative_tolerance;

    // Grid scan of the unbalance |log Ratio| over eps in (0, w).
    v.grid_step = w / grid_points;
    double best = -1.0;
    for (int g = 1; g < grid_points; ++g) {
        const double eps = g * v.grid_step;
        const double a1 = area_bin1({w, sigma, eps});
        const double a0 = 1.0 - a1;
        const double unbalance =
            (a0 < kSaturationA0) ? std::numeric_limits<double>::infinity()
                                 : std::fabs(std::log(a1 / a0));
        if (unbalance > best) {
            best = unbalance;
            v.grid_best_epsilon = eps;
        }
    }
    v.grid_ok = std::fabs(v.grid_best_epsilon - 0.5 * w) <= v.grid_step + 1e-12 * w;
    return v;
}

double predict_inter_lb(double w, double sigma) {
    const BinModel model{w, sigma, 0.5 * w};
    const double a1 = area_bin1(model);
    const double a0 = 1.0 - a1;
    if (a0 < kSaturationA0) return 2.0 * a1 * area_bin0_direct(model);
    const double r = a1 / a0;
    return 2.0 * r / ((1.0 + r) * (1.0 + r));
}

Selection select_inspection_bit(std::span<const double> pred_intra_per_bit, double sigma,
                                double intra_threshold, std::span<const double> measured_intra,
                                std::span<const double> measured_inter) {
    if (!(intra_threshold > 0.0 && intra_threshold < 1.0))
        throw ContractViolation("intra_threshold must lie in (0, 1)");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ContractViolation("sigma must be finite and > 0");
    const int width = static_cast<int>(pred_intra_per_bit.size());
    if (width < 1) throw ContractViolation("need predictions for at least one bit");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    Selection sel;
    sel.reports.reserve(width);
    int best = -1;
    double best_lb = -1.0;
    for (int i = 0; i < width; ++i) {
        BitReport r;
        r.bit_index = i;
        r.w = std::ldexp(1.0, i);
        r.pred_intra = pred_intra_per_bit[i];
        r.pred_inter_lb = predict_inter_lb(r.w, sigma);
        r.meas_intra = i < static_cast<int>(measured_intra.size()) ? measured_intra[i] : nan;
        r.meas_inter = i < static_cast<int>(measured_inter.size()) ? measured_inter[i] : nan;
        sel.reports.push_back(r);
        if (r.pred_intra <= intra_threshold && r.pred_inter_lb > best_lb) {
            best = i;
            best_lb = r.pred_inter_lb;
        }
    }
    if (best < 0)
        throw NoFeasibleBitError("no inspection bit satisfies intra threshold " +
                                 std::to_string(intra_threshold));
    sel.bit_index = best;
    return sel;
}

std::vector<double> per_bit_intra_prediction(const MeasurementTensor& tensor, int chip) {
    if (chip < 0 || chip >= tensor.num_chips)
        throw ContractViolation("chip index out of range");
    const int width = tensor.cfg.register_width;
    const int t = tensor.num_repeats;
    std::vector<double> out(width);
    std::vector<int> ones(tensor.num_challenges);
    for (int i = 0; i < width; ++i) {
        const InspectionBit ins{i};
        for (int k = 0; k < tensor.num_challenges; ++k) {
            int n_one = 0;
            for (int r = 0; r < t; ++r)
                n_one += extract_bit({tensor.value(chip, k, r), width}, ins);
            ones[k] = n_one;
        }
        out[i] = predict_intra(ones, t).mean;
    }
    return out;
}

} // namespace unbias
