#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ntw/time_series.hpp"
#include "ntw/warp_model.hpp"

namespace ntw {

/// Optimal cumulative squared-difference cost between two sequences.
struct DtwResult {
    double discrepancy = 0.0;
    /// (index in a, index in b) from (0, 0) to (T_a, T_b); empty unless requested.
    std::vector<std::pair<int, int>> path;
};

/// Classic DTW with steps (1,0), (0,1), (1,1) and local cost (a_s - b_t)^2.
DtwResult dtw(std::span<const double> a, std::span<const double> b, bool with_path = false);

/// Aligned series A[i][z] = x_i[tau_i(z)], shape N x (Z+1).
struct AlignedSet {
    Eigen::MatrixXd values;
    SampledWarping warping;

    int n_series() const noexcept { return static_cast<int>(values.rows()); }
    int z_max() const noexcept { return static_cast<int>(values.cols()) - 1; }
};

AlignedSet make_aligned(std::span<const TimeSeries> series, const SampledWarping& warping);

/// Per-index mean of the aligned rows.
std::vector<double> warped_average(const AlignedSet& aligned);

/// Per-index population standard deviation (divides by N).
std::vector<double> warped_std(const AlignedSet& aligned);

/// (1 / (N Z)) sum_i DTW(x_i, mean of the aligned rows), with Z the aligned set's resolution.
double barycenter_loss(std::span<const TimeSeries> series, const AlignedSet& aligned,
                       int threads = 1);

}  // namespace ntw
