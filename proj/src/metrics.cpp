#include "ntw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ntw/errors.hpp"
#include "ntw/parallel.hpp"

namespace ntw {

DtwResult dtw(std::span<const double> a, std::span<const double> b, bool with_path) {
    if (a.empty() || b.empty()) throw InvalidArgument("dtw needs two nonempty sequences");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // cost(i, j) stored row-major; row i for a[i]
    std::vector<double> acc(n * m, inf);
    auto at = [&acc, m](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (a[i] - b[j]) * (a[i] - b[j]);
            if (i == 0 && j == 0) {
                at(i, j) = d;
                continue;
            }
            double best = inf;
            if (i > 0) best = std::min(best, at(i - 1, j));
            if (j > 0) best = std::min(best, at(i, j - 1));
            if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
            at(i, j) = d + best;
        }
    }
    DtwResult result;
    result.discrepancy = at(n - 1, m - 1);
    if (with_path) {
        std::size_t i = n - 1;
        std::size_t j = m - 1;
        result.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
        while (i > 0 || j > 0) {
            if (i == 0) {
                --j;
            } else if (j == 0) {
                --i;
            } else {
                const double diag = at(i - 1, j - 1);
                const double up = at(i - 1, j);
                const double left = at(i, j - 1);
                if (diag <= up && diag <= left) {
                    --i;
                    --j;
                } else if (up <= left) {
                    --i;
                } else {
                    --j;
                }
            }
            result.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
        std::reverse(result.path.begin(), result.path.end());
    }
    return result;
}

AlignedSet make_aligned(std::span<const TimeSeries> series, const SampledWarping& warping) {
    if (static_cast<int>(series.size()) != warping.n_series()) {
        throw InvalidArgument("warping has " + std::to_string(warping.n_series()) +
                              " series but " + std::to_string(series.size()) + " were given");
    }
    const int n = warping.n_series();
    const int points = warping.z_max() + 1;
    AlignedSet out{Eigen::MatrixXd(n, points), warping};
    for (int i = 0; i < n; ++i) {
        if (warping.lengths()[i] != series[i].last_index()) {
            throw InvalidArgument("warping length for series " + std::to_string(i + 1) +
                                  " does not match the data");
        }
        for (int z = 0; z < points; ++z) out.values(i, z) = series[i][warping(i, z)];
    }
    return out;
}

std::vector<double> warped_average(const AlignedSet& aligned) {
    const Eigen::VectorXd mean = aligned.values.colwise().mean().transpose();
    return {mean.data(), mean.data() + mean.size()};
}

std::vector<double> warped_std(const AlignedSet& aligned) {
    const auto& a = aligned.values;
    std::vector<double> sd(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index z = 0; z < a.cols(); ++z) {
        const double mean = a.col(z).mean();
        sd[z] = std::sqrt((a.col(z).array() - mean).square().mean());
    }
    return sd;
}

double barycenter_loss(std::span<const TimeSeries> series, const AlignedSet& aligned,
                       int threads) {
    if (static_cast<int>(series.size()) != aligned.n_series()) {
        throw InvalidArgument("aligned set does not match the series list");
    }
    const auto mean = warped_average(aligned);
    std::vector<double> per_series(series.size());
    parallel_for(series.size(), threads,
                 [&](std::size_t i) { per_series[i] = dtw(series[i].values(), mean).discrepancy; });
    double total = 0.0;
    for (double d : per_series) total += d;
    return total / (static_cast<double>(series.size()) * aligned.z_max());
}

}  // namespace ntw
