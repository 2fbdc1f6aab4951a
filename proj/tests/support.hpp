#pragma once

// Test-only generators and oracles shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ntw/warp_model.hpp"
#include "ntw/warp_net.hpp"

namespace ntw::testing {

/// Grid-monotone warp targets w (N x (Z+1)): nonnegative increments whose per-step sum
/// is N/Z (as the model forces) and whose per-series sum is 1. Built by Sinkhorn scaling
/// of positive noise.
inline Eigen::MatrixXd random_monotone_targets(int n, int z_max, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> noise(0.05, 1.0);
    Eigen::MatrixXd inc(n, z_max);
    for (int i = 0; i < n; ++i)
        for (int z = 0; z < z_max; ++z) inc(i, z) = noise(rng);
    const double col_target = static_cast<double>(n) / z_max;
    for (int it = 0; it < 500; ++it) {
        for (int i = 0; i < n; ++i) inc.row(i) /= inc.row(i).sum();
        for (int z = 0; z < z_max; ++z) inc.col(z) *= col_target / inc.col(z).sum();
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, z_max + 1);
    for (int z = 0; z < z_max; ++z) w.col(z + 1) = w.col(z) + inc.col(z);
    return w;
}

/// A coefficient function that reproduces the targets at the regular grid points
/// (piecewise linear in between).
inline ContinuousWarping warping_through(const WarpBasis& basis, const Eigen::MatrixXd& targets) {
    const int z_max = static_cast<int>(targets.cols()) - 1;
    const auto s = regular_grid(basis.span(), z_max);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(basis.n_series() - 1, z_max + 1);
    for (int z = 1; z < z_max; ++z) {
        const double env = s[z] * (basis.span() - s[z]);
        const Eigen::VectorXd offset =
            targets.col(z).array() - s[z] / basis.span();
        coeffs.col(z) = basis.complement().transpose() * offset / env;
    }
    const double span = basis.span();
    return {basis, [coeffs, z_max, span](double x) -> Eigen::VectorXd {
                const double pos = std::clamp(x / span * z_max, 0.0, static_cast<double>(z_max));
                const int lo = std::min(static_cast<int>(std::floor(pos)), z_max - 1);
                const double frac = pos - lo;
                if (frac == 0.0) return coeffs.col(lo);
                return (1.0 - frac) * coeffs.col(lo) + frac * coeffs.col(lo + 1);
            }};
}

/// Random network with a nonzero output layer, as a phi handle.
inline WarpNet random_net(const NetShape& shape, std::uint64_t seed, double out_scale) {
    WarpNet net = init_net(shape, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(-out_scale, out_scale);
    for (Eigen::Index i = 0; i < net.w4().size(); ++i) net.w4().data()[i] = dist(rng);
    for (Eigen::Index i = 0; i < net.b4().size(); ++i) net.b4()[i] = dist(rng);
    return net;
}

/// Relative error with an absolute floor for near-zero references.
inline bool gradients_agree(double analytic, double numeric, double rel_tol, double abs_floor) {
    const double diff = std::abs(analytic - numeric);
    return diff <= abs_floor || diff <= rel_tol * std::max(std::abs(analytic), std::abs(numeric));
}

}  // namespace ntw::testing

#include "ntw/time_series.hpp"
#include "ntw/training.hpp"

namespace ntw::testing {

struct GradientCheckReport {
    std::size_t parameters = 0;
    std::size_t failures = 0;
    double worst_relative = 0.0;
    double penalty = 0.0;  // penalty at the checked point, to show the hinge path is exercised
    double smallest_hinge_margin = 0.0;
};

/// Compares Objective::evaluate's gradient with central differences (step h) for every
/// parameter of a small random network.
inline GradientCheckReport check_objective_gradient(std::span<const TimeSeries> series,
                                                    const NetShape& shape, std::uint64_t seed,
                                                    double out_scale, int z_train, double alpha,
                                                    double lambda, double h = 1e-6,
                                                    double rel_tol = 1e-5, double abs_floor = 1e-8) {
    const int n = static_cast<int>(series.size());
    WarpNet net = random_net(shape, seed, out_scale);
    const Objective objective(series, build_basis(n), z_train, lambda);

    GradientCheckReport report;
    Eigen::VectorXd grad;
    report.penalty = objective.evaluate(net, alpha, &grad).penalty;
    {
        NetTape tape;
        const Eigen::MatrixXd tau =
            warp_grid(objective.basis(), objective.grid(), forward(net, objective.grid(), tape));
        double margin = INFINITY;
        for (Eigen::Index i = 0; i < tau.rows(); ++i)
            for (Eigen::Index z = 0; z + 1 < tau.cols(); ++z)
                margin = std::min(margin, std::abs(tau(i, z) - tau(i, z + 1)));
        report.smallest_hinge_margin = margin;
    }
    report.parameters = static_cast<std::size_t>(net.parameters().size());
    for (Eigen::Index p = 0; p < net.parameters().size(); ++p) {
        const double keep = net.parameters()[p];
        net.parameters()[p] = keep + h;
        const double up = objective.evaluate(net, alpha).total;
        net.parameters()[p] = keep - h;
        const double down = objective.evaluate(net, alpha).total;
        net.parameters()[p] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double diff = std::abs(grad[p] - fd);
        const double scale = std::max(std::abs(grad[p]), std::abs(fd));
        if (diff > abs_floor) report.worst_relative = std::max(report.worst_relative, diff / scale);
        if (!gradients_agree(grad[p], fd, rel_tol, abs_floor)) ++report.failures;
    }
    return report;
}

/// N series of length T+1 with distinct smooth shapes, for gradient checks.
inline std::vector<TimeSeries> wiggly_series(int n, int t_max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TimeSeries> out;
    for (int i = 0; i < n; ++i) {
        const double f1 = 0.5 + 2.0 * u(rng), f2 = 3.0 + 3.0 * u(rng), ph = 6.28 * u(rng);
        std::vector<double> v(t_max + 1);
        for (int t = 0; t <= t_max; ++t) {
            const double x = static_cast<double>(t) / t_max;
            v[t] = std::sin(6.283185307179586 * f1 * x + ph) + 0.3 * std::cos(6.283185307179586 * f2 * x);
        }
        out.emplace_back(std::move(v));
    }
    return out;
}

}  // namespace ntw::testing

namespace ntw::testing {

/// Exhaustive minimum over every monotone (0,0)->(n-1,m-1) path with unit steps.
inline double brute_force_dtw(std::span<const double> a, std::span<const double> b) {
    double best = INFINITY;
    auto walk = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
        acc += (a[i] - b[j]) * (a[i] - b[j]);
        if (i + 1 == a.size() && j + 1 == b.size()) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < a.size()) self(self, i + 1, j, acc);
        if (j + 1 < b.size()) self(self, i, j + 1, acc);
        if (i + 1 < a.size() && j + 1 < b.size()) self(self, i + 1, j + 1, acc);
    };
    walk(walk, 0, 0, 0.0);
    return best;
}

}  // namespace ntw::testing
