#include "ntw/warp_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntw/errors.hpp"

namespace ntw {
namespace {

// Absorbs rounding in s_z / S so exact multiples land on their integer. A constant shift
// inside the floor preserves monotonicity, the unit-step bound and the endpoints.
constexpr double kFloorGuard = 1e-9;

}  // namespace

WarpBasis::WarpBasis(Eigen::MatrixXd vectors) : vectors_(std::move(vectors)) {
    const auto n = vectors_.rows();
    if (n < 2 || vectors_.cols() != n) {
        throw InvalidArgument("warp basis must be a square matrix with N >= 2");
    }
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    if ((vectors_.col(0).array() - inv).abs().maxCoeff() > 1e-12) {
        throw InvalidArgument("first basis vector must be 1_N / sqrt(N)");
    }
    const Eigen::MatrixXd gram = vectors_.transpose() * vectors_;
    if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgument("warp basis is not orthonormal");
    }
    span_ = std::sqrt(static_cast<double>(n));
}

WarpBasis build_basis(int n_series) {
    if (n_series < 2) {
        throw InvalidArgument("need at least 2 series, got " + std::to_string(n_series));
    }
    const Eigen::Index n = n_series;
    Eigen::MatrixXd e(n, n);
    e.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    for (Eigen::Index k = 1; k < n; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, k - 1);
        for (Eigen::Index j = 0; j < k; ++j) v -= e.col(j).dot(v) * e.col(j);
        v.normalize();
        // sign convention: first entry with magnitude above rounding noise is positive
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-12) {
                if (v[i] < 0.0) v = -v;
                break;
            }
        }
        e.col(k) = v;
    }
    // exact 1/sqrt(N) for the first column
    e.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    return WarpBasis(std::move(e));
}

std::vector<double> regular_grid(double span, int z_count) {
    if (z_count < 1) throw InvalidArgument("grid needs Z >= 1");
    std::vector<double> s(static_cast<std::size_t>(z_count) + 1);
    for (int z = 0; z <= z_count; ++z) {
        s[z] = (static_cast<double>(z) / z_count) * span;
    }
    return s;
}

Eigen::VectorXd warp_from_coefficients(const WarpBasis& basis, double s,
                                       const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
    const double big_s = basis.span();
    const double envelope = s * (big_s - s);
    // s e_1 = (s / S) 1_N; written this way it is exactly 1_N at s = S
    Eigen::VectorXd tau = Eigen::VectorXd::Constant(basis.n_series(), s / big_s);
    if (envelope != 0.0) tau.noalias() += envelope * (basis.complement() * coeffs);
    return tau;
}

Eigen::MatrixXd warp_grid(const WarpBasis& basis, std::span<const double> s,
                          const Eigen::Ref<const Eigen::MatrixXd>& coeffs) {
    const auto points = static_cast<Eigen::Index>(s.size());
    if (coeffs.cols() != points || coeffs.rows() != basis.n_series() - 1) {
        throw InvalidArgument("coefficient grid has the wrong shape");
    }
    const double big_s = basis.span();
    Eigen::MatrixXd tau = basis.complement() * coeffs;
    for (Eigen::Index z = 0; z < points; ++z) {
        const double envelope = s[z] * (big_s - s[z]);
        if (envelope == 0.0) {
            tau.col(z).setConstant(s[z] / big_s);
        } else {
            tau.col(z) = (envelope * tau.col(z)).array() + s[z] / big_s;
        }
    }
    return tau;
}

Eigen::VectorXd eval_warping(const ContinuousWarping& warping, double s) {
    if (!(s >= 0.0 && s <= warping.span())) {
        throw InvalidArgument("warp position " + std::to_string(s) + " outside [0, S]");
    }
    const Eigen::VectorXd coeffs = warping.phi(s);
    if (coeffs.size() != warping.basis.n_series() - 1) {
        throw InvalidArgument("phi must return N - 1 coefficients");
    }
    return warp_from_coefficients(warping.basis, s, coeffs);
}

SampledWarping::SampledWarping(std::vector<int> lengths, std::vector<std::vector<int>> tau)
    : lengths_(std::move(lengths)), tau_(std::move(tau)) {
    if (tau_.size() != lengths_.size()) {
        throw InvalidArgument("sampled warping has " + std::to_string(tau_.size()) +
                              " rows for " + std::to_string(lengths_.size()) + " series");
    }
    if (tau_.empty() || tau_[0].size() < 2) {
        throw InvalidArgument("sampled warping needs at least one series and Z >= 1");
    }
    for (std::size_t i = 0; i < tau_.size(); ++i) {
        if (tau_[i].size() != tau_[0].size()) {
            throw InvalidArgument("sampled warping rows differ in length");
        }
        for (int v : tau_[i]) {
            if (v < 0 || v > lengths_[i]) {
                throw InvalidArgument("warp index " + std::to_string(v) + " outside [0, " +
                                      std::to_string(lengths_[i]) + "] for series " +
                                      std::to_string(i + 1));
            }
        }
    }
}

SampledWarping discretize(const Eigen::Ref<const Eigen::MatrixXd>& tau_grid,
                          std::span<const int> lengths) {
    const auto n = tau_grid.rows();
    const auto points = tau_grid.cols();
    if (static_cast<std::size_t>(n) != lengths.size()) {
        throw InvalidArgument("warp grid rows do not match the number of series");
    }
    if (points < 2) throw InvalidArgument("warp grid needs Z >= 1");
    std::vector<std::vector<int>> tau(n, std::vector<int>(points));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int t_max = lengths[i];
        for (Eigen::Index z = 0; z < points; ++z) {
            const double scaled = std::floor(t_max * tau_grid(i, z) + kFloorGuard);
            // clamp in floating point first so huge excursions cannot overflow int
            tau[i][z] = static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(t_max)));
        }
        tau[i].front() = 0;
        tau[i].back() = t_max;
    }
    return SampledWarping({lengths.begin(), lengths.end()}, std::move(tau));
}

SampledWarping sample_warping(const ContinuousWarping& warping, int z_max,
                              std::span<const int> lengths) {
    const int n = warping.basis.n_series();
    if (static_cast<int>(lengths.size()) != n) {
        throw InvalidArgument("need one length per series");
    }
    for (int t : lengths) {
        if (t < 1) throw InvalidArgument("series lengths must be positive");
    }
    const auto s = regular_grid(warping.span(), z_max);
    Eigen::MatrixXd grid(n, static_cast<Eigen::Index>(s.size()));
    for (std::size_t z = 0; z < s.size(); ++z) grid.col(z) = eval_warping(warping, s[z]);
    return discretize(grid, lengths);
}

SampledWarping uniform_warping(std::span<const int> lengths, int z_max) {
    const int n = static_cast<int>(lengths.size());
    const auto s = regular_grid(std::sqrt(static_cast<double>(n)), z_max);
    const WarpBasis basis = build_basis(n);
    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(n - 1, static_cast<Eigen::Index>(s.size()));
    return discretize(warp_grid(basis, s, zeros), lengths);
}

Validity check_feasibility(const SampledWarping& warping) {
    const int n = warping.n_series();
    const int z_max = warping.z_max();
    std::size_t mono = 0;
    std::size_t cont = 0;
    std::size_t bound = 0;
    for (int i = 0; i < n; ++i) {
        const auto& row = warping.tau()[i];
        for (int z = 0; z < z_max; ++z) {
            if (row[z + 1] >= row[z]) ++mono;
            if (row[z + 1] - row[z] <= 1) ++cont;
        }
        if (row.front() == 0) ++bound;
        if (row.back() == warping.lengths()[i]) ++bound;
    }
    const double frames = static_cast<double>(n) * z_max;
    return {static_cast<double>(mono) / frames, static_cast<double>(cont) / frames,
            static_cast<double>(bound) / (2.0 * n)};
}

}  // namespace ntw
