#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ntw {

/// Orthonormal basis e_1..e_N of R^N (stored as columns) with e_1 = 1_N / sqrt(N).
class WarpBasis {
public:
    WarpBasis() = default;
    /// Takes an explicit orthonormal matrix; column 0 must be the normalized ones vector.
    explicit WarpBasis(Eigen::MatrixXd vectors);

    int n_series() const noexcept { return static_cast<int>(vectors_.cols()); }
    /// S = sqrt(N), the end of the warping domain [0, S].
    double span() const noexcept { return span_; }

    const Eigen::MatrixXd& vectors() const noexcept { return vectors_; }
    /// Columns e_2..e_N, shape N x (N-1). Each column sums to zero.
    auto complement() const { return vectors_.rightCols(vectors_.cols() - 1); }

private:
    Eigen::MatrixXd vectors_;
    double span_ = 0.0;
};

/// Deterministic basis: e_1 = 1/sqrt(N), then modified Gram-Schmidt of the standard
/// vectors u_1..u_{N-1}, each normalized so its first nonzero entry is positive.
WarpBasis build_basis(int n_series);

/// Regular grid s_z = (z / Z) * S for z in [0..Z].
std::vector<double> regular_grid(double span, int z_count);

/// tau'(s) = s e_1 + s (S - s) sum_k coeffs[k] e_{k+1}. Components are not clamped.
Eigen::VectorXd warp_from_coefficients(const WarpBasis& basis, double s,
                                       const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Column-wise warp_from_coefficients over a grid. coeffs is (N-1) x points.
Eigen::MatrixXd warp_grid(const WarpBasis& basis, std::span<const double> s,
                          const Eigen::Ref<const Eigen::MatrixXd>& coeffs);

/// A continuous warping: basis plus a coefficient function phi: [0, S] -> R^{N-1}.
struct ContinuousWarping {
    WarpBasis basis;
    std::function<Eigen::VectorXd(double)> phi;

    double span() const noexcept { return basis.span(); }
};

/// Normalized warp positions tau'_i(s), one per series. Throws for s outside [0, S].
Eigen::VectorXd eval_warping(const ContinuousWarping& warping, double s);

/// Integer warping tau[i][z] in [0..T_i] for z in [0..Z]: the discrete alignment.
class SampledWarping {
public:
    SampledWarping() = default;
    SampledWarping(std::vector<int> lengths, std::vector<std::vector<int>> tau);

    int n_series() const noexcept { return static_cast<int>(lengths_.size()); }
    /// Z; each row holds Z + 1 entries.
    int z_max() const noexcept { return tau_.empty() ? 0 : static_cast<int>(tau_[0].size()) - 1; }
    /// T_1..T_N, the last valid index of each series.
    const std::vector<int>& lengths() const noexcept { return lengths_; }
    const std::vector<std::vector<int>>& tau() const noexcept { return tau_; }
    int operator()(int i, int z) const { return tau_[i][z]; }

private:
    std::vector<int> lengths_;
    std::vector<std::vector<int>> tau_;
};

/// Floors T_i tau'_i(s_z) on the regular grid, clamps to [0, T_i] and pins the endpoints.
SampledWarping sample_warping(const ContinuousWarping& warping, int z_max,
                              std::span<const int> lengths);

/// Same discretization applied to tau' already evaluated on a regular grid
/// (N x (Z+1), column z at s_z).
SampledWarping discretize(const Eigen::Ref<const Eigen::MatrixXd>& tau_grid,
                          std::span<const int> lengths);

/// The warping with phi = 0: tau[i][z] = floor(T_i z / Z) up to rounding of the grid.
SampledWarping uniform_warping(std::span<const int> lengths, int z_max);

/// Fractions of frames satisfying monotonicity, continuity and the boundary conditions.
struct Validity {
    double v_mono = 0.0;
    double v_cont = 0.0;
    double v_bound = 0.0;

    bool all_valid() const noexcept { return v_mono == 1.0 && v_cont == 1.0 && v_bound == 1.0; }
};

/// v_bound is normalized by N so all three scores lie in [0, 1].
Validity check_feasibility(const SampledWarping& warping);

}  // namespace ntw
