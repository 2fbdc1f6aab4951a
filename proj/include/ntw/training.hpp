#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ntw/interp.hpp"
#include "ntw/metrics.hpp"
#include "ntw/time_series.hpp"
#include "ntw/warp_model.hpp"
#include "ntw/warp_net.hpp"

namespace ntw {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam step. An empty state is sized on first use.
void adam_update(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
                 AdamState& state, double learning_rate, const AdamConfig& config = {});

struct NtwConfig {
    int updates = 1000;
    double learning_rate = 1e-4;
    double lambda = 1000.0;
    double alpha0 = 100.0;
    double alpha_decay = 0.99;
    /// Trapezoid intervals Z'. Defaults to max_i T_i.
    std::optional<int> z_train;
    /// Output resolution Z. Defaults to N * max_i T_i.
    std::optional<int> z_out;
    /// Reject z_out below N * max_i T_i, where continuity is no longer guaranteed.
    bool require_feasible_resolution = true;
    std::uint64_t seed = 0;
    AdamConfig adam;
    int hidden1 = 512;
    int hidden2 = 512;
    int hidden3 = 1025;
    /// Workers for per-series work. Results are identical for any value.
    int threads = 1;
};

/// Throws InvalidArgument describing the first violated setting.
void validate(const NtwConfig& config, std::span<const TimeSeries> series);

int resolved_z_train(const NtwConfig& config, std::span<const TimeSeries> series);
int resolved_z_out(const NtwConfig& config, std::span<const TimeSeries> series);

/// Trapezoidal data term over a warp grid tau' (N x (Z'+1), regular in [0, S]).
/// If tau_grad is given it receives dL/dtau', same shape.
double data_loss(std::span<const TimeSeries> series, const Eigen::Ref<const Eigen::MatrixXd>& tau,
                 double span, double alpha, Eigen::MatrixXd* tau_grad = nullptr, int threads = 1);

/// Data term of the warping produced by net on the Z' grid.
double data_loss(std::span<const TimeSeries> series, const WarpNet& net, const WarpBasis& basis,
                 int z_train, double alpha);

/// Hinge on decreases: sum_i sum_z max(tau'_i(s_z) - tau'_i(s_{z+1}), 0).
double penalty(const Eigen::Ref<const Eigen::MatrixXd>& tau, Eigen::MatrixXd* tau_grad = nullptr);

double penalty(const WarpNet& net, const WarpBasis& basis, int z_train);

struct ObjectiveTerms {
    double data = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

/// The full objective data + lambda * penalty for a fixed series set, and its parameter
/// gradient through the interpolant, the warp model and the network.
class Objective {
public:
    Objective(std::span<const TimeSeries> series, WarpBasis basis, int z_train, double lambda,
              int threads = 1);

    ObjectiveTerms evaluate(const WarpNet& net, double alpha,
                            Eigen::VectorXd* gradient = nullptr) const;

    const WarpBasis& basis() const noexcept { return basis_; }
    const std::vector<double>& grid() const noexcept { return grid_; }

private:
    std::span<const TimeSeries> series_;
    WarpBasis basis_;
    std::vector<double> grid_;
    double lambda_;
    int threads_;
};

struct LossRecord {
    int step = 0;
    double data_loss = 0.0;
    double penalty = 0.0;
    double alpha = 0.0;
    double total = 0.0;
};

using LossHistory = std::vector<LossRecord>;

struct AlignmentResult {
    SampledWarping warping;
    AlignedSet aligned;
    LossHistory history;
    Validity validity;
    /// Penalty of the final network on the training grid.
    double penalty_residual = 0.0;
    /// Data term at alpha = 1 for the initial (uniform) and final warpings.
    double data_loss_initial = 0.0;
    double data_loss_final = 0.0;
    double barycenter_loss = 0.0;
    std::vector<double> average;
    std::vector<double> sd;
    int updates = 0;
    double alpha_final = 0.0;
    WarpNet net;
};

using ProgressCallback = std::function<void(const LossRecord&)>;

/// Optimizes the warp network with Adam and annealing, then discretizes at z_out.
/// Throws DivergenceError (with the update index) if anything becomes non-finite.
AlignmentResult align(std::span<const TimeSeries> series, const NtwConfig& config,
                      const ProgressCallback& progress = {});

/// Aligned set, scores and statistics for a given warping. Used by align() and for
/// recomputing metrics from saved warpings.
struct WarpingSummary {
    AlignedSet aligned;
    Validity validity;
    double barycenter_loss = 0.0;
    std::vector<double> average;
    std::vector<double> sd;
};

WarpingSummary summarize(std::span<const TimeSeries> series, const SampledWarping& warping,
                         int threads = 1);

}  // namespace ntw
