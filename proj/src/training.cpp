#include "ntw/training.hpp"

#include <cmath>
#include <string>

#include "ntw/errors.hpp"
#include "ntw/parallel.hpp"

namespace ntw {

void adam_update(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
                 AdamState& state, double learning_rate, const AdamConfig& config) {
    if (params.size() != grads.size()) {
        throw InvalidArgument("parameter and gradient sizes differ");
    }
    if (state.m.size() == 0) {
        state.m = Eigen::VectorXd::Zero(params.size());
        state.v = Eigen::VectorXd::Zero(params.size());
    }
    if (state.m.size() != params.size()) {
        throw InvalidArgument("Adam state does not match the parameter count");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(config.beta1, t);
    const double bc2 = 1.0 - std::pow(config.beta2, t);
    state.m = config.beta1 * state.m + (1.0 - config.beta1) * grads;
    state.v = config.beta2 * state.v + (1.0 - config.beta2) * grads.cwiseAbs2();
    params.array() -= learning_rate * (state.m.array() / bc1) /
                      ((state.v.array() / bc2).sqrt() + config.eps);
}

int resolved_z_train(const NtwConfig& config, std::span<const TimeSeries> series) {
    return config.z_train.value_or(max_last_index(series));
}

int resolved_z_out(const NtwConfig& config, std::span<const TimeSeries> series) {
    return config.z_out.value_or(static_cast<int>(series.size()) * max_last_index(series));
}

void validate(const NtwConfig& config, std::span<const TimeSeries> series) {
    if (series.size() < 2) {
        throw InvalidArgument("need at least 2 series, got " + std::to_string(series.size()));
    }
    if (config.updates < 1) throw InvalidArgument("updates must be >= 1");
    if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    if (!(config.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    make_anneal_state(config.alpha0, config.alpha_decay);
    if (resolved_z_train(config, series) < 1) throw InvalidArgument("z-train must be >= 1");
    const int z_out = resolved_z_out(config, series);
    if (z_out < 1) throw InvalidArgument("z-out must be >= 1");
    const int needed = static_cast<int>(series.size()) * max_last_index(series);
    if (config.require_feasible_resolution && z_out < needed) {
        throw InvalidArgument("z-out must be >= N * max T = " + std::to_string(needed) +
                              " for guaranteed continuity, got " + std::to_string(z_out));
    }
    if (config.hidden1 < 1 || config.hidden2 < 1 || config.hidden3 < 1) {
        throw InvalidArgument("hidden layer widths must be positive");
    }
    if (config.threads < 1) throw InvalidArgument("threads must be >= 1");
}

double data_loss(std::span<const TimeSeries> series, const Eigen::Ref<const Eigen::MatrixXd>& tau,
                 double span, double alpha, Eigen::MatrixXd* tau_grad, int threads) {
    const auto n = static_cast<Eigen::Index>(series.size());
    const auto points = tau.cols();
    if (n < 2) throw InvalidArgument("data loss needs at least 2 series");
    if (tau.rows() != n || points < 2) {
        throw InvalidArgument("warp grid shape does not match the series");
    }
    Eigen::MatrixXd y(n, points);
    Eigen::MatrixXd dy(n, points);
    parallel_for(series.size(), threads, [&](std::size_t i) {
        const auto values = series[i].values();
        for (Eigen::Index z = 0; z < points; ++z) {
            const auto r = interpolate_with_grad(values, tau(i, z), alpha);
            y(i, z) = r.value;
            dy(i, z) = r.slope;
        }
    });

    // sum_i sum_j (y_i - y_j)^2 = 2 N sum_i (y_i - mean)^2
    const double ds = span / static_cast<double>(points - 1);
    const double nn = static_cast<double>(n);
    const Eigen::RowVectorXd mean = y.colwise().mean();
    const Eigen::MatrixXd centered = y.rowwise() - mean;
    double total = 0.0;
    for (Eigen::Index z = 0; z < points; ++z) {
        const double w = (z == 0 || z == points - 1) ? 0.5 : 1.0;
        total += w * 2.0 * nn * centered.col(z).squaredNorm();
    }
    total *= ds;
    if (!std::isfinite(total)) throw DivergenceError("data loss is not finite", 0);

    if (tau_grad != nullptr) {
        // dg/dy_i = 4 N (y_i - mean)
        tau_grad->resize(n, points);
        for (Eigen::Index z = 0; z < points; ++z) {
            const double w = (z == 0 || z == points - 1) ? 0.5 : 1.0;
            tau_grad->col(z) = (w * ds * 4.0 * nn) * centered.col(z).cwiseProduct(dy.col(z));
        }
    }
    return total;
}

double penalty(const Eigen::Ref<const Eigen::MatrixXd>& tau, Eigen::MatrixXd* tau_grad) {
    if (tau_grad != nullptr) tau_grad->setZero(tau.rows(), tau.cols());
    double r = 0.0;
    for (Eigen::Index i = 0; i < tau.rows(); ++i) {
        for (Eigen::Index z = 0; z + 1 < tau.cols(); ++z) {
            const double drop = tau(i, z) - tau(i, z + 1);
            if (drop > 0.0) {
                r += drop;
                if (tau_grad != nullptr) {
                    (*tau_grad)(i, z) += 1.0;
                    (*tau_grad)(i, z + 1) -= 1.0;
                }
            }
        }
    }
    return r;
}

namespace {

Eigen::MatrixXd net_warp_grid(const WarpNet& net, const WarpBasis& basis,
                              std::span<const double> grid, NetTape& tape) {
    const Eigen::MatrixXd coeffs = forward(net, grid, tape);
    return warp_grid(basis, grid, coeffs);
}

}  // namespace

double data_loss(std::span<const TimeSeries> series, const WarpNet& net, const WarpBasis& basis,
                 int z_train, double alpha) {
    const auto grid = regular_grid(basis.span(), z_train);
    NetTape tape;
    return data_loss(series, net_warp_grid(net, basis, grid, tape), basis.span(), alpha);
}

double penalty(const WarpNet& net, const WarpBasis& basis, int z_train) {
    const auto grid = regular_grid(basis.span(), z_train);
    NetTape tape;
    return penalty(net_warp_grid(net, basis, grid, tape));
}

Objective::Objective(std::span<const TimeSeries> series, WarpBasis basis, int z_train,
                     double lambda, int threads)
    : series_(series),
      basis_(std::move(basis)),
      grid_(regular_grid(basis_.span(), z_train)),
      lambda_(lambda),
      threads_(threads) {
    if (static_cast<int>(series.size()) != basis_.n_series()) {
        throw InvalidArgument("basis dimension does not match the number of series");
    }
}

ObjectiveTerms Objective::evaluate(const WarpNet& net, double alpha,
                                   Eigen::VectorXd* gradient) const {
    NetTape tape;
    const Eigen::MatrixXd tau = net_warp_grid(net, basis_, grid_, tape);

    ObjectiveTerms terms;
    if (gradient == nullptr) {
        terms.data = data_loss(series_, tau, basis_.span(), alpha, nullptr, threads_);
        terms.penalty = penalty(tau);
        terms.total = terms.data + lambda_ * terms.penalty;
        return terms;
    }

    Eigen::MatrixXd d_data;
    Eigen::MatrixXd d_pen;
    terms.data = data_loss(series_, tau, basis_.span(), alpha, &d_data, threads_);
    terms.penalty = penalty(tau, &d_pen);
    terms.total = terms.data + lambda_ * terms.penalty;

    // tau'(s) = (s/S) 1 + s (S - s) B phi(s)  =>  dL/dphi = s (S - s) B^T dL/dtau'
    const Eigen::MatrixXd d_tau = d_data + lambda_ * d_pen;
    Eigen::MatrixXd d_phi = basis_.complement().transpose() * d_tau;
    const double big_s = basis_.span();
    for (Eigen::Index z = 0; z < d_phi.cols(); ++z) {
        d_phi.col(z) *= grid_[z] * (big_s - grid_[z]);
    }
    *gradient = backward(net, tape, d_phi);
    return terms;
}

WarpingSummary summarize(std::span<const TimeSeries> series, const SampledWarping& warping,
                         int threads) {
    WarpingSummary out{make_aligned(series, warping), check_feasibility(warping), 0.0, {}, {}};
    out.barycenter_loss = barycenter_loss(series, out.aligned, threads);
    out.average = warped_average(out.aligned);
    out.sd = warped_std(out.aligned);
    return out;
}

AlignmentResult align(std::span<const TimeSeries> series, const NtwConfig& config,
                      const ProgressCallback& progress) {
    validate(config, series);
    const int n = static_cast<int>(series.size());
    const int z_train = resolved_z_train(config, series);
    const int z_out = resolved_z_out(config, series);

    NetShape shape{n - 1, config.hidden1, config.hidden2, config.hidden3};
    WarpNet net = init_net(shape, config.seed);
    const Objective objective(series, build_basis(n), z_train, config.lambda, config.threads);
    AdamState adam;
    AnnealState anneal = make_anneal_state(config.alpha0, config.alpha_decay);

    AlignmentResult result;
    result.data_loss_initial = objective.evaluate(net, 1.0).data;
    result.history.reserve(static_cast<std::size_t>(config.updates));

    Eigen::VectorXd grad;
    for (int step = 0; step < config.updates; ++step) {
        ObjectiveTerms terms;
        try {
            terms = objective.evaluate(net, anneal.alpha, &grad);
        } catch (const DivergenceError&) {
            throw DivergenceError("objective evaluation failed", static_cast<std::size_t>(step));
        }
        const LossRecord record{step, terms.data, terms.penalty, anneal.alpha, terms.total};
        result.history.push_back(record);
        if (progress) progress(record);
        if (!std::isfinite(terms.total) || !grad.allFinite()) {
            throw DivergenceError("non-finite objective or gradient", static_cast<std::size_t>(step));
        }
        adam_update(net.parameters(), grad, adam, config.learning_rate, config.adam);
        if (!net.parameters().allFinite()) {
            throw DivergenceError("non-finite parameters", static_cast<std::size_t>(step));
        }
        anneal = anneal_step(anneal);
    }

    const auto final_terms = objective.evaluate(net, 1.0);
    result.data_loss_final = final_terms.data;
    result.penalty_residual = final_terms.penalty;
    result.updates = config.updates;
    result.alpha_final = anneal.alpha;

    const auto out_grid = regular_grid(objective.basis().span(), z_out);
    NetTape tape;
    const Eigen::MatrixXd tau = net_warp_grid(net, objective.basis(), out_grid, tape);
    result.warping = discretize(tau, last_indices(series));

    auto summary = summarize(series, result.warping, config.threads);
    result.aligned = std::move(summary.aligned);
    result.validity = summary.validity;
    result.barycenter_loss = summary.barycenter_loss;
    result.average = std::move(summary.average);
    result.sd = std::move(summary.sd);
    result.net = std::move(net);
    return result;
}

}  // namespace ntw
