#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ntw {

/// Layer widths of the coefficient network. The third hidden layer reads
/// concat(s, h1, h2), so its input width is 1 + hidden1 + hidden2.
struct NetShape {
    int n_out = 1;
    int hidden1 = 512;
    int hidden2 = 512;
    int hidden3 = 1025;

    int concat_width() const noexcept { return 1 + hidden1 + hidden2; }
    std::size_t parameter_count() const noexcept;
    bool operator==(const NetShape&) const = default;
};

/// Fully connected ReLU network s -> R^{N-1} with a dense skip into the third layer:
///
///   h1 = relu(W1 s + b1)
///   h2 = relu(W2 h1 + b2)
///   h3 = relu(W3 [s; h1; h2] + b3)
///   y  = W4 h3 + b4
///
/// All parameters live in one flat vector (W1, b1, W2, b2, W3, b3, W4, b4, matrices
/// column-major) so optimizers and gradient checks can treat them uniformly.
class WarpNet {
public:
    using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
    using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
    using VectorMap = Eigen::Map<Eigen::VectorXd>;
    using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

    WarpNet() = default;
    explicit WarpNet(const NetShape& shape);

    const NetShape& shape() const noexcept { return shape_; }
    int n_out() const noexcept { return shape_.n_out; }

    Eigen::VectorXd& parameters() noexcept { return params_; }
    const Eigen::VectorXd& parameters() const noexcept { return params_; }

    MatrixMap w1() { return matrix(offsets_.w1, shape_.hidden1, 1); }
    MatrixMap w2() { return matrix(offsets_.w2, shape_.hidden2, shape_.hidden1); }
    MatrixMap w3() { return matrix(offsets_.w3, shape_.hidden3, shape_.concat_width()); }
    MatrixMap w4() { return matrix(offsets_.w4, shape_.n_out, shape_.hidden3); }
    VectorMap b1() { return vector(offsets_.b1, shape_.hidden1); }
    VectorMap b2() { return vector(offsets_.b2, shape_.hidden2); }
    VectorMap b3() { return vector(offsets_.b3, shape_.hidden3); }
    VectorMap b4() { return vector(offsets_.b4, shape_.n_out); }

    ConstMatrixMap w1() const { return matrix(offsets_.w1, shape_.hidden1, 1); }
    ConstMatrixMap w2() const { return matrix(offsets_.w2, shape_.hidden2, shape_.hidden1); }
    ConstMatrixMap w3() const { return matrix(offsets_.w3, shape_.hidden3, shape_.concat_width()); }
    ConstMatrixMap w4() const { return matrix(offsets_.w4, shape_.n_out, shape_.hidden3); }
    ConstVectorMap b1() const { return vector(offsets_.b1, shape_.hidden1); }
    ConstVectorMap b2() const { return vector(offsets_.b2, shape_.hidden2); }
    ConstVectorMap b3() const { return vector(offsets_.b3, shape_.hidden3); }
    ConstVectorMap b4() const { return vector(offsets_.b4, shape_.n_out); }

    /// Offsets of each tensor inside parameters(); also the layout of gradients.
    struct Offsets {
        std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, w3 = 0, b3 = 0, w4 = 0, b4 = 0, end = 0;
    };
    const Offsets& offsets() const noexcept { return offsets_; }

private:
    MatrixMap matrix(std::size_t off, Eigen::Index r, Eigen::Index c) {
        return MatrixMap(params_.data() + off, r, c);
    }
    ConstMatrixMap matrix(std::size_t off, Eigen::Index r, Eigen::Index c) const {
        return ConstMatrixMap(params_.data() + off, r, c);
    }
    VectorMap vector(std::size_t off, Eigen::Index n) { return VectorMap(params_.data() + off, n); }
    ConstVectorMap vector(std::size_t off, Eigen::Index n) const {
        return ConstVectorMap(params_.data() + off, n);
    }

    NetShape shape_;
    Offsets offsets_;
    Eigen::VectorXd params_;
};

/// Hidden layers uniform in +-1/sqrt(fan_in) from a seeded generator; output layer zero,
/// so the network output (and the warp deviation from uniform) is exactly zero.
WarpNet init_net(const NetShape& shape, std::uint64_t seed);

/// Default widths (512, 512, 1025) for N series.
NetShape default_shape(int n_series);

/// Activations recorded by a batched forward pass, one column per evaluated point.
struct NetTape {
    Eigen::RowVectorXd s;
    Eigen::MatrixXd h1;
    Eigen::MatrixXd h2;
    Eigen::MatrixXd h3;

    Eigen::Index points() const noexcept { return s.size(); }
    void clear();
};

/// Evaluates the network at every s and records activations on the tape (replacing
/// any previous record). Returns n_out x points. Throws DivergenceError on non-finite output.
Eigen::MatrixXd forward(const WarpNet& net, std::span<const double> s, NetTape& tape);

/// Single point, no tape.
Eigen::VectorXd forward(const WarpNet& net, double s);

/// Reverse pass: out_grads holds dL/dy for each taped point (n_out x points, same column
/// order as the forward call). Returns dL/dtheta in the parameters() layout.
Eigen::VectorXd backward(const WarpNet& net, const NetTape& tape,
                         const Eigen::Ref<const Eigen::MatrixXd>& out_grads);

/// Gradient for one grid point, addressed by its s value.
struct OutputGradient {
    double s;
    Eigen::VectorXd grad;
};

/// Same as above with gradients addressed by s. Points must match a taped s exactly;
/// taped points without an entry receive zero gradient. Throws ContractViolation otherwise.
Eigen::VectorXd backward(const WarpNet& net, const NetTape& tape,
                         std::span<const OutputGradient> out_grads);

/// Binary checkpoint: magic "NTWNET01", five int32 widths, then the parameter doubles
/// in host byte order.
void save_checkpoint(const WarpNet& net, const std::filesystem::path& path);
WarpNet load_checkpoint(const std::filesystem::path& path);

}  // namespace ntw
