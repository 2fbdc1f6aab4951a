#include "ntw/warp_net.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "ntw/errors.hpp"

namespace ntw {
namespace {

constexpr std::array<char, 8> kMagic = {'N', 'T', 'W', 'N', 'E', 'T', '0', '1'};

WarpNet::Offsets layout(const NetShape& sh) {
    WarpNet::Offsets o;
    std::size_t at = 0;
    auto take = [&at](std::size_t n) {
        const std::size_t start = at;
        at += n;
        return start;
    };
    o.w1 = take(static_cast<std::size_t>(sh.hidden1));
    o.b1 = take(sh.hidden1);
    o.w2 = take(static_cast<std::size_t>(sh.hidden2) * sh.hidden1);
    o.b2 = take(sh.hidden2);
    o.w3 = take(static_cast<std::size_t>(sh.hidden3) * sh.concat_width());
    o.b3 = take(sh.hidden3);
    o.w4 = take(static_cast<std::size_t>(sh.n_out) * sh.hidden3);
    o.b4 = take(sh.n_out);
    o.end = at;
    return o;
}

Eigen::MatrixXd relu(Eigen::MatrixXd m) { return m.cwiseMax(0.0); }

}  // namespace

std::size_t NetShape::parameter_count() const noexcept { return layout(*this).end; }

WarpNet::WarpNet(const NetShape& shape) : shape_(shape) {
    if (shape.n_out < 1 || shape.hidden1 < 1 || shape.hidden2 < 1 || shape.hidden3 < 1) {
        throw InvalidArgument("network widths must be positive");
    }
    offsets_ = layout(shape);
    params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offsets_.end));
}

NetShape default_shape(int n_series) {
    if (n_series < 2) throw InvalidArgument("need at least 2 series");
    NetShape shape;
    shape.n_out = n_series - 1;
    return shape;
}

WarpNet init_net(const NetShape& shape, std::uint64_t seed) {
    WarpNet net(shape);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](auto&& block, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
            for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = dist(rng);
        }
    };
    fill(net.w1(), 1);
    fill(net.b1(), 1);
    fill(net.w2(), shape.hidden1);
    fill(net.b2(), shape.hidden1);
    fill(net.w3(), shape.concat_width());
    fill(net.b3(), shape.concat_width());
    // W4 and b4 stay zero: uniform warping at step 0
    return net;
}

void NetTape::clear() {
    s.resize(0);
    h1.resize(0, 0);
    h2.resize(0, 0);
    h3.resize(0, 0);
}

Eigen::MatrixXd forward(const WarpNet& net, std::span<const double> s, NetTape& tape) {
    const auto& sh = net.shape();
    const auto points = static_cast<Eigen::Index>(s.size());
    tape.s = Eigen::Map<const Eigen::RowVectorXd>(s.data(), points);

    tape.h1 = relu((net.w1() * tape.s).colwise() + net.b1());
    tape.h2 = relu((net.w2() * tape.h1).colwise() + net.b2());

    // W3 [s; h1; h2] split by column blocks instead of materializing the concat
    const auto w3 = net.w3();
    Eigen::MatrixXd pre3 = w3.col(0) * tape.s;
    pre3.noalias() += w3.middleCols(1, sh.hidden1) * tape.h1;
    pre3.noalias() += w3.rightCols(sh.hidden2) * tape.h2;
    tape.h3 = relu(pre3.colwise() + net.b3());

    Eigen::MatrixXd out = net.w4() * tape.h3;
    out.colwise() += net.b4();
    if (!out.allFinite()) {
        throw DivergenceError("network output is not finite", 0);
    }
    return out;
}

Eigen::VectorXd forward(const WarpNet& net, double s) {
    NetTape tape;
    const std::array<double, 1> point{s};
    return forward(net, point, tape).col(0);
}

Eigen::VectorXd backward(const WarpNet& net, const NetTape& tape,
                         const Eigen::Ref<const Eigen::MatrixXd>& out_grads) {
    const auto& sh = net.shape();
    if (out_grads.cols() != tape.points() || out_grads.rows() != sh.n_out) {
        throw ContractViolation("output gradients (" + std::to_string(out_grads.rows()) + "x" +
                                std::to_string(out_grads.cols()) + ") do not match the tape (" +
                                std::to_string(sh.n_out) + "x" +
                                std::to_string(tape.points()) + ")");
    }
    WarpNet grad(sh);

    grad.w4().noalias() = out_grads * tape.h3.transpose();
    grad.b4() = out_grads.rowwise().sum();

    Eigen::MatrixXd d3 = net.w4().transpose() * out_grads;
    // relu'(0) = 0: inactive units are exactly the zero entries of the activation
    d3 = (tape.h3.array() > 0.0).select(d3, 0.0);

    auto gw3 = grad.w3();
    gw3.col(0).noalias() = d3 * tape.s.transpose();
    gw3.middleCols(1, sh.hidden1).noalias() = d3 * tape.h1.transpose();
    gw3.rightCols(sh.hidden2).noalias() = d3 * tape.h2.transpose();
    grad.b3() = d3.rowwise().sum();

    const auto w3 = net.w3();
    Eigen::MatrixXd d2 = w3.rightCols(sh.hidden2).transpose() * d3;
    d2 = (tape.h2.array() > 0.0).select(d2, 0.0);
    grad.w2().noalias() = d2 * tape.h1.transpose();
    grad.b2() = d2.rowwise().sum();

    Eigen::MatrixXd d1 = w3.middleCols(1, sh.hidden1).transpose() * d3;
    d1.noalias() += net.w2().transpose() * d2;
    d1 = (tape.h1.array() > 0.0).select(d1, 0.0);
    grad.w1().noalias() = d1 * tape.s.transpose();
    grad.b1() = d1.rowwise().sum();

    return std::move(grad.parameters());
}

Eigen::VectorXd backward(const WarpNet& net, const NetTape& tape,
                         std::span<const OutputGradient> out_grads) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(net.n_out(), tape.points());
    for (const auto& g : out_grads) {
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < tape.points(); ++j) {
            if (tape.s[j] == g.s) {
                col = j;
                break;
            }
        }
        if (col < 0) {
            throw ContractViolation("no forward record for s = " + std::to_string(g.s));
        }
        if (g.grad.size() != net.n_out()) {
            throw ContractViolation("output gradient has the wrong length");
        }
        dense.col(col) += g.grad;
    }
    return backward(net, tape, dense);
}

void save_checkpoint(const WarpNet& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write checkpoint " + path.string());
    const auto& sh = net.shape();
    const std::array<std::int32_t, 5> dims{sh.n_out, sh.hidden1, sh.hidden2, sh.hidden3,
                                           static_cast<std::int32_t>(sizeof(double))};
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char*>(dims.data()), sizeof(dims));
    out.write(reinterpret_cast<const char*>(net.parameters().data()),
              static_cast<std::streamsize>(net.parameters().size() * sizeof(double)));
    if (!out) throw InputError("failed writing checkpoint " + path.string());
}

WarpNet load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read checkpoint " + path.string());
    std::array<char, 8> magic{};
    std::array<std::int32_t, 5> dims{};
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(dims.data()), sizeof(dims));
    if (!in || magic != kMagic || dims[4] != static_cast<std::int32_t>(sizeof(double))) {
        throw InputError(path.string() + " is not a network checkpoint");
    }
    WarpNet net(NetShape{dims[0], dims[1], dims[2], dims[3]});
    in.read(reinterpret_cast<char*>(net.parameters().data()),
            static_cast<std::streamsize>(net.parameters().size() * sizeof(double)));
    if (!in) throw InputError("checkpoint " + path.string() + " is truncated");
    return net;
}

}  // namespace ntw
