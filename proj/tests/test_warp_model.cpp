#include <doctest.h>

#include <cmath>
#include <random>

#include "ntw/errors.hpp"
#include "ntw/warp_model.hpp"
#include "support.hpp"

using namespace ntw;

TEST_CASE("build_basis small cases") {
    const auto b2 = build_basis(2);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(b2.vectors()(0, 0) == doctest::Approx(r).epsilon(1e-15));
    CHECK(b2.vectors()(1, 0) == doctest::Approx(r).epsilon(1e-15));
    CHECK(b2.vectors()(0, 1) == doctest::Approx(r).epsilon(1e-15));
    CHECK(b2.vectors()(1, 1) == doctest::Approx(-r).epsilon(1e-15));

    const auto b4 = build_basis(4);
    for (int i = 0; i < 4; ++i) CHECK(b4.vectors()(i, 0) == 0.5);
    CHECK(b4.span() == 2.0);

    CHECK_THROWS_AS(build_basis(1), InvalidArgument);
    CHECK_THROWS_AS(build_basis(0), InvalidArgument);
}

TEST_CASE("build_basis is orthonormal with zero-sum completion") {
    for (int n : {2, 3, 10, 57, 100}) {
        const auto b = build_basis(n);
        const Eigen::MatrixXd gram = b.vectors().transpose() * b.vectors();
        CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
        for (int k = 1; k < n; ++k) {
            CHECK(std::abs(b.vectors().col(k).sum()) <= 1e-10);
            // sign convention
            for (int i = 0; i < n; ++i) {
                if (std::abs(b.vectors()(i, k)) > 1e-12) {
                    CHECK(b.vectors()(i, k) > 0.0);
                    break;
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(b.vectors()(i, 0) - 1.0 / std::sqrt(static_cast<double>(n))) <= 1e-12);
        }
    }
}

TEST_CASE("eval_warping") {
    const auto basis = build_basis(5);
    const ContinuousWarping flat{basis, [](double) { return Eigen::VectorXd::Zero(4); }};
    for (double s : {0.0, 0.3, 1.1, 2.0, std::sqrt(5.0)}) {
        const auto tau = eval_warping(flat, s);
        for (int i = 0; i < 5; ++i) CHECK(tau[i] == doctest::Approx(s / std::sqrt(5.0)).epsilon(1e-15));
    }

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd c(4);
        for (auto& v : c) v = g(rng);
        const ContinuousWarping w{basis, [c](double) { return c; }};
        // bitwise boundary values
        CHECK((eval_warping(w, 0.0).array() == 0.0).all());
        CHECK((eval_warping(w, basis.span()).array() == 1.0).all());
    }

    CHECK_THROWS_AS(eval_warping(flat, -1e-9), InvalidArgument);
    CHECK_THROWS_AS(eval_warping(flat, basis.span() + 1e-9), InvalidArgument);
}

TEST_CASE("eval_warping with N = 2 and constant phi") {
    const auto basis = build_basis(2);
    const double c = 0.37;
    const ContinuousWarping w{basis, [c](double) { return Eigen::VectorXd::Constant(1, c); }};
    const double root2 = std::sqrt(2.0);
    for (double s : {0.1, 0.5, 0.9, 1.3}) {
        const auto tau = eval_warping(w, s);
        CHECK(tau[0] - tau[1] == doctest::Approx(2.0 * s * (root2 - s) * c / root2).epsilon(1e-13));
    }
}

TEST_CASE("sample_warping of the flat warping") {
    const auto basis = build_basis(3);
    const ContinuousWarping flat{basis, [](double) { return Eigen::VectorXd::Zero(2); }};
    const std::vector<int> lengths{10, 10, 10};
    const auto sw = sample_warping(flat, 20, lengths);
    CHECK(sw.z_max() == 20);
    for (int i = 0; i < 3; ++i)
        for (int z = 0; z <= 20; ++z) CHECK(sw(i, z) == z / 2);

    const auto uni = uniform_warping(std::vector<int>{7, 13}, 40);
    for (int z = 0; z <= 40; ++z) {
        CHECK(uni(0, z) == 7 * z / 40);
        CHECK(uni(1, z) == 13 * z / 40);
    }
}

TEST_CASE("sample_warping pins the boundary for any phi") {
    const auto basis = build_basis(4);
    const std::vector<int> lengths{5, 9, 12, 3};
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c(3);
        for (auto& v : c) v = g(rng);
        const ContinuousWarping w{basis, [c](double s) { return Eigen::VectorXd(c * std::cos(3 * s)); }};
        const auto sw = sample_warping(w, 37, lengths);
        for (int i = 0; i < 4; ++i) {
            CHECK(sw(i, 0) == 0);
            CHECK(sw(i, 37) == lengths[i]);
            for (int z = 0; z <= 37; ++z) {
                CHECK(sw(i, z) >= 0);
                CHECK(sw(i, z) <= lengths[i]);
            }
        }
    }
}

TEST_CASE("monotone warp at Z = N max T is feasible") {
    std::mt19937_64 rng(2024);
    const auto basis = build_basis(3);
    const std::vector<int> lengths{4, 5, 6};
    const int z_max = 18;
    const auto targets = testing::random_monotone_targets(3, z_max, rng);
    const auto w = testing::warping_through(basis, targets);
    // the handle reproduces the targets on the grid
    const auto s = regular_grid(basis.span(), z_max);
    for (int z = 0; z <= z_max; ++z) {
        CHECK((eval_warping(w, s[z]) - targets.col(z)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto v = check_feasibility(sample_warping(w, z_max, lengths));
    CHECK(v.v_mono == 1.0);
    CHECK(v.v_cont == 1.0);
    CHECK(v.v_bound == 1.0);
}

TEST_CASE("feasibility property over random monotone instances") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> pick_n(2, 10), pick_t(2, 50);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = pick_n(rng);
        std::vector<int> lengths(n);
        for (auto& t : lengths) t = pick_t(rng);
        const int z_max = n * *std::max_element(lengths.begin(), lengths.end());
        const auto basis = build_basis(n);
        const auto w = testing::warping_through(basis, testing::random_monotone_targets(n, z_max, rng));
        const auto v = check_feasibility(sample_warping(w, z_max, lengths));
        CHECK(v.all_valid());
        ++checked;
    }
    CHECK(checked == 300);
}

TEST_CASE("check_feasibility counts violations") {
    const SampledWarping good({3}, {{0, 1, 2, 3}});
    const auto v0 = check_feasibility(good);
    CHECK(v0.v_mono == 1.0);
    CHECK(v0.v_cont == 1.0);
    CHECK(v0.v_bound == 1.0);

    const SampledWarping bad({3}, {{0, 2, 1, 3}});
    const auto v = check_feasibility(bad);
    // steps +2, -1, +2: one decrease, two jumps above 1
    CHECK(v.v_mono == doctest::Approx(2.0 / 3.0));
    CHECK(v.v_cont == doctest::Approx(1.0 / 3.0));
    CHECK(v.v_bound == 1.0);

    const SampledWarping off({4, 4}, {{1, 2, 3}, {0, 2, 3}});
    // first row fails both ends, second row fails its end
    CHECK(check_feasibility(off).v_bound == doctest::Approx(0.25));

    CHECK_THROWS_AS(SampledWarping({3}, {{0, 4, 3}}), InvalidArgument);
    CHECK_THROWS_AS(SampledWarping({3, 3}, {{0, 3}}), InvalidArgument);
}

TEST_CASE("increment identity on the regular grid") {
    for (int n : {2, 4, 9}) {
        const auto basis = build_basis(n);
        const auto net = testing::random_net(NetShape{n - 1, 6, 6, 13}, 40 + n, 3.0);
        const ContinuousWarping w{basis, [&net](double s) { return forward(net, s); }};
        const int z_max = 100;
        const auto s = regular_grid(basis.span(), z_max);
        Eigen::VectorXd prev = eval_warping(w, s[0]);
        for (int z = 1; z <= z_max; ++z) {
            const Eigen::VectorXd cur = eval_warping(w, s[z]);
            CHECK(std::abs((cur - prev).sum() - static_cast<double>(n) / z_max) <= 1e-10);
            prev = cur;
        }
    }
    // N = 4, Z = 100
    const auto b4 = build_basis(4);
    const ContinuousWarping flat{b4, [](double) { return Eigen::VectorXd::Zero(3); }};
    const auto s = regular_grid(2.0, 100);
    CHECK((eval_warping(flat, s[1]) - eval_warping(flat, s[0])).sum() == doctest::Approx(0.04));
}

TEST_CASE("reachable warps do not depend on the basis completion") {
    const int n = 6;
    const auto basis = build_basis(n);

    // Householder completion of [1_N, u_1, ..., u_{N-1}], a different orthonormal completion
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    d.col(0).setOnes();
    for (int k = 1; k < n; ++k) d(k - 1, k) = 1.0;
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(d).householderQ();
    if (q(0, 0) < 0) q = -q;
    const WarpBasis other(q);
    CHECK((other.complement() - basis.complement()).cwiseAbs().maxCoeff() > 1e-3);

    const Eigen::MatrixXd rot = other.complement().transpose() * basis.complement();
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c(n - 1);
        for (auto& v : c) v = g(rng);
        const ContinuousWarping a{basis, [c](double s) { return Eigen::VectorXd(c * std::sin(s)); }};
        const ContinuousWarping b{other, [c, rot](double s) { return Eigen::VectorXd(rot * c * std::sin(s)); }};
        for (double s = 0.0; s <= basis.span(); s += 0.1) {
            CHECK((eval_warping(a, s) - eval_warping(b, s)).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("discretize clamps excursions") {
    Eigen::MatrixXd tau(1, 4);
    tau << 0.0, -0.3, 1.7, 1.0;
    const auto sw = discretize(tau, std::vector<int>{10});
    CHECK(sw(0, 1) == 0);
    CHECK(sw(0, 2) == 10);
}
