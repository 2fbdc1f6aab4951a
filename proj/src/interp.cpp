#include "ntw/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ntw/errors.hpp"

namespace ntw {
namespace {

void require_finite(double t, double alpha) {
    if (!std::isfinite(t) || !std::isfinite(alpha)) {
        throw InvalidArgument("sinc kernel arguments must be finite");
    }
    if (alpha < 1.0) {
        throw InvalidArgument("annealing parameter must be >= 1, got " + std::to_string(alpha));
    }
}

// sin(pi x) and cos(pi x) with exact zeros at integers (and half-integers for cos).
struct SinCosPi {
    double sin;
    double cos;
};

SinCosPi sincospi(double x) {
    // remainder() is exact, r in [-1, 1]
    const double r = std::remainder(x, 2.0);
    if (r == 0.0) return {0.0, 1.0};
    if (r == 1.0 || r == -1.0) return {0.0, -1.0};
    if (r == 0.5) return {1.0, 0.0};
    if (r == -0.5) return {-1.0, 0.0};
    const double a = std::numbers::pi * r;
    return {std::sin(a), std::cos(a)};
}

// Kernel and its derivative with respect to t, at x = t / alpha half-turns.
struct KernelSample {
    double value;
    double slope;
};

KernelSample kernel_at(double t, double alpha) {
    constexpr double pi = std::numbers::pi;
    const double x = t / alpha;
    if (x == 0.0) return {1.0 / alpha, 0.0};
    const auto [s, c] = sincospi(x);
    const double px = pi * x;
    const double value = s / px / alpha;
    double dsinc;  // d/dx of sin(pi x)/(pi x)
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        const double p2 = pi * pi;
        dsinc = x * p2 * (-1.0 / 3.0 + x2 * p2 * (1.0 / 30.0 - x2 * p2 / 840.0));
    } else {
        dsinc = (px * c - s) / (pi * x * x);
    }
    return {value, dsinc / (alpha * alpha)};
}

// t' = t / T only round-trips to within an ulp of t; snapping lets grid positions hit
// the kernel's exact zeros.
double kernel_center(double t_prime, std::size_t count) {
    const double center = t_prime * (static_cast<double>(count) - 1.0);
    const double nearest = std::round(center);
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(center));
    return std::abs(center - nearest) <= tol ? nearest : center;
}

}  // namespace

double sinc_kernel(double t, double alpha) {
    require_finite(t, alpha);
    return kernel_at(t, alpha).value;
}

InterpSample interpolate_with_grad(std::span<const double> values, double t_prime, double alpha) {
    require_finite(t_prime, alpha);
    const double last = static_cast<double>(values.size()) - 1.0;
    const double center = kernel_center(t_prime, values.size());
    double value = 0.0;
    double slope = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        const auto k = kernel_at(static_cast<double>(t) - center, alpha);
        value += values[t] * k.value;
        slope += values[t] * k.slope;
    }
    // d(t - t' T)/dt' = -T
    return {value, -last * slope};
}

double interpolate(std::span<const double> values, double t_prime, double alpha) {
    require_finite(t_prime, alpha);
    const double center = kernel_center(t_prime, values.size());
    double value = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        value += values[t] * kernel_at(static_cast<double>(t) - center, alpha).value;
    }
    return value;
}

double interpolate(const TimeSeries& series, double t_prime, double alpha) {
    return interpolate(series.values(), t_prime, alpha);
}

double interpolate_grad(std::span<const double> values, double t_prime, double alpha) {
    return interpolate_with_grad(values, t_prime, alpha).slope;
}

double interpolate_grad(const TimeSeries& series, double t_prime, double alpha) {
    return interpolate_grad(series.values(), t_prime, alpha);
}

AnnealState make_anneal_state(double alpha0, double decay, double floor) {
    if (!(decay > 0.0 && decay <= 1.0)) {
        throw InvalidArgument("alpha decay must lie in (0, 1], got " + std::to_string(decay));
    }
    if (!(alpha0 >= floor) || !(floor >= 1.0) || !std::isfinite(alpha0)) {
        throw InvalidArgument("initial alpha must be finite and >= " + std::to_string(floor));
    }
    return {alpha0, decay, floor};
}

AnnealState anneal_step(AnnealState state) {
    state.alpha = std::max(state.alpha * state.decay, state.floor);
    return state;
}

}  // namespace ntw
