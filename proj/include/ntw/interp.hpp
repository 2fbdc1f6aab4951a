#pragma once

#include <span>

#include "ntw/time_series.hpp"

namespace ntw {

/// Low-pass sinc kernel k(t; alpha) = sin(pi t / alpha) / (pi t / alpha) / alpha.
///
/// At alpha = 1 this is the normalized interpolation kernel; it is exactly 1 at t = 0
/// and exactly 0 at every other integer. Larger alpha widens the main lobe and scales
/// it by 1/alpha, which suppresses content above 1/(2 alpha) cycles per sample.
double sinc_kernel(double t, double alpha);

/// Value and derivative (with respect to the normalized position) of the interpolant.
struct InterpSample {
    double value;
    double slope;
};

/// Band-limited reconstruction sum_t x[t] k(t - t' T; alpha) at normalized position t'.
/// Positions slightly outside [0, 1] are extrapolated by the same sum.
double interpolate(std::span<const double> values, double t_prime, double alpha);
double interpolate(const TimeSeries& series, double t_prime, double alpha);

/// d/dt' of interpolate().
double interpolate_grad(std::span<const double> values, double t_prime, double alpha);
double interpolate_grad(const TimeSeries& series, double t_prime, double alpha);

/// Both at once; one pass over the samples.
InterpSample interpolate_with_grad(std::span<const double> values, double t_prime, double alpha);

/// Annealing schedule for the kernel width. alpha never drops below floor.
struct AnnealState {
    double alpha = 100.0;
    double decay = 0.99;
    double floor = 1.0;
};

AnnealState make_anneal_state(double alpha0, double decay, double floor = 1.0);

/// alpha <- max(alpha * decay, floor).
AnnealState anneal_step(AnnealState state);

}  // namespace ntw
