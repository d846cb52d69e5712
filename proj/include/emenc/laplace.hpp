#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emenc {

/// Weights c_n such that the integral of e^{-tau t} against the piecewise-linear interpolant of
/// samples x_n = x(n dt), n = 0..count-1, over [0, (count-1) dt] equals sum_n c_n x_n.
/// Each interval is integrated in closed form, so large tau*dt stays accurate.
std::vector<double> pl_laplace_weights(double tau, double dt, std::size_t count);

double pl_laplace(std::span<const double> samples, double dt, double tau);

/// M_n(tau, L) = integral_0^L s^n e^{-tau s} ds.
double exp_moment(int n, double tau, double length);

}  // namespace emenc
