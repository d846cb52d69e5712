#include "emenc/laplace.hpp"

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace emenc {

namespace {

// (1 - e^{-x}(1 + x)) / x^2
double ramp_kernel(double x) {
  if (x < 1e-2) {
    // sum_m (-1)^m (m+1)/(m+2)! x^m
    double term_fact = 2.0;  // (m+2)!
    double xm = 1.0;
    double sum = 0.0;
    for (int m = 0; m < 12; ++m) {
      sum += ((m % 2 == 0) ? 1.0 : -1.0) * (m + 1) / term_fact * xm;
      xm *= x;
      term_fact *= (m + 3);
    }
    return sum;
  }
  return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

// (1 - e^{-x}) / x
double box_kernel(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

}  // namespace

std::vector<double> pl_laplace_weights(double tau, double dt, std::size_t count) {
  std::vector<double> c(count, 0.0);
  if (count < 2) return c;
  const double x = tau * dt;
  const double w1 = dt * ramp_kernel(x);
  const double w0 = dt * box_kernel(x) - w1;
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const double decay = std::exp(-tau * dt * static_cast<double>(n));
    c[n] += decay * w0;
    c[n + 1] += decay * w1;
  }
  return c;
}

double pl_laplace(std::span<const double> samples, double dt, double tau) {
  const auto c = pl_laplace_weights(tau, dt, samples.size());
  double sum = 0.0, comp = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    // Neumaier summation
    const double term = c[n] * samples[n];
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double exp_moment(int n, double tau, double length) {
  if (length <= 0.0) return 0.0;
  if (tau == 0.0) return std::pow(length, n + 1) / (n + 1);
  return boost::math::factorial<double>(static_cast<unsigned>(n)) / std::pow(tau, n + 1) *
         boost::math::gamma_p(static_cast<double>(n + 1), tau * length);
}

}  // namespace emenc
