#ifndef SLMS_TESTS_SUPPORT_HPP
#define SLMS_TESTS_SUPPORT_HPP

// Problem builders and independent closed-form oracles shared by the tests.
// Nothing here calls into the library's numerics.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "slms/problem.hpp"

namespace slms::test {

inline constexpr double kPi = std::numbers::pi;

/// a=0, b=pi, eps=pi/4, beta=(0,1), alpha=(1,0), alpha'=(0,-1), delta=gamma=1, q=0.
inline ProblemSpec reference_spec() {
  ProblemSpec s;
  s.a = 0.0;
  s.b = kPi;
  s.epsilon = kPi / 4.0;
  s.beta1 = 0.0;
  s.beta2 = 1.0;
  s.alpha1 = 1.0;
  s.alpha2 = 0.0;
  s.alpha1p = 0.0;
  s.alpha2p = -1.0;
  s.delta = 1.0;
  s.gamma = 1.0;
  return s;
}

/// Reference data with delta=2, gamma=3 and q = 1, 0, -1 on the pieces.
inline ProblemSpec stepped_spec() {
  ProblemSpec s = reference_spec();
  s.delta = 2.0;
  s.gamma = 3.0;
  s.potential = PerPieceConstant{1.0, 0.0, -1.0};
  return s;
}

/// Shifted interval, mixed boundary data and a tabulated potential.
inline ProblemSpec tabulated_spec() {
  ProblemSpec s;
  s.a = -1.0;
  s.b = 2.0;
  s.epsilon = 0.5;
  s.beta1 = 1.0;
  s.beta2 = 0.5;
  s.alpha1 = 0.5;
  s.alpha2 = 1.0;
  s.alpha1p = 1.0;
  s.alpha2p = 0.0;
  s.delta = 1.5;
  s.gamma = 0.75;
  Tabulated t;
  t.pieces[0] = {{-1.0, -0.5, 0.0}, {0.0, 2.0, 1.0}};
  t.pieces[1] = {{0.0, 0.5, 1.0}, {-1.0, 0.5, -1.0}};
  t.pieces[2] = {{1.0, 1.5, 2.0}, {3.0, 0.0, 1.0}};
  s.potential = t;
  return s;
}

/// omega of the reference problem: cos(s pi) - lambda s sin(s pi), s = sqrt(lambda).
inline double reference_omega(double lambda) {
  if (lambda >= 0.0) {
    const double s = std::sqrt(lambda);
    return std::cos(s * kPi) - lambda * s * std::sin(s * kPi);
  }
  const double m = std::sqrt(-lambda);
  return std::cosh(m * kPi) - m * m * m * std::sinh(m * kPi);
}

/// d omega / d lambda of the reference problem (lambda != 0).
inline double reference_omega_prime(double lambda) {
  if (lambda < 0.0) {
    const double m = std::sqrt(-lambda);
    const double dm = kPi * std::sinh(m * kPi) - 3.0 * m * m * std::sinh(m * kPi) - m * m * m * kPi * std::cosh(m * kPi);
    return -dm / (2.0 * m);
  }
  const double s = std::sqrt(lambda);
  return (-kPi * std::sin(s * kPi) - 3.0 * s * s * std::sin(s * kPi) - s * s * s * kPi * std::cos(s * kPi)) /
         (2.0 * s);
}

/// Brute force: scan f on `points` uniform nodes of [lo, hi] in t with
/// lambda = t|t|, bisect every sign change to machine precision.
inline std::vector<double> brute_force_roots(const std::function<double(double)>& f, double lo, double hi,
                                             long points, std::size_t wanted) {
  std::vector<double> roots;
  auto lam = [](double t) { return t * std::abs(t); };
  double t0 = lo;
  double f0 = f(lam(t0));
  for (long i = 1; i <= points && roots.size() < wanted; ++i) {
    const double t1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
    const double f1 = f(lam(t1));
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double a = t0;
      double b = t1;
      double fa = f0;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(lam(m));
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(lam(0.5 * (a + b)));
    }
    t0 = t1;
    f0 = f1;
  }
  return roots;
}

}  // namespace slms::test

#endif  // SLMS_TESTS_SUPPORT_HPP
