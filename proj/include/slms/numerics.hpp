#ifndef SLMS_NUMERICS_HPP
#define SLMS_NUMERICS_HPP

// Shared kernels: composite Gauss-Legendre quadrature that respects the
// interfaces, the weighted inner product of H = L2(a,b) + C, bracketing root
// refinement and complex-step differentiation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "slms/error.hpp"
#include "slms/problem.hpp"

namespace slms {

using cplx = std::complex<double>;

template <class T>
inline constexpr bool is_complex_v = false;
template <class R>
inline constexpr bool is_complex_v<std::complex<R>> = true;

template <class T>
inline T conj_if(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::conj(v);
  } else {
    return v;
  }
}

inline bool all_finite(double v) noexcept { return std::isfinite(v); }
inline bool all_finite(const cplx& v) noexcept {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= N; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = N * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = -z;
      nodes[N - 1 - i] = z;
      weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }
};

using Gauss16 = GaussLegendre<16>;

template <class F>
using integrand_value_t = std::decay_t<std::invoke_result_t<F&, double>>;

/// One 16-point panel; also returns the integral of |f| for error scaling.
template <class F>
auto gauss_panel(F& f, double lo, double hi) -> std::pair<integrand_value_t<F>, double> {
  using T = integrand_value_t<F>;
  const auto& rule = Gauss16::get();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  T acc{};
  double l1 = 0.0;
  for (int i = 0; i < 16; ++i) {
    const T v = f(mid + half * rule.nodes[i]);
    acc += rule.weights[i] * v;
    l1 += rule.weights[i] * std::abs(v);
  }
  return {acc * half, l1 * std::abs(half)};
}

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int initial_panels = 4;
  int max_depth = 40;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  double l1 = 0.0;
  bool converged = true;
};

/// Adaptive composite Gauss-Legendre on [lo,hi]; panels are bisected until the
/// 16-point value and the two-half value agree. Never evaluates f at lo or hi.
template <class F>
auto integrate_interval(F&& f, double lo, double hi, const QuadOptions& opts = {})
    -> QuadResult<integrand_value_t<F>> {
  using T = integrand_value_t<F>;
  QuadResult<T> out;
  if (hi == lo) return out;

  struct Panel {
    double lo, hi;
    T value;
    double l1;
    int depth;
  };
  std::vector<Panel> stack;
  const int n0 = std::max(1, opts.initial_panels);
  const double width = (hi - lo) / n0;
  T total{};
  double l1 = 0.0;
  for (int i = 0; i < n0; ++i) {
    const double plo = lo + i * width;
    const double phi = (i == n0 - 1) ? hi : lo + (i + 1) * width;
    auto [v, a] = gauss_panel(f, plo, phi);
    total += v;
    l1 += a;
    stack.push_back({plo, phi, v, a, 0});
  }
  const double span = std::abs(hi - lo);
  const double budget = std::max({opts.rel_tol * std::abs(total), opts.rel_tol * l1, opts.abs_tol,
                                  std::numeric_limits<double>::min()});

  T value{};
  double error = 0.0;
  double accepted_l1 = 0.0;
  // Depth-first, left to right; summation order is deterministic.
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    auto [lv, la] = gauss_panel(f, p.lo, mid);
    auto [rv, ra] = gauss_panel(f, mid, p.hi);
    const T refined = lv + rv;
    const double diff = std::abs(refined - p.value);
    // Differences at the roundoff level of the panel cannot be refined away.
    const double local = std::max(budget * std::abs(p.hi - p.lo) / span,
                                  64.0 * std::numeric_limits<double>::epsilon() * (la + ra));
    if (diff <= local || p.depth >= opts.max_depth || !all_finite(refined)) {
      if (diff > local) out.converged = false;
      value += refined;
      error += diff;
      accepted_l1 += la + ra;
    } else {
      stack.push_back({mid, p.hi, rv, ra, p.depth + 1});
      stack.push_back({p.lo, mid, lv, la, p.depth + 1});
    }
  }
  out.value = value;
  out.error = error;
  out.l1 = accepted_l1;
  if (!all_finite(value)) out.converged = false;
  return out;
}

/// Sum of the three per-piece integrals of integrand(x, piece). Each piece is
/// integrated separately so the interfaces are never sampled.
template <class F>
auto integrate_piecewise(const Problem& problem, F&& integrand, double rel_tol = 1e-10,
                         std::array<double, 3> weights = {1.0, 1.0, 1.0}, int initial_panels = 4) {
  using T = std::decay_t<std::invoke_result_t<F&, double, Piece>>;
  T total{};
  double err = 0.0;
  bool ok = true;
  const auto& g = problem.geometry();
  QuadOptions opts;
  opts.rel_tol = rel_tol;
  opts.initial_panels = initial_panels;
  for (Piece p : kPieces) {
    auto r = integrate_interval([&](double x) { return integrand(x, p); }, g.begin(p), g.end(p), opts);
    total += weights[index(p)] * r.value;
    err += std::abs(weights[index(p)]) * r.error;
    ok = ok && r.converged;
  }
  if (!ok) {
    throw Error(ErrorCode::ToleranceNotReached,
                "piecewise quadrature: achieved error estimate " + Problem::repr(err));
  }
  return total;
}

// ---------------------------------------------------------------------------
// H = L2(a,b) + C

/// Element (f, h) of H; f is evaluated per piece so interface values are
/// never ambiguous.
template <class T>
struct HVector {
  std::function<T(double, Piece)> f;
  T h{};
};

/// <u,v>_H = int_L u conj(v) + delta^2 int_M ... + gamma^2 int_R ... + (gamma^2/rho) h conj(k)
template <class T>
T inner_product_H(const Problem& problem, const HVector<T>& u, const HVector<T>& v,
                  double rel_tol = 1e-10, int initial_panels = 4) {
  const std::array<double, 3> w{problem.weight(Piece::Left), problem.weight(Piece::Mid),
                                problem.weight(Piece::Right)};
  const T integral = integrate_piecewise(
      problem, [&](double x, Piece p) { return u.f(x, p) * conj_if(v.f(x, p)); }, rel_tol, w,
      initial_panels);
  const double g2 = problem.spec().gamma * problem.spec().gamma;
  return integral + (g2 / problem.rho()) * u.h * conj_if(v.h);
}

// ---------------------------------------------------------------------------
// Root refinement

struct RootResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  double lo = 0.0;     // final bracket
  double hi = 0.0;
  int iterations = 0;
};

/// Brent's bracketing method (inverse quadratic / secant steps safeguarded by
/// bisection). Stops once the bracket is narrower than tol.
template <class F>
RootResult refine_root(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw Error(ErrorCode::NonFiniteValue, "root bracket endpoint value is not finite");
  }
  if (fa == 0.0) return {a, fa, a, a, 0};
  if (fb == 0.0) return {b, fb, b, b, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::NoSignChange,
                "f has the same sign at " + Problem::repr(lo) + " and " + Problem::repr(hi));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      return {b, fb, std::min(b, c), std::max(b, c), iter};
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (!std::isfinite(fb)) {
      throw Error(ErrorCode::NonFiniteValue, "f is not finite at " + Problem::repr(b));
    }
  }
  throw Error(ErrorCode::MaxIterations, "root refinement did not converge");
}

// ---------------------------------------------------------------------------
// Derivatives

/// f'(x0) for f analytic near x0 and real on the real axis, by the complex
/// step Im f(x0 + i h)/h. If the complex evaluation is not finite, falls back
/// to a Richardson-extrapolated central difference of `real_f` (or Re f).
inline double derivative_of_analytic(const std::function<cplx(cplx)>& f, double x0,
                                     double scale = 1.0,
                                     const std::function<double(double)>& real_f = {}) {
  const double step = scale * std::max(1.0, std::abs(x0)) * 1e-100;
  double d = std::numeric_limits<double>::quiet_NaN();
  try {
    d = f(cplx(x0, step)).imag() / step;
  } catch (const Error&) {
    d = std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isfinite(d)) return d;

  auto g = [&](double x) { return real_f ? real_f(x) : f(cplx(x, 0.0)).real(); };
  const double h = scale * std::max(1.0, std::abs(x0)) * 1e-3;
  const double d1 = (g(x0 + h) - g(x0 - h)) / (2.0 * h);
  const double d2 = (g(x0 + 0.5 * h) - g(x0 - 0.5 * h)) / h;
  d = (4.0 * d2 - d1) / 3.0;
  if (!std::isfinite(d)) {
    throw Error(ErrorCode::NonFiniteValue, "derivative at " + Problem::repr(x0) + " is not finite");
  }
  return d;
}

}  // namespace slms

#endif  // SLMS_NUMERICS_HPP
