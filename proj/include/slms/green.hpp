#ifndef SLMS_GREEN_HPP
#define SLMS_GREEN_HPP

// Green's function G(x,y,lambda) = phi(min) chi(max) / omega and the resolvent
// (lambda I - A)^{-1} applied to an element (f, f1) of H.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "slms/error.hpp"
#include "slms/numerics.hpp"
#include "slms/problem.hpp"
#include "slms/solver.hpp"
#include "slms/spectrum.hpp"

namespace slms {

/// Threshold on |omega(lambda)| / envelope below which lambda counts as an eigenvalue.
inline constexpr double kPoleThreshold = 1e-8;

template <class T>
double omega_envelope_at(const Problem& problem, const T& lambda) {
  if constexpr (is_complex_v<T>) {
    const double p = growth_exponent(growth_case(problem));
    double env = std::max(1.0, std::pow(std::abs(lambda), p));
    const double im_sqrt = std::abs(std::sqrt(lambda).imag());
    return env * std::cosh(im_sqrt * problem.geometry().length());
  } else {
    return omega_envelope(problem, lambda);
  }
}

namespace detail {

/// Locates an eigenvalue within a relative distance of 1e-2 of lambda, for diagnostics.
inline std::string nearby_eigenvalue_note(const Problem& problem, double lambda, const ShootOptions& opts) {
  auto f = [&](double l) { return omega_scaled(problem, l, opts); };
  try {
    const double base = f(lambda);
    for (double d = 1e-9 * std::max(1.0, std::abs(lambda)); d < 1e-2 * std::max(1.0, std::abs(lambda)); d *= 4.0) {
      for (double other : {lambda - d, lambda + d}) {
        const double fo = f(other);
        if (base == 0.0 || (fo > 0.0) != (base > 0.0)) {
          const double lo = std::min(lambda, other);
          const double hi = std::max(lambda, other);
          const double r = base == 0.0 ? lambda : refine_root(f, lo, hi, 1e-14 * std::max(1.0, std::abs(lambda))).root;
          return "; nearest eigenvalue lambda_n=" + Problem::repr(r);
        }
      }
    }
  } catch (const Error&) {
  }
  return "";
}

}  // namespace detail

/// Green's function at fixed lambda. Shoots phi and chi once with dense
/// output; every evaluation afterwards is two lookups.
template <class T>
class GreenFunction {
 public:
  GreenFunction(const Problem& problem, T lambda, const ShootOptions& opts = {})
      : problem_(problem),
        lambda_(lambda),
        phi_(shoot_phi<T>(problem, lambda, dense(opts))),
        chi_(shoot_chi<T>(problem, lambda, dense(opts))) {
    const auto& c = chi_.start(Piece::Left);
    omega_ = problem.spec().beta2 * c[1] + problem.spec().beta1 * c[0];
    const double scaled = std::abs(omega_) / omega_envelope_at(problem, lambda);
    if (!(scaled >= kPoleThreshold)) {
      std::string note;
      if constexpr (!is_complex_v<T>) note = detail::nearby_eigenvalue_note(problem, lambda, opts);
      throw Error(ErrorCode::NearEigenvaluePole,
                  "|omega_scaled| = " + Problem::repr(scaled) + " at lambda=" + repr(lambda) + note);
    }
  }

  const Problem& problem() const noexcept { return problem_; }
  const T& lambda() const noexcept { return lambda_; }
  const T& omega() const noexcept { return omega_; }
  const ShotSolution<T>& phi() const noexcept { return phi_; }
  const ShotSolution<T>& chi() const noexcept { return chi_; }

  /// G with explicit pieces. The point with the smaller (x, piece) key takes
  /// phi, the other chi; on a tie y is the phi point.
  T operator()(double x, Piece px, double y, Piece py) const {
    const bool x_is_min = x < y || (x == y && index(px) < index(py));
    if (x_is_min) return phi_.value(x, px) * chi_.value(y, py) / omega_;
    return phi_.value(y, py) * chi_.value(x, px) / omega_;
  }

  /// G for points off the interfaces (or with side flags).
  T operator()(double x, double y, Side sx = Side::None, Side sy = Side::None) const {
    return (*this)(x, problem_.locate(x, sx), y, problem_.locate(y, sy));
  }

 private:
  static ShootOptions dense(ShootOptions o) {
    o.ode.dense = true;
    return o;
  }
  static std::string repr(const T& v) {
    if constexpr (is_complex_v<T>) {
      return "(" + Problem::repr(v.real()) + "," + Problem::repr(v.imag()) + ")";
    } else {
      return Problem::repr(v);
    }
  }

  Problem problem_;
  T lambda_;
  ShotSolution<T> phi_;
  ShotSolution<T> chi_;
  T omega_{};
};

template <class T>
T green_function(const Problem& problem, T lambda, double x, double y, Side sx = Side::None,
                 Side sy = Side::None, const ShootOptions& opts = {}) {
  return GreenFunction<T>(problem, lambda, opts)(x, y, sx, sy);
}

template <class T>
struct ResolventInput {
  std::function<T(double, Piece)> f;
  T f1{};
};

struct ResolventResiduals {
  double ode = 0.0;
  double bc_a = 0.0;
  double bc_lambda = 0.0;
  double transmission = 0.0;
};

template <class T>
struct ResolventOutput {
  std::vector<SolutionSample<T>> u;  // per piece, interface points on both sides
  T Rp_u{};
  T omega{};
  ResolventResiduals residuals;
  double u_max = 0.0;
};

struct ResolventOptions {
  int grid_points = 512;
  ShootOptions shoot{};
};

/// u = int G f (weighted) + (gamma^2/omega) f1 phi on the grid. With
/// A(x) = int_a^x w phi f and B(x) = int_x^b w chi f,
/// u = (chi A + phi B)/omega and u' = (chi' A + phi' B)/omega.
template <class T>
ResolventOutput<T> resolvent_apply(const Problem& problem, T lambda, const ResolventInput<T>& in,
                                   const ResolventOptions& opts = {}) {
  if (opts.grid_points < 5) throw Error(ErrorCode::InvalidArgument, "resolvent grid needs >= 5 points per piece");
  const GreenFunction<T> green(problem, lambda, opts.shoot);
  const auto& phi = green.phi();
  const auto& chi = green.chi();
  const T w = green.omega();
  const auto& geo = problem.geometry();
  const int n = opts.grid_points;

  std::array<std::vector<double>, 3> xs;
  std::array<std::vector<T>, 3> A, B;
  for (Piece p : kPieces) {
    xs[index(p)] = ShotSolution<T>::piece_grid(geo, p, n);
    A[index(p)].assign(static_cast<std::size_t>(n), T{});
    B[index(p)].assign(static_cast<std::size_t>(n), T{});
  }

  // Gauss rule on each grid cell, split at the knots of q.
  auto cell = [&](Piece p, double lo, double hi, const ShotSolution<T>& s) {
    auto fn = [&](double x) { return s.value(x, p) * in.f(x, p); };
    T acc{};
    double left = lo;
    for (double k : problem.breakpoints(p)) {
      if (k > lo && k < hi) {
        acc += gauss_panel(fn, left, k).first;
        left = k;
      }
    }
    acc += gauss_panel(fn, left, hi).first;
    return problem.weight(p) * acc;
  };

  T running{};
  for (Piece p : kPieces) {
    auto& a = A[index(p)];
    const auto& x = xs[index(p)];
    a[0] = running;
    for (std::size_t j = 1; j < x.size(); ++j) a[j] = a[j - 1] + cell(p, x[j - 1], x[j], phi);
    running = a.back();
  }
  running = T{};
  for (Piece p : {Piece::Right, Piece::Mid, Piece::Left}) {
    auto& b = B[index(p)];
    const auto& x = xs[index(p)];
    b.back() = running;
    for (std::size_t j = x.size() - 1; j-- > 0;) b[j] = b[j + 1] + cell(p, x[j], x[j + 1], chi);
    running = b.front();
  }

  const double g2 = problem.spec().gamma * problem.spec().gamma;
  const T c1 = g2 * in.f1 / w;
  ResolventOutput<T> out;
  out.omega = w;
  std::array<std::vector<SolutionSample<T>>, 3> per;
  for (Piece p : kPieces) {
    const auto& x = xs[index(p)];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto sp = phi.state(x[j], p);
      const auto sc = chi.state(x[j], p);
      const T a = A[index(p)][j];
      const T b = B[index(p)][j];
      SolutionSample<T> s{x[j], p, (sc[0] * a + sp[0] * b) / w + c1 * sp[0], (sc[1] * a + sp[1] * b) / w + c1 * sp[1]};
      out.u_max = std::max(out.u_max, std::abs(s.u));
      per[index(p)].push_back(s);
    }
  }

  // Residuals.
  const auto& sp = problem.spec();
  const auto& ua = per[0].front();
  out.residuals.bc_a = std::abs(sp.beta1 * ua.u + sp.beta2 * ua.du);
  const auto& ub = per[2].back();
  const auto bf = boundary_forms<T>(problem, ub.u, ub.du);
  out.Rp_u = bf.Rp;
  out.residuals.bc_lambda = std::abs(lambda * bf.Rp + bf.R - in.f1);
  const auto& l_end = per[0].back();
  const auto& m_beg = per[1].front();
  const auto& m_end = per[1].back();
  const auto& r_beg = per[2].front();
  out.residuals.transmission = std::max({std::abs(l_end.u - sp.delta * m_beg.u), std::abs(l_end.du - sp.delta * m_beg.du),
                                         std::abs(sp.delta * m_end.u - sp.gamma * r_beg.u),
                                         std::abs(sp.delta * m_end.du - sp.gamma * r_beg.du)});

  // u'' from fourth-order differences of the analytic u', against f + (q - lambda) u.
  for (Piece p : kPieces) {
    const auto& s = per[index(p)];
    const double h = xs[index(p)][1] - xs[index(p)][0];
    bool kinked = false;
    for (std::size_t j = 2; j + 2 < s.size(); ++j) {
      const double lo = s[j - 2].x;
      const double hi = s[j + 2].x;
      kinked = false;
      for (double k : problem.breakpoints(p)) kinked = kinked || (k > lo && k < hi);
      if (kinked) continue;
      const T d2 = (s[j - 2].du - 8.0 * s[j - 1].du + 8.0 * s[j + 1].du - s[j + 2].du) / (12.0 * h);
      const T expect = in.f(s[j].x, p) + (problem.potential_on(p, s[j].x) - lambda) * s[j].u;
      out.residuals.ode = std::max(out.residuals.ode, std::abs(d2 - expect));
    }
  }

  for (auto& v : per) out.u.insert(out.u.end(), v.begin(), v.end());
  return out;
}

/// Max grid deviation between the resolvent and the truncated expansion
/// sum_{n<N} <F, Psi_n>_H Psi_n(x) / (lambda - lambda_n).
inline double eigenfunction_expansion_check(const Problem& problem, const Spectrum& spectrum, double lambda,
                                            const ResolventInput<double>& in, int truncation,
                                            const ResolventOptions& opts = {}, const ScanOptions& scan = {}) {
  if (truncation < 0 || static_cast<std::size_t>(truncation) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "truncation exceeds the spectrum length");
  }
  const auto res = resolvent_apply<double>(problem, lambda, in, opts);
  std::vector<double> series(res.u.size(), 0.0);
  const HVector<double> F{in.f, in.f1};
  const double mid_len = problem.geometry().end(Piece::Mid) - problem.geometry().begin(Piece::Mid);
  for (int n = 0; n < truncation; ++n) {
    const double ln = spectrum[static_cast<std::size_t>(n)].lambda;
    const EigenVectorH ev(problem, ln, scan);
    const double c = inner_product_H(problem, F, ev.normalized(), scan.quad_rel_tol, detail::panels_for(ln, mid_len));
    for (std::size_t i = 0; i < res.u.size(); ++i) {
      series[i] += c * ev.Psi(res.u[i].x, res.u[i].piece) / (lambda - ln);
    }
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < res.u.size(); ++i) dev = std::max(dev, std::abs(series[i] - res.u[i].u));
  return dev;
}

}  // namespace slms

#endif  // SLMS_GREEN_HPP
