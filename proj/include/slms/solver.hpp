#ifndef SLMS_SOLVER_HPP
#define SLMS_SOLVER_HPP

// Fundamental piecewise solutions phi (normalised at a) and chi (normalised at
// b), boundary forms, the characteristic function omega and a Volterra-form
// verification of the shooting.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "slms/error.hpp"
#include "slms/numerics.hpp"
#include "slms/ode.hpp"
#include "slms/problem.hpp"

namespace slms {

enum class SolutionKind { Phi, Chi };

template <class T>
struct SolutionSample {
  double x = 0.0;
  Piece piece = Piece::Left;
  T u{};
  T du{};
};

struct ShootOptions {
  OdeOptions ode{};
  /// Points per piece (interface points included on both sides) for grid().
  int grid_points = 512;
};

template <class T>
class ShotSolution;
template <class T>
ShotSolution<T> shoot_phi(const Problem& problem, T lambda, const ShootOptions& opts = {});
template <class T>
ShotSolution<T> shoot_chi(const Problem& problem, T lambda, const ShootOptions& opts = {});

/// Value/derivative pair of a solution over the three pieces. The two
/// one-sided values at each interface are stored explicitly.
template <class T>
class ShotSolution {
 public:
  using State = StateVec<T, 2>;

  SolutionKind kind() const noexcept { return kind_; }
  const T& lambda() const noexcept { return lambda_; }
  bool has_dense() const noexcept { return dense_; }
  const IntervalGeometry& geometry() const noexcept { return geometry_; }

  /// Value at the left end of a piece, taken from inside the piece.
  const State& start(Piece p) const noexcept { return start_[index(p)]; }
  /// Value at the right end of a piece, taken from inside the piece.
  const State& finish(Piece p) const noexcept { return finish_[index(p)]; }

  /// (u, u') at x using the formula of piece p; x must lie in its closure.
  State state(double x, Piece p) const {
    const double lo = geometry_.begin(p);
    const double hi = geometry_.end(p);
    if (x == lo) return start(p);
    if (x == hi) return finish(p);
    if (!(x > lo && x < hi)) {
      throw Error(ErrorCode::OutOfDomain, "x=" + Problem::repr(x) + " not in the " + to_string(p) + " piece");
    }
    if (!dense_) throw Error(ErrorCode::InvalidArgument, "solution was shot without dense output");
    return pieces_[index(p)](x);
  }

  T value(double x, Piece p) const { return state(x, p)[0]; }
  T derivative(double x, Piece p) const { return state(x, p)[1]; }

  SolutionSample<T> sample(double x, Piece p) const {
    const State s = state(x, p);
    return {x, p, s[0], s[1]};
  }

  /// Uniform grid of `points_per_piece` samples on each closed piece.
  std::vector<SolutionSample<T>> grid(int points_per_piece) const {
    std::vector<SolutionSample<T>> out;
    if (points_per_piece <= 0) return out;
    out.reserve(3 * static_cast<std::size_t>(points_per_piece));
    for (Piece p : kPieces) {
      for (double x : piece_grid(geometry_, p, points_per_piece)) out.push_back(sample(x, p));
    }
    return out;
  }

  static std::vector<double> piece_grid(const IntervalGeometry& g, Piece p, int n) {
    std::vector<double> xs;
    if (n <= 0) return xs;
    const double lo = g.begin(p);
    const double hi = g.end(p);
    if (n == 1) return {0.5 * (lo + hi)};
    xs.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      xs.push_back(j == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(j) / (n - 1));
    }
    return xs;
  }

 private:
  template <class U>
  friend ShotSolution<U> shoot_phi(const Problem&, U, const ShootOptions&);
  template <class U>
  friend ShotSolution<U> shoot_chi(const Problem&, U, const ShootOptions&);

  SolutionKind kind_ = SolutionKind::Phi;
  T lambda_{};
  bool dense_ = false;
  IntervalGeometry geometry_{};
  std::array<State, 3> start_{};
  std::array<State, 3> finish_{};
  std::array<DenseTrajectory<T, 2>, 3> pieces_{};
};

namespace detail {

/// Integrates u'' = (q - lambda) u across one piece, stopping at every knot of q.
template <class T>
StateVec<T, 2> shoot_piece(const Problem& problem, Piece piece, const T& lambda, double from, double to,
                           StateVec<T, 2> y, const OdeOptions& base, DenseTrajectory<T, 2>* traj) {
  OdeOptions opts = base;
  const double mag = std::max(std::abs(y[0]), std::abs(y[1]));
  opts.abs_tol = base.abs_tol * std::max(1.0, mag);

  std::vector<double> stops = problem.breakpoints(piece);
  if (to < from) std::reverse(stops.begin(), stops.end());
  stops.push_back(to);

  auto rhs = [&](double x, const StateVec<T, 2>& s) -> StateVec<T, 2> {
    return {s[1], (problem.potential_on(piece, x) - lambda) * s[0]};
  };
  double t = from;
  for (double stop : stops) {
    y = integrate_dop853<T, 2>(rhs, t, stop, y, opts, traj);
    t = stop;
  }
  return y;
}

}  // namespace detail

/// phi: phi(a) = beta2, phi'(a) = -beta1, continued left to right through the
/// jumps u -> u/delta at theta-eps and u -> (delta/gamma) u at theta+eps.
template <class T>
ShotSolution<T> shoot_phi(const Problem& problem, T lambda, const ShootOptions& opts) {
  const auto& sp = problem.spec();
  const auto& g = problem.geometry();
  ShotSolution<T> sol;
  sol.kind_ = SolutionKind::Phi;
  sol.lambda_ = lambda;
  sol.dense_ = opts.ode.dense;
  sol.geometry_ = g;

  using State = StateVec<T, 2>;
  State y{T(sp.beta2), T(-sp.beta1)};
  const std::array<double, 3> jump_in{1.0, 1.0 / sp.delta, sp.delta / sp.gamma};
  for (Piece p : kPieces) {
    const auto i = index(p);
    if (i > 0) y = State{jump_in[i] * y[0], jump_in[i] * y[1]};
    sol.start_[i] = y;
    y = detail::shoot_piece<T>(problem, p, lambda, g.begin(p), g.end(p), y, opts.ode,
                               sol.dense_ ? &sol.pieces_[i] : nullptr);
    sol.finish_[i] = y;
  }
  return sol;
}

/// chi: chi(b) = lambda*alpha2p + alpha2, chi'(b) = lambda*alpha1p + alpha1,
/// continued right to left through u -> (gamma/delta) u and u -> delta u.
template <class T>
ShotSolution<T> shoot_chi(const Problem& problem, T lambda, const ShootOptions& opts) {
  const auto& sp = problem.spec();
  const auto& g = problem.geometry();
  ShotSolution<T> sol;
  sol.kind_ = SolutionKind::Chi;
  sol.lambda_ = lambda;
  sol.dense_ = opts.ode.dense;
  sol.geometry_ = g;

  using State = StateVec<T, 2>;
  State y{lambda * sp.alpha2p + sp.alpha2, lambda * sp.alpha1p + sp.alpha1};
  // Factor applied when leaving piece i+1 and entering piece i.
  const std::array<double, 3> jump_out{sp.delta, sp.gamma / sp.delta, 1.0};
  for (Piece p : {Piece::Right, Piece::Mid, Piece::Left}) {
    const auto i = index(p);
    if (i < 2) y = State{jump_out[i] * y[0], jump_out[i] * y[1]};
    sol.finish_[i] = y;
    y = detail::shoot_piece<T>(problem, p, lambda, g.end(p), g.begin(p), y, opts.ode,
                               sol.dense_ ? &sol.pieces_[i] : nullptr);
    sol.start_[i] = y;
  }
  return sol;
}

template <class T>
struct BoundaryForms {
  T R{};
  T Rp{};
};

/// R(u) = alpha1 u(b) - alpha2 u'(b),  R'(u) = alpha1p u(b) - alpha2p u'(b).
template <class T>
BoundaryForms<T> boundary_forms(const Problem& problem, const T& ub, const T& dub) {
  const auto& sp = problem.spec();
  return {sp.alpha1 * ub - sp.alpha2 * dub, sp.alpha1p * ub - sp.alpha2p * dub};
}

template <class T>
BoundaryForms<T> boundary_forms(const Problem& problem, const ShotSolution<T>& sol) {
  const auto& s = sol.finish(Piece::Right);
  return boundary_forms<T>(problem, s[0], s[1]);
}

/// W(u, v)(x) = u v' - u' v on piece p.
template <class T>
T wronskian(const ShotSolution<T>& u, const ShotSolution<T>& v, double x, Piece p) {
  const auto su = u.state(x, p);
  const auto sv = v.state(x, p);
  return su[0] * sv[1] - su[1] * sv[0];
}

/// Characteristic function: the Wronskian of phi and chi on the left piece,
/// evaluated at x = a where phi is the exact initial data.
template <class T>
T omega(const Problem& problem, T lambda, const ShootOptions& opts = {}) {
  ShootOptions o = opts;
  o.ode.dense = false;
  const auto chi = shoot_chi<T>(problem, lambda, o);
  const auto& c = chi.start(Piece::Left);
  const auto& sp = problem.spec();
  return sp.beta2 * c[1] + sp.beta1 * c[0];
}

/// Dominant growth of omega for large |lambda|, keyed on (beta2 != 0, alpha2p != 0).
enum class GrowthCase { ThreeHalves, OneBeta2, OneBeta1, OneHalf };

inline GrowthCase growth_case(const Problem& problem) {
  const auto& sp = problem.spec();
  if (sp.beta2 != 0.0) return sp.alpha2p != 0.0 ? GrowthCase::ThreeHalves : GrowthCase::OneBeta2;
  return sp.alpha2p != 0.0 ? GrowthCase::OneBeta1 : GrowthCase::OneHalf;
}

inline double growth_exponent(GrowthCase c) noexcept {
  switch (c) {
    case GrowthCase::ThreeHalves: return 1.5;
    case GrowthCase::OneBeta2:
    case GrowthCase::OneBeta1: return 1.0;
    case GrowthCase::OneHalf: return 0.5;
  }
  return 1.0;
}

/// Positive magnitude envelope of omega on the real axis: |lambda|^p floored at
/// 1, times cosh(sqrt(-lambda)(b-a)) for negative lambda.
inline double omega_envelope(const Problem& problem, double lambda) {
  const double p = growth_exponent(growth_case(problem));
  double env = std::max(1.0, std::pow(std::abs(lambda), p));
  if (lambda < 0.0) env *= std::cosh(std::sqrt(-lambda) * problem.geometry().length());
  return env;
}

/// omega(lambda) / envelope(lambda); same sign as omega, O(1) magnitude.
inline double omega_scaled(const Problem& problem, double lambda, const ShootOptions& opts = {}) {
  return omega<double>(problem, lambda, opts) / omega_envelope(problem, lambda);
}

struct VolterraOptions {
  int points_per_piece = 16;
  double quad_rel_tol = 1e-12;
};

/// Checks a shot phi against the integral-equation form of the problem on
/// each piece,
///   u(x)  = u(x0) cos s(x-x0) + u'(x0) sin s(x-x0)/s + (1/s) int_x0^x sin s(x-y) q(y) u(y) dy,
///   u'(x) = -s u(x0) sin s(x-x0) + u'(x0) cos s(x-x0) + int_x0^x cos s(x-y) q(y) u(y) dy,
/// with s = sqrt(lambda) and the piece-start data (x0 = a, theta-eps, theta+eps)
/// taken from the initial conditions and the transmission jumps applied to the
/// left neighbour's end values. Returns max(|du|, |du'|/s) / max(1, |u|_inf).
inline double volterra_residual(const Problem& problem, const ShotSolution<double>& sol,
                                const VolterraOptions& vopts = {}) {
  if (sol.kind() != SolutionKind::Phi) {
    throw Error(ErrorCode::InvalidArgument, "volterra_residual needs a phi solution");
  }
  const double lambda = sol.lambda();
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "volterra_residual needs lambda > 0");
  const auto& sp = problem.spec();
  const double s = std::sqrt(lambda);

  std::array<StateVec<double, 2>, 3> initial{};
  initial[0] = {sp.beta2, -sp.beta1};
  const auto& e0 = sol.finish(Piece::Left);
  initial[1] = {e0[0] / sp.delta, e0[1] / sp.delta};
  const auto& e1 = sol.finish(Piece::Mid);
  initial[2] = {sp.delta / sp.gamma * e1[0], sp.delta / sp.gamma * e1[1]};

  QuadOptions qopts;
  qopts.rel_tol = vopts.quad_rel_tol;
  double worst = 0.0;
  double umax = 0.0;
  for (Piece p : kPieces) {
    const double x0 = problem.geometry().begin(p);
    const auto& init = initial[index(p)];
    for (double x : ShotSolution<double>::piece_grid(problem.geometry(), p, vopts.points_per_piece)) {
      const auto st = sol.state(x, p);
      double int0 = 0.0;
      double int1 = 0.0;
      if (x > x0) {
        auto qu = [&](double y) { return problem.potential_on(p, y) * sol.value(y, p); };
        int0 = integrate_interval([&](double y) { return std::sin(s * (x - y)) * qu(y); }, x0, x, qopts).value;
        int1 = integrate_interval([&](double y) { return std::cos(s * (x - y)) * qu(y); }, x0, x, qopts).value;
      }
      const double c = std::cos(s * (x - x0));
      const double sn = std::sin(s * (x - x0));
      const double rhs0 = init[0] * c + init[1] * sn / s + int0 / s;
      const double rhs1 = -s * init[0] * sn + init[1] * c + int1;
      worst = std::max({worst, std::abs(st[0] - rhs0), std::abs(st[1] - rhs1) / std::max(1.0, s)});
      umax = std::max(umax, std::abs(st[0]));
    }
  }
  return worst / std::max(1.0, umax);
}

}  // namespace slms

#endif  // SLMS_SOLVER_HPP
