#ifndef SLMS_PROBLEM_HPP
#define SLMS_PROBLEM_HPP

// Problem datum: interval, the two symmetric moving interfaces at theta -/+ epsilon,
// boundary and transmission coefficients, and the potential q.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "slms/error.hpp"

namespace slms {

/// The three open pieces of [a,b] cut by the interfaces.
enum class Piece { Left = 0, Mid = 1, Right = 2 };

inline constexpr std::array<Piece, 3> kPieces{Piece::Left, Piece::Mid, Piece::Right};

inline constexpr std::size_t index(Piece p) noexcept { return static_cast<std::size_t>(p); }

inline constexpr const char* to_string(Piece p) noexcept {
  switch (p) {
    case Piece::Left: return "left";
    case Piece::Mid: return "mid";
    case Piece::Right: return "right";
  }
  return "?";
}

/// One-sided flag for points sitting exactly on an interface.
enum class Side { None, Minus, Plus };

struct ZeroPotential {
  bool operator==(const ZeroPotential&) const = default;
};

struct PerPieceConstant {
  double left = 0.0;
  double mid = 0.0;
  double right = 0.0;
  bool operator==(const PerPieceConstant&) const = default;
};

/// Coefficients in powers of the absolute coordinate x, lowest degree first.
struct PerPiecePolynomial {
  std::array<std::vector<double>, 3> coefficients;
  bool operator==(const PerPiecePolynomial&) const = default;
};

struct PieceTable {
  std::vector<double> x;
  std::vector<double> q;
  bool operator==(const PieceTable&) const = default;
};

/// Sampled potential; linear interpolation inside a piece, constant
/// extension between the outermost abscissa and the piece ends.
struct Tabulated {
  std::array<PieceTable, 3> pieces;
  bool operator==(const Tabulated&) const = default;
};

using PotentialSpec = std::variant<ZeroPotential, PerPieceConstant, PerPiecePolynomial, Tabulated>;

struct ProblemSpec {
  double a = 0.0;
  double b = 0.0;
  double epsilon = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha1p = 0.0;
  double alpha2p = 0.0;
  double delta = 1.0;
  double gamma = 1.0;
  PotentialSpec potential = ZeroPotential{};

  double rho() const noexcept { return alpha1p * alpha2 - alpha1 * alpha2p; }

  bool operator==(const ProblemSpec&) const = default;
};

struct IntervalGeometry {
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
  double theta_minus = 0.0;
  double theta_plus = 0.0;

  double begin(Piece p) const noexcept {
    switch (p) {
      case Piece::Left: return a;
      case Piece::Mid: return theta_minus;
      case Piece::Right: return theta_plus;
    }
    return a;
  }
  double end(Piece p) const noexcept {
    switch (p) {
      case Piece::Left: return theta_minus;
      case Piece::Mid: return theta_plus;
      case Piece::Right: return b;
    }
    return b;
  }
  double length() const noexcept { return b - a; }

  bool operator==(const IntervalGeometry&) const = default;
};

/// Immutable, validated problem. Construct through validate().
class Problem {
 public:
  const ProblemSpec& spec() const noexcept { return spec_; }
  const IntervalGeometry& geometry() const noexcept { return geometry_; }
  double rho() const noexcept { return rho_; }

  /// Inner-product weight of a piece: 1, delta^2, gamma^2.
  double weight(Piece p) const noexcept {
    switch (p) {
      case Piece::Left: return 1.0;
      case Piece::Mid: return spec_.delta * spec_.delta;
      case Piece::Right: return spec_.gamma * spec_.gamma;
    }
    return 1.0;
  }

  /// Piece containing x. Interface points need a side flag.
  Piece locate(double x, Side side = Side::None) const {
    const auto& g = geometry_;
    if (!(x >= g.a && x <= g.b)) {
      throw Error(ErrorCode::OutOfDomain, "x=" + repr(x) + " outside [a,b]");
    }
    if (x == g.theta_minus || x == g.theta_plus) {
      if (side == Side::None) {
        throw Error(ErrorCode::MissingSideFlag, "x=" + repr(x) + " is an interface point");
      }
      if (x == g.theta_minus) return side == Side::Minus ? Piece::Left : Piece::Mid;
      return side == Side::Minus ? Piece::Mid : Piece::Right;
    }
    if (x < g.theta_minus) return Piece::Left;
    if (x < g.theta_plus) return Piece::Mid;
    return Piece::Right;
  }

  /// q evaluated with the formula of piece p (one-sided limits at the piece ends).
  double potential_on(Piece p, double x) const noexcept {
    return std::visit([&](const auto& pot) { return eval_piece(pot, p, x); }, spec_.potential);
  }

  /// Interior points of a piece where q is only piecewise smooth (tabulated knots).
  std::vector<double> breakpoints(Piece p) const {
    std::vector<double> out;
    if (const auto* tab = std::get_if<Tabulated>(&spec_.potential)) {
      const auto lo = geometry_.begin(p);
      const auto hi = geometry_.end(p);
      for (double x : tab->pieces[index(p)].x) {
        if (x > lo && x < hi) out.push_back(x);
      }
    }
    return out;
  }

  static std::string repr(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

 private:
  friend Problem validate(const ProblemSpec& raw);

  Problem(ProblemSpec spec, IntervalGeometry geometry)
      : spec_(std::move(spec)), geometry_(geometry), rho_(spec_.rho()) {}

  static double eval_piece(const ZeroPotential&, Piece, double) noexcept { return 0.0; }

  static double eval_piece(const PerPieceConstant& c, Piece p, double) noexcept {
    switch (p) {
      case Piece::Left: return c.left;
      case Piece::Mid: return c.mid;
      case Piece::Right: return c.right;
    }
    return 0.0;
  }

  static double eval_piece(const PerPiecePolynomial& poly, Piece p, double x) noexcept {
    const auto& c = poly.coefficients[index(p)];
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  static double eval_piece(const Tabulated& tab, Piece p, double x) noexcept {
    const auto& t = tab.pieces[index(p)];
    if (x <= t.x.front()) return t.q.front();
    if (x >= t.x.back()) return t.q.back();
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const auto hi = static_cast<std::size_t>(it - t.x.begin());
    const auto lo = hi - 1;
    const double w = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
    return (1.0 - w) * t.q[lo] + w * t.q[hi];
  }

  ProblemSpec spec_;
  IntervalGeometry geometry_;
  double rho_;
};

namespace detail {

inline void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " is not finite");
  }
}

inline void validate_potential(const PotentialSpec& pot, const IntervalGeometry& g) {
  if (const auto* c = std::get_if<PerPieceConstant>(&pot)) {
    for (double v : {c->left, c->mid, c->right}) check_finite(v, "potential constant");
  } else if (const auto* poly = std::get_if<PerPiecePolynomial>(&pot)) {
    for (const auto& coeffs : poly->coefficients) {
      for (double v : coeffs) check_finite(v, "potential coefficient");
    }
  } else if (const auto* tab = std::get_if<Tabulated>(&pot)) {
    for (Piece p : kPieces) {
      const auto& t = tab->pieces[index(p)];
      const std::string where = std::string("tabulated potential, ") + to_string(p) + " piece: ";
      if (t.x.empty() || t.x.size() != t.q.size()) {
        throw Error(ErrorCode::BadPotentialTable, where + "needs equally many (>=1) abscissae and values");
      }
      for (std::size_t i = 0; i < t.x.size(); ++i) {
        if (!std::isfinite(t.x[i]) || !std::isfinite(t.q[i])) {
          throw Error(ErrorCode::BadPotentialTable, where + "non-finite entry");
        }
        if (i > 0 && !(t.x[i] > t.x[i - 1])) {
          throw Error(ErrorCode::BadPotentialTable, where + "abscissae not strictly increasing");
        }
      }
      if (t.x.front() < g.begin(p) || t.x.back() > g.end(p)) {
        throw Error(ErrorCode::BadPotentialTable, where + "abscissae leave the piece");
      }
    }
  }
}

}  // namespace detail

/// Checks every hypothesis on the datum and computes the interface positions.
inline Problem validate(const ProblemSpec& raw) {
  for (double v : {raw.a, raw.b, raw.epsilon, raw.beta1, raw.beta2, raw.alpha1, raw.alpha2,
                   raw.alpha1p, raw.alpha2p, raw.delta, raw.gamma}) {
    detail::check_finite(v, "problem constant");
  }
  if (!(raw.b > raw.a)) {
    throw Error(ErrorCode::BadInterval, "need b > a, got a=" + Problem::repr(raw.a) +
                                            ", b=" + Problem::repr(raw.b));
  }
  const double half = (raw.b - raw.a) / 2.0;
  if (!(raw.epsilon > 0.0 && raw.epsilon < half)) {
    throw Error(ErrorCode::EpsilonOutOfRange,
                "need 0 < epsilon < (b-a)/2 = " + Problem::repr(half) + ", got " +
                    Problem::repr(raw.epsilon));
  }
  if (raw.beta1 == 0.0 && raw.beta2 == 0.0) {
    throw Error(ErrorCode::DegenerateLeftBC, "|beta1| + |beta2| must be nonzero");
  }
  if (raw.delta == 0.0 || raw.gamma == 0.0) {
    throw Error(ErrorCode::ZeroTransmission, "transmission coefficients delta, gamma must be nonzero");
  }
  const double rho = raw.rho();
  if (!(rho > 0.0)) {
    throw Error(ErrorCode::RhoNotPositive,
                "rho = alpha1p*alpha2 - alpha1*alpha2p must be > 0, got " + Problem::repr(rho));
  }

  IntervalGeometry g;
  g.a = raw.a;
  g.b = raw.b;
  g.theta = (raw.a + raw.b) / 2.0;
  g.theta_minus = g.theta - raw.epsilon;
  g.theta_plus = g.theta + raw.epsilon;
  if (!(g.a < g.theta_minus && g.theta_plus < g.b)) {
    throw Error(ErrorCode::EpsilonOutOfRange, "interfaces collapse onto the endpoints in floating point");
  }
  detail::validate_potential(raw.potential, g);
  return Problem(raw, g);
}

/// Re-validation reproduces the same problem.
inline Problem validate(const Problem& p) { return validate(p.spec()); }

/// q(x); at an interface the side flag selects the one-sided limit.
inline double eval_potential(const Problem& problem, double x, Side side = Side::None) {
  return problem.potential_on(problem.locate(x, side), x);
}

}  // namespace slms

#endif  // SLMS_PROBLEM_HPP
