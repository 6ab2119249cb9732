#ifndef SLMS_SPECTRUM_HPP
#define SLMS_SPECTRUM_HPP

// Eigenvalues as the real zeros of omega, with norming constants, coupling
// constants, normalised eigenvectors of the H-operator and the canonical
// product over the computed eigenvalues.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "slms/error.hpp"
#include "slms/numerics.hpp"
#include "slms/problem.hpp"
#include "slms/solver.hpp"

namespace slms {

struct EigenRecord {
  int n = 0;
  double lambda = 0.0;
  double omega_prime = 0.0;
  double norm_sq = 0.0;
  double k_n = 0.0;
  /// Largest relative deviation of chi/phi from k_n over the masked grid.
  double k_deviation = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// |omega_scaled(lambda_n)|.
  double residual = 0.0;
};

struct ScanOptions {
  /// Lowest lambda searched for (finitely many) negative eigenvalues.
  double negative_floor = -100.0;
  /// Grid points per predicted sqrt-spacing pi/(b-a).
  int points_per_spacing = 8;
  /// Relative bracket width at which refinement stops.
  double root_tol = 1e-14;
  /// Compute norm_sq and k_n for each record.
  bool characterize = true;
  int grid_points = 512;
  double quad_rel_tol = 1e-12;
  /// Extra sqrt-spacings scanned beyond the predicted position of the last root.
  int scan_margin = 40;
  ShootOptions shoot{};
};

struct Spectrum {
  std::vector<EigenRecord> records;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  double grid_step = 0.0;  // in signed sqrt(lambda)
  long omega_evaluations = 0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return records.size(); }
  const EigenRecord& operator[](std::size_t i) const { return records[i]; }

  std::vector<double> eigenvalues() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.lambda);
    return out;
  }

  /// Fingerprint of the first n eigenvalues; identifies which spectrum a set
  /// of samples or derivative values was computed from.
  std::uint64_t fingerprint(std::size_t n) const {
    std::uint64_t h = 1469598103934665603ull;
    n = std::min(n, records.size());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= std::bit_cast<std::uint64_t>(records[i].lambda);
      h *= 1099511628211ull;
    }
    return h ^ n;
  }
};

inline double signed_sqrt(double lambda) noexcept {
  return std::copysign(std::sqrt(std::abs(lambda)), lambda);
}

/// Leading-order sqrt(lambda_n) for large n, used to seed the scan.
inline double predict_sqrt_eigenvalue(const Problem& problem, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "eigenvalue index must be >= 0");
  const double step = std::numbers::pi / problem.geometry().length();
  switch (growth_case(problem)) {
    case GrowthCase::ThreeHalves: return (n - 1.0) * step;
    case GrowthCase::OneBeta2:
    case GrowthCase::OneBeta1: return (n - 0.5) * step;
    case GrowthCase::OneHalf: return n * step;
  }
  return n * step;
}

namespace detail {

/// Initial Gauss panels per piece so that each holds about one oscillation.
inline int panels_for(double lambda, double piece_length) {
  const double s = std::sqrt(std::max(0.0, lambda));
  return std::clamp(static_cast<int>(std::ceil(s * piece_length / std::numbers::pi)) + 2, 4, 4096);
}

}  // namespace detail

/// ||Phi_n||_H^2 = <phi, phi>_H with h-component R'(phi).
inline double norm_squared(const Problem& problem, const ShotSolution<double>& phi, double quad_rel_tol = 1e-12) {
  const double len = problem.geometry().end(Piece::Mid) - problem.geometry().begin(Piece::Mid);
  HVector<double> v{[&](double x, Piece p) { return phi.value(x, p); }, boundary_forms(problem, phi).Rp};
  return inner_product_H(problem, v, v, quad_rel_tol, detail::panels_for(phi.lambda(), len));
}

inline double norm_squared(const Problem& problem, const EigenRecord& rec, const ScanOptions& opts = {}) {
  return norm_squared(problem, shoot_phi<double>(problem, rec.lambda, opts.shoot), opts.quad_rel_tol);
}

struct CouplingResult {
  double k = 0.0;
  double max_rel_deviation = 0.0;
};

/// k_n with chi = k_n phi, least squares over the dense grid. The pointwise
/// deviation is measured where |phi| >= mask * max|phi| (ratios near the
/// nodes of phi carry no information).
inline CouplingResult coupling_constant(const ShotSolution<double>& phi, const ShotSolution<double>& chi,
                                        int grid_points = 512, double mask = 1e-3) {
  const auto gp = phi.grid(grid_points);
  const auto gc = chi.grid(grid_points);
  double num = 0.0;
  double den = 0.0;
  double phimax = 0.0;
  for (std::size_t i = 0; i < gp.size(); ++i) {
    num += gc[i].u * gp[i].u;
    den += gp[i].u * gp[i].u;
    phimax = std::max(phimax, std::abs(gp[i].u));
  }
  if (!(den > 0.0) || phimax == 0.0) {
    throw Error(ErrorCode::DegenerateRatio, "phi vanishes on the whole grid");
  }
  CouplingResult out;
  out.k = num / den;
  if (out.k == 0.0 || !std::isfinite(out.k)) {
    throw Error(ErrorCode::DegenerateRatio, "coupling constant is zero or not finite");
  }
  for (std::size_t i = 0; i < gp.size(); ++i) {
    if (std::abs(gp[i].u) < mask * phimax) continue;
    const double ratio = gc[i].u / gp[i].u;
    out.max_rel_deviation = std::max(out.max_rel_deviation, std::abs(ratio - out.k) / std::abs(out.k));
  }
  return out;
}

inline CouplingResult coupling_constant(const Problem& problem, const EigenRecord& rec,
                                        const ScanOptions& opts = {}) {
  return coupling_constant(shoot_phi<double>(problem, rec.lambda, opts.shoot),
                           shoot_chi<double>(problem, rec.lambda, opts.shoot), opts.grid_points);
}

/// omega'(lambda) by the complex step through the complex shooting path.
inline double omega_derivative(const Problem& problem, double lambda, const ShootOptions& opts = {}) {
  return derivative_of_analytic([&](cplx z) { return omega<cplx>(problem, z, opts); }, lambda, 1.0,
                                [&](double x) { return omega<double>(problem, x, opts); });
}

/// The first `count` real zeros of omega. Scans omega_scaled on a uniform grid
/// in signed sqrt(lambda), brackets sign changes, refines each with Brent.
inline Spectrum find_eigenvalues(const Problem& problem, int count, const ScanOptions& opts = {}) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  if (opts.points_per_spacing < 1) throw Error(ErrorCode::InvalidArgument, "points_per_spacing must be >= 1");
  const double len = problem.geometry().length();
  const double spacing = std::numbers::pi / len;
  const double dsig = spacing / opts.points_per_spacing;

  Spectrum spec;
  spec.grid_step = dsig;
  const double sig_lo = -std::sqrt(std::max(0.0, -opts.negative_floor));
  const double sig_hi = std::max(predict_sqrt_eigenvalue(problem, count - 1), 0.0) + opts.scan_margin * spacing;
  spec.scan_lo = sig_lo * std::abs(sig_lo);
  spec.scan_hi = sig_hi * sig_hi;

  auto f = [&](double lambda) {
    ++spec.omega_evaluations;
    return omega_scaled(problem, lambda, opts.shoot);
  };

  struct Bracket {
    double lo, hi;
  };
  std::vector<Bracket> brackets;
  const long steps = static_cast<long>(std::ceil((sig_hi - sig_lo) / dsig));
  double prev_sig = sig_lo;
  double prev_lam = sig_lo * std::abs(sig_lo);
  double prev = f(prev_lam);
  double prev2 = std::numeric_limits<double>::quiet_NaN();
  bool prev_changed = false;
  for (long i = 1; i <= steps && static_cast<int>(brackets.size()) < count; ++i) {
    const double sig = sig_lo + static_cast<double>(i) * dsig;
    const double lam = sig * std::abs(sig);
    const double cur = f(lam);
    bool changed = false;
    if (prev == 0.0) {
      // Exact hit on a grid point: already recorded on the previous step.
    } else if (cur == 0.0 || (cur > 0.0) != (prev > 0.0)) {
      brackets.push_back({prev_lam, lam});
      changed = true;
    }
    // A local minimum of |omega_scaled| close to zero with no sign change on
    // either side points at two roots inside one cell.
    if (!changed && !prev_changed && std::isfinite(prev2) && std::abs(prev) < 1e-6 &&
        std::abs(prev) <= std::abs(prev2) && std::abs(prev) <= std::abs(cur)) {
      throw Error(ErrorCode::SuspectedDoubleRoot,
                  "|omega_scaled| dips to " + Problem::repr(std::abs(prev)) + " near lambda=" +
                      Problem::repr(prev_lam) + " without a sign change");
    }
    prev2 = prev;
    prev_changed = changed;
    prev_sig = sig;
    prev_lam = lam;
    prev = cur;
  }
  (void)prev_sig;
  if (static_cast<int>(brackets.size()) < count) {
    throw Error(ErrorCode::ScanRangeExhausted, "found " + std::to_string(brackets.size()) + " of " +
                                                   std::to_string(count) + " eigenvalues below lambda=" +
                                                   Problem::repr(spec.scan_hi));
  }

  for (std::size_t n = 0; n < brackets.size(); ++n) {
    const auto& br = brackets[n];
    EigenRecord rec;
    rec.n = static_cast<int>(n);
    if (f(br.hi) == 0.0) {
      rec.lambda = br.hi;
      rec.bracket_lo = rec.bracket_hi = br.hi;
    } else {
      const double tol = opts.root_tol * std::max(1.0, std::max(std::abs(br.lo), std::abs(br.hi)));
      const auto root = refine_root(f, br.lo, br.hi, tol);
      rec.lambda = root.root;
      rec.bracket_lo = root.lo;
      rec.bracket_hi = root.hi;
    }
    rec.residual = std::abs(f(rec.lambda));
    rec.omega_prime = omega_derivative(problem, rec.lambda, opts.shoot);
    if (rec.omega_prime == 0.0) {
      throw Error(ErrorCode::SuspectedDoubleRoot, "omega'(lambda_n) = 0 at lambda=" + Problem::repr(rec.lambda));
    }
    if (opts.characterize) {
      ShootOptions dense = opts.shoot;
      dense.ode.dense = true;
      const auto phi = shoot_phi<double>(problem, rec.lambda, dense);
      const auto chi = shoot_chi<double>(problem, rec.lambda, dense);
      rec.norm_sq = norm_squared(problem, phi, opts.quad_rel_tol);
      const auto kc = coupling_constant(phi, chi, opts.grid_points);
      rec.k_n = kc.k;
      rec.k_deviation = kc.max_rel_deviation;
    }
    spec.records.push_back(rec);
  }

  // Diagnostics: missed roots and the index offset of the asymptotic formula.
  for (std::size_t n = 1; n < spec.records.size(); ++n) {
    const double a = spec.records[n - 1].lambda;
    const double b = spec.records[n].lambda;
    if (a > 0.0 && b > 0.0 && std::sqrt(b) - std::sqrt(a) > 1.5 * spacing) {
      spec.warnings.push_back("possible missed root between lambda_" + std::to_string(n - 1) + "=" +
                              Problem::repr(a) + " and lambda_" + std::to_string(n) + "=" + Problem::repr(b));
    }
  }
  const auto& last = spec.records.back();
  if (last.lambda > 0.0) {
    const double offset = (std::sqrt(last.lambda) - predict_sqrt_eigenvalue(problem, last.n)) / spacing;
    const long shift = std::lround(offset);
    if (shift != 0 && std::abs(offset - static_cast<double>(shift)) < 0.25) {
      spec.warnings.push_back("asymptotic index offset: sqrt(lambda_n) tracks the prediction for n" +
                              std::string(shift > 0 ? "+" : "") + std::to_string(shift));
    }
  }
  return spec;
}

/// Phi_n = (phi_n, R'(phi_n)) and its normalisation Psi_n = Phi_n / ||Phi_n||_H.
class EigenVectorH {
 public:
  EigenVectorH(const Problem& problem, double lambda, const ScanOptions& opts = {})
      : lambda_(lambda), phi_(shoot_phi<double>(problem, lambda, dense_options(opts))) {
    rp_ = boundary_forms(problem, phi_).Rp;
    norm_ = std::sqrt(norm_squared(problem, phi_, opts.quad_rel_tol));
  }

  double lambda() const noexcept { return lambda_; }
  double norm() const noexcept { return norm_; }
  const ShotSolution<double>& phi() const noexcept { return phi_; }

  double Phi(double x, Piece p) const { return phi_.value(x, p); }
  double Phi_h() const noexcept { return rp_; }
  double Psi(double x, Piece p) const { return phi_.value(x, p) / norm_; }
  double Psi_h() const noexcept { return rp_ / norm_; }

  HVector<double> normalized() const {
    return {[this](double x, Piece p) { return Psi(x, p); }, Psi_h()};
  }
  HVector<double> unnormalized() const {
    return {[this](double x, Piece p) { return Phi(x, p); }, Phi_h()};
  }

 private:
  static ShootOptions dense_options(const ScanOptions& opts) {
    ShootOptions o = opts.shoot;
    o.ode.dense = true;
    return o;
  }

  double lambda_;
  ShotSolution<double> phi_;
  double rp_ = 0.0;
  double norm_ = 1.0;
};

using Matrix = std::vector<std::vector<double>>;

/// Gram matrix <Psi_n, Psi_m>_H of the first `upto` normalised eigenvectors.
inline Matrix orthogonality_matrix(const Problem& problem, const Spectrum& spectrum, int upto,
                                   const ScanOptions& opts = {}) {
  if (upto < 0 || static_cast<std::size_t>(upto) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "upto exceeds the spectrum length");
  }
  std::vector<EigenVectorH> vecs;
  vecs.reserve(static_cast<std::size_t>(upto));
  for (int n = 0; n < upto; ++n) vecs.emplace_back(problem, spectrum[static_cast<std::size_t>(n)].lambda, opts);
  const double mid_len = problem.geometry().end(Piece::Mid) - problem.geometry().begin(Piece::Mid);
  Matrix gram(static_cast<std::size_t>(upto), std::vector<double>(static_cast<std::size_t>(upto), 0.0));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i; j < vecs.size(); ++j) {
      const int panels = detail::panels_for(std::max(vecs[i].lambda(), vecs[j].lambda()), mid_len);
      gram[i][j] = gram[j][i] =
          inner_product_H(problem, vecs[i].normalized(), vecs[j].normalized(), opts.quad_rel_tol, panels);
    }
  }
  return gram;
}

struct ProductValue {
  cplx value{};
  /// |prod over the last 10% of the factors - 1|; small when truncation is harmless.
  double tail = 0.0;
};

/// Truncated canonical product prod_{n<N} (1 - lambda/lambda_n); when
/// lambda_0 = 0 the first factor is replaced by lambda itself.
inline ProductValue canonical_product(const Spectrum& spectrum, cplx lambda, int truncation) {
  if (truncation < 0 || static_cast<std::size_t>(truncation) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "truncation exceeds the spectrum length");
  }
  const std::size_t n_total = static_cast<std::size_t>(truncation);
  const std::size_t tail_from = n_total - n_total / 10;
  ProductValue out;
  cplx acc(1.0, 0.0);
  cplx tail(1.0, 0.0);
  for (std::size_t n = 0; n < n_total; ++n) {
    const double ln = spectrum[n].lambda;
    cplx factor;
    if (n == 0 && std::abs(ln) < 1e-12) {
      factor = lambda;
    } else {
      factor = 1.0 - lambda / ln;
    }
    acc *= factor;
    if (n >= tail_from && n_total >= 10) tail *= factor;
  }
  out.value = acc;
  out.tail = std::abs(tail - 1.0);
  return out;
}

}  // namespace slms

#endif  // SLMS_SPECTRUM_HPP
