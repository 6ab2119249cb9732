#ifndef SLMS_SAMPLING_HPP
#define SLMS_SAMPLING_HPP

// Integral transforms with the phi kernel and the Green kernel
// omega(lambda) G(x, y0, lambda), their samples at the eigenvalues and the
// Lagrange-type series that rebuilds them from those samples.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slms/error.hpp"
#include "slms/numerics.hpp"
#include "slms/problem.hpp"
#include "slms/solver.hpp"
#include "slms/spectrum.hpp"

namespace slms {

enum class KernelKind { Phi, Green };
enum class OmegaSource { Wronskian, CanonicalProduct };

inline const char* to_string(KernelKind k) noexcept { return k == KernelKind::Phi ? "phi" : "green"; }
inline const char* to_string(OmegaSource s) noexcept {
  return s == OmegaSource::Wronskian ? "wronskian" : "canonical_product";
}

using PieceFunction = std::function<double(double, Piece)>;

struct TransformSpec {
  KernelKind kernel = KernelKind::Phi;
  double y0 = 0.0;
  Side y0_side = Side::None;
  OmegaSource omega_source = OmegaSource::Wronskian;
  PieceFunction g;
  double quad_rel_tol = 1e-12;
  ShootOptions shoot{};
};

// g presets ---------------------------------------------------------------

inline PieceFunction g_one() {
  return [](double, Piece) { return 1.0; };
}
inline PieceFunction g_zero() {
  return [](double, Piece) { return 0.0; };
}
/// cos^2 bump supported on the middle piece, peaking at theta.
inline PieceFunction g_bump_mid(const Problem& problem) {
  const double theta = problem.geometry().theta;
  const double eps = problem.spec().epsilon;
  return [theta, eps](double x, Piece p) {
    if (p != Piece::Mid) return 0.0;
    const double c = std::cos(std::numbers::pi * (x - theta) / (2.0 * eps));
    return c * c;
  };
}
/// sin(k pi (x - a) / (b - a)).
inline PieceFunction g_sin_k(const Problem& problem, double k) {
  const double a = problem.geometry().a;
  const double len = problem.geometry().length();
  return [a, len, k](double x, Piece) { return std::sin(k * std::numbers::pi * (x - a) / len); };
}
/// Per-piece sample table, linear interpolation with constant extension.
inline PieceFunction g_table(const Problem& problem, const std::array<PieceTable, 3>& tables) {
  Tabulated tab{tables};
  ProblemSpec carrier = problem.spec();
  carrier.potential = tab;
  const Problem holder = validate(carrier);  // reuses the table checks and interpolation
  return [holder](double x, Piece p) { return holder.potential_on(p, x); };
}

// Direct evaluation ---------------------------------------------------------

namespace detail {

template <class F>
auto integrate_split(F&& f, double lo, double hi, const std::vector<double>& cuts, double rel_tol, int panels) {
  using T = integrand_value_t<F>;
  std::vector<double> pts{lo};
  for (double c : cuts) {
    if (c > lo && c < hi) pts.push_back(c);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  QuadOptions qo;
  qo.rel_tol = rel_tol;
  qo.initial_panels = panels;
  T acc{};
  bool ok = true;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto r = integrate_interval(f, pts[i], pts[i + 1], qo);
    acc += r.value;
    err += r.error;
    ok = ok && r.converged;
  }
  if (!ok) {
    throw Error(ErrorCode::ToleranceNotReached, "transform quadrature: achieved error estimate " + Problem::repr(err));
  }
  return acc;
}

inline Piece y0_piece(const Problem& problem, const TransformSpec& spec) {
  return problem.locate(spec.y0, spec.y0_side);
}

}  // namespace detail

/// F(lambda) = sum over pieces of w_p int g K(x, lambda), with K = phi for the
/// phi kernel and K = phi(min(x,y0)) chi(max(x,y0)) for the Green kernel. The
/// latter equals omega(lambda) G(x, y0, lambda) and stays finite at eigenvalues.
template <class T>
T transform_direct(const Problem& problem, const TransformSpec& spec, T lambda) {
  if (!spec.g) throw Error(ErrorCode::InvalidArgument, "transform needs a function g");
  ShootOptions o = spec.shoot;
  o.ode.dense = true;
  const auto phi = shoot_phi<T>(problem, lambda, o);
  const auto& geo = problem.geometry();
  double lam_re;
  if constexpr (is_complex_v<T>) {
    lam_re = std::abs(lambda);
  } else {
    lam_re = lambda;
  }

  T total{};
  if (spec.kernel == KernelKind::Phi) {
    for (Piece p : kPieces) {
      const int panels = detail::panels_for(lam_re, geo.end(p) - geo.begin(p));
      auto f = [&](double x) { return spec.g(x, p) * phi.value(x, p); };
      total += problem.weight(p) * detail::integrate_split(f, geo.begin(p), geo.end(p), problem.breakpoints(p),
                                                           spec.quad_rel_tol, panels);
    }
    return total;
  }

  const Piece py = detail::y0_piece(problem, spec);
  const auto chi = shoot_chi<T>(problem, lambda, o);
  const T phi_y = phi.value(spec.y0, py);
  const T chi_y = chi.value(spec.y0, py);
  for (Piece p : kPieces) {
    const int panels = detail::panels_for(lam_re, geo.end(p) - geo.begin(p));
    auto f = [&](double x) {
      const bool x_is_min = x < spec.y0 || (x == spec.y0 && index(p) < index(py));
      return spec.g(x, p) * (x_is_min ? phi.value(x, p) * chi_y : phi_y * chi.value(x, p));
    };
    std::vector<double> cuts = problem.breakpoints(p);
    cuts.push_back(spec.y0);
    total += problem.weight(p) * detail::integrate_split(f, geo.begin(p), geo.end(p), cuts, spec.quad_rel_tol, panels);
  }
  return total;
}

// Samples and reconstruction -----------------------------------------------

struct TransformSamples {
  KernelKind kernel = KernelKind::Phi;
  std::vector<double> lambdas;
  std::vector<double> values;
  std::uint64_t provenance = 0;

  std::size_t size() const noexcept { return values.size(); }
};

/// F(lambda_n) for n < N. At an eigenvalue the Green kernel is evaluated in
/// the product form, which is its limit as lambda -> lambda_n.
inline TransformSamples sample_at_spectrum(const Problem& problem, const TransformSpec& spec,
                                           const Spectrum& spectrum, int N) {
  if (N < 0 || static_cast<std::size_t>(N) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "N exceeds the spectrum length");
  }
  TransformSamples out;
  out.kernel = spec.kernel;
  out.provenance = spectrum.fingerprint(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const double ln = spectrum[static_cast<std::size_t>(n)].lambda;
    out.lambdas.push_back(ln);
    out.values.push_back(transform_direct<double>(problem, spec, ln));
  }
  return out;
}

/// omega (or a stand-in such as the canonical product) with its derivatives
/// at the sample points, tagged with the spectrum they came from.
struct OmegaModel {
  OmegaSource source = OmegaSource::Wronskian;
  std::function<cplx(cplx)> value;
  std::vector<double> prime;
  std::uint64_t provenance = 0;
};

inline OmegaModel omega_model_wronskian(const Problem& problem, const Spectrum& spectrum, int N,
                                        const ShootOptions& opts = {}) {
  if (N < 0 || static_cast<std::size_t>(N) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "N exceeds the spectrum length");
  }
  OmegaModel m;
  m.source = OmegaSource::Wronskian;
  m.value = [problem, opts](cplx z) {
    if (z.imag() == 0.0) return cplx(omega<double>(problem, z.real(), opts), 0.0);
    return omega<cplx>(problem, z, opts);
  };
  for (int n = 0; n < N; ++n) m.prime.push_back(spectrum[static_cast<std::size_t>(n)].omega_prime);
  m.provenance = spectrum.fingerprint(static_cast<std::size_t>(N));
  return m;
}

/// Canonical product truncated to the first `product_terms` eigenvalues; its
/// derivatives at the first N of them by the complex step.
inline OmegaModel omega_model_product(const Spectrum& spectrum, int N, int product_terms) {
  if (N < 0 || product_terms < N || static_cast<std::size_t>(product_terms) > spectrum.size()) {
    throw Error(ErrorCode::InvalidArgument, "need N <= product_terms <= spectrum length");
  }
  OmegaModel m;
  m.source = OmegaSource::CanonicalProduct;
  auto spec = std::make_shared<Spectrum>(spectrum);
  m.value = [spec, product_terms](cplx z) { return canonical_product(*spec, z, product_terms).value; };
  for (int n = 0; n < N; ++n) {
    m.prime.push_back(derivative_of_analytic(m.value, spectrum[static_cast<std::size_t>(n)].lambda));
  }
  m.provenance = spectrum.fingerprint(static_cast<std::size_t>(N));
  return m;
}

struct SeriesValue {
  cplx value{};
  /// |last term| / |partial sum|.
  double tail = 0.0;
};

/// sum_n F(lambda_n) omega(lambda) / ((lambda - lambda_n) omega'(lambda_n)),
/// summed in ascending n. At a sample point the sample itself is returned.
inline SeriesValue reconstruct(const TransformSamples& samples, const OmegaModel& model, cplx lambda) {
  if (samples.provenance != model.provenance || samples.size() != model.prime.size()) {
    throw Error(ErrorCode::MismatchedProvenance, "samples and omega' values come from different spectra");
  }
  SeriesValue out;
  if (samples.size() == 0) return out;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double ln = samples.lambdas[n];
    if (std::abs(lambda - ln) <= 1e-12 * std::max(1.0, std::abs(ln))) {
      out.value = samples.values[n];
      return out;
    }
  }
  const cplx w = model.value(lambda);
  cplx sum{};
  cplx last{};
  for (std::size_t n = 0; n < samples.size(); ++n) {
    last = samples.values[n] * w / ((lambda - samples.lambdas[n]) * model.prime[n]);
    sum += last;
  }
  out.value = sum;
  out.tail = std::abs(sum) > 0.0 ? std::abs(last) / std::abs(sum) : (std::abs(last) > 0.0 ? 1.0 : 0.0);
  return out;
}

// Reports -------------------------------------------------------------------

/// Midpoints of the gaps (lambda_n, lambda_{n+1}) for n in [from, to).
inline std::vector<double> gap_midpoints(const Spectrum& spectrum, int from, int to) {
  std::vector<double> out;
  for (int n = std::max(0, from); n < to && static_cast<std::size_t>(n + 1) < spectrum.size(); ++n) {
    out.push_back(0.5 * (spectrum[static_cast<std::size_t>(n)].lambda + spectrum[static_cast<std::size_t>(n + 1)].lambda));
  }
  return out;
}

struct ReconstructionPoint {
  double lambda = 0.0;
  double direct = 0.0;
  double series = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tail = 0.0;
  /// Series value with the canonical product in place of omega.
  double series_product = 0.0;
};

struct ReconstructionReport {
  KernelKind kernel = KernelKind::Phi;
  OmegaSource omega_source = OmegaSource::Wronskian;
  int N = 0;
  std::vector<ReconstructionPoint> points;
  double max_rel_error = 0.0;
  double max_tail = 0.0;
  /// max |series(omega) - series(canonical product)| / |series(omega)|.
  double product_discrepancy = 0.0;
};

/// Direct against series at each evaluation point. The spectrum must hold at
/// least N eigenvalues; extra ones only lengthen the canonical product.
inline ReconstructionReport reconstruction_report(const Problem& problem, const TransformSpec& spec,
                                                  const Spectrum& spectrum, int N,
                                                  const std::vector<double>& eval_points) {
  ReconstructionReport rep;
  rep.kernel = spec.kernel;
  rep.omega_source = spec.omega_source;
  rep.N = N;
  if (eval_points.empty()) return rep;
  const auto samples = sample_at_spectrum(problem, spec, spectrum, N);
  const int product_terms = static_cast<int>(spectrum.size());
  const auto wr = omega_model_wronskian(problem, spectrum, N, spec.shoot);
  const auto pr = omega_model_product(spectrum, N, product_terms);
  const auto& primary = spec.omega_source == OmegaSource::Wronskian ? wr : pr;
  const auto& other = spec.omega_source == OmegaSource::Wronskian ? pr : wr;
  for (double l : eval_points) {
    ReconstructionPoint pt;
    pt.lambda = l;
    pt.direct = transform_direct<double>(problem, spec, l);
    const auto s = reconstruct(samples, primary, cplx(l, 0.0));
    const auto s2 = reconstruct(samples, other, cplx(l, 0.0));
    pt.series = s.value.real();
    pt.series_product = (spec.omega_source == OmegaSource::Wronskian ? s2 : s).value.real();
    const double series_w = (spec.omega_source == OmegaSource::Wronskian ? s : s2).value.real();
    pt.tail = s.tail;
    pt.abs_error = std::abs(pt.series - pt.direct);
    pt.rel_error = pt.direct != 0.0 ? pt.abs_error / std::abs(pt.direct) : pt.abs_error;
    rep.max_rel_error = std::max(rep.max_rel_error, pt.rel_error);
    rep.max_tail = std::max(rep.max_tail, pt.tail);
    const double disc = std::abs(series_w - pt.series_product);
    rep.product_discrepancy = std::max(rep.product_discrepancy, series_w != 0.0 ? disc / std::abs(series_w) : disc);
    rep.points.push_back(pt);
  }
  return rep;
}

/// log|F(-t^2)| / t: tends to the exponential type in sqrt(lambda) as t grows.
inline double type_diagnostic(const Problem& problem, const TransformSpec& spec, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  const double v = std::abs(transform_direct<double>(problem, spec, -t * t));
  return v > 0.0 ? std::log(v) / t : -std::numeric_limits<double>::infinity();
}

}  // namespace slms

#endif  // SLMS_SAMPLING_HPP
