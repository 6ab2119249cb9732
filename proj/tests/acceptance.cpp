// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "commands.hpp"
#include "slms/green.hpp"
#include "slms/sampling.hpp"
#include "slms/spectrum.hpp"
#include "support.hpp"

using namespace slms;
using slms::test::kPi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s C%d %s [%.2fs] %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const ProblemSpec& problem_spec(int i) {
  static const ProblemSpec specs[3] = {test::reference_spec(), test::stepped_spec(), test::tabulated_spec()};
  return specs[i];
}

std::vector<double> random_lambdas() {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> d(-5.0, 500.0);
  std::vector<double> out(20);
  for (auto& l : out) l = d(rng);
  return out;
}

ShootOptions dense() {
  ShootOptions o;
  o.ode.dense = true;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

TransformSpec transform(const Problem& p, KernelKind k, PieceFunction g) {
  TransformSpec t;
  t.kernel = k;
  t.y0 = p.geometry().theta;
  t.g = std::move(g);
  return t;
}

// Shared by criteria 9, 10 and 12.
const Spectrum& reference_spectrum_240() {
  static const Spectrum s = find_eigenvalues(validate(test::reference_spec()), 240);
  return s;
}

Outcome sampling_criterion(KernelKind kernel) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = validate(test::reference_spec());
  const auto& sp = reference_spectrum_240();
  const auto pts = gap_midpoints(sp, 5, 15);
  Outcome o;
  const std::pair<const char*, PieceFunction> gs[] = {{"one", g_one()}, {"bump_mid", g_bump_mid(p)}};
  for (const auto& [name, g] : gs) {
    const auto spec = transform(p, kernel, g);
    double e[3];
    int i = 0;
    for (int N : {30, 60, 120}) e[i++] = reconstruction_report(p, spec, sp, N, pts).max_rel_error;
    const bool ok = pts.size() == 10 && e[1] <= 1e-3 && e[1] < e[0] && e[2] < e[1];
    o.pass = o.pass && ok;
    o.detail += std::string(name) + fmt(": N30=%.2e N60=%.2e N120=%.2e; ", e[0], e[1], e[2]);
  }
  const double secs = elapsed(t0);
  o.pass = o.pass && secs < 120.0;
  o.detail += fmt("runtime %.1fs", secs);
  return o;
}

}  // namespace

int main() {
  std::printf("slms acceptance %s\n", SLMS_VERSION);

  report(1, "closed-form spectrum of the reference problem", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto oracle = test::brute_force_roots(test::reference_omega, -10.0, 25.0, 2000000, 20);
    const auto sp = find_eigenvalues(validate(test::reference_spec()), 20);
    const double secs = elapsed(t0);
    double worst = oracle.size() == 20 ? 0.0 : INFINITY;
    for (std::size_t n = 0; n < std::min<std::size_t>(20, oracle.size()); ++n) {
      worst = std::max(worst, std::abs(signed_sqrt(sp[n].lambda) - signed_sqrt(oracle[n])));
    }
    return Outcome{worst <= 1e-9 && secs < 10.0, fmt("max |d sqrt(lambda)|=%.2e runtime %.2fs", worst, secs)};
  });

  report(2, "Wronskian constant per piece with transmission scaling", [] {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto& s = problem_spec(i);
      const auto p = validate(s);
      const double scale[3] = {1.0, s.delta * s.delta, s.gamma * s.gamma};
      for (double l : random_lambdas()) {
        const auto phi = shoot_phi<double>(p, l, dense());
        const auto chi = shoot_chi<double>(p, l, dense());
        const double w = omega<double>(p, l);
        for (Piece pc : kPieces) {
          const double lo = p.geometry().begin(pc);
          const double hi = p.geometry().end(pc);
          for (double t : {0.3, 0.7}) {
            const double x = lo + t * (hi - lo);
            worst = std::max(worst, std::abs(scale[index(pc)] * wronskian(phi, chi, x, pc) - w) / std::abs(w));
          }
        }
      }
    }
    return Outcome{worst <= 1e-8, fmt("max relative deviation %.2e over 3 problems x 20 lambdas", worst)};
  });

  report(3, "transmission and boundary conditions of phi and chi", [] {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto& s = problem_spec(i);
      const auto p = validate(s);
      for (double l : random_lambdas()) {
        const auto phi = shoot_phi<double>(p, l);
        const auto chi = shoot_chi<double>(p, l);
        const auto pa = phi.start(Piece::Left);
        worst = std::max(worst, std::abs(s.beta1 * pa[0] + s.beta2 * pa[1]));
        const auto bf = boundary_forms(p, chi);
        worst = std::max(worst, std::abs(l * bf.Rp + bf.R) / std::max(1.0, std::abs(l * bf.Rp)));
        for (const auto* sol : {&phi, &chi}) {
          for (int k = 0; k < 2; ++k) {
            worst = std::max(worst, rel(sol->finish(Piece::Left)[k], s.delta * sol->start(Piece::Mid)[k]));
            worst = std::max(worst, rel(s.delta * sol->finish(Piece::Mid)[k], s.gamma * sol->start(Piece::Right)[k]));
          }
        }
      }
    }
    return Outcome{worst <= 1e-8, fmt("max residual %.2e", worst)};
  });

  report(4, "eigenvalue spacing tends to pi/(b-a) on the stepped problem", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = validate(test::stepped_spec());
    const auto sp = find_eigenvalues(p, 42);
    const double step = kPi / p.geometry().length();
    auto dev = [&](int n) {
      const auto k = static_cast<std::size_t>(n);
      return std::abs(signed_sqrt(sp[k + 1].lambda) - signed_sqrt(sp[k].lambda) - step);
    };
    double block[3] = {0, 0, 0};
    for (int b = 0; b < 3; ++b) {
      for (int n = 10 + 10 * b; n < 20 + 10 * b; ++n) block[b] += dev(n) / 10.0;
    }
    const double secs = elapsed(t0);
    const bool ok = block[0] > block[1] && block[1] > block[2] && dev(40) <= 0.05 * step && secs < 60.0;
    return Outcome{ok, fmt("block means %.2e > %.2e > %.2e, dev(40)=%.2e", block[0], block[1], block[2], dev(40)) +
                           fmt(" runtime %.2fs", secs)};
  });

  report(5, "orthogonality of normalized eigenvectors", [] {
    double off = 0.0;
    double diag = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto p = validate(problem_spec(i));
      const auto g = orthogonality_matrix(p, find_eigenvalues(p, 10), 10);
      for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 10; ++c) {
          if (r == c) {
            diag = std::max(diag, std::abs(g[r][c] - 1.0));
          } else {
            off = std::max(off, std::abs(g[r][c]));
          }
        }
      }
    }
    return Outcome{off <= 1e-5 && diag <= 1e-8, fmt("max |off-diagonal|=%.2e max |diagonal-1|=%.2e", off, diag)};
  });

  report(6, "coupling constants on the reference problem", [] {
    const auto sp = find_eigenvalues(validate(test::reference_spec()), 10);
    double worst = 0.0;
    for (const auto& r : sp.records) worst = std::max(worst, r.k_deviation);
    return Outcome{worst <= 1e-6, fmt("max relative ratio deviation %.2e", worst)};
  });

  report(7, "Green's function symmetry and closed form at lambda=0", [] {
    double asym = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto p = validate(problem_spec(i));
      const auto sp = find_eigenvalues(p, 3);
      const GreenFunction<double> G(p, 0.5 * (sp[1].lambda + sp[2].lambda));
      std::mt19937 rng(77 + i);
      std::uniform_real_distribution<double> d(p.geometry().a, p.geometry().b);
      std::vector<std::pair<double, double>> pairs;
      double gmax = 0.0;
      for (int k = 0; k < 50; ++k) {
        pairs.emplace_back(d(rng), d(rng));
        gmax = std::max(gmax, std::abs(G(pairs.back().first, pairs.back().second)));
      }
      for (const auto& [x, y] : pairs) asym = std::max(asym, std::abs(G(x, y) - G(y, x)) / gmax);
    }
    cli::RunConfig cfg;
    cfg.problem = test::reference_spec();
    cfg.green.lambda = 0.0;
    cfg.green.points_per_piece = 16;
    const auto doc = cli::cmd_green(cfg);
    double dump = 0.0;
    for (const auto& r : doc.at("results")) {
      const double x = r.at("x").get<double>();
      const double y = r.at("y").get<double>();
      dump = std::max(dump, std::abs(r.at("G").get<double>() - (std::max(x, y) - kPi)));
    }
    const bool ok = asym <= 1e-8 && dump <= 1e-7 && doc.at("results").size() == 48u * 48u;
    return Outcome{ok, fmt("max asymmetry/max|G|=%.2e, lambda=0 dump error %.2e", asym, dump)};
  });

  report(8, "resolvent residuals", [] {
    ResolventResiduals worst;
    for (int i = 0; i < 3; ++i) {
      const auto p = validate(problem_spec(i));
      const auto sp = find_eigenvalues(p, 6);
      for (double l : {0.5 * (sp[0].lambda + sp[1].lambda), 0.5 * (sp[4].lambda + sp[5].lambda)}) {
        for (int k = 0; k < 2; ++k) {
          const ResolventInput<double> in{[k](double, Piece) { return k == 0 ? 1.0 : 0.0; }, k == 0 ? 0.0 : 1.0};
          const auto r = resolvent_apply<double>(p, l, in).residuals;
          worst.ode = std::max(worst.ode, r.ode);
          worst.bc_a = std::max(worst.bc_a, r.bc_a);
          worst.bc_lambda = std::max(worst.bc_lambda, r.bc_lambda);
          worst.transmission = std::max(worst.transmission, r.transmission);
        }
      }
    }
    const bool ok = worst.ode <= 1e-6 && worst.bc_a <= 1e-8 && worst.bc_lambda <= 1e-8 && worst.transmission <= 1e-8;
    return Outcome{ok, fmt("ode=%.2e bc_a=%.2e bc_lambda=%.2e transmission=%.2e", worst.ode, worst.bc_a,
                           worst.bc_lambda, worst.transmission)};
  });

  report(9, "phi-kernel sampling reconstruction", [] { return sampling_criterion(KernelKind::Phi); });

  report(10, "Green-kernel sampling reconstruction and removable poles", [] {
    Outcome o = sampling_criterion(KernelKind::Green);
    const auto p = validate(test::reference_spec());
    const auto& sp = reference_spectrum_240();
    double worst = 0.0;
    bool finite = true;
    for (const auto& g : {g_one(), g_bump_mid(p)}) {
      const auto spec = transform(p, KernelKind::Green, g);
      const Piece py = p.locate(spec.y0);
      for (std::size_t n = 0; n < 20; ++n) {
        const double ln = sp[n].lambda;
        const double at = transform_direct<double>(p, spec, ln);
        finite = finite && std::isfinite(at);
        auto approach = [&](double l) {
          const GreenFunction<double> G(p, l);
          return G.omega() * integrate_piecewise(
                                 p, [&](double x, Piece pc) { return spec.g(x, pc) * G(x, pc, spec.y0, py); },
                                 1e-12, {1.0, 1.0, 1.0}, 64);
        };
        const double h = 1e-6;
        const double avg = 0.5 * (approach(ln - h) + approach(ln + h));
        worst = std::max(worst, std::abs(avg - at) / std::abs(at));
      }
    }
    o.pass = o.pass && finite && worst <= 1e-4;
    o.detail += fmt("; pole limit vs approach max rel %.2e", worst);
    return o;
  });

  report(11, "epsilon sweep invariance and continuity", [] {
    ScanOptions scan;
    scan.characterize = false;
    auto sweep = [&](const ProblemSpec& base, int steps, double lo, double hi) {
      std::vector<std::vector<double>> out;
      for (int i = 0; i < steps; ++i) {
        ProblemSpec s = base;
        s.epsilon = lo + (hi - lo) * i / (steps - 1);
        out.push_back(find_eigenvalues(validate(s), 10, scan).eigenvalues());
      }
      return out;
    };
    auto max_jump = [](const std::vector<std::vector<double>>& rows) {
      double j = 0.0;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        for (std::size_t n = 0; n < rows[i].size(); ++n) j = std::max(j, std::abs(rows[i][n] - rows[i - 1][n]));
      }
      return j;
    };
    const double flat = max_jump(sweep(test::reference_spec(), 13, 0.2, 1.4));
    const auto coarse = sweep(test::stepped_spec(), 13, 0.2, 1.4);
    const auto fine = sweep(test::stepped_spec(), 25, 0.2, 1.4);
    double variation = 0.0;
    for (std::size_t n = 0; n < 10; ++n) variation = std::max(variation, std::abs(coarse.back()[n] - coarse.front()[n]));
    const double jh = max_jump(coarse);
    const double jh2 = max_jump(fine);
    const bool ok = flat <= 1e-9 && variation > 1e-3 && jh2 <= 0.6 * jh;
    return Outcome{ok, fmt("delta=gamma=1 max jump %.2e; stepped variation %.3f, J(h)=%.3e J(h/2)=%.3e", flat,
                           variation, jh, jh2)};
  });

  report(12, "series interpolates the samples", [] {
    const auto p = validate(test::reference_spec());
    const auto& sp = reference_spectrum_240();
    const int N = 60;
    const auto model = omega_model_wronskian(p, sp, N);
    std::size_t mismatches = 0;
    for (auto k : {KernelKind::Phi, KernelKind::Green}) {
      for (const auto& g : {g_one(), g_bump_mid(p)}) {
        const auto samples = sample_at_spectrum(p, transform(p, k, g), sp, N);
        for (std::size_t n = 0; n < static_cast<std::size_t>(N); ++n) {
          const cplx v = reconstruct(samples, model, sp[n].lambda).value;
          if (v.real() != samples.values[n] || v.imag() != 0.0) ++mismatches;
        }
      }
    }
    return Outcome{mismatches == 0, fmt("%.0f of 240 samples not reproduced exactly", double(mismatches))};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
