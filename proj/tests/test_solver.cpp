#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slms/solver.hpp"
#include "support.hpp"

using namespace slms;
using slms::test::kPi;

namespace {

ShootOptions dense() {
  ShootOptions o;
  o.ode.dense = true;
  return o;
}

}  // namespace

TEST(ShootPhi, InitialDataAreExact) {
  for (const auto& s : {test::reference_spec(), test::stepped_spec(), test::tabulated_spec()}) {
    const auto p = validate(s);
    const auto phi = shoot_phi<double>(p, 3.7);
    EXPECT_EQ(phi.start(Piece::Left)[0], s.beta2);
    EXPECT_EQ(phi.start(Piece::Left)[1], -s.beta1);
  }
}

TEST(ShootPhi, CosineForUnitLambda) {
  const auto p = validate(test::reference_spec());
  const auto phi = shoot_phi<double>(p, 1.0, dense());
  for (const auto& smp : phi.grid(40)) {
    EXPECT_NEAR(smp.u, std::cos(smp.x), 1e-11);
    EXPECT_NEAR(smp.du, -std::sin(smp.x), 1e-11);
  }
}

TEST(ShootPhi, ConstantsWithJumpsAtZeroLambda) {
  auto s = test::reference_spec();
  s.delta = 2.0;
  s.gamma = 3.0;
  const auto phi = shoot_phi<double>(validate(s), 0.0, dense());
  const double expect[3] = {1.0, 0.5, 1.0 / 3.0};
  for (const auto& smp : phi.grid(10)) {
    EXPECT_NEAR(smp.u, expect[index(smp.piece)], 1e-15);
    EXPECT_NEAR(smp.du, 0.0, 1e-15);
  }
}

TEST(ShootPhi, LeadingAsymptoticTermIsExactForZeroPotential) {
  auto s = test::reference_spec();
  s.delta = 2.0;
  s.gamma = 3.0;
  const auto p = validate(s);
  const double lambda = 1e4;
  const double root = std::sqrt(lambda);
  const auto phi = shoot_phi<double>(p, lambda, dense());
  const double scale[3] = {1.0, 1.0 / s.delta, 1.0 / s.gamma};
  for (const auto& smp : phi.grid(64)) {
    EXPECT_NEAR(smp.u, s.beta2 * scale[index(smp.piece)] * std::cos(root * (smp.x - s.a)), 1e-8);
  }
}

TEST(ShootChi, TerminalDataAreExact) {
  const auto s = test::tabulated_spec();
  const double lambda = -2.25;
  const auto chi = shoot_chi<double>(validate(s), lambda);
  EXPECT_EQ(chi.finish(Piece::Right)[0], lambda * s.alpha2p + s.alpha2);
  EXPECT_EQ(chi.finish(Piece::Right)[1], lambda * s.alpha1p + s.alpha1);
}

TEST(ShootChi, LinearAtZeroLambda) {
  const auto chi = shoot_chi<double>(validate(test::reference_spec()), 0.0, dense());
  for (const auto& smp : chi.grid(10)) {
    EXPECT_NEAR(smp.u, smp.x - kPi, 1e-14);
    EXPECT_NEAR(smp.du, 1.0, 1e-14);
  }
}

TEST(Shoot, TransmissionConditionsHoldForBothSolutions) {
  for (const auto& s : {test::stepped_spec(), test::tabulated_spec()}) {
    const auto p = validate(s);
    for (double lambda : {-3.0, 0.5, 47.0}) {
      for (const auto& sol : {shoot_phi<double>(p, lambda), shoot_chi<double>(p, lambda)}) {
        for (int k = 0; k < 2; ++k) {
          const double lm = sol.finish(Piece::Left)[k];
          const double mp = sol.start(Piece::Mid)[k];
          const double mm = sol.finish(Piece::Mid)[k];
          const double rp = sol.start(Piece::Right)[k];
          EXPECT_NEAR(lm - s.delta * mp, 0.0, 1e-12 * std::max(1.0, std::abs(lm)));
          EXPECT_NEAR(s.delta * mm - s.gamma * rp, 0.0, 1e-12 * std::max(1.0, std::abs(mm)));
        }
      }
    }
  }
}

TEST(BoundaryForms, ExamplesAndChiIdentity) {
  const auto p = validate(test::reference_spec());
  auto bf = boundary_forms<double>(p, 1.0, 0.0);
  EXPECT_EQ(bf.R, 1.0);
  EXPECT_EQ(bf.Rp, 0.0);
  bf = boundary_forms<double>(p, 0.0, 1.0);
  EXPECT_EQ(bf.R, 0.0);
  EXPECT_EQ(bf.Rp, 1.0);
  const auto q = validate(test::tabulated_spec());
  for (double lambda : {-4.0, 0.0, 3.3, 120.0}) {
    const auto f = boundary_forms(q, shoot_chi<double>(q, lambda));
    EXPECT_NEAR(lambda * f.Rp + f.R, 0.0, 1e-13 * std::max(1.0, std::abs(lambda)));
  }
}

TEST(Omega, MatchesClosedFormOnReferenceProblem) {
  const auto p = validate(test::reference_spec());
  EXPECT_NEAR(omega<double>(p, 0.0), 1.0, 1e-15);
  for (double lambda : {-3.0, -1.0, 0.5, 4.0, 37.5, 400.0, 2500.0}) {
    const double env = omega_envelope(p, lambda);
    // Phase error of the integrator grows like sqrt(lambda) times the interval length.
    const double tol = 1e-12 * std::max(1.0, std::sqrt(std::abs(lambda))) * kPi;
    EXPECT_NEAR(omega<double>(p, lambda) / env, test::reference_omega(lambda) / env, tol) << lambda;
  }
}

TEST(Omega, ConjugateSymmetricAndRealOnAxis) {
  const auto p = validate(test::stepped_spec());
  const cplx z(7.5, 2.0);
  const cplx a = omega<cplx>(p, z);
  const cplx b = omega<cplx>(p, std::conj(z));
  EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-10 * std::abs(a));
  const cplx r = omega<cplx>(p, cplx(7.5, 0.0));
  EXPECT_EQ(r.imag(), 0.0);
  EXPECT_NEAR(r.real(), omega<double>(p, 7.5), 1e-12 * std::abs(r));
}

TEST(Omega, WronskianIsPiecewiseConstantAndScalesWithTransmission) {
  for (const auto& s : {test::stepped_spec(), test::tabulated_spec()}) {
    const auto p = validate(s);
    for (double lambda : {-2.0, 1.5, 90.0}) {
      const auto phi = shoot_phi<double>(p, lambda, dense());
      const auto chi = shoot_chi<double>(p, lambda, dense());
      const double w = omega<double>(p, lambda);
      const double target[3] = {w, w / (s.delta * s.delta), w / (s.gamma * s.gamma)};
      for (Piece pc : kPieces) {
        for (double x : ShotSolution<double>::piece_grid(p.geometry(), pc, 10)) {
          EXPECT_NEAR(wronskian(phi, chi, x, pc), target[index(pc)], 1e-9 * std::abs(target[index(pc)]));
        }
      }
    }
  }
}

TEST(OmegaScaled, SignAndBoundedness) {
  const auto p = validate(test::reference_spec());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const double l = dist(rng);
    const double w = omega<double>(p, l);
    const double ws = omega_scaled(p, l);
    EXPECT_EQ(std::signbit(w), std::signbit(ws));
  }
  for (double l = 1.0; l <= 1e4; l *= 1.37) EXPECT_LE(std::abs(omega_scaled(p, l)), 10.0);
}

TEST(OmegaScaled, EnvelopeSelection) {
  auto s = test::reference_spec();
  EXPECT_EQ(growth_case(validate(s)), GrowthCase::ThreeHalves);
  s.alpha2p = 0.0;
  s.alpha1p = 1.0;
  s.alpha2 = 1.0;
  s.alpha1 = 0.0;
  EXPECT_EQ(growth_case(validate(s)), GrowthCase::OneBeta2);
  s.beta2 = 0.0;
  s.beta1 = 1.0;
  EXPECT_EQ(growth_case(validate(s)), GrowthCase::OneHalf);
  s = test::reference_spec();
  s.beta2 = 0.0;
  s.beta1 = 1.0;
  EXPECT_EQ(growth_case(validate(s)), GrowthCase::OneBeta1);
  EXPECT_EQ(growth_exponent(GrowthCase::ThreeHalves), 1.5);
  EXPECT_EQ(growth_exponent(GrowthCase::OneHalf), 0.5);
}

TEST(Volterra, ZeroPotentialLeavesOnlyQuadratureNoise) {
  const auto p = validate(test::reference_spec());
  EXPECT_LE(volterra_residual(p, shoot_phi<double>(p, 6.25, dense())), 1e-10);
}

TEST(Volterra, ConstantPotential) {
  auto s = test::reference_spec();
  s.potential = PerPieceConstant{1.0, 1.0, 1.0};
  const auto p = validate(s);
  EXPECT_LE(volterra_residual(p, shoot_phi<double>(p, 4.0, dense())), 1e-8);
  const auto q = validate(test::stepped_spec());
  EXPECT_LE(volterra_residual(q, shoot_phi<double>(q, 30.0, dense())), 1e-8);
}

TEST(Volterra, DetectsMisappliedJump) {
  auto s = test::stepped_spec();
  const auto p = validate(s);
  s.delta *= 2.0;
  const auto wrong = shoot_phi<double>(validate(s), 4.0, dense());
  EXPECT_GT(volterra_residual(p, wrong), 1e-3);
}

TEST(Volterra, RejectsChiAndNonPositiveLambda) {
  const auto p = validate(test::reference_spec());
  EXPECT_THROW(volterra_residual(p, shoot_chi<double>(p, 4.0, dense())), Error);
  EXPECT_THROW(volterra_residual(p, shoot_phi<double>(p, -1.0, dense())), Error);
}

TEST(ShotSolution, InterfaceEvaluationAndErrors) {
  const auto p = validate(test::stepped_spec());
  const auto phi = shoot_phi<double>(p, 2.0, dense());
  const double tm = p.geometry().theta_minus;
  EXPECT_EQ(phi.value(tm, Piece::Left), phi.finish(Piece::Left)[0]);
  EXPECT_EQ(phi.value(tm, Piece::Mid), phi.start(Piece::Mid)[0]);
  EXPECT_THROW(phi.value(0.1, Piece::Right), Error);
  ShootOptions o;
  o.ode.dense = false;
  const auto sparse = shoot_phi<double>(p, 2.0, o);
  EXPECT_THROW(sparse.value(0.1, Piece::Left), Error);
  EXPECT_EQ(phi.grid(7).size(), 21u);
}
