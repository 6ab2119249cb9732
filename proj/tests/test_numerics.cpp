#include <gtest/gtest.h>

#include <cmath>

#include "slms/numerics.hpp"
#include "slms/spectrum.hpp"
#include "support.hpp"

using namespace slms;
using slms::test::kPi;

TEST(IntegratePiecewise, ConstantCosineAndSteps) {
  const auto p = validate(test::reference_spec());
  EXPECT_NEAR(integrate_piecewise(p, [](double, Piece) { return 1.0; }), kPi, 1e-14);
  EXPECT_NEAR(integrate_piecewise(p, [](double x, Piece) { return std::cos(x); }), 0.0, 1e-13);
  auto step = [](double, Piece pc) { return 1.0 + static_cast<double>(index(pc)); };
  EXPECT_NEAR(integrate_piecewise(p, step), 2 * kPi, 1e-13);
}

TEST(IntegratePiecewise, NeverSamplesInterfaces) {
  const auto p = validate(test::reference_spec());
  const auto& g = p.geometry();
  integrate_piecewise(p, [&](double x, Piece) {
    EXPECT_NE(x, g.theta_minus);
    EXPECT_NE(x, g.theta_plus);
    EXPECT_NE(x, g.a);
    EXPECT_NE(x, g.b);
    return x;
  });
}

TEST(IntegratePiecewise, ExactForPolynomialsAndAdditive) {
  const auto p = validate(test::stepped_spec());
  auto poly = [](double x, Piece) { return 3 * std::pow(x, 7) - x * x + 2; };
  const double b = kPi;
  const double exact = 3 * std::pow(b, 8) / 8 - b * b * b / 3 + 2 * b;
  EXPECT_NEAR(integrate_piecewise(p, poly), exact, 1e-12 * exact);
  double sum = 0.0;
  for (Piece pc : kPieces) {
    sum += integrate_piecewise(p, [&](double x, Piece q) { return q == pc ? poly(x, q) : 0.0; });
  }
  EXPECT_NEAR(sum, exact, 1e-12 * exact);
}

TEST(IntegrateInterval, ReportsFailureWhenToleranceUnreachable) {
  QuadOptions o;
  o.rel_tol = 1e-14;
  o.max_depth = 2;
  const auto r = integrate_interval([](double x) { return std::sqrt(x); }, 0.0, 1.0, o);
  EXPECT_FALSE(r.converged);
  const auto p = validate(test::reference_spec());
  try {
    integrate_piecewise(p, [](double x, Piece) { return 1.0 / std::sqrt(x); }, 1e-15);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ToleranceNotReached);
  }
}

TEST(InnerProductH, WeightedPiecesAndScalarPart) {
  auto s = test::reference_spec();
  s.delta = 2.0;
  const auto p = validate(s);
  const HVector<double> one{[](double, Piece) { return 1.0; }, 0.0};
  EXPECT_NEAR(inner_product_H(p, one, one), 5 * kPi / 2, 1e-13);
  const HVector<double> h{[](double, Piece) { return 0.0; }, 1.0};
  EXPECT_NEAR(inner_product_H(p, h, h), 1.0, 1e-15);
}

TEST(InnerProductH, ConjugateSymmetricAndPositive) {
  const auto p = validate(test::stepped_spec());
  const HVector<cplx> u{[](double x, Piece) { return cplx(std::cos(x), x); }, cplx(0.5, -1.0)};
  const HVector<cplx> v{[](double x, Piece) { return cplx(x * x, std::sin(3 * x)); }, cplx(2.0, 0.25)};
  const cplx uv = inner_product_H(p, u, v);
  const cplx vu = inner_product_H(p, v, u);
  EXPECT_NEAR(std::abs(uv - std::conj(vu)), 0.0, 1e-12);
  EXPECT_GT(inner_product_H(p, u, u).real(), 0.0);
  EXPECT_NEAR(inner_product_H(p, u, u).imag(), 0.0, 1e-13);
}

TEST(InnerProductH, ReferenceEigenvectorsAreOrthogonal) {
  // Phi_n = (cos(s x), R'(phi)) with the first two zeros of the closed-form omega.
  const auto p = validate(test::reference_spec());
  const auto roots = test::brute_force_roots(test::reference_omega, -5.0, 5.0, 200000, 2);
  ASSERT_EQ(roots.size(), 2u);
  auto make = [](double l) {
    if (l < 0.0) {
      const double m = std::sqrt(-l);
      return HVector<double>{[m](double x, Piece) { return std::cosh(m * x); }, m * std::sinh(m * kPi)};
    }
    const double s = std::sqrt(l);
    return HVector<double>{[s](double x, Piece) { return std::cos(s * x); }, -s * std::sin(s * kPi)};
  };
  EXPECT_NEAR(inner_product_H(p, make(roots[0]), make(roots[1])), 0.0, 1e-6);
}

TEST(RefineRoot, ElementaryFunctions) {
  EXPECT_NEAR(refine_root([](double x) { return std::cos(x); }, 1.0, 2.0, 1e-15).root, kPi / 2, 1e-15);
  EXPECT_NEAR(refine_root([](double x) { return x * x * x - 2; }, 1.0, 2.0, 1e-15).root, std::cbrt(2.0), 1e-15);
}

TEST(RefineRoot, RequiresSignChange) {
  try {
    refine_root([](double x) { return x * x + 1; }, -1.0, 1.0, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSignChange);
  }
}

TEST(RefineRoot, MaxIterations) {
  try {
    refine_root([](double x) { return std::exp(x) - 1.3; }, 0.0, 1.0, 0.0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
  }
}

TEST(RefineRoot, FindsFirstReferenceEigenvalueFromClosedForm) {
  const auto oracle = test::brute_force_roots(test::reference_omega, -5.0, 5.0, 1000000, 1);
  const auto r = refine_root(test::reference_omega, -2.0, -0.5, 1e-15);
  EXPECT_NEAR(r.root, oracle[0], 1e-12);
}

TEST(DerivativeOfAnalytic, Polynomials) {
  EXPECT_NEAR(derivative_of_analytic([](cplx z) { return z * z; }, 3.0), 6.0, 1e-14);
  EXPECT_NEAR(derivative_of_analytic([](cplx z) { return std::sin(z); }, 0.0), 1.0, 1e-15);
  auto quintic = [](cplx z) { return 2.0 * std::pow(z, 5) - 3.0 * z * z * z + z - 7.0; };
  for (double x : {-2.0, -0.3, 0.7, 4.0}) {
    const double exact = 10 * std::pow(x, 4) - 9 * x * x + 1;
    EXPECT_NEAR(derivative_of_analytic(quintic, x), exact, 1e-12 * std::abs(exact));
  }
}

TEST(DerivativeOfAnalytic, FallsBackToRealPath) {
  auto no_complex = [](cplx) -> cplx { throw Error(ErrorCode::IntegratorFailure, "no complex path"); };
  const double d = derivative_of_analytic(no_complex, 1.0, 1.0, [](double x) { return std::exp(x); });
  EXPECT_NEAR(d, std::exp(1.0), 1e-8);
}

TEST(DerivativeOfAnalytic, ReferenceOmegaDerivative) {
  const auto p = validate(test::reference_spec());
  for (double l : {-1.00247371770174, 0.218625337070169, 2.5, 40.0}) {
    const double exact = test::reference_omega_prime(l);
    EXPECT_NEAR(omega_derivative(p, l), exact, 1e-10 * std::max(1.0, std::abs(exact)));
  }
}
