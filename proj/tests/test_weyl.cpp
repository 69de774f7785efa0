#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lcqft/rng.hpp"
#include "lcqft/weyl.hpp"

using namespace lcqft;

namespace {

Spacetime2D plane() { return Spacetime2D::minkowski(1.0 / 16, 0.5, -1.0, 1.0, -3.0, 3.0); }
Spacetime2D cylinder() { return Spacetime2D::cylinder(4.0, 1.0 / 16, 0.5, -1.0, 1.0); }

TestFunction random_bump(const Spacetime2D& M, Rng& rng) {
  const double x0 = M.periodic() ? 2.0 : 0.0;
  return bump(M, {rng.uniform(-0.5, 0.5), x0 + rng.uniform(-1, 1)}, rng.uniform(0.2, 0.35), rng.uniform(0.2, 0.35),
              rng.sign() * rng.uniform(0.5, 2.0));
}

WeylElement random_element(const Spacetime2D& M, Rng& rng, int terms) {
  WeylElement a(M);
  for (int k = 0; k < terms; ++k)
    a = a + Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * generator(M, random_bump(M, rng));
  return a;
}

/// Label with Cauchy data phi = A cos(k x), pi = B cos(k x).
WeylLabel mode_label(const Spacetime2D& C, int wave, double A, double B) {
  CauchyData d;
  d.h = C.h();
  d.j_lo = 0;
  const double k = 2 * std::numbers::pi * wave / C.circumference();
  for (int j = 0; j < C.nx(); ++j) {
    d.phi.push_back(A * std::cos(k * j * C.h()));
    d.pi.push_back(B * std::cos(k * j * C.h()));
  }
  return WeylLabel::from_data(C, d);
}

}  // namespace

TEST(WeylLabel, ZeroFloorAndDistance) {
  const auto M = plane();
  const auto z = WeylLabel::zero(M);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(label_distance(z, z), 0.0);
  const auto l = WeylLabel::of(M, bump(M, {0, 0}, 0.3, 0.3, 1.0));
  EXPECT_FALSE(l.is_zero());
  EXPECT_NEAR(label_distance(l, l + l - l), 0.0, 1e-15);
  EXPECT_TRUE(same_label(l, l));
  EXPECT_FALSE(same_label(l, z));
  EXPECT_TRUE((l - l).is_zero());
}

TEST(WeylLabel, FromDataRejectsForeignData) {
  const auto M = plane();
  auto d = WeylLabel::zero(M).data();
  d.t0 = M.h();
  EXPECT_THROW(WeylLabel::from_data(M, d), Error);
  d = WeylLabel::zero(cylinder()).data();
  EXPECT_THROW(WeylLabel::from_data(M, d), Error);
}

TEST(WeylLabel, KgImagesHaveZeroLabel) {
  const auto M = plane();
  const auto g = bump(M, {0.1, 0.2}, 0.3, 0.3, 1.0);
  const auto& b = g.box();
  const double h = M.h(), m2 = M.mass() * M.mass();
  std::vector<double> s;
  for (int n = b.n0 - 1; n <= b.n1 + 1; ++n)
    for (int j = b.j0 - 1; j <= b.j1 + 1; ++j)
      s.push_back((g.at({n + 1, j}) + g.at({n - 1, j}) - g.at({n, j + 1}) - g.at({n, j - 1})) / (h * h) +
                  m2 * g.at({n, j}));
  const auto pg = TestFunction::from_samples(M, {b.n0 - 1, b.n1 + 1, b.j0 - 1, b.j1 + 1}, s);
  EXPECT_TRUE(WeylLabel::of(M, pg).is_zero());
  const auto f = bump(M, {-0.2, -0.5}, 0.3, 0.3, 1.0);
  EXPECT_LE(label_distance(WeylLabel::of(M, f), WeylLabel::of(M, f + pg)), kLabelEpsilon);
}

TEST(WeylElement, GeneratorOfZeroIsUnit) {
  const auto M = plane();
  EXPECT_EQ(coefficient_distance(generator(M, TestFunction::zero(M)), WeylElement::unit(M)), 0.0);
}

TEST(WeylElement, TermsMergeAndPrune) {
  const auto M = plane();
  const auto g = generator(M, bump(M, {0, 0}, 0.3, 0.3, 1.0));
  const auto sum = g + g;
  ASSERT_EQ(sum.size(), 1u);
  EXPECT_EQ(sum.terms().front().coeff, Complex(2.0));
  EXPECT_EQ((g - g).size(), 0u);
}

TEST(WeylElement, InverseAndUnitarity) {
  const auto M = plane();
  Rng rng(1, "inverse");
  for (int s = 0; s < 5; ++s) {
    const auto f = random_bump(M, rng);
    EXPECT_LE(coefficient_distance(multiply(generator(M, f), generator(M, -f)), WeylElement::unit(M)), 1e-15);
    const auto w = generator(M, f);
    EXPECT_LE(coefficient_distance(multiply(adjoint(w), w), WeylElement::unit(M)), 1e-15);
  }
}

TEST(WeylElement, SpacelikeGeneratorsCommute) {
  const auto M = plane();
  const auto a = generator(M, bump(M, {0.1, -1.2}, 0.3, 0.3, 1.0));
  const auto b = generator(M, bump(M, {-0.1, 1.2}, 0.3, 0.3, 1.0));
  EXPECT_LE(coefficient_distance(multiply(a, b), multiply(b, a)), 1e-10);
}

TEST(WeylElement, GroupCommutatorIsPhase) {
  const auto M = plane();
  const auto f = bump(M, {0.3, 0.0}, 0.3, 0.3, 1.0), g = bump(M, {-0.3, 0.2}, 0.3, 0.3, 1.5);
  const auto wf = generator(M, f), wg = generator(M, g);
  const auto c = multiply(multiply(wf, wg), multiply(adjoint(wf), adjoint(wg)));
  const double sigma = symplectic(M, f, g);
  ASSERT_GT(std::abs(sigma), 1e-3);
  EXPECT_LE(coefficient_distance(c, std::exp(Complex(0, -sigma)) * WeylElement::unit(M)), 1e-12);
}

TEST(WeylElement, AdjointLaws) {
  const auto M = plane();
  Rng rng(2, "adjoint");
  EXPECT_EQ(coefficient_distance(adjoint(WeylElement::unit(M)), WeylElement::unit(M)), 0.0);
  for (int s = 0; s < 5; ++s) {
    const auto a = random_element(M, rng, 3), b = random_element(M, rng, 3);
    EXPECT_LE(coefficient_distance(adjoint(adjoint(a)), a), 1e-15);
    EXPECT_LE(coefficient_distance(adjoint(multiply(a, b)), multiply(adjoint(b), adjoint(a))), 1e-12);
  }
}

TEST(WeylElement, Associativity) {
  const auto M = plane();
  Rng rng(3, "assoc");
  for (int s = 0; s < 5; ++s) {
    const auto a = random_element(M, rng, 2), b = random_element(M, rng, 2), c = random_element(M, rng, 2);
    EXPECT_LE(coefficient_distance(multiply(multiply(a, b), c), multiply(a, multiply(b, c))), 1e-12);
  }
}

TEST(WeylElement, AmbientMismatch) {
  try {
    multiply(WeylElement::unit(plane()), WeylElement::unit(cylinder()));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AmbientMismatch);
  }
}

TEST(QuasiFreeState, Availability) {
  auto kind = [](const Spacetime2D& M) {
    try {
      QuasiFreeState w(M);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind(plane()), ErrorKind::StateUnavailable);
  EXPECT_EQ(kind(Spacetime2D::cylinder(4.0, 1.0 / 16, 0.0, -1, 1)), ErrorKind::StateUnavailable);
}

TEST(QuasiFreeState, SingleModeClosedForm) {
  const auto C = cylinder();
  const QuasiFreeState w(C);
  for (int wave : {0, 1, 3, 7}) {
    const double k = 2 * std::numbers::pi * wave / C.circumference();
    const double om = std::sqrt(C.mass() * C.mass() + k * k);
    const double factor = wave == 0 ? 2.0 : 1.0;  // the zero mode is not split between +-k
    const double A = 0.7, B = 1.3;
    EXPECT_NEAR(w.mu(mode_label(C, wave, A, 0)), factor * om * A * A * C.circumference() / 4, 1e-12);
    EXPECT_NEAR(w.mu(mode_label(C, wave, 0, B)), factor * B * B * C.circumference() / (4 * om), 1e-12);
  }
}

TEST(QuasiFreeState, ExpectationValues) {
  const auto C = cylinder();
  const QuasiFreeState w(C);
  EXPECT_EQ(expectation(w, WeylElement::unit(C)), Complex(1.0));
  Rng rng(4, "state");
  for (int s = 0; s < 5; ++s) {
    const auto e = expectation(w, generator(C, random_bump(C, rng)));
    EXPECT_EQ(e.imag(), 0.0);
    EXPECT_GT(e.real(), 0.0);
    EXPECT_LE(e.real(), 1.0);
  }
}

TEST(QuasiFreeState, UncertaintyBound) {
  const auto C = cylinder();
  const QuasiFreeState w(C);
  Rng rng(5, "uncertainty");
  for (int s = 0; s < 10; ++s) {
    const auto a = WeylLabel::of(C, random_bump(C, rng)), b = WeylLabel::of(C, random_bump(C, rng));
    const double sg = symplectic(a, b);
    EXPECT_LE(sg * sg, 4 * w.mu(a) * w.mu(b) * (1 + 1e-12));
  }
}

TEST(QuasiFreeState, PositivityAgainstGramMatrix) {
  const auto C = cylinder();
  const QuasiFreeState w(C);
  Rng rng(6, "gram");
  for (int s = 0; s < 10; ++s) {
    std::vector<WeylLabel> l;
    std::vector<Complex> c;
    WeylElement a(C);
    for (int k = 0; k < 3; ++k) {
      l.push_back(WeylLabel::of(C, random_bump(C, rng)));
      c.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
      a = a + c.back() * WeylElement::single(l.back(), 1.0);
    }
    // omega(W(li)* W(lj)) = exp(-i sigma(-li, lj) / 2) exp(-mu(lj - li) / 2)
    Complex gram = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        gram += std::conj(c[i]) * c[j] * std::exp(Complex(0, 0.5 * symplectic(l[i], l[j]))) *
                std::exp(-0.5 * w.mu(l[j] - l[i]));
    const Complex got = expectation(w, multiply(adjoint(a), a));
    EXPECT_NEAR(got.real(), gram.real(), 1e-12);
    EXPECT_NEAR(got.imag(), gram.imag(), 1e-12);
    EXPECT_GE(got.real(), -1e-10);
  }
}
