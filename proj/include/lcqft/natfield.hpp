#pragma once

// The Weyl field as a natural transformation D -> A, and local S-matrices
// for linear sources.

#include <algorithm>
#include <complex>
#include <utility>

#include "error.hpp"
#include "functor.hpp"
#include "greens.hpp"
#include "report.hpp"
#include "spacetime.hpp"
#include "testfun.hpp"
#include "weyl.hpp"

namespace lcqft {

/// Phi_M(f) = W(label of E f), on every spacetime.
struct WeylField {
  WeylElement operator()(const Spacetime2D& M, const TestFunction& f) const { return generator(M, f); }
};

inline WeylElement field_apply(const WeylField& phi, const Spacetime2D& M, const TestFunction& f) {
  check_same_ambient(M, f);
  return phi(M, f);
}

/// alpha_psi(Phi_M1(f)) against Phi_M2(psi_* f).
template <class Sampler>
Report check_naturality(const WeylField& phi, const Embedding& psi, Sampler&& sample, int n_samples,
                        double tolerance = kLabelEpsilon) {
  Report r = make_report("naturality", tolerance,
                         {{"source", psi.source().id()},
                          {"target", psi.target().id()},
                          {"map", {psi.map().a0, psi.map().a1, psi.map().rapidity}}});
  const auto a = alpha(psi);
  for (int s = 0; s < n_samples; ++s) {
    const TestFunction f = sample();
    const WeylElement lhs = a(field_apply(phi, psi.source(), f));
    const WeylElement rhs = field_apply(phi, psi.target(), pushforward(psi, f));
    r.observe(element_distance(lhs, rhs));
  }
  return r.finish();
}

/// S(lambda) = exp(i gamma) W(label of E lambda), gamma = 1/2 <lambda, D lambda>, D = (R + A) / 2.
struct LocalSMatrix {
  TestFunction lambda;
  double gamma = 0.0;
  WeylElement value;
};

/// 1/2 <lambda, (R + A) lambda / 2>.
inline double smatrix_phase(const Spacetime2D& M, const TestFunction& lambda) {
  if (lambda.box().empty()) return 0.0;
  const GridSolution r = retarded(M, lambda), a = advanced(M, lambda);
  return 0.25 * (pairing(lambda, r) + pairing(lambda, a));
}

inline LocalSMatrix s_matrix(const Spacetime2D& M, const TestFunction& lambda) {
  check_same_ambient(M, lambda);
  const double gamma = smatrix_phase(M, lambda);
  return LocalSMatrix{lambda, gamma,
                      WeylElement::single(WeylLabel::of(M, lambda), std::exp(Complex(0.0, gamma)))};
}

/// S(mu)^-1 S(mu + lambda).
inline WeylElement relative_s_matrix(const Spacetime2D& M, const TestFunction& mu, const TestFunction& lambda) {
  return multiply(adjoint(s_matrix(M, mu).value), s_matrix(M, mu + lambda).value);
}

/// Throws SupportsNotSeparated unless some grid row lies strictly between
/// supp nu (below) and supp lambda (above).
inline void require_cauchy_separated(const TestFunction& lambda, const TestFunction& nu) {
  const auto rl = lambda.support_rows(), rn = nu.support_rows();
  if (!rl || !rn) return;
  if (rl->first - rn->second < 2)
    throw Error(ErrorKind::SupportsNotSeparated, "no Cauchy surface separates the supports");
}

/// S(l + m + n) = S(l + m) S(m)^-1 S(m + n) for l in the future of n.
inline double factorization_deviation(const Spacetime2D& M, const TestFunction& lambda, const TestFunction& mu,
                                      const TestFunction& nu) {
  require_cauchy_separated(lambda, nu);
  const WeylElement lhs = s_matrix(M, lambda + mu + nu).value;
  const WeylElement rhs = multiply(multiply(s_matrix(M, lambda + mu).value, adjoint(s_matrix(M, mu).value)),
                                   s_matrix(M, mu + nu).value);
  return coefficient_distance(lhs, rhs);
}

/// S_mu(l + n) = S_mu(l) S_mu(n) for l in the future of n.
inline double relative_factorization_deviation(const Spacetime2D& M, const TestFunction& mu,
                                               const TestFunction& lambda, const TestFunction& nu) {
  require_cauchy_separated(lambda, nu);
  const WeylElement lhs = relative_s_matrix(M, mu, lambda + nu);
  const WeylElement rhs = multiply(relative_s_matrix(M, mu, lambda), relative_s_matrix(M, mu, nu));
  return coefficient_distance(lhs, rhs);
}

/// S(0) = 1 and S(l)* S(l) = 1 (coefficient level).
inline double unitarity_deviation(const Spacetime2D& M, const TestFunction& lambda) {
  const WeylElement s = s_matrix(M, lambda).value;
  return coefficient_distance(multiply(adjoint(s), s), WeylElement::unit(M));
}

/// alpha_psi(S_M1(lambda)) against S_M2(psi_* lambda); labels and phases.
inline double smatrix_covariance_deviation(const Embedding& psi, const TestFunction& lambda) {
  const LocalSMatrix s1 = s_matrix(psi.source(), lambda);
  const LocalSMatrix s2 = s_matrix(psi.target(), pushforward(psi, lambda));
  const WeylElement moved = alpha(psi)(s1.value);
  if (moved.size() != 1 || s2.value.size() != 1) return moved.size() == s2.value.size() ? 0.0 : 1.0;
  return std::max(label_distance(moved.terms().front().label, s2.value.terms().front().label),
                  std::abs(moved.terms().front().coeff - s2.value.terms().front().coeff));
}

}  // namespace lcqft
