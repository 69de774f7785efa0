#pragma once

// Tomita-Takesaki theory for M_n (x) 1 acting on C^n (x) C^n.
//
// Vectors of C^{n^2} are identified with n x n matrices, |i>(x)|j> <-> E_ij,
// so (a (x) 1) xi <-> a X and (1 (x) b) xi <-> X b^T. The standard vector of a
// density matrix rho is Omega <-> sqrt(rho) = sum_k sqrt(p_k) e_k (x) conj(e_k).
// With this convention Delta = rho (x) conj(rho)^-1 and J is conjugation
// composed with the swap of the two factors.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "error.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace lcqft {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace detail {

inline CVector vec(const CMatrix& X) {
  const auto n = X.rows();
  CVector v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = X(i, j);
  return v;
}

inline CMatrix unvec(const CVector& v, Eigen::Index n) {
  CMatrix X(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = v(i * n + j);
  return X;
}

inline int numerical_rank(const CMatrix& W) {
  Eigen::JacobiSVD<CMatrix> svd(W);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > 1e-10 * std::max(1.0, s(0))) ++r;
  return r;
}

/// f(H) for a Hermitian matrix via its eigen-decomposition.
template <class F>
CMatrix hermitian_function(const CMatrix& H, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const auto& V = es.eigenvectors();
  CVector d(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = f(es.eigenvalues()(k));
  return V * d.asDiagonal() * V.adjoint();
}

}  // namespace detail

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// a (x) 1 on C^n (x) C^n.
inline CMatrix left(const CMatrix& a) { return kron(a, CMatrix::Identity(a.rows(), a.cols())); }

struct StandardnessResult {
  bool cyclic = false;
  bool separating = false;
};

/// Omega is cyclic and separating for M_n (x) 1 iff its n x n reshape has rank n.
inline StandardnessResult check_standard(int n, const CVector& omega) {
  if (n < 1 || omega.size() != static_cast<Eigen::Index>(n) * n)
    throw Error(ErrorKind::DimensionMismatch, "vector dimension is not n^2");
  const bool full = detail::numerical_rank(detail::unvec(omega, n)) == n;
  return {full, full};
}

/// M_n (x) 1 with a cyclic and separating unit vector.
class StandardPair {
 public:
  static StandardPair from_density(const CMatrix& rho) {
    const auto n = rho.rows();
    if (n < 1 || rho.cols() != n) throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
    if ((rho - rho.adjoint()).norm() > 1e-12) throw Error(ErrorKind::NotStandard, "density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    if (es.eigenvalues().minCoeff() <= 1e-12) throw Error(ErrorKind::NotStandard, "density matrix is not full rank");
    const double tr = rho.trace().real();
    const CMatrix root = detail::hermitian_function(rho / tr, [](double x) { return std::sqrt(x); });
    return StandardPair(static_cast<int>(n), detail::vec(root));
  }

  static StandardPair from_vector(int n, CVector omega) {
    const auto s = check_standard(n, omega);
    if (!s.cyclic || !s.separating) throw Error(ErrorKind::NotStandard, "vector is not cyclic and separating");
    omega /= omega.norm();
    return StandardPair(n, std::move(omega));
  }

  int n() const { return n_; }
  const CVector& omega() const { return omega_; }

  /// The state omega(A) = <Omega, A Omega> on operators of C^{n^2}.
  Cplx state(const CMatrix& A) const { return omega_.dot(A * omega_); }

  /// The density matrix of the state restricted to M_n (x) 1.
  CMatrix density() const {
    const CMatrix W = detail::unvec(omega_, n_);
    return W * W.adjoint();
  }

 private:
  StandardPair(int n, CVector omega) : n_(n), omega_(std::move(omega)) {}

  int n_;
  CVector omega_;
};

/// An antilinear operator xi -> U conj(xi).
struct Antiunitary {
  CMatrix U;

  CVector operator()(const CVector& xi) const { return U * xi.conjugate(); }
  /// J A J as a linear operator.
  CMatrix conjugate(const CMatrix& A) const { return U * A.conjugate() * U.conjugate(); }
};

struct ModularData {
  CMatrix M;      // S xi = M conj(xi)
  CMatrix Delta;  // S* S
  Antiunitary J;  // S Delta^{-1/2}
};

/// Solves S (a (x) 1) Omega = (a* (x) 1) Omega on the matrix-unit basis and
/// returns the polar decomposition S = J Delta^{1/2}.
inline ModularData tomita_operators(const StandardPair& pair) {
  const int n = pair.n();
  const auto N = static_cast<Eigen::Index>(n) * n;
  const CMatrix W = detail::unvec(pair.omega(), n);
  CMatrix X(N, N), Y(N, N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CMatrix e = CMatrix::Zero(n, n);
      e(i, j) = 1.0;
      X.col(i * n + j) = detail::vec(e * W);
      Y.col(i * n + j) = detail::vec(e.adjoint() * W);
    }
  // S X c = Y conj(c)  =>  S xi = Y conj(X)^-1 conj(xi).
  Eigen::FullPivLU<CMatrix> lu(X.conjugate());
  if (lu.rank() < N) throw Error(ErrorKind::NotStandard, "Omega is not cyclic");
  ModularData d;
  d.M = Y * lu.inverse();
  d.Delta = d.M.transpose() * d.M.conjugate();
  d.Delta = 0.5 * (d.Delta + d.Delta.adjoint());
  const CMatrix inv_root = detail::hermitian_function(d.Delta, [](double x) { return 1.0 / std::sqrt(x); });
  d.J.U = d.M * inv_root.conjugate();
  return d;
}

/// Delta^{iz} for complex z (Delta^{1 + it} etc.).
inline CMatrix modular_power(const ModularData& d, Cplx z) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d.Delta);
  const auto& V = es.eigenvectors();
  CVector p(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = std::exp(Cplx(0.0, 1.0) * z * std::log(es.eigenvalues()(k)));
  return V * p.asDiagonal() * V.adjoint();
}

/// sigma_z(A) = Delta^{iz} A Delta^{-iz}.
inline CMatrix modular_flow(const ModularData& d, const CMatrix& A, Cplx z) {
  return modular_power(d, z) * A * modular_power(d, -z);
}

/// Frobenius distance of an operator on C^n (x) C^n to 1 (x) M_n.
inline double distance_to_right(const CMatrix& B, int n) {
  CMatrix b = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) b += B.block(i * n, i * n, n, n);
  b /= static_cast<double>(n);
  return (B - kron(CMatrix::Identity(n, n), b)).norm();
}

/// Frobenius distance of an operator on C^n (x) C^n to M_n (x) 1.
inline double distance_to_left(const CMatrix& B, int n) {
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = B.block(i * n, j * n, n, n).trace() / static_cast<double>(n);
  return (B - left(a)).norm();
}

inline CMatrix random_matrix(int n, Rng& rng) {
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Cplx(rng.gaussian(), rng.gaussian());
  return a;
}

/// rho = U diag(p) U* with U Haar-random and p proportional to u_k + 0.1, u_k uniform.
inline CMatrix random_density(int n, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, rng));
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) Q.col(k) *= std::polar(1.0, std::arg(R(k, k)));
  Eigen::VectorXd p(n);
  for (int k = 0; k < n; ++k) p(k) = rng.uniform() + 0.1;
  p /= p.sum();
  return Q * p.cast<Cplx>().asDiagonal() * Q.adjoint();
}

/// J^2 = 1, J Omega = Omega, Delta Omega = Omega, J Delta J = Delta^-1, J S = Delta^{1/2}.
inline double modular_identity_deviation(const StandardPair& pair, const ModularData& d) {
  const auto N = d.Delta.rows();
  const CMatrix I = CMatrix::Identity(N, N);
  const CVector& w = pair.omega();
  double dev = (d.J.U * d.J.U.conjugate() - I).norm();
  dev = std::max(dev, (d.J(w) - w).norm());
  dev = std::max(dev, (d.Delta * w - w).norm());
  const CMatrix inv = detail::hermitian_function(d.Delta, [](double x) { return 1.0 / x; });
  dev = std::max(dev, (d.J.conjugate(d.Delta) - inv).norm() / inv.norm());
  const CMatrix root = detail::hermitian_function(d.Delta, [](double x) { return std::sqrt(x); });
  // J S xi = U conj(M conj(xi)) = U conj(M) xi.
  dev = std::max(dev, (d.J.U * d.M.conjugate() - root).norm() / root.norm());
  return dev;
}

/// J (a (x) 1) J commutes with M_n (x) 1 and lies in 1 (x) M_n.
inline Report check_commutant(const StandardPair& pair, const ModularData& d, Rng& rng, int n_samples,
                              double tolerance = 1e-12) {
  Report r = make_report("commutant", tolerance, {{"n", pair.n()}});
  const int n = pair.n();
  for (int s = 0; s < n_samples; ++s) {
    const CMatrix a = random_matrix(n, rng), b = random_matrix(n, rng);
    const CMatrix B = d.J.conjugate(left(a));
    const CMatrix bb = left(b);
    r.observe((B * bb - bb * B).norm());
    r.observe(distance_to_right(B, n));
  }
  return r.finish();
}

/// sigma_t(a (x) 1) stays in M_n (x) 1.
inline Report check_flow_invariance(const StandardPair& pair, const ModularData& d, Rng& rng, int n_samples,
                                    const std::vector<double>& times, double tolerance = 1e-12) {
  Report r = make_report("flow_invariance", tolerance, {{"n", pair.n()}, {"times", times}});
  const int n = pair.n();
  for (int s = 0; s < n_samples; ++s) {
    const CMatrix a = random_matrix(n, rng);
    for (double t : times) r.observe(distance_to_left(modular_flow(d, left(a), t), n));
  }
  return r.finish();
}

/// KMS at beta = 1 for sigma_t = Ad Delta^{it}: omega(a sigma_{t-i}(b)) = omega(sigma_t(b) a).
inline Report check_kms(const StandardPair& pair, const ModularData& d, Rng& rng, int n_samples,
                        const std::vector<double>& times, double tolerance = 1e-11) {
  Report r = make_report("kms", tolerance, {{"n", pair.n()}, {"times", times}});
  const int n = pair.n();
  for (int s = 0; s < n_samples; ++s) {
    const CMatrix a = left(random_matrix(n, rng)), b = left(random_matrix(n, rng));
    for (double t : times) {
      const Cplx lhs = pair.state(a * modular_flow(d, b, Cplx(t, -1.0)));
      const Cplx rhs = pair.state(modular_flow(d, b, t) * a);
      r.observe(std::abs(lhs - rhs));
    }
  }
  return r.finish();
}

/// Eigenvalues of Delta in ascending order.
inline std::vector<double> modular_spectrum(const ModularData& d) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d.Delta, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace lcqft
