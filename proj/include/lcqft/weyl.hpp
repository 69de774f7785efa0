#pragma once

// Weyl *-algebra over lattice Klein-Gordon solutions, labelled by Cauchy data
// on the reference surface t = 0, and the quasi-free vacuum on the cylinder.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "error.hpp"
#include "greens.hpp"
#include "rng.hpp"
#include "spacetime.hpp"
#include "testfun.hpp"

namespace lcqft {

using Complex = std::complex<double>;

/// Relative L2 tolerance below which two labels are the same solution.
inline constexpr double kLabelEpsilon = 1e-9;
/// Labels with norm below this are the zero solution.
inline constexpr double kLabelZeroFloor = 1e-10;

/// Canonical label of a solution: its Cauchy data at t = 0.
class WeylLabel {
 public:
  static WeylLabel zero(const Spacetime2D& M) {
    CauchyData d;
    d.t0 = 0.0;
    d.h = M.h();
    d.j_lo = M.j_lo();
    d.phi.assign(static_cast<std::size_t>(M.nx()), 0.0);
    d.pi = d.phi;
    return WeylLabel(M, std::move(d));
  }

  /// Label of E f.
  static WeylLabel of(const Spacetime2D& M, const TestFunction& f) {
    return WeylLabel(M, cauchy_data(causal_propagator(M, f), 0.0));
  }

  static WeylLabel from_data(const Spacetime2D& M, CauchyData d) {
    if (d.phi.size() != static_cast<std::size_t>(M.nx()) || d.pi.size() != d.phi.size() || d.h != M.h() ||
        d.t0 != 0.0)
      throw Error(ErrorKind::AmbientMismatch, "Cauchy data do not live on the reference surface of this spacetime");
    return WeylLabel(M, std::move(d));
  }

  const Spacetime2D& ambient() const { return ambient_; }
  const CauchyData& data() const { return data_; }

  /// sqrt(h * sum(phi^2 + pi^2))
  double norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < data_.phi.size(); ++k) s += data_.phi[k] * data_.phi[k] + data_.pi[k] * data_.pi[k];
    return std::sqrt(s * data_.h);
  }

  bool is_zero() const { return norm() <= kLabelZeroFloor; }

  /// Content hash of the raw sample bytes.
  std::uint64_t hash() const {
    std::uint64_t hsh = fnv1a(data_.phi.data(), data_.phi.size() * sizeof(double));
    return fnv1a(data_.pi.data(), data_.pi.size() * sizeof(double), hsh);
  }

  friend WeylLabel operator+(const WeylLabel& a, const WeylLabel& b) { return combine(a, 1.0, b); }
  friend WeylLabel operator-(const WeylLabel& a, const WeylLabel& b) { return combine(a, -1.0, b); }
  friend WeylLabel operator-(const WeylLabel& a) {
    WeylLabel out = a;
    for (double& v : out.data_.phi) v = -v;
    for (double& v : out.data_.pi) v = -v;
    return out;
  }

 private:
  WeylLabel(Spacetime2D M, CauchyData d) : ambient_(std::move(M)), data_(std::move(d)) {}

  static WeylLabel combine(const WeylLabel& a, double s, const WeylLabel& b) {
    if (!(a.ambient_ == b.ambient_)) throw Error(ErrorKind::AmbientMismatch, "labels on different spacetimes");
    WeylLabel out = a;
    for (std::size_t k = 0; k < out.data_.phi.size(); ++k) {
      out.data_.phi[k] += s * b.data_.phi[k];
      out.data_.pi[k] += s * b.data_.pi[k];
    }
    return out;
  }

  Spacetime2D ambient_;
  CauchyData data_;
};

/// Relative L2 distance; two labels below the zero floor are at distance 0.
inline double label_distance(const WeylLabel& a, const WeylLabel& b) {
  const double na = a.norm(), nb = b.norm();
  const double scale = std::max(na, nb);
  if (scale <= kLabelZeroFloor) return 0.0;
  return (a - b).norm() / scale;
}

inline bool same_label(const WeylLabel& a, const WeylLabel& b, double eps = kLabelEpsilon) {
  return label_distance(a, b) <= eps;
}

inline double symplectic(const WeylLabel& a, const WeylLabel& b) { return symplectic(a.data(), b.data()); }

struct WeylTerm {
  WeylLabel label;
  Complex coeff;
};

/// Finite linear combination of Weyl generators W(label).
/// Labels are pairwise distinct under same_label; no zero coefficients are stored.
class WeylElement {
 public:
  explicit WeylElement(Spacetime2D M) : ambient_(std::move(M)) {}

  static WeylElement unit(const Spacetime2D& M) { return single(WeylLabel::zero(M), 1.0); }

  static WeylElement single(WeylLabel label, Complex c) {
    WeylElement e(label.ambient());
    e.add_term(std::move(label), c);
    return e;
  }

  const Spacetime2D& ambient() const { return ambient_; }
  const std::vector<WeylTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Adds c W(label), merging with an equal label if present.
  void add_term(WeylLabel label, Complex c) {
    if (!(label.ambient() == ambient_)) throw Error(ErrorKind::AmbientMismatch, "term on another spacetime");
    for (auto& t : terms_)
      if (same_label(t.label, label)) {
        t.coeff += c;
        prune();
        return;
      }
    if (c != Complex(0.0)) terms_.push_back({std::move(label), c});
  }

  /// Coefficient of W(label) (0 if absent).
  Complex coefficient(const WeylLabel& label) const {
    for (const auto& t : terms_)
      if (same_label(t.label, label)) return t.coeff;
    return 0.0;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  friend WeylElement operator+(const WeylElement& a, const WeylElement& b) {
    if (!(a.ambient_ == b.ambient_)) throw Error(ErrorKind::AmbientMismatch, "elements on different spacetimes");
    WeylElement out = a;
    for (const auto& t : b.terms_) out.add_term(t.label, t.coeff);
    return out;
  }
  friend WeylElement operator*(Complex c, const WeylElement& a) {
    WeylElement out(a.ambient_);
    for (const auto& t : a.terms_) out.add_term(t.label, c * t.coeff);
    return out;
  }
  friend WeylElement operator-(const WeylElement& a, const WeylElement& b) { return a + Complex(-1.0) * b; }

 private:
  void prune() {
    std::erase_if(terms_, [](const WeylTerm& t) { return t.coeff == Complex(0.0); });
  }

  Spacetime2D ambient_;
  std::vector<WeylTerm> terms_;
};

/// W(E f) with coefficient 1.
inline WeylElement generator(const Spacetime2D& M, const TestFunction& f) {
  return WeylElement::single(WeylLabel::of(M, f), 1.0);
}

/// W(a) W(b) = exp(-i sigma(a, b) / 2) W(a + b), extended bilinearly.
inline WeylElement multiply(const WeylElement& a, const WeylElement& b) {
  if (!(a.ambient() == b.ambient())) throw Error(ErrorKind::AmbientMismatch, "elements on different spacetimes");
  WeylElement out(a.ambient());
  for (const auto& x : a.terms())
    for (const auto& y : b.terms()) {
      const double s = symplectic(x.label, y.label);
      out.add_term(x.label + y.label, x.coeff * y.coeff * std::exp(Complex(0.0, -0.5 * s)));
    }
  return out;
}

/// W(l)* = W(-l), conjugate-linear.
inline WeylElement adjoint(const WeylElement& a) {
  WeylElement out(a.ambient());
  for (const auto& t : a.terms()) out.add_term(-t.label, std::conj(t.coeff));
  return out;
}

/// Largest coefficient modulus of a - b (labels matched under same_label).
inline double coefficient_distance(const WeylElement& a, const WeylElement& b) {
  return (a - b).max_abs_coefficient();
}

/// Quasi-free vacuum of mass m > 0 on the cylinder: omega(W(l)) = exp(-mu(l,l)/2),
///   mu(a, b) = 1/2 sum_n [omega_n Re(phi_a,n conj(phi_b,n)) + Re(pi_a,n conj(pi_b,n)) / omega_n],
/// with phi_n = (h / sqrt(L)) sum_j phi_j exp(-i k_n x_j), k_n = 2 pi n / L.
class QuasiFreeState {
 public:
  explicit QuasiFreeState(const Spacetime2D& M) : ambient_(M) {
    if (!M.periodic()) throw Error(ErrorKind::StateUnavailable, "the vacuum is only provided on the cylinder");
    if (!(M.mass() > 0.0)) throw Error(ErrorKind::StateUnavailable, "the cylinder vacuum needs m > 0");
    const int N = M.nx();
    const double L = M.circumference();
    cos_.resize(static_cast<std::size_t>(N) * N);
    sin_.resize(cos_.size());
    omega_.resize(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
      const int wave = n <= N / 2 ? n : n - N;
      const double k = 2.0 * std::numbers::pi * wave / L;
      omega_[static_cast<std::size_t>(n)] = std::sqrt(M.mass() * M.mass() + k * k);
      for (int j = 0; j < N; ++j) {
        // exact integer phase reduction keeps the table accurate for large N
        const long long ph = (static_cast<long long>(n) * j) % N;
        const double arg = 2.0 * std::numbers::pi * static_cast<double>(ph) / N;
        cos_[static_cast<std::size_t>(n) * N + j] = std::cos(arg);
        sin_[static_cast<std::size_t>(n) * N + j] = std::sin(arg);
      }
    }
  }

  const Spacetime2D& ambient() const { return ambient_; }
  const std::vector<double>& frequencies() const { return omega_; }

  double mu(const WeylLabel& a, const WeylLabel& b) const {
    const auto fa = modes(a), fb = modes(b);
    const std::size_t N = omega_.size();
    double s = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      s += omega_[n] * (fa.phi[n] * std::conj(fb.phi[n])).real() + (fa.pi[n] * std::conj(fb.pi[n])).real() / omega_[n];
    }
    return 0.5 * s;
  }

  double mu(const WeylLabel& a) const { return mu(a, a); }

  Complex expectation(const WeylElement& e) const {
    if (!(e.ambient() == ambient_)) throw Error(ErrorKind::AmbientMismatch, "element on another spacetime");
    Complex s = 0.0;
    for (const auto& t : e.terms()) s += t.coeff * std::exp(-0.5 * mu(t.label));
    return s;
  }

 private:
  struct Modes {
    std::vector<Complex> phi, pi;
  };

  Modes modes(const WeylLabel& l) const {
    if (!(l.ambient() == ambient_)) throw Error(ErrorKind::AmbientMismatch, "label on another spacetime");
    const std::size_t N = omega_.size();
    const double norm = ambient_.h() / std::sqrt(ambient_.circumference());
    Modes m{std::vector<Complex>(N), std::vector<Complex>(N)};
    const auto& phi = l.data().phi;
    const auto& pi = l.data().pi;
    for (std::size_t n = 0; n < N; ++n) {
      double pr = 0, pim = 0, qr = 0, qim = 0;
      const double* c = &cos_[n * N];
      const double* sn = &sin_[n * N];
      for (std::size_t j = 0; j < N; ++j) {
        pr += phi[j] * c[j];
        pim -= phi[j] * sn[j];
        qr += pi[j] * c[j];
        qim -= pi[j] * sn[j];
      }
      m.phi[n] = norm * Complex(pr, pim);
      m.pi[n] = norm * Complex(qr, qim);
    }
    return m;
  }

  Spacetime2D ambient_;
  std::vector<double> cos_, sin_, omega_;
};

inline Complex expectation(const QuasiFreeState& omega, const WeylElement& a) { return omega.expectation(a); }

}  // namespace lcqft
