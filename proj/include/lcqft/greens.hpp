#pragma once

// Klein-Gordon Green operators on the lattice (leapfrog at dt = dx = h).
//
// The discrete operator is
//   (P u)^n_j = (u^{n+1}_j + u^{n-1}_j - u^n_{j+1} - u^n_{j-1}) / h^2 + m^2 u^n_j,
// i.e. the centred second differences of (d_t^2 - d_x^2 + m^2). Retarded and
// advanced solutions are exact inverses of P on data vanishing in the far
// past/future, so E = R - A satisfies P E f = 0 to rounding.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "spacetime.hpp"
#include "testfun.hpp"

namespace lcqft {

/// A grid function over the full window of its spacetime.
class GridSolution {
 public:
  explicit GridSolution(Spacetime2D M) : ambient_(std::move(M)), values_(ambient_.size(), 0.0) {}

  const Spacetime2D& ambient() const { return ambient_; }

  double at(Node p) const {
    if (!in_window(p)) return 0.0;
    return values_[ambient_.index(p)];
  }
  double& operator[](Node p) { return values_[ambient_.index(p)]; }

  std::span<const double> row(int n) const {
    return {values_.data() + static_cast<std::size_t>(n - ambient_.n_lo()) * ambient_.nx(),
            static_cast<std::size_t>(ambient_.nx())};
  }
  std::span<double> row(int n) {
    return {values_.data() + static_cast<std::size_t>(n - ambient_.n_lo()) * ambient_.nx(),
            static_cast<std::size_t>(ambient_.nx())};
  }
  std::span<const double> values() const { return values_; }

  bool in_window(Node p) const {
    if (p.n < ambient_.n_lo() || p.n > ambient_.n_hi()) return false;
    return ambient_.periodic() || (p.j >= ambient_.j_lo() && p.j <= ambient_.j_hi());
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  friend GridSolution operator-(const GridSolution& a, const GridSolution& b) {
    if (!(a.ambient_ == b.ambient_)) throw Error(ErrorKind::AmbientMismatch, "solutions on different spacetimes");
    GridSolution out = a;
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] -= b.values_[i];
    return out;
  }

 private:
  Spacetime2D ambient_;
  std::vector<double> values_;
};

/// Field and momentum on the surface t = t0 (pi by centred difference).
struct CauchyData {
  double t0 = 0.0;
  double h = 0.0;
  int j_lo = 0;
  std::vector<double> phi;
  std::vector<double> pi;
};

namespace detail {

// next = (u_{j+1} + u_{j-1} - h^2 m^2 u_j) - prev + h^2 f
inline void leapfrog_row(const Spacetime2D& M, std::span<const double> cur, std::span<const double> prev,
                         std::span<double> next, const TestFunction* f, int n_src) {
  const int nx = M.nx();
  const double hm2 = M.h() * M.h() * M.mass() * M.mass();
  const bool periodic = M.periodic();
  for (int k = 0; k < nx; ++k) {
    double left, right;
    if (periodic) {
      left = cur[(k - 1 + nx) % nx];
      right = cur[(k + 1) % nx];
    } else {
      left = k > 0 ? cur[k - 1] : 0.0;
      right = k + 1 < nx ? cur[k + 1] : 0.0;
    }
    next[k] = left + right - hm2 * cur[k] - prev[k];
  }
  if (f != nullptr) {
    const double h2 = M.h() * M.h();
    const GridBox& b = f->box();
    if (n_src >= b.n0 && n_src <= b.n1)
      for (int j = b.j0; j <= b.j1; ++j) next[M.wrap(j) - M.j_lo()] += h2 * f->at({n_src, j});
  }
}

// On a Minkowski window the lattice cone of supp f must not reach the Dirichlet edges.
inline void check_margin(const Spacetime2D& M, const TestFunction& f, int rows) {
  if (M.kind() != SpacetimeKind::MinkowskiPlane) return;
  const auto& b = f.box();
  if (b.j0 - rows < M.j_lo() || b.j1 + rows > M.j_hi())
    throw Error(ErrorKind::WindowTooSmall, "light cone of the source reaches the spatial edge of the window");
}

}  // namespace detail

inline void check_same_ambient(const Spacetime2D& M, const TestFunction& f) {
  if (!(f.ambient() == M)) throw Error(ErrorKind::AmbientMismatch, "test function lives on another spacetime");
}

/// Solves P u = f with u = 0 in the past of supp f.
inline GridSolution retarded(const Spacetime2D& M, const TestFunction& f) {
  check_same_ambient(M, f);
  GridSolution u(M);
  const auto rows = f.support_rows();
  if (!rows) return u;
  detail::check_margin(M, f, M.n_hi() - rows->first);
  const std::vector<double> zero(static_cast<std::size_t>(M.nx()), 0.0);
  for (int n = rows->first; n < M.n_hi(); ++n) {
    const std::span<const double> prev = n > M.n_lo() ? std::as_const(u).row(n - 1) : std::span<const double>(zero);
    detail::leapfrog_row(M, std::as_const(u).row(n), prev, u.row(n + 1), &f, n);
  }
  return u;
}

/// Solves P u = f with u = 0 in the future of supp f.
inline GridSolution advanced(const Spacetime2D& M, const TestFunction& f) {
  check_same_ambient(M, f);
  GridSolution u(M);
  const auto rows = f.support_rows();
  if (!rows) return u;
  detail::check_margin(M, f, rows->second - M.n_lo());
  const std::vector<double> zero(static_cast<std::size_t>(M.nx()), 0.0);
  for (int n = rows->second; n > M.n_lo(); --n) {
    const std::span<const double> prev = n < M.n_hi() ? std::as_const(u).row(n + 1) : std::span<const double>(zero);
    detail::leapfrog_row(M, std::as_const(u).row(n), prev, u.row(n - 1), &f, n);
  }
  return u;
}

/// E f = R f - A f.
inline GridSolution causal_propagator(const Spacetime2D& M, const TestFunction& f) {
  return retarded(M, f) - advanced(M, f);
}

/// (P u) on interior rows; the first and last rows of the window are left at zero.
inline GridSolution apply_kg(const GridSolution& u) {
  const auto& M = u.ambient();
  GridSolution out(M);
  const double h2 = M.h() * M.h();
  const double m2 = M.mass() * M.mass();
  for (int n = M.n_lo() + 1; n < M.n_hi(); ++n)
    for (int j = M.j_lo(); j <= M.j_hi(); ++j) {
      const double l = M.periodic() ? u.at({n, M.wrap(j - 1)}) : u.at({n, j - 1});
      const double r = M.periodic() ? u.at({n, M.wrap(j + 1)}) : u.at({n, j + 1});
      out[{n, j}] = (u.at({n + 1, j}) + u.at({n - 1, j}) - l - r) / h2 + m2 * u.at({n, j});
    }
  return out;
}

/// <f, u> = h^2 sum f u.
inline double pairing(const TestFunction& f, const GridSolution& u) {
  const auto& b = f.box();
  double s = 0.0;
  for (int n = b.n0; n <= b.n1; ++n)
    for (int j = b.j0; j <= b.j1; ++j) s += f.at({n, j}) * u.at({n, u.ambient().wrap(j)});
  return s * f.ambient().h() * f.ambient().h();
}

inline CauchyData cauchy_data(const GridSolution& u, double t0) {
  const auto& M = u.ambient();
  const int n0 = detail::grid_steps(t0, M.h(), "t0");
  if (n0 - 1 < M.n_lo() || n0 + 1 > M.n_hi())
    throw Error(ErrorKind::OutOfWindow, "Cauchy surface needs a row on each side inside the window");
  CauchyData d;
  d.t0 = n0 * M.h();
  d.h = M.h();
  d.j_lo = M.j_lo();
  const auto up = u.row(n0 + 1), mid = u.row(n0), down = u.row(n0 - 1);
  d.phi.assign(mid.begin(), mid.end());
  d.pi.resize(mid.size());
  for (std::size_t k = 0; k < mid.size(); ++k) d.pi[k] = (up[k] - down[k]) / (2.0 * M.h());
  return d;
}

/// Symplectic form h * sum (phi_a pi_b - pi_a phi_b).
inline double symplectic(const CauchyData& a, const CauchyData& b) {
  if (a.phi.size() != b.phi.size() || a.h != b.h)
    throw Error(ErrorKind::AmbientMismatch, "Cauchy data on different surfaces");
  double s = 0.0;
  for (std::size_t k = 0; k < a.phi.size(); ++k) s += a.phi[k] * b.pi[k] - a.pi[k] * b.phi[k];
  return s * a.h;
}

/// sigma(f, g) from Cauchy data of E f and E g on the reference surface t = 0.
/// Discretely sigma(f, g) = -<f, E g> exactly (summation by parts).
inline double symplectic(const Spacetime2D& M, const TestFunction& f, const TestFunction& g) {
  return symplectic(cauchy_data(causal_propagator(M, f), 0.0), cauchy_data(causal_propagator(M, g), 0.0));
}

/// Homogeneous solution on the rows [n0 - k, n0 + k] around the data surface.
/// Inverts cauchy_data: u^{n0 +- 1} = (L phi)/2 +- h pi.
inline GridSolution evolve_homogeneous(const Spacetime2D& M, const CauchyData& d, int rows_each_side) {
  const int n0 = detail::grid_steps(d.t0, M.h(), "t0");
  if (d.phi.size() != static_cast<std::size_t>(M.nx()) || d.h != M.h())
    throw Error(ErrorKind::AmbientMismatch, "Cauchy data do not belong to this spacetime");
  const int up = std::min(M.n_hi(), n0 + rows_each_side);
  const int down = std::max(M.n_lo(), n0 - rows_each_side);
  if (up < n0 + 1 || down > n0 - 1) throw Error(ErrorKind::OutOfWindow, "no room around the data surface");
  GridSolution u(M);
  auto mid = u.row(n0);
  std::copy(d.phi.begin(), d.phi.end(), mid.begin());
  // (L phi) / 2 is leapfrog_row with prev = 0, halved.
  std::vector<double> zero(d.phi.size(), 0.0), lphi(d.phi.size());
  detail::leapfrog_row(M, std::as_const(u).row(n0), zero, lphi, nullptr, 0);
  auto rp = u.row(n0 + 1), rm = u.row(n0 - 1);
  for (std::size_t k = 0; k < d.phi.size(); ++k) {
    rp[k] = 0.5 * lphi[k] + M.h() * d.pi[k];
    rm[k] = 0.5 * lphi[k] - M.h() * d.pi[k];
  }
  const auto& cu = u;
  for (int n = n0 + 1; n < up; ++n) detail::leapfrog_row(M, cu.row(n), cu.row(n - 1), u.row(n + 1), nullptr, 0);
  for (int n = n0 - 1; n > down; --n) detail::leapfrog_row(M, cu.row(n), cu.row(n + 1), u.row(n - 1), nullptr, 0);
  return u;
}

inline GridSolution evolve_homogeneous(const Spacetime2D& M, const CauchyData& d) {
  return evolve_homogeneous(M, d, M.nt());
}

/// C-infinity monotone step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

/// f'' = P(chi u) for a homogeneous solution u, chi = 0 below row n1 and 1 above row n2.
/// Nonzero rows are exactly those where chi is not constant over the stencil, i.e. [n1, n2].
inline TestFunction compress_solution(const GridSolution& u, int n1, int n2) {
  const auto& M = u.ambient();
  if (n1 >= n2) throw Error(ErrorKind::OutOfDomain, "slab must have t1 < t2");
  if (n1 - 1 < M.n_lo() || n2 + 1 > M.n_hi()) throw Error(ErrorKind::WindowTooSmall, "slab touches the window edge");
  auto chi = [&](int n) { return smooth_step(static_cast<double>(n - n1) / (n2 - n1)); };
  const double h2 = M.h() * M.h();
  const double m2 = M.mass() * M.mass();

  int j0 = M.j_hi() + 1, j1 = M.j_lo() - 1;
  std::vector<double> rows(static_cast<std::size_t>(n2 - n1 + 1) * M.nx(), 0.0);
  for (int n = n1; n <= n2; ++n)
    for (int j = M.j_lo(); j <= M.j_hi(); ++j) {
      const double l = M.periodic() ? u.at({n, M.wrap(j - 1)}) : u.at({n, j - 1});
      const double r = M.periodic() ? u.at({n, M.wrap(j + 1)}) : u.at({n, j + 1});
      const double v = (chi(n + 1) * u.at({n + 1, j}) + chi(n - 1) * u.at({n - 1, j}) - chi(n) * (l + r)) / h2 +
                       m2 * chi(n) * u.at({n, j});
      rows[static_cast<std::size_t>(n - n1) * M.nx() + static_cast<std::size_t>(j - M.j_lo())] = v;
      if (v != 0.0) j0 = std::min(j0, j), j1 = std::max(j1, j);
    }
  if (j0 > j1) return TestFunction::zero(M);
  GridBox box{n1 - 1, n2 + 1, M.periodic() ? M.j_lo() : j0 - 1, M.periodic() ? M.j_hi() : j1 + 1};
  if (!M.periodic()) {
    box.j0 = std::max(box.j0, M.j_lo());
    box.j1 = std::min(box.j1, M.j_hi());
  }
  std::vector<double> s(static_cast<std::size_t>(box.rows()) * box.cols(), 0.0);
  for (int n = n1; n <= n2; ++n)
    for (int j = box.j0; j <= box.j1; ++j)
      s[static_cast<std::size_t>(n - box.n0) * box.cols() + static_cast<std::size_t>(j - box.j0)] =
          rows[static_cast<std::size_t>(n - n1) * M.nx() + static_cast<std::size_t>(j - M.j_lo())];
  if (M.kind() == SpacetimeKind::DoubleCone) {
    // Values outside the open cone belong to the auxiliary box, not the spacetime.
    const int R = M.radius_steps();
    for (int n = box.n0; n <= box.n1; ++n)
      for (int j = box.j0; j <= box.j1; ++j)
        if (std::abs(n) + std::abs(j) >= R)
          s[static_cast<std::size_t>(n - box.n0) * box.cols() + static_cast<std::size_t>(j - box.j0)] = 0.0;
  }
  return TestFunction::from_samples(M, box, std::move(s));
}

/// Time-slice engine: a source supported in [t1, t2] with the same E-image as f.
inline TestFunction slab_compress(const Spacetime2D& M, const TestFunction& f, double t1, double t2) {
  check_same_ambient(M, f);
  const int n1 = detail::grid_steps(t1, M.h(), "t1");
  const int n2 = detail::grid_steps(t2, M.h(), "t2");
  return compress_solution(causal_propagator(M, f), n1, n2);
}

}  // namespace lcqft
