#pragma once

// Grid-sampled compactly supported test functions and their pushforwards.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "spacetime.hpp"

namespace lcqft {

/// Inclusive index rectangle; empty when n1 < n0.
struct GridBox {
  int n0 = 0, n1 = -1, j0 = 0, j1 = -1;

  bool empty() const { return n1 < n0 || j1 < j0; }
  int rows() const { return empty() ? 0 : n1 - n0 + 1; }
  int cols() const { return empty() ? 0 : j1 - j0 + 1; }
  bool contains(Node p) const { return p.n >= n0 && p.n <= n1 && p.j >= j0 && p.j <= j1; }

  friend bool operator==(const GridBox&, const GridBox&) = default;
};

inline GridBox box_union(const GridBox& a, const GridBox& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {std::min(a.n0, b.n0), std::max(a.n1, b.n1), std::min(a.j0, b.j0), std::max(a.j1, b.j1)};
}

/// Real test function sampled on the nodes of a box. On the cylinder the box
/// always spans the full circle. Samples vanish on the boundary layer of the box.
class TestFunction {
 public:
  static TestFunction zero(const Spacetime2D& M) { return TestFunction(M, GridBox{}, {}); }

  static TestFunction from_samples(const Spacetime2D& M, GridBox box, std::vector<double> samples) {
    if (M.periodic() && !box.empty()) {
      box.j0 = 0;
      box.j1 = M.nx() - 1;
    }
    if (samples.size() != static_cast<std::size_t>(box.rows()) * static_cast<std::size_t>(box.cols()))
      throw Error(ErrorKind::DomainMismatch, "sample count does not match support box");
    TestFunction f(M, box, std::move(samples));
    f.check_invariants();
    return f;
  }

  const Spacetime2D& ambient() const { return ambient_; }
  const GridBox& box() const { return box_; }
  std::span<const double> samples() const { return samples_; }

  double at(Node p) const {
    if (box_.empty()) return 0.0;
    p.j = ambient_.wrap(p.j);
    if (!box_.contains(p)) return 0.0;
    return samples_[offset(p)];
  }

  bool is_zero() const {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Nodes carrying a nonzero sample.
  std::vector<Node> support() const {
    std::vector<Node> out;
    for (int n = box_.n0; n <= box_.n1; ++n)
      for (int j = box_.j0; j <= box_.j1; ++j)
        if (samples_[offset({n, j})] != 0.0) out.push_back({n, j});
    return out;
  }

  /// Rows [first, last] holding nonzero samples; nullopt for the zero function.
  std::optional<std::pair<int, int>> support_rows() const {
    int lo = box_.n1 + 1, hi = box_.n0 - 1;
    for (int n = box_.n0; n <= box_.n1; ++n)
      for (int j = box_.j0; j <= box_.j1; ++j)
        if (samples_[offset({n, j})] != 0.0) {
          lo = std::min(lo, n);
          hi = std::max(hi, n);
          break;
        }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
  }

  double integral() const {
    double s = 0.0;
    for (double v : samples_) s += v;
    return s * ambient_.h() * ambient_.h();
  }

  double l2_norm() const {
    double s = 0.0;
    for (double v : samples_) s += v * v;
    return std::sqrt(s * ambient_.h() * ambient_.h());
  }

  friend TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g) {
    if (!(f.ambient_ == g.ambient_)) throw Error(ErrorKind::AmbientMismatch, "test functions on different spacetimes");
    const GridBox box = box_union(f.box_, g.box_);
    std::vector<double> s(static_cast<std::size_t>(box.rows()) * static_cast<std::size_t>(box.cols()));
    std::size_t k = 0;
    for (int n = box.n0; n <= box.n1; ++n)
      for (int j = box.j0; j <= box.j1; ++j) s[k++] = a * f.at({n, j}) + b * g.at({n, j});
    return TestFunction(f.ambient_, box, std::move(s));
  }

  friend TestFunction operator+(const TestFunction& f, const TestFunction& g) {
    return linear_combination(1.0, f, 1.0, g);
  }
  friend TestFunction operator-(const TestFunction& f, const TestFunction& g) {
    return linear_combination(1.0, f, -1.0, g);
  }
  friend TestFunction operator*(double a, const TestFunction& f) {
    TestFunction out = f;
    for (double& v : out.samples_) v *= a;
    return out;
  }
  friend TestFunction operator-(const TestFunction& f) { return -1.0 * f; }

 private:
  TestFunction(Spacetime2D M, GridBox box, std::vector<double> samples)
      : ambient_(std::move(M)), box_(box), samples_(std::move(samples)) {}

  std::size_t offset(Node p) const {
    return static_cast<std::size_t>(p.n - box_.n0) * static_cast<std::size_t>(box_.cols()) +
           static_cast<std::size_t>(p.j - box_.j0);
  }

  void check_invariants() const {
    if (box_.empty()) return;
    const auto& M = ambient_;
    if (box_.n0 < M.n_lo() || box_.n1 > M.n_hi() ||
        (!M.periodic() && (box_.j0 < M.j_lo() || box_.j1 > M.j_hi())))
      throw Error(ErrorKind::OutOfDomain, "support box leaves the window");
    for (int j = box_.j0; j <= box_.j1; ++j)
      if (at({box_.n0, j}) != 0.0 || at({box_.n1, j}) != 0.0)
        throw Error(ErrorKind::OutOfDomain, "samples do not vanish on the boundary rows");
    if (!M.periodic())
      for (int n = box_.n0; n <= box_.n1; ++n)
        if (at({n, box_.j0}) != 0.0 || at({n, box_.j1}) != 0.0)
          throw Error(ErrorKind::OutOfDomain, "samples do not vanish on the boundary columns");
    if (M.kind() == SpacetimeKind::DoubleCone) {
      const int R = M.radius_steps();
      for (Node p : support())
        if (std::abs(p.n) + std::abs(p.j) >= R)
          throw Error(ErrorKind::OutOfDomain, "support touches the double cone boundary");
    }
  }

  Spacetime2D ambient_;
  GridBox box_;
  std::vector<double> samples_;
};

inline double bump_profile(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

/// amplitude * exp(-1/(1-s)), s = (dt/rt)^2 + (dx/rx)^2, sampled on the grid.
inline TestFunction bump(const Spacetime2D& M, Point center, double rt, double rx, double amplitude) {
  if (!(rt > 0.0) || !(rx > 0.0)) throw Error(ErrorKind::OutOfDomain, "bump radii must be positive");
  if (M.periodic() && 2.0 * rx >= M.circumference())
    throw Error(ErrorKind::OutOfDomain, "bump wraps around the cylinder");
  const double h = M.h();
  GridBox box{static_cast<int>(std::floor((center.t - rt) / h)), static_cast<int>(std::ceil((center.t + rt) / h)),
              static_cast<int>(std::floor((center.x - rx) / h)), static_cast<int>(std::ceil((center.x + rx) / h))};
  if (!M.periodic() && (box.j0 < M.j_lo() || box.j1 > M.j_hi()))
    throw Error(ErrorKind::OutOfDomain, "bump leaves the spatial window");
  if (box.n0 < M.n_lo() || box.n1 > M.n_hi()) throw Error(ErrorKind::OutOfDomain, "bump leaves the time window");
  if (amplitude == 0.0) return TestFunction::zero(M);

  GridBox out_box = box;
  if (M.periodic()) out_box.j0 = 0, out_box.j1 = M.nx() - 1;
  std::vector<double> s(static_cast<std::size_t>(out_box.rows()) * static_cast<std::size_t>(out_box.cols()), 0.0);
  const double cx = M.wrap_x(center.x);
  for (int n = box.n0; n <= box.n1; ++n)
    for (int j = box.j0; j <= box.j1; ++j) {
      const double dt = (n * h - center.t) / rt;
      double dx = M.periodic() ? M.wrap_x(j * h) - cx : j * h - center.x;
      if (M.periodic()) {
        const double L = M.circumference();
        if (dx > 0.5 * L) dx -= L;
        if (dx < -0.5 * L) dx += L;
      }
      dx /= rx;
      const double v = amplitude * bump_profile(dt * dt + dx * dx);
      const int jj = M.wrap(j);
      s[static_cast<std::size_t>(n - out_box.n0) * static_cast<std::size_t>(out_box.cols()) +
        static_cast<std::size_t>(jj - out_box.j0)] = v;
    }
  return TestFunction::from_samples(M, out_box, std::move(s));
}

namespace detail {

/// Bilinear interpolation of samples at fractional index coordinates.
inline double bilinear(const TestFunction& f, double fn, double fj) {
  const int n = static_cast<int>(std::floor(fn));
  const int j = static_cast<int>(std::floor(fj));
  const double a = fn - n, b = fj - j;
  return (1 - a) * (1 - b) * f.at({n, j}) + (1 - a) * b * f.at({n, j + 1}) + a * (1 - b) * f.at({n + 1, j}) +
         a * b * f.at({n + 1, j + 1});
}

}  // namespace detail

/// psi_* f. Grid-aligned translations relocate samples exactly; every other
/// map resamples at preimages by bilinear interpolation.
inline TestFunction pushforward(const Embedding& psi, const TestFunction& f) {
  if (!(f.ambient() == psi.source())) throw Error(ErrorKind::DomainMismatch, "test function not on the source");
  const auto& T = psi.target();
  if (f.box().empty()) return TestFunction::zero(T);
  if (psi.is_identity()) return f;
  const GridBox& b = f.box();

  if (auto shift = psi.grid_shift()) {
    GridBox nb{b.n0 + shift->n, b.n1 + shift->n, b.j0 + shift->j, b.j1 + shift->j};
    if (T.periodic()) nb.j0 = 0, nb.j1 = T.nx() - 1;
    std::vector<double> s(static_cast<std::size_t>(nb.rows()) * static_cast<std::size_t>(nb.cols()), 0.0);
    for (int n = b.n0; n <= b.n1; ++n)
      for (int j = b.j0; j <= b.j1; ++j) {
        const Node q{n + shift->n, T.wrap(j + shift->j)};
        s[static_cast<std::size_t>(q.n - nb.n0) * static_cast<std::size_t>(nb.cols()) +
          static_cast<std::size_t>(q.j - nb.j0)] = f.at({n, j});
      }
    return TestFunction::from_samples(T, nb, std::move(s));
  }

  const double h = T.h();
  double tmin = 1e300, tmax = -1e300, xmin = 1e300, xmax = -1e300;
  for (int n : {b.n0, b.n1})
    for (int j : {b.j0, b.j1}) {
      const Point q = psi.map().apply(Point{n * h, j * h});
      tmin = std::min(tmin, q.t), tmax = std::max(tmax, q.t);
      xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
    }
  GridBox nb{static_cast<int>(std::floor(tmin / h)) - 1, static_cast<int>(std::ceil(tmax / h)) + 1,
             static_cast<int>(std::floor(xmin / h)) - 1, static_cast<int>(std::ceil(xmax / h)) + 1};
  if (T.periodic()) nb.j0 = 0, nb.j1 = T.nx() - 1;
  if (nb.n0 < T.n_lo() || nb.n1 > T.n_hi() || (!T.periodic() && (nb.j0 < T.j_lo() || nb.j1 > T.j_hi())))
    throw Error(ErrorKind::OutOfDomain, "pushforward leaves the target window");

  const auto& S = psi.source();
  std::vector<double> s(static_cast<std::size_t>(nb.rows()) * static_cast<std::size_t>(nb.cols()), 0.0);
  std::size_t k = 0;
  for (int n = nb.n0; n <= nb.n1; ++n)
    for (int j = nb.j0; j <= nb.j1; ++j, ++k) {
      Point pre;
      if (T.periodic()) {
        // Pick the lift of the target point closest to the image of the box.
        const double L = T.circumference();
        const double xc = 0.5 * (xmin + xmax);
        double x = j * h;
        x += L * std::round((xc - x) / L);
        pre = psi.inverse(Point{n * h, x});
      } else {
        pre = psi.inverse(Point{n * h, j * h});
      }
      double fj = pre.x / h;
      if (S.periodic()) fj = S.wrap_x(pre.x) / h;
      s[k] = detail::bilinear(f, pre.t / h, fj);
    }
  return TestFunction::from_samples(T, nb, std::move(s));
}

}  // namespace lcqft
