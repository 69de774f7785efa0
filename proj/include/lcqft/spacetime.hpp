#pragma once

// Flat 1+1D globally hyperbolic spacetimes on a lattice with dt = dx = h,
// their causal structure, regions, and validated isometric embeddings.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"

namespace lcqft {

enum class SpacetimeKind { MinkowskiPlane, Cylinder, DoubleCone };

inline std::string to_string(SpacetimeKind k) {
  switch (k) {
    case SpacetimeKind::MinkowskiPlane: return "minkowski";
    case SpacetimeKind::Cylinder: return "cylinder";
    case SpacetimeKind::DoubleCone: return "double_cone";
  }
  return "?";
}

struct Point {
  double t = 0.0;
  double x = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Lattice node: t = n*h, x = j*h.
struct Node {
  int n = 0;
  int j = 0;
  friend auto operator<=>(const Node&, const Node&) = default;
};

namespace detail {

inline int grid_steps(double value, double h, const char* what) {
  const double q = value / h;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-6) {
    throw Error(ErrorKind::InvalidSpacetime,
                std::string(what) + " is not a multiple of the grid spacing");
  }
  return static_cast<int>(r);
}

}  // namespace detail

/// A flat globally hyperbolic spacetime together with its computational window.
///
/// MinkowskiPlane stands for the whole plane; the window is where fields are
/// computed. Cylinder is R x S^1 with circumference L and a time window.
/// DoubleCone is an open double cone of radius r used as a spacetime in its own
/// right (a region-as-spacetime), in a chart centred on its midpoint.
///
/// Invariants: the window contains t = -h, 0, h (the reference Cauchy surface
/// sits at t = 0) and m*h <= 0.1.
class Spacetime2D {
 public:
  static Spacetime2D minkowski(double h, double mass, double t_min, double t_max, double x_min,
                               double x_max) {
    Spacetime2D s(SpacetimeKind::MinkowskiPlane, h, mass);
    s.n_lo_ = detail::grid_steps(t_min, h, "t_min");
    s.n_hi_ = detail::grid_steps(t_max, h, "t_max");
    s.j_lo_ = detail::grid_steps(x_min, h, "x_min");
    s.j_hi_ = detail::grid_steps(x_max, h, "x_max");
    if (s.j_hi_ - s.j_lo_ < 2) throw Error(ErrorKind::InvalidSpacetime, "spatial window too small");
    s.check_time_window();
    return s;
  }

  static Spacetime2D cylinder(double circumference, double h, double mass, double t_min,
                              double t_max) {
    if (!(circumference > 0.0)) throw Error(ErrorKind::InvalidSpacetime, "L must be positive");
    Spacetime2D s(SpacetimeKind::Cylinder, h, mass);
    const int n = detail::grid_steps(circumference, h, "circumference");
    if (n < 3) throw Error(ErrorKind::InvalidSpacetime, "circle needs at least 3 cells");
    s.L_ = circumference;
    s.n_lo_ = detail::grid_steps(t_min, h, "t_min");
    s.n_hi_ = detail::grid_steps(t_max, h, "t_max");
    s.j_lo_ = 0;
    s.j_hi_ = n - 1;
    s.check_time_window();
    return s;
  }

  static Spacetime2D double_cone(double radius, double h, double mass) {
    Spacetime2D s(SpacetimeKind::DoubleCone, h, mass);
    const int r = detail::grid_steps(radius, h, "radius");
    if (r < 2) throw Error(ErrorKind::InvalidSpacetime, "double cone needs radius >= 2h");
    s.radius_ = radius;
    s.n_lo_ = s.j_lo_ = -r;
    s.n_hi_ = s.j_hi_ = r;
    return s;
  }

  SpacetimeKind kind() const { return kind_; }
  double h() const { return h_; }
  double mass() const { return mass_; }
  double circumference() const { return L_; }
  double radius() const { return radius_; }
  bool periodic() const { return kind_ == SpacetimeKind::Cylinder; }

  int n_lo() const { return n_lo_; }
  int n_hi() const { return n_hi_; }
  int j_lo() const { return j_lo_; }
  int j_hi() const { return j_hi_; }
  int nt() const { return n_hi_ - n_lo_ + 1; }
  int nx() const { return j_hi_ - j_lo_ + 1; }
  int radius_steps() const { return n_hi_; }  // DoubleCone only

  double t_min() const { return n_lo_ * h_; }
  double t_max() const { return n_hi_ * h_; }
  double x_min() const { return j_lo_ * h_; }
  double x_max() const { return j_hi_ * h_; }

  double time(int n) const { return n * h_; }
  double space(int j) const { return j * h_; }

  /// Reduces a spatial index onto the circle; identity off the cylinder.
  int wrap(int j) const {
    if (!periodic()) return j;
    const int n = nx();
    int r = j % n;
    return r < 0 ? r + n : r;
  }

  double wrap_x(double x) const {
    if (!periodic()) return x;
    double r = std::fmod(x, L_);
    return r < 0 ? r + L_ : r;
  }

  /// Node lies in the computational domain (window, or the closed double cone).
  bool contains(Node p) const {
    if (p.n < n_lo_ || p.n > n_hi_) return false;
    if (periodic()) return true;
    if (p.j < j_lo_ || p.j > j_hi_) return false;
    if (kind_ == SpacetimeKind::DoubleCone) return std::abs(p.n) + std::abs(p.j) <= n_hi_;
    return true;
  }

  bool contains(Point p) const {
    const double eps = 1e-9;
    if (p.t < t_min() - eps || p.t > t_max() + eps) return false;
    if (periodic()) return true;
    if (p.x < x_min() - eps || p.x > x_max() + eps) return false;
    if (kind_ == SpacetimeKind::DoubleCone) return std::abs(p.t) + std::abs(p.x) <= radius_ + eps;
    return true;
  }

  Node snap(Point p) const {
    return Node{static_cast<int>(std::lround(p.t / h_)),
                wrap(static_cast<int>(std::lround(p.x / h_)))};
  }

  Point point(Node p) const { return Point{time(p.n), space(p.j)}; }

  std::size_t index(Node p) const {
    return static_cast<std::size_t>(p.n - n_lo_) * static_cast<std::size_t>(nx()) +
           static_cast<std::size_t>(wrap(p.j) - j_lo_);
  }
  std::size_t size() const { return static_cast<std::size_t>(nt()) * static_cast<std::size_t>(nx()); }

  /// Stable textual identity; two spacetimes are equal iff their ids are equal.
  std::string id() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << "(h=" << h_ << ",m=" << mass_;
    if (kind_ == SpacetimeKind::Cylinder) os << ",L=" << L_;
    if (kind_ == SpacetimeKind::DoubleCone) os << ",r=" << radius_;
    os << ",n=[" << n_lo_ << "," << n_hi_ << "],j=[" << j_lo_ << "," << j_hi_ << "])";
    return os.str();
  }

  friend bool operator==(const Spacetime2D& a, const Spacetime2D& b) {
    return a.kind_ == b.kind_ && a.h_ == b.h_ && a.mass_ == b.mass_ && a.L_ == b.L_ &&
           a.radius_ == b.radius_ && a.n_lo_ == b.n_lo_ && a.n_hi_ == b.n_hi_ &&
           a.j_lo_ == b.j_lo_ && a.j_hi_ == b.j_hi_;
  }

 private:
  Spacetime2D(SpacetimeKind kind, double h, double mass) : kind_(kind), h_(h), mass_(mass) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidSpacetime, "grid spacing must be positive");
    if (!(mass >= 0.0)) throw Error(ErrorKind::InvalidSpacetime, "mass must be nonnegative");
    if (mass * h > 0.1 + 1e-12) throw Error(ErrorKind::InvalidSpacetime, "m*h must not exceed 0.1");
  }

  void check_time_window() const {
    if (n_lo_ > -1 || n_hi_ < 1) {
      throw Error(ErrorKind::InvalidSpacetime, "time window must contain t = -h, 0, h");
    }
  }

  SpacetimeKind kind_;
  double h_;
  double mass_;
  double L_ = 0.0;
  double radius_ = 0.0;
  int n_lo_ = 0, n_hi_ = 0, j_lo_ = 0, j_hi_ = 0;
};

// ---------------------------------------------------------------------------
// Causal structure

enum class CausalRelation { Timelike, Lightlike, Spacelike };

inline std::string to_string(CausalRelation r) {
  switch (r) {
    case CausalRelation::Timelike: return "timelike";
    case CausalRelation::Lightlike: return "lightlike";
    case CausalRelation::Spacelike: return "spacelike";
  }
  return "?";
}

namespace detail {

inline CausalRelation classify(double interval) {
  constexpr double eps = 1e-12;
  if (interval > eps) return CausalRelation::Timelike;
  if (interval >= -eps) return CausalRelation::Lightlike;
  return CausalRelation::Spacelike;
}

}  // namespace detail

inline CausalRelation causal_relation(const Spacetime2D& M, Point p, Point q) {
  if (!M.contains(p) || !M.contains(q)) throw Error(ErrorKind::OutOfDomain, "point outside window");
  const double dt = q.t - p.t;
  const double dx = q.x - p.x;
  if (!M.periodic()) return detail::classify(dt * dt - dx * dx);
  // Every winding w with |dx + wL| <= |dt| + L is a candidate; the best one decides.
  const double L = M.circumference();
  const int W = static_cast<int>(std::ceil(std::abs(dt) / L)) + 1;
  double best = -std::numeric_limits<double>::infinity();
  for (int w = -W; w <= W; ++w) {
    const double e = dx + w * L;
    best = std::max(best, dt * dt - e * e);
  }
  return detail::classify(best);
}

/// Spacelike test between nodes; on the lattice the relation is exact integer arithmetic.
inline CausalRelation causal_relation(const Spacetime2D& M, Node p, Node q) {
  const long dt = std::labs(static_cast<long>(q.n) - p.n);
  long dx = std::labs(static_cast<long>(q.j) - p.j);
  if (M.periodic()) {
    const long n = M.nx();
    dx %= n;
    dx = std::min(dx, n - dx);
  }
  if (dt > dx) return CausalRelation::Timelike;
  if (dt == dx) return CausalRelation::Lightlike;
  return CausalRelation::Spacelike;
}

// ---------------------------------------------------------------------------
// Regions

struct DoubleConeShape {
  Point center;
  double radius = 0.0;
};
struct SlabShape {
  double t_lo = 0.0;
  double t_hi = 0.0;
};
struct GridSetShape {
  std::set<Node> nodes;
};

using RegionShape = std::variant<DoubleConeShape, SlabShape, GridSetShape>;

/// A set of lattice nodes in an ambient spacetime, resolved at cell granularity.
class Region {
 public:
  Region(Spacetime2D ambient, RegionShape shape) : ambient_(std::move(ambient)), shape_(std::move(shape)) {}

  static Region double_cone(const Spacetime2D& M, Point center, double radius) {
    return Region(M, DoubleConeShape{center, radius});
  }
  static Region slab(const Spacetime2D& M, double t_lo, double t_hi) {
    return Region(M, SlabShape{t_lo, t_hi});
  }
  static Region grid_set(const Spacetime2D& M, std::set<Node> nodes) {
    return Region(M, GridSetShape{std::move(nodes)});
  }
  static Region empty(const Spacetime2D& M) { return grid_set(M, {}); }

  const Spacetime2D& ambient() const { return ambient_; }
  const RegionShape& shape() const { return shape_; }

  bool contains(Node p) const {
    if (!ambient_.contains(p)) return false;
    const double h = ambient_.h();
    constexpr double eps = 1e-9;
    if (const auto* c = std::get_if<DoubleConeShape>(&shape_)) {
      const double dt = std::abs(p.n * h - c->center.t);
      double dx = std::abs(ambient_.wrap_x(p.j * h) - ambient_.wrap_x(c->center.x));
      if (ambient_.periodic()) dx = std::min(dx, ambient_.circumference() - dx);
      return dt + dx <= c->radius + eps;
    }
    if (const auto* s = std::get_if<SlabShape>(&shape_)) {
      const double t = p.n * h;
      return t >= s->t_lo - eps && t <= s->t_hi + eps;
    }
    const auto& g = std::get<GridSetShape>(shape_);
    return g.nodes.contains(Node{p.n, ambient_.wrap(p.j)});
  }

  std::vector<Node> nodes() const {
    std::vector<Node> out;
    for (int n = ambient_.n_lo(); n <= ambient_.n_hi(); ++n)
      for (int j = ambient_.j_lo(); j <= ambient_.j_hi(); ++j)
        if (contains(Node{n, j})) out.push_back(Node{n, j});
    return out;
  }

  bool is_relatively_compact() const {
    if (std::holds_alternative<SlabShape>(shape_)) return ambient_.periodic();
    return true;
  }

 private:
  Spacetime2D ambient_;
  RegionShape shape_;
};

namespace detail {

/// Dense flags over the window; index with Spacetime2D::index.
inline std::vector<char> region_mask(const Region& O) {
  const auto& M = O.ambient();
  std::vector<char> mask(M.size(), 0);
  for (int n = M.n_lo(); n <= M.n_hi(); ++n)
    for (int j = M.j_lo(); j <= M.j_hi(); ++j)
      if (O.contains(Node{n, j})) mask[M.index(Node{n, j})] = 1;
  return mask;
}

// Lattice causal steps go one row forward (or backward) to the three cells
// inside the numerical light cone.
inline std::vector<char> sweep(const Spacetime2D& M, const std::vector<char>& seed, bool forward) {
  std::vector<char> reach = seed;
  const int first = forward ? M.n_lo() : M.n_hi();
  const int last = forward ? M.n_hi() : M.n_lo();
  const int step = forward ? 1 : -1;
  for (int n = first; n != last; n += step) {
    const int next = n + step;
    for (int j = M.j_lo(); j <= M.j_hi(); ++j) {
      if (!reach[M.index(Node{n, j})]) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        const Node q{next, j + dj};
        if (!M.contains(q)) continue;
        reach[M.index(q)] = 1;
      }
    }
  }
  return reach;
}

}  // namespace detail

/// True iff every lattice causal path between two nodes of O stays inside O.
///
/// A path leaving O and returning passes through a node outside O that is both
/// in the causal future and the causal past of O, so one forward and one
/// backward sweep decide the question.
inline bool is_causally_convex(const Spacetime2D& M, const Region& O) {
  if (!(O.ambient() == M)) throw Error(ErrorKind::AmbientMismatch, "region lives on another spacetime");
  const auto mask = detail::region_mask(O);
  const auto future = detail::sweep(M, mask, true);
  const auto past = detail::sweep(M, mask, false);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (!mask[i] && future[i] && past[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Embeddings

/// p -> B(rapidity) * R * p + (a0, a1), where R optionally reverses time and/or space.
struct AffineMap {
  double a0 = 0.0;
  double a1 = 0.0;
  double rapidity = 0.0;
  bool reverse_time = false;
  bool reverse_space = false;

  static AffineMap identity() { return {}; }
  static AffineMap translation(double dt, double dx) { return {dt, dx, 0.0, false, false}; }
  static AffineMap boost(double chi) { return {0.0, 0.0, chi, false, false}; }

  Point linear(Point p) const {
    const double t = reverse_time ? -p.t : p.t;
    const double x = reverse_space ? -p.x : p.x;
    if (rapidity == 0.0) return {t, x};
    const double c = std::cosh(rapidity), s = std::sinh(rapidity);
    return {c * t + s * x, s * t + c * x};
  }

  Point apply(Point p) const {
    const Point q = linear(p);
    return {q.t + a0, q.x + a1};
  }

  Point inverse(Point p) const {
    double t = p.t - a0, x = p.x - a1;
    if (rapidity != 0.0) {
      const double c = std::cosh(rapidity), s = std::sinh(rapidity);
      const double tt = c * t - s * x;
      x = -s * t + c * x;
      t = tt;
    }
    return {reverse_time ? -t : t, reverse_space ? -x : x};
  }

  bool proper_orthochronous() const { return !reverse_time && !reverse_space; }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// (second after first): p -> second(first(p)). Only defined for proper maps.
inline AffineMap compose(const AffineMap& second, const AffineMap& first) {
  const Point a = second.linear(Point{first.a0, first.a1});
  return AffineMap{a.t + second.a0, a.x + second.a1, first.rapidity + second.rapidity, false, false};
}

/// An unvalidated morphism candidate.
struct EmbeddingSpec {
  Spacetime2D source;
  Spacetime2D target;
  AffineMap map;
};

class Embedding;
Embedding validate_embedding(const EmbeddingSpec& spec);
Embedding compose_embeddings(const Embedding& second, const Embedding& first);

/// A morphism of Loc. Instances exist only as results of validate_embedding
/// or of composing validated embeddings.
class Embedding {
 public:
  const Spacetime2D& source() const { return source_; }
  const Spacetime2D& target() const { return target_; }
  const AffineMap& map() const { return map_; }

  bool is_identity() const { return source_ == target_ && map_ == AffineMap::identity(); }

  /// Grid-aligned translation: samples move by whole cells.
  std::optional<Node> grid_shift() const {
    if (map_.rapidity != 0.0 || !map_.proper_orthochronous()) return std::nullopt;
    const double h = source_.h();
    const double qn = map_.a0 / h, qj = map_.a1 / h;
    const double rn = std::round(qn), rj = std::round(qj);
    if (std::abs(qn - rn) > 1e-9 || std::abs(qj - rj) > 1e-9) return std::nullopt;
    return Node{static_cast<int>(rn), static_cast<int>(rj)};
  }

  Point apply(Point p) const {
    const Point q = map_.apply(p);
    return {q.t, target_.wrap_x(q.x)};
  }
  Point inverse(Point p) const { return map_.inverse(p); }

 private:
  Embedding(Spacetime2D s, Spacetime2D t, AffineMap m)
      : source_(std::move(s)), target_(std::move(t)), map_(m) {}

  friend Embedding validate_embedding(const EmbeddingSpec& spec);
  friend Embedding compose_embeddings(const Embedding& second, const Embedding& first);

  Spacetime2D source_;
  Spacetime2D target_;
  AffineMap map_;
};

/// Nodes of the target whose preimage lies in the (closed) source double cone.
inline Region embedding_image(const Spacetime2D& source, const Spacetime2D& target, const AffineMap& map) {
  std::set<Node> nodes;
  const double r = source.radius();
  const double h = target.h();
  double tmin = 1e300, tmax = -1e300, xmin = 1e300, xmax = -1e300;
  for (Point c : {Point{r, 0}, Point{-r, 0}, Point{0, r}, Point{0, -r}}) {
    const Point q = map.apply(c);
    tmin = std::min(tmin, q.t), tmax = std::max(tmax, q.t);
    xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
  }
  const int n0 = static_cast<int>(std::floor(tmin / h)) - 1, n1 = static_cast<int>(std::ceil(tmax / h)) + 1;
  const int j0 = static_cast<int>(std::floor(xmin / h)) - 1, j1 = static_cast<int>(std::ceil(xmax / h)) + 1;
  for (int n = n0; n <= n1; ++n)
    for (int j = j0; j <= j1; ++j) {
      const Point pre = map.inverse(Point{n * h, j * h});
      if (std::abs(pre.t) + std::abs(pre.x) <= r + 1e-9 && target.contains(Node{n, target.wrap(j)}))
        nodes.insert(Node{n, target.wrap(j)});
    }
  return Region::grid_set(target, std::move(nodes));
}

/// Admits a candidate as a morphism of Loc or reports which condition fails.
inline Embedding validate_embedding(const EmbeddingSpec& spec) {
  const auto& S = spec.source;
  const auto& T = spec.target;
  const auto& map = spec.map;
  if (S.h() != T.h()) throw Error(ErrorKind::GridMismatch, "source and target grid spacings differ");
  if (S.mass() != T.mass()) throw Error(ErrorKind::GridMismatch, "source and target masses differ");
  if (!map.proper_orthochronous())
    throw Error(ErrorKind::OrientationViolated, "linear part is not proper orthochronous");
  if (T.kind() == SpacetimeKind::DoubleCone && S.kind() != SpacetimeKind::DoubleCone)
    throw Error(ErrorKind::NotInjective, "an unbounded spacetime does not fit in a double cone");
  if (T.periodic() && map.rapidity != 0.0)
    throw Error(ErrorKind::NotIsometric, "boosts are not isometries of the cylinder");

  switch (S.kind()) {
    case SpacetimeKind::MinkowskiPlane:
      if (T.kind() != SpacetimeKind::MinkowskiPlane)
        throw Error(ErrorKind::NotInjective, "the plane embeds only into the plane");
      break;
    case SpacetimeKind::Cylinder:
      if (!T.periodic() || T.circumference() != S.circumference())
        throw Error(ErrorKind::NotIsometric, "a cylinder embeds only into a cylinder of equal L");
      break;
    case SpacetimeKind::DoubleCone: {
      // An affine map can only fail to be injective by wrapping: brute force over
      // source nodes, no image may also be the image of a point one circumference away.
      if (T.periodic()) {
        const int R = S.radius_steps();
        const double r = S.radius();
        for (int n = -R; n <= R; ++n)
          for (int j = -R; j <= R; ++j) {
            if (std::abs(n) + std::abs(j) >= R) continue;  // open cone
            const Point q = map.apply(S.point(Node{n, j}));
            for (double w : {-T.circumference(), T.circumference()}) {
              const Point pre = map.inverse(Point{q.t, q.x + w});
              if (std::abs(pre.t) + std::abs(pre.x) < r - 1e-9)
                throw Error(ErrorKind::NotInjective, "the image overlaps itself around the cylinder");
            }
          }
      }
      for (Point c : {Point{S.radius(), 0}, Point{-S.radius(), 0}, Point{0, S.radius()}, Point{0, -S.radius()}}) {
        const Point q = map.apply(c);
        if (!T.contains(Point{q.t, T.wrap_x(q.x)}))
          throw Error(ErrorKind::OutOfWindow, "image leaves the target window");
      }
      if (!is_causally_convex(T, embedding_image(S, T, map)))
        throw Error(ErrorKind::CausalConvexityViolated, "a causal curve leaves and re-enters the image");
      break;
    }
  }
  return Embedding(S, T, map);
}

inline Embedding compose_embeddings(const Embedding& second, const Embedding& first) {
  if (!(first.target() == second.source()))
    throw Error(ErrorKind::DomainMismatch, "target of first morphism differs from source of second");
  if (first.is_identity()) return second;
  if (second.is_identity()) return first;
  Embedding out(first.source(), second.target(), compose(second.map(), first.map()));
#ifndef NDEBUG
  validate_embedding(EmbeddingSpec{out.source(), out.target(), out.map()});
#endif
  return out;
}

inline Embedding identity_embedding(const Spacetime2D& M) {
  return validate_embedding(EmbeddingSpec{M, M, AffineMap::identity()});
}

}  // namespace lcqft
