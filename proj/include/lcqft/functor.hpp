#pragma once

// The functor Loc -> Obs: algebra handles, the action of morphisms on Weyl
// elements, the local net, and sampled checks of the axioms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "greens.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "spacetime.hpp"
#include "testfun.hpp"
#include "weyl.hpp"

namespace lcqft {

// ---------------------------------------------------------------------------
// Algebras

/// A(M), or A(O) when a localization region is present.
class AlgebraHandle {
 public:
  AlgebraHandle(Spacetime2D M, std::optional<Region> O) : ambient_(std::move(M)), region_(std::move(O)) {}

  const Spacetime2D& ambient() const { return ambient_; }
  const std::optional<Region>& localization() const { return region_; }

  WeylElement unit() const { return WeylElement::unit(ambient_); }

  bool admits(const TestFunction& f) const {
    if (!(f.ambient() == ambient_)) return false;
    if (!region_) return true;
    for (Node p : f.support())
      if (!region_->contains(p)) return false;
    return true;
  }

  WeylElement generator(const TestFunction& f) const {
    if (!(f.ambient() == ambient_)) throw Error(ErrorKind::AmbientMismatch, "test function lives on another spacetime");
    if (!admits(f)) throw Error(ErrorKind::NotLocalized, "support leaves the localization region");
    return lcqft::generator(ambient_, f);
  }

 private:
  Spacetime2D ambient_;
  std::optional<Region> region_;
};

inline AlgebraHandle algebra_of(const Spacetime2D& M) { return AlgebraHandle(M, std::nullopt); }

inline AlgebraHandle local_algebra(const Spacetime2D& M, const Region& O) {
  if (!(O.ambient() == M)) throw Error(ErrorKind::AmbientMismatch, "region lives on another spacetime");
  if (!is_causally_convex(M, O)) throw Error(ErrorKind::NotCausallyConvex, "region is not causally convex");
  return AlgebraHandle(M, O);
}

// ---------------------------------------------------------------------------
// Morphism action

namespace detail {

/// Lagrange weights at nodes -1, 0, 1, 2 for a point at offset s in [0, 1).
inline std::array<double, 4> cubic_weights(double s) {
  return {-s * (s - 1) * (s - 2) / 6, (s + 1) * (s - 1) * (s - 2) / 2, -(s + 1) * s * (s - 2) / 2,
          (s + 1) * s * (s - 1) / 6};
}

/// A plane or cylinder carrying the solution of a label, with data at t = 0
/// and rows [n0, n1]. A double-cone label is zero-padded: for f in the cone,
/// E f on t = 0 (and on the rows t = +-h) vanishes outside the cone's base.
inline std::pair<Spacetime2D, CauchyData> carrier(const WeylLabel& l, const Spacetime2D& target, int n0, int n1) {
  const auto& S = l.ambient();
  const double h = S.h();
  if (S.kind() == SpacetimeKind::MinkowskiPlane)
    return {Spacetime2D::minkowski(h, S.mass(), std::min(n0, S.n_lo()) * h, std::max(n1, S.n_hi()) * h, S.x_min(),
                                   S.x_max()),
            l.data()};
  if (S.periodic())
    return {Spacetime2D::cylinder(S.circumference(), h, S.mass(), std::min(n0, S.n_lo()) * h,
                                  std::max(n1, S.n_hi()) * h),
            l.data()};
  const int R = S.radius_steps();
  const Spacetime2D C =
      target.periodic()
          ? Spacetime2D::cylinder(target.circumference(), h, S.mass(), n0 * h, n1 * h)
          : Spacetime2D::minkowski(h, S.mass(), n0 * h, n1 * h, -(R + std::max(-n0, n1) + 4) * h,
                                   (R + std::max(-n0, n1) + 4) * h);
  CauchyData d;
  d.t0 = 0.0;
  d.h = h;
  d.j_lo = C.j_lo();
  d.phi.assign(static_cast<std::size_t>(C.nx()), 0.0);
  d.pi = d.phi;
  for (int j = -R; j <= R; ++j) {
    const auto from = static_cast<std::size_t>(j + R);
    const auto to = static_cast<std::size_t>(C.wrap(j) - C.j_lo());
    d.phi[to] += l.data().phi[from];
    d.pi[to] += l.data().pi[from];
  }
  return {C, std::move(d)};
}

/// Label on the target of the solution carried by l, read through the map:
/// the solution is evolved as far as needed and sampled at the preimages of
/// the target rows -1, 0, 1 by tensor cubic interpolation. Preimages that are
/// grid nodes pick the node value exactly.
inline WeylLabel transport(const WeylLabel& l, const AffineMap& map, const Spacetime2D& T) {
  const double h = T.h();
  int n0 = -3, n1 = 3;
  for (int n = -1; n <= 1; ++n)
    for (int j : {T.j_lo(), T.j_hi() + 1}) {
      const Point pre = map.inverse(Point{n * h, j * h});
      n0 = std::min(n0, static_cast<int>(std::floor(pre.t / h)) - 2);
      n1 = std::max(n1, static_cast<int>(std::ceil(pre.t / h)) + 2);
    }
  const auto [S, data] = carrier(l, T, n0, n1);
  const GridSolution u = evolve_homogeneous(S, data);
  // Outside a plane window the solution is zero by the window convention.
  auto at = [&](int n, int j) { return u.at(Node{n, S.periodic() ? S.wrap(j) : j}); };
  auto value = [&](Point p) {
    const double fn = p.t / h;
    const double fj = S.wrap_x(p.x) / h;
    const int n = static_cast<int>(std::floor(fn));
    const int j = static_cast<int>(std::floor(fj));
    const auto wn = cubic_weights(fn - n), wj = cubic_weights(fj - j);
    double v = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (wn[a] != 0.0 && wj[b] != 0.0) v += wn[a] * wj[b] * at(n - 1 + a, j - 1 + b);
    return v;
  };
  CauchyData d;
  d.t0 = 0.0;
  d.h = h;
  d.j_lo = T.j_lo();
  d.phi.resize(static_cast<std::size_t>(T.nx()));
  d.pi.resize(d.phi.size());
  for (int j = T.j_lo(); j <= T.j_hi(); ++j) {
    const auto k = static_cast<std::size_t>(j - T.j_lo());
    d.phi[k] = value(map.inverse(Point{0.0, j * h}));
    d.pi[k] = (value(map.inverse(Point{h, j * h})) - value(map.inverse(Point{-h, j * h}))) / (2.0 * h);
  }
  return WeylLabel::from_data(T, std::move(d));
}

}  // namespace detail

/// alpha_psi on labels and Weyl elements: the solution with the given label
/// is carried along psi and re-read on the target surface t = 0. Grid-aligned
/// translations are exact; other maps are accurate to second order in h.
class MorphismAction {
 public:
  explicit MorphismAction(Embedding psi) : psi_(std::move(psi)) {}

  const Embedding& morphism() const { return psi_; }

  WeylLabel apply(const WeylLabel& l) const {
    if (!(l.ambient() == psi_.source())) throw Error(ErrorKind::DomainMismatch, "label not on the source");
    if (psi_.is_identity()) return l;
    return detail::transport(l, psi_.map(), psi_.target());
  }

  WeylElement apply(const WeylElement& a) const {
    WeylElement out(psi_.target());
    for (const auto& t : a.terms()) out.add_term(apply(t.label), t.coeff);
    return out;
  }

  WeylElement operator()(const WeylElement& a) const { return apply(a); }

 private:
  Embedding psi_;
};

inline MorphismAction alpha(const Embedding& psi) { return MorphismAction(psi); }

// ---------------------------------------------------------------------------
// Sampling

/// Centres and radii for random bumps.
struct BumpBox {
  double t_lo = 0.0, t_hi = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  double r_lo = 0.2, r_hi = 0.4;
};

inline TestFunction random_bump(const Spacetime2D& M, Rng& rng, const BumpBox& box) {
  const double tc = rng.uniform(box.t_lo, box.t_hi);
  const double xc = rng.uniform(box.x_lo, box.x_hi);
  const double rt = rng.uniform(box.r_lo, box.r_hi);
  const double rx = rng.uniform(box.r_lo, box.r_hi);
  const double amp = rng.sign() * rng.uniform(0.5, 2.0);
  return bump(M, Point{tc, xc}, rt, rx, amp);
}

/// A bump whose support lies in the double cone with two cells to spare.
inline TestFunction random_bump_in(const Spacetime2D& M, const DoubleConeShape& c, Rng& rng) {
  const double r = c.radius - 2.0 * M.h();
  const double rt = rng.uniform(0.15, 0.3) * r, rx = rng.uniform(0.15, 0.3) * r;
  const double room = r - std::hypot(rt, rx);
  double u, v;
  do {
    u = rng.uniform(-1.0, 1.0);
    v = rng.uniform(-1.0, 1.0);
  } while (std::abs(u) + std::abs(v) > 1.0);
  const double amp = rng.sign() * rng.uniform(0.5, 2.0);
  return bump(M, Point{c.center.t + room * u, c.center.x + room * v}, rt, rx, amp);
}

inline WeylElement random_element(const Spacetime2D& M, const DoubleConeShape& c, Rng& rng, int terms = 2) {
  WeylElement e(M);
  for (int k = 0; k < terms; ++k)
    e = e + Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * generator(M, random_bump_in(M, c, rng));
  return e;
}

inline WeylElement random_element(const Spacetime2D& M, const BumpBox& box, Rng& rng, int terms = 2) {
  WeylElement e(M);
  for (int k = 0; k < terms; ++k)
    e = e + Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * generator(M, random_bump(M, rng, box));
  return e;
}

/// Largest label distance between matching terms; a term without a partner counts as 1.
inline double element_distance(const WeylElement& a, const WeylElement& b) {
  if (!(a.ambient() == b.ambient())) return 1.0;
  double worst = 0.0;
  for (const auto& t : a.terms()) {
    double best = 1.0;
    for (const auto& s : b.terms()) best = std::min(best, label_distance(t.label, s.label) + std::abs(t.coeff - s.coeff));
    worst = std::max(worst, best);
  }
  if (a.size() != b.size()) worst = std::max(worst, 1.0);
  return worst;
}

// ---------------------------------------------------------------------------
// Checks

/// alpha(id) = id on random elements.
inline Report check_functor_identity(const Spacetime2D& M, const BumpBox& box, Rng& rng, int n_samples) {
  Report r = make_report("functor_identity", 0.0, {{"spacetime", M.id()}});
  const auto a = alpha(identity_embedding(M));
  for (int s = 0; s < n_samples; ++s) {
    const WeylElement e = random_element(M, box, rng);
    r.observe(element_distance(a(e), e));
  }
  return r.finish();
}

/// alpha(psi2 o psi1) against alpha(psi2) o alpha(psi1) on generators of the source.
inline Report check_functor_composition(const Embedding& psi1, const Embedding& psi2, const BumpBox& box, Rng& rng,
                                        int n_samples, double tolerance) {
  Report r = make_report("functor_composition", tolerance,
                         {{"source", psi1.source().id()},
                          {"first", {psi1.map().a0, psi1.map().a1, psi1.map().rapidity}},
                          {"second", {psi2.map().a0, psi2.map().a1, psi2.map().rapidity}}});
  const auto a1 = alpha(psi1), a2 = alpha(psi2);
  const auto a21 = alpha(compose_embeddings(psi2, psi1));
  for (int s = 0; s < n_samples; ++s) {
    const WeylLabel l = WeylLabel::of(psi1.source(), random_bump(psi1.source(), rng, box));
    r.observe(label_distance(a21.apply(l), a2.apply(a1.apply(l))));
  }
  return r.finish();
}

/// alpha(ab) = alpha(a) alpha(b), alpha(1) = 1, alpha(a*) = alpha(a)*.
inline Report check_homomorphism(const Embedding& psi, const BumpBox& box, Rng& rng, int n_samples,
                                 double tolerance) {
  Report r = make_report("homomorphism", tolerance, {{"source", psi.source().id()}, {"target", psi.target().id()}});
  const auto a = alpha(psi);
  const auto& M = psi.source();
  r.observe(coefficient_distance(a(WeylElement::unit(M)), WeylElement::unit(psi.target())));
  for (int s = 0; s < n_samples; ++s) {
    const WeylElement x = random_element(M, box, rng), y = random_element(M, box, rng);
    r.observe(coefficient_distance(a(multiply(x, y)), multiply(a(x), a(y))));
    r.observe(coefficient_distance(a(adjoint(x)), adjoint(a(x))));
  }
  return r.finish();
}

/// Distinct generators stay distinct: label distance of images >= 10 eps_label.
inline Report check_injectivity(const Embedding& psi, const BumpBox& box, Rng& rng, int n_samples) {
  Report r = make_report("injectivity", 0.0, {{"source", psi.source().id()}, {"target", psi.target().id()}});
  const auto a = alpha(psi);
  for (int s = 0; s < n_samples; ++s) {
    const WeylLabel l1 = WeylLabel::of(psi.source(), random_bump(psi.source(), rng, box));
    const WeylLabel l2 = WeylLabel::of(psi.source(), random_bump(psi.source(), rng, box));
    if (label_distance(l1, l2) < 10.0 * kLabelEpsilon) continue;
    r.observe(label_distance(a.apply(l1), a.apply(l2)) >= 10.0 * kLabelEpsilon ? 0.0 : 1.0);
  }
  return r.finish();
}

/// For nested double cones: node sets nest, and sampled generators of the
/// smaller algebra are admitted by every larger one.
inline Report check_isotony(const Spacetime2D& M, const std::vector<DoubleConeShape>& chain, Rng& rng,
                            int n_samples) {
  Report r = make_report("isotony", 0.0, {{"spacetime", M.id()}, {"chain_length", chain.size()}});
  std::vector<AlgebraHandle> algebras;
  std::vector<Region> regions;
  for (const auto& c : chain) {
    regions.push_back(Region::double_cone(M, c.center, c.radius));
    algebras.push_back(local_algebra(M, regions.back()));
  }
  for (std::size_t k = 0; k + 1 < regions.size(); ++k) {
    std::size_t missing = 0;
    for (Node p : regions[k].nodes())
      if (!regions[k + 1].contains(p)) ++missing;
    r.observe(static_cast<double>(missing));
  }
  for (std::size_t k = 0; k < chain.size(); ++k)
    for (int s = 0; s < n_samples; ++s) {
      const TestFunction f = random_bump_in(M, chain[k], rng);
      double bad = algebras[k].admits(f) ? 0.0 : 1.0;
      for (std::size_t q = k + 1; q < chain.size(); ++q)
        if (!algebras[q].admits(f)) bad = 1.0;
      r.observe(bad);
    }
  return r.finish();
}

/// Throws NotCausallySeparated unless every node pair across O1 x O2 is spacelike.
inline void require_separated(const Spacetime2D& M, const Region& O1, const Region& O2) {
  const auto n1 = O1.nodes(), n2 = O2.nodes();
  for (Node p : n1)
    for (Node q : n2)
      if (causal_relation(M, p, q) != CausalRelation::Spacelike)
        throw Error(ErrorKind::NotCausallySeparated, "regions are not causally separated");
}

/// Commutators of elements localized in spacelike separated double cones vanish.
inline Report check_causality(const Spacetime2D& M, const DoubleConeShape& c1, const DoubleConeShape& c2, Rng& rng,
                              int n_samples, double tolerance = 1e-10) {
  const Region O1 = Region::double_cone(M, c1.center, c1.radius);
  const Region O2 = Region::double_cone(M, c2.center, c2.radius);
  require_separated(M, O1, O2);
  Report r = make_report("causality", tolerance,
                         {{"spacetime", M.id()},
                          {"cone1", {c1.center.t, c1.center.x, c1.radius}},
                          {"cone2", {c2.center.t, c2.center.x, c2.radius}}});
  for (int s = 0; s < n_samples; ++s) {
    const WeylElement a = random_element(M, c1, rng), b = random_element(M, c2, rng);
    r.observe(coefficient_distance(multiply(a, b), multiply(b, a)));
  }
  return r.finish();
}

/// Largest block of complete rows [n1, n2] of O around t = 0.
inline std::pair<int, int> full_rows_around_zero(const Spacetime2D& M, const Region& O) {
  auto full = [&](int n) {
    for (int j = M.j_lo(); j <= M.j_hi(); ++j)
      if (M.contains(Node{n, j}) && !O.contains(Node{n, j})) return false;
    return true;
  };
  if (!full(0)) throw Error(ErrorKind::OutOfDomain, "region does not contain the surface t = 0");
  int n1 = 0, n2 = 0;
  while (n1 - 1 >= M.n_lo() && full(n1 - 1)) --n1;
  while (n2 + 1 <= M.n_hi() && full(n2 + 1)) ++n2;
  return {n1, n2};
}

/// W(f) = W(f'') with f'' supported in the slab, for random global f.
inline Report check_time_slice(const Spacetime2D& M, const Region& slab, const BumpBox& box, Rng& rng, int n_samples,
                               double tolerance = kLabelEpsilon) {
  const auto [n1, n2] = full_rows_around_zero(M, slab);
  if (n1 >= n2) throw Error(ErrorKind::OutOfDomain, "slab must contain more than one row");
  Report r = make_report("time_slice", tolerance, {{"spacetime", M.id()}, {"rows", {n1, n2}}});
  for (int s = 0; s < n_samples; ++s) {
    const TestFunction f = random_bump(M, rng, box);
    const GridSolution u = causal_propagator(M, f);
    const TestFunction f2 = compress_solution(u, n1, n2);
    bool inside = true;
    for (Node p : f2.support())
      if (!slab.contains(p)) inside = false;
    const double d = label_distance(WeylLabel::from_data(M, cauchy_data(u, 0.0)), WeylLabel::of(M, f2));
    r.observe(inside ? d : 1.0);
  }
  return r.finish();
}

/// Worst distance between alpha_psi(label E f) and label E(psi_* f).
inline double naturality_deviation(const MorphismAction& a, const TestFunction& f) {
  const auto& psi = a.morphism();
  const WeylLabel transported = a.apply(WeylLabel::of(psi.source(), f));
  const WeylLabel direct = WeylLabel::of(psi.target(), pushforward(psi, f));
  return label_distance(transported, direct);
}

/// Generators of A(O) go to generators of A(kappa(O)) (support) and the
/// transported label agrees with the label recomputed from kappa_* f.
inline std::pair<Report, Report> check_covariance(const Spacetime2D& M, const Embedding& kappa,
                                                  const std::vector<DoubleConeShape>& regions, Rng& rng,
                                                  int n_samples, double tolerance) {
  if (!(kappa.source() == M) || !(kappa.target() == M))
    throw Error(ErrorKind::DomainMismatch, "covariance needs an automorphism of M");
  const Json params = {{"spacetime", M.id()},
                       {"map", {kappa.map().a0, kappa.map().a1, kappa.map().rapidity}}};
  Report support = make_report("covariance_support", 0.0, params);
  Report labels = make_report("covariance_label", tolerance, params);
  const auto a = alpha(kappa);
  for (const auto& c : regions) {
    const Region O = Region::double_cone(M, c.center, c.radius);
    for (int s = 0; s < n_samples; ++s) {
      const TestFunction f = random_bump_in(M, c, rng);
      const TestFunction g = pushforward(kappa, f);
      std::size_t outside = 0;
      // kappa(O) pulled back: each support node of kappa_* f must come from O.
      for (Node p : g.support())
        if (!O.contains(M.snap(kappa.inverse(M.point(p))))) ++outside;
      support.observe(static_cast<double>(outside));
      labels.observe(naturality_deviation(a, f));
    }
  }
  support.finish();
  labels.finish();
  return {support, labels};
}

}  // namespace lcqft
