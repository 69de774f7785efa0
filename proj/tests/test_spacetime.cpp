#include <gtest/gtest.h>

#include <cmath>

#include "lcqft/rng.hpp"
#include "lcqft/spacetime.hpp"
#include "oracles.hpp"

using namespace lcqft;

namespace {

Spacetime2D plane(double h = 0.1) { return Spacetime2D::minkowski(h, 0.0, -2.0, 2.0, -4.0, 4.0); }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::IoError;
}

}  // namespace

TEST(Spacetime, ConstructionInvariants) {
  EXPECT_EQ(kind_of([] { Spacetime2D::cylinder(10.05, 0.1, 0.5, -1, 1); }), ErrorKind::InvalidSpacetime);
  EXPECT_EQ(kind_of([] { Spacetime2D::cylinder(0.0, 0.1, 0.5, -1, 1); }), ErrorKind::InvalidSpacetime);
  EXPECT_EQ(kind_of([] { Spacetime2D::minkowski(0.1, -1.0, -1, 1, -1, 1); }), ErrorKind::InvalidSpacetime);
  EXPECT_EQ(kind_of([] { Spacetime2D::minkowski(0.1, 2.0, -1, 1, -1, 1); }), ErrorKind::InvalidSpacetime);
  EXPECT_EQ(kind_of([] { Spacetime2D::minkowski(0.1, 0.0, 0.0, 1, -1, 1); }), ErrorKind::InvalidSpacetime);
  const auto C = Spacetime2D::cylinder(10.0, 0.1, 0.5, -1, 1);
  EXPECT_EQ(C.nx(), 100);
  EXPECT_EQ(C.wrap(-1), 99);
  EXPECT_EQ(C.wrap(100), 0);
  EXPECT_DOUBLE_EQ(C.wrap_x(-0.5), 9.5);
}

TEST(CausalRelation, MinkowskiExamples) {
  const auto M = plane();
  EXPECT_EQ(causal_relation(M, Point{0, 0}, Point{2, 1}), CausalRelation::Timelike);
  EXPECT_EQ(causal_relation(M, Point{0, 0}, Point{1, 1}), CausalRelation::Lightlike);
  EXPECT_EQ(causal_relation(M, Point{0, 0}, Point{0.5, 2}), CausalRelation::Spacelike);
}

TEST(CausalRelation, CylinderWinding) {
  const auto C = Spacetime2D::cylinder(10.0, 0.1, 0.5, -1, 1);
  EXPECT_EQ(causal_relation(C, Point{0, 0}, Point{0.5, 9.9}), CausalRelation::Timelike);
  EXPECT_EQ(causal_relation(C, Point{0, 0}, Point{0.5, 5.0}), CausalRelation::Spacelike);
}

TEST(CausalRelation, OutOfDomain) {
  EXPECT_EQ(kind_of([] { causal_relation(plane(), Point{0, 0}, Point{3, 0}); }), ErrorKind::OutOfDomain);
}

TEST(CausalRelation, SymmetricInArguments) {
  const auto M = plane();
  const auto C = Spacetime2D::cylinder(4.0, 0.1, 0.5, -2, 2);
  Rng rng(7, "symmetry");
  for (int k = 0; k < 500; ++k) {
    const Point p{rng.uniform(-2, 2), rng.uniform(-4, 4)}, q{rng.uniform(-2, 2), rng.uniform(-4, 4)};
    EXPECT_EQ(causal_relation(M, p, q), causal_relation(M, q, p));
    const Point a{p.t, C.wrap_x(p.x)}, b{q.t, C.wrap_x(q.x)};
    EXPECT_EQ(causal_relation(C, a, b), causal_relation(C, b, a));
  }
}

TEST(CausalConvexity, DoubleConesAreConvex) {
  const auto M = plane();
  for (double r : {0.3, 1.0, 1.5}) {
    const auto O = Region::double_cone(M, Point{0.2, -0.7}, r);
    EXPECT_TRUE(is_causally_convex(M, O));
    EXPECT_TRUE(oracle::causally_convex_by_search(M, O));
  }
}

TEST(CausalConvexity, SlabOnCylinder) {
  const auto C = Spacetime2D::cylinder(10.0, 0.1, 0.5, -1, 1);
  EXPECT_TRUE(is_causally_convex(C, Region::slab(C, -0.5, 0.5)));
}

TEST(CausalConvexity, UnionsAgreeWithPathSearch) {
  const auto M = plane();
  auto union_of = [&](Point a, Point b, double r) {
    std::set<Node> nodes;
    for (Node p : Region::double_cone(M, a, r).nodes()) nodes.insert(p);
    for (Node p : Region::double_cone(M, b, r).nodes()) nodes.insert(p);
    return Region::grid_set(M, nodes);
  };
  // Spacelike cones: no causal curve joins them, so the union is convex.
  const auto spacelike = union_of({0, -2}, {0, 2}, 1.5);
  EXPECT_TRUE(is_causally_convex(M, spacelike));
  EXPECT_TRUE(oracle::causally_convex_by_search(M, spacelike));
  // Timelike cones: curves from one to the other pass through the gap.
  const auto timelike = union_of({-1.2, 0}, {1.2, 0}, 0.6);
  EXPECT_FALSE(is_causally_convex(M, timelike));
  EXPECT_FALSE(oracle::causally_convex_by_search(M, timelike));
}

TEST(CausalConvexity, RandomGridSetsAgreeWithPathSearch) {
  const auto M = Spacetime2D::minkowski(0.25, 0.0, -1.0, 1.0, -1.5, 1.5);
  Rng rng(3, "convexity");
  int convex = 0;
  for (int k = 0; k < 60; ++k) {
    std::set<Node> nodes;
    const int count = rng.uniform_int(1, 6);
    for (int i = 0; i < count; ++i) {
      const Node c{rng.uniform_int(M.n_lo(), M.n_hi()), rng.uniform_int(M.j_lo(), M.j_hi())};
      for (Node p : Region::double_cone(M, M.point(c), 0.25 * rng.uniform_int(0, 2)).nodes()) nodes.insert(p);
    }
    const auto O = Region::grid_set(M, nodes);
    const bool got = is_causally_convex(M, O);
    EXPECT_EQ(got, oracle::causally_convex_by_search(M, O));
    convex += got;
  }
  EXPECT_GT(convex, 0);
  EXPECT_LT(convex, 60);
}

TEST(CausalConvexity, AmbientMismatch) {
  const auto other = Spacetime2D::minkowski(0.1, 0.0, -1, 1, -1, 1);
  EXPECT_EQ(kind_of([&] { is_causally_convex(plane(), Region::slab(other, 0, 0.5)); }), ErrorKind::AmbientMismatch);
}

TEST(Embedding, IdentityOnMinkowski) {
  const auto id = identity_embedding(plane());
  EXPECT_TRUE(id.is_identity());
}

TEST(Embedding, DoubleConeIntoCylinder) {
  const auto C = Spacetime2D::cylinder(10.0, 0.1, 0.5, -3.5, 3.5);
  const auto D3 = Spacetime2D::double_cone(3.0, 0.1, 0.5);
  EXPECT_NO_THROW(validate_embedding({D3, C, AffineMap::translation(0.0, 5.0)}));
  const auto D6 = Spacetime2D::double_cone(6.0, 0.1, 0.5);
  const auto C6 = Spacetime2D::cylinder(10.0, 0.1, 0.5, -6.5, 6.5);
  EXPECT_EQ(kind_of([&] { validate_embedding({D6, C6, AffineMap::translation(0.0, 5.0)}); }), ErrorKind::NotInjective);
}

TEST(Embedding, RejectsInvalidMorphisms) {
  const auto M = plane();
  const auto C = Spacetime2D::cylinder(4.0, 0.1, 0.0, -2, 2);
  const auto fine = Spacetime2D::minkowski(0.05, 0.0, -2.0, 2.0, -4.0, 4.0);
  const auto heavy = Spacetime2D::minkowski(0.1, 0.5, -2.0, 2.0, -4.0, 4.0);
  AffineMap reflect = AffineMap::identity();
  reflect.reverse_time = true;
  EXPECT_EQ(kind_of([&] { validate_embedding({M, M, reflect}); }), ErrorKind::OrientationViolated);
  EXPECT_EQ(kind_of([&] { validate_embedding({M, fine, {}}); }), ErrorKind::GridMismatch);
  EXPECT_EQ(kind_of([&] { validate_embedding({M, heavy, {}}); }), ErrorKind::GridMismatch);
  EXPECT_EQ(kind_of([&] { validate_embedding({C, C, AffineMap::boost(0.1)}); }), ErrorKind::NotIsometric);
  EXPECT_EQ(kind_of([&] { validate_embedding({M, C, {}}); }), ErrorKind::NotInjective);
  const auto D = Spacetime2D::double_cone(1.0, 0.1, 0.0);
  EXPECT_EQ(kind_of([&] { validate_embedding({D, M, AffineMap::translation(1.5, 0)}); }), ErrorKind::OutOfWindow);
}

TEST(Embedding, CompositionLaws) {
  const auto M = plane();
  const auto id = identity_embedding(M);
  const auto t1 = validate_embedding({M, M, AffineMap::translation(0, 1)});
  const auto t2 = validate_embedding({M, M, AffineMap::translation(0, 2)});
  EXPECT_EQ(compose_embeddings(id, t1).map(), t1.map());
  EXPECT_EQ(compose_embeddings(t1, id).map(), t1.map());
  EXPECT_EQ(compose_embeddings(t1, t2).map(), AffineMap::translation(0, 3));

  const auto b1 = validate_embedding({M, M, AffineMap::boost(0.1)});
  const auto b2 = validate_embedding({M, M, AffineMap::boost(0.25)});
  const auto b = compose_embeddings(b1, b2).map();
  EXPECT_DOUBLE_EQ(b.rapidity, 0.35);
  EXPECT_EQ(b.a0, 0.0);

  const auto t3 = validate_embedding({M, M, AffineMap::translation(0.3, -0.2)});
  const auto left = compose_embeddings(compose_embeddings(t3, b1), t1).map();
  const auto right = compose_embeddings(t3, compose_embeddings(b1, t1)).map();
  EXPECT_NEAR(left.a0, right.a0, 1e-15);
  EXPECT_NEAR(left.a1, right.a1, 1e-15);
  EXPECT_DOUBLE_EQ(left.rapidity, right.rapidity);

  const auto C = Spacetime2D::cylinder(4.0, 0.1, 0.0, -2, 2);
  EXPECT_EQ(kind_of([&] { compose_embeddings(identity_embedding(C), t1); }), ErrorKind::DomainMismatch);
}

TEST(Embedding, PreservesCausalType) {
  const auto M = Spacetime2D::minkowski(0.1, 0.0, -4.0, 4.0, -8.0, 8.0);
  const auto D = Spacetime2D::double_cone(1.0, 0.1, 0.0);
  const auto psi = validate_embedding({D, M, {0.3, -0.4, 0.4, false, false}});
  Rng rng(11, "isometry");
  for (int k = 0; k < 400; ++k) {
    const Point p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, q{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const auto before = causal_relation(D, p, q);
    if (before == CausalRelation::Spacelike) continue;
    EXPECT_EQ(causal_relation(M, psi.apply(p), psi.apply(q)), before);
  }
}

TEST(Embedding, GridShiftDetection) {
  const auto M = plane();
  EXPECT_TRUE(validate_embedding({M, M, AffineMap::translation(0.2, -0.3)}).grid_shift().has_value());
  EXPECT_FALSE(validate_embedding({M, M, AffineMap::translation(0.05, 0)}).grid_shift().has_value());
  EXPECT_FALSE(validate_embedding({M, M, AffineMap::boost(0.1)}).grid_shift().has_value());
}
