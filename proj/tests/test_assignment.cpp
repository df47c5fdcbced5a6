#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oak/assignment.hpp"
#include "oak/errors.hpp"
#include "oak/validation.hpp"
#include "oracles.hpp"

using namespace oak;

namespace {

Multiset randomMultiset(std::mt19937_64& rng, const std::vector<ObjectId>& pool, std::size_t size) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  Multiset X(size);
  for (auto& x : X)
    x = pool[pick(rng)];
  return X;
}

} // namespace

TEST_CASE("padding") {
  const auto [X, Y] = pad({1, 2, 3}, {4});
  CHECK(X == Multiset{1, 2, 3});
  CHECK(Y == Multiset{4, kNullObject, kNullObject});
}

TEST_CASE("histogram intersection of the worked example") {
  const auto g = Histogram<std::int64_t>::fromComponents({5, 8, 3, 2, 1});
  const auto h = Histogram<std::int64_t>::fromComponents({5, 6, 1, 4, 2});
  CHECK(intersect(g, h) == 15);
  CHECK(intersect(h, g) == 15);
  CHECK(g.mass() == 19);
  CHECK(g[1] == 8);
}

TEST_CASE("Hungarian method on fixed matrices") {
  KernelMatrix<std::int64_t> C(3, 3);
  C << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto a = solveHungarian(C);
  CHECK(a.value == 11);
  CHECK(oracle::isBijection(a.pairs, 3));
  CHECK(oracle::bijectionWeight(C, a.pairs) == 11);

  CHECK(solveHungarian(KernelMatrix<std::int64_t>(0, 0)).value == 0);
  CHECK_THROWS_AS(solveHungarian(KernelMatrix<std::int64_t>(2, 3)), InstanceError);
  AssignmentInstance<std::int64_t> bad{{0, 1}, {0}, KernelMatrix<std::int64_t>::Identity(2, 2)};
  CHECK_THROWS_AS(solveHungarian(bad), InstanceError);
}

TEST_CASE("property: Hungarian matches exhaustive search") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 300; ++round) {
    const auto n = static_cast<Eigen::Index>(1 + round % 7);
    KernelMatrix<std::int64_t> C(n, n);
    std::uniform_int_distribution<std::int64_t> value(-20, 20);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        C(i, j) = value(rng);
    const auto a = solveHungarian(C);
    CAPTURE(round);
    CHECK(a.value == oracle::maxAssignment(C));
    CHECK(oracle::isBijection(a.pairs, static_cast<std::size_t>(n)));
    CHECK(oracle::bijectionWeight(C, a.pairs) == a.value);

    const Eigen::MatrixXd D = C.cast<double>() / 7.0;
    CHECK(solveHungarian(D).value == doctest::Approx(oracle::maxAssignment(D)));
  }
}

TEST_CASE("property: histogram intersection equals the optimal assignment") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    const auto H = randomHierarchy(seed, 12, 10);
    const auto objects = H.objects();
    std::uniform_int_distribution<std::size_t> size(0, 8);
    const auto X = randomMultiset(rng, objects, size(rng));
    const auto Y = randomMultiset(rng, objects, size(rng));

    const auto value = assignmentKernel(H, X, Y);
    const auto [px, py] = pad(X, Y);
    KernelMatrix<std::int64_t> cross(static_cast<Eigen::Index>(px.size()),
                                     static_cast<Eigen::Index>(py.size()));
    for (std::size_t i = 0; i < px.size(); ++i)
      for (std::size_t j = 0; j < py.size(); ++j)
        cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            oracle::inducedKernel(H, px[i], py[j]);
    CHECK(crossMatrix(H, px, py) == cross);
    CHECK(value == oracle::maxAssignment(cross));
    CHECK(value == solveHungarian(cross).value);

    const auto greedy = greedyAssignment(H, X, Y);
    CHECK(greedy.value == value);
    CHECK(oracle::isBijection(greedy.pairs, px.size()));
    CHECK(oracle::bijectionWeight(cross, greedy.pairs) == value);

    // Total mass is the sum of self-similarities.
    std::int64_t self = 0;
    for (auto x : X)
      self += oracle::inducedKernel(H, x, x);
    CHECK(histogram(H, X).mass() == self);
    CHECK(assignmentKernel(H, X, X) == self);
    CHECK(assignmentKernel(H, Y, X) == value);
  }
}

TEST_CASE("base kernel given as a matrix") {
  KernelMatrix<std::int64_t> base(3, 3);
  base << 3, 1, 1, 1, 3, 2, 1, 2, 2;
  const AssignmentInstance<std::int64_t> instance{{0, 2}, {1, 1}, base};
  CHECK(solveHungarian(instance).value == 3);
  const auto C = crossMatrix(base, Multiset{0, kNullObject}, Multiset{2, 2});
  CHECK(C(1, 0) == 0);
  CHECK(C(0, 1) == 1);
}

TEST_CASE("histograms from different hierarchies do not mix") {
  const auto a = randomHierarchy(1, 4, 5);
  const auto b = randomHierarchy(1, 4, 5);
  CHECK_THROWS_AS(intersect(histogram(a, {0}), histogram(b, {0})), HierarchyMismatch);
  CHECK(assignmentKernel(a, {}, {}) == 0);
}
