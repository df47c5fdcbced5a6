#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oak/errors.hpp"
#include "oak/hierarchy.hpp"
#include "oak/validation.hpp"
#include "oracles.hpp"

#include <sstream>

using namespace oak;

namespace {

using IntMatrix = KernelMatrix<std::int64_t>;

// root(1) -> {leaf A(3) holding 0, node(2) -> {leaf(3) holding 1, leaf(2) holding 2}}
Hierarchy<std::int64_t> smallTree() {
  Hierarchy<std::int64_t> H(1);
  const auto a = H.addNode(H.root(), 3);
  const auto inner = H.addNode(H.root(), 2);
  H.attachObject(0, a);
  H.attachObject(1, H.addNode(inner, 3));
  H.attachObject(2, H.addNode(inner, 2));
  return H;
}

IntMatrix smallKernel() {
  IntMatrix K(3, 3);
  K << 3, 1, 1, 1, 3, 2, 1, 2, 2;
  return K;
}

bool witnessViolates(const IntMatrix& K, const Witness& w) {
  const auto [x, y, z] = w;
  const auto i = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
  return K(i(x), i(y)) < std::min(K(i(x), i(z)), K(i(z), i(y)));
}

} // namespace

TEST_CASE("induced kernel of a hand-built tree") {
  const auto H = smallTree();
  CHECK(H.nodeCount() == 5);
  CHECK(inducedMatrix(H) == smallKernel());
  CHECK(inducedKernel(H, 0, kNullObject) == 0);
  CHECK(H.additiveWeight(H.root()) == 1);
  CHECK(H.additiveWeight(H.leafOf(1)) == 1);
  CHECK(H.depth(H.leafOf(2)) == 2);
}

TEST_CASE("structural checks") {
  Hierarchy<std::int64_t> H(2);
  CHECK_THROWS_AS(H.addNode(H.root(), 1), InvalidParameter);
  const auto leaf = H.addNode(H.root(), 2);
  H.attachObject(7, leaf);
  CHECK_THROWS_AS(H.attachObject(7, leaf), InvalidParameter);
  CHECK_THROWS_AS(H.attachObject(8, H.root()), InvalidParameter);
  CHECK_THROWS_AS(H.addNode(leaf, 3), InvalidParameter);
  CHECK_THROWS_AS(H.leafOf(3), UnknownObject);
  CHECK_THROWS_AS(H.weight(42), UnknownNode);
  CHECK(H.multiplicity(leaf) == 1);
  CHECK(H.objects() == std::vector<ObjectId>{7});
  CHECK_THROWS_AS(Hierarchy<int>::fromParents({0, 0}, {3, 2}), InvalidParameter);
  CHECK_THROWS_AS(Hierarchy<int>::fromParents({1, 0}, {1, 1}), InvalidParameter);
}

TEST_CASE("strongness") {
  CHECK(isStrong(smallKernel()).strong);
  IntMatrix K = smallKernel();
  K(0, 1) = K(1, 0) = 0;
  const auto check = isStrong(K);
  CHECK_FALSE(check.strong);
  REQUIRE(check.witness);
  CHECK(witnessViolates(K, *check.witness));
  CHECK_THROWS_AS(buildHierarchy(K), NotStrongError);
  try {
    buildHierarchy(K);
  } catch (const NotStrongError& e) {
    CHECK(witnessViolates(K, e.witness()));
  }

  IntMatrix asym = smallKernel();
  asym(0, 1) = 2;
  CHECK_THROWS_AS(isStrong(asym), InvalidKernelMatrix);
  IntMatrix negative = smallKernel();
  negative(0, 2) = negative(2, 0) = -1;
  CHECK_THROWS_AS(buildHierarchy(negative), InvalidKernelMatrix);
  CHECK_THROWS_AS(buildHierarchy(IntMatrix(0, 0)), InvalidKernelMatrix);
  CHECK_THROWS_AS(isStrong(IntMatrix(2, 3)), InvalidKernelMatrix);
}

TEST_CASE("build from a small strong kernel") {
  const auto H = buildHierarchy(smallKernel());
  CHECK(oracle::inducedMatrix(H, 3) == smallKernel());
  CHECK(imageSizeBound(H));
}

TEST_CASE("identical objects share a leaf") {
  IntMatrix K(3, 3);
  K << 2, 2, 1, 2, 2, 1, 1, 1, 1;
  const auto H = buildHierarchy(K);
  CHECK(H.leafOf(0) == H.leafOf(1));
  CHECK(H.multiplicity(H.leafOf(0)) == 2);
  CHECK(oracle::inducedMatrix(H, 3) == K);
}

TEST_CASE("floating point kernels within tolerance") {
  Eigen::MatrixXd K(3, 3);
  K << 1.0, 0.5, 0.25, 0.5, 1.0, 0.25, 0.25, 0.25, 0.7;
  const auto H = buildHierarchy(K);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(inducedKernel(H, i, j) == doctest::Approx(K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  Eigen::MatrixXd noisy = K;
  noisy(0, 2) = noisy(2, 0) = 0.25 - 1e-14;
  CHECK(isStrong(noisy).strong);
  CHECK_FALSE(isStrong(noisy, 0.0).strong);
}

TEST_CASE("feature map") {
  const auto H = smallTree();
  const auto phi = featureMap(H, 1);
  CHECK(phi.supportSize() == H.depth(H.leafOf(1)) + 1);
  for (ObjectId x = 0; x < 3; ++x)
    for (ObjectId y = 0; y < 3; ++y)
      CHECK(dot(featureMap(H, x), featureMap(H, y)) == inducedKernel(H, x, y));
  CHECK(featureMap(H, 0).values().dot(featureMap(H, 2).values()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dot(featureMap(H, 0), featureMap(smallTree(), 0)), HierarchyMismatch);
}

TEST_CASE("text form round-trips") {
  const auto H = smallTree();
  std::ostringstream out;
  writeHierarchy(out, H);
  std::istringstream in(out.str());
  const auto back = readHierarchy<std::int64_t>(in);
  CHECK(back.parents() == H.parents());
  CHECK(back.weights() == H.weights());
  CHECK(inducedMatrix(back) == inducedMatrix(H));

  std::istringstream bad("0 0 1\n1 0 2 x,1 2\n");
  CHECK_THROWS_AS(readHierarchy<std::int64_t>(bad), ParseError);
}

TEST_CASE("canonicalize removes redundant nodes") {
  Hierarchy<std::int64_t> H(1);
  const auto chain = H.addNode(H.root(), 2);
  const auto same = H.addNode(chain, 2);
  H.attachObject(0, H.addNode(same, 4));
  H.attachObject(1, H.addNode(same, 5));
  H.attachObject(2, H.addNode(H.root(), 3));
  const auto C = canonicalize(H);
  CHECK(C.nodeCount() == 5);
  CHECK(inducedMatrix(C, {0, 1, 2}) == inducedMatrix(H, {0, 1, 2}));
  const auto again = canonicalize(C);
  CHECK(again.parents() == C.parents());
  CHECK(again.weights() == C.weights());
}

TEST_CASE("property: random hierarchies") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    const auto H = randomHierarchy(seed, 12, 9);
    H.validate();
    const auto n = H.objectCount();
    const auto K = inducedMatrix(H, [&] {
      std::vector<ObjectId> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      return ids;
    }());
    REQUIRE(K == oracle::inducedMatrix(H, n));
    CHECK(isStrong(K).strong);
    CHECK(imageSizeBound(H));

    // Weights decrease towards the root.
    for (NodeId v = 0; v < H.nodeCount(); ++v)
      CHECK(H.weight(v) >= H.weight(H.parent(v)));

    const auto built = buildHierarchy(K);
    CHECK(oracle::inducedMatrix(built, n) == K);
    CHECK(built.objectCount() == n);

    const auto C = canonicalize(H);
    CHECK(oracle::inducedMatrix(C, n) == K);
    CHECK(canonicalize(C).parents() == C.parents());

    for (ObjectId x = 0; x < n; ++x)
      for (ObjectId y = 0; y < n; ++y)
        CHECK(dot(featureMap(H, x), featureMap(H, y)) == K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
  }
}

TEST_CASE("property: perturbed kernels are rejected with a valid witness") {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto H = randomHierarchy(seed, 10, 9);
    IntMatrix K = inducedMatrix(H);
    const auto n = K.rows();
    if (n < 3)
      continue;
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Eigen::Index x = pick(rng), y = pick(rng), z = pick(rng);
    while (y == x)
      y = pick(rng);
    while (z == x || z == y)
      z = pick(rng);
    const auto m = std::min(K(x, z), K(z, y));
    if (m >= 1)
      K(x, y) = K(y, x) = m - 1;
    else
      K(x, y) = K(y, x) = std::max(K(x, x), K(y, y)) + 1;
    if (isStrong(K).strong)
      continue;
    CAPTURE(seed);
    try {
      buildHierarchy(K);
      FAIL("expected NotStrongError");
    } catch (const NotStrongError& e) {
      CHECK(witnessViolates(K, e.witness()));
    }
  }
}
