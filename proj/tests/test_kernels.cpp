#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oak/assignment.hpp"
#include "oak/errors.hpp"
#include "oak/kernels.hpp"
#include "oracles.hpp"

using namespace oak;

namespace {

Dataset randomDataset(std::uint64_t seed, std::size_t count = 8) {
  return syntheticDataset(seed, count, 8, 0.35, 3);
}

double at(const GramMatrix& g, std::size_t i, std::size_t j) {
  return g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

// Hungarian on a cross matrix filled by the test, zero-padded to square.
template <typename F>
double assignmentByHungarian(std::size_t rows, std::size_t cols, F&& base) {
  const auto n = static_cast<Eigen::Index>(std::max(rows, cols));
  KernelMatrix<std::int64_t> C = KernelMatrix<std::int64_t>::Zero(n, n);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = base(i, j);
  return static_cast<double>(solveHungarian(C).value);
}

std::multiset<Label> endLabels(const Graph& g, const Edge& e) {
  return {g.label(e.first), g.label(e.second)};
}

} // namespace

TEST_CASE("kernel names") {
  for (auto kind : kAllKernels)
    CHECK(parseKernelName(kernelName(kind)) == kind);
  CHECK(parseKernelName("wl-oa") == KernelKind::WLOA);
  CHECK(parseKernelName("Sp") == KernelKind::ShortestPath);
  CHECK_THROWS_AS(parseKernelName("rbf"), UnknownKernel);
  CHECK(isAssignmentKernel(KernelKind::EdgeOA));
  CHECK_FALSE(isAssignmentKernel(KernelKind::WL));
}

TEST_CASE("vertex kernel on a triangle") {
  Dataset d;
  d.graphs = {Graph({0, 0, 0}, {{0, 1}, {1, 2}, {0, 2}})};
  const auto g = gram(d, KernelKind::Vertex);
  CHECK(g.size() == 1);
  CHECK(g.values(0, 0) == 9.0);
  CHECK(gram(d, KernelKind::Edge).values(0, 0) == 9.0);
  CHECK(gram(d, KernelKind::Graphlet).values(0, 0) == 1.0);
  CHECK(gram(d, KernelKind::ShortestPath).values(0, 0) == 9.0);
  CHECK(gram(d, KernelKind::VertexOA).values(0, 0) == 3.0);
}

TEST_CASE("graphlet classes of a labelled path and triangle") {
  const Graph path({0, 1, 0}, {{0, 1}, {1, 2}});
  const auto counts = graphletCounts(path);
  REQUIRE(counts.size() == 1);
  CHECK(counts.begin()->second == 1);
  CHECK(graphletKernel(path, Graph({2, 1, 0}, {{0, 1}, {1, 2}})) == 0.0);
  CHECK(graphletKernel(path, Graph({1, 0, 0}, {{0, 1}, {0, 2}})) == 1.0);
}

TEST_CASE("property: explicit kernels match recount oracles") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    const auto d = randomDataset(seed);
    const auto V = gram(d, KernelKind::Vertex);
    const auto E = gram(d, KernelKind::Edge);
    const auto GL = gram(d, KernelKind::Graphlet);
    const auto SP = gram(d, KernelKind::ShortestPath);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) {
        const auto& g = d.graphs[i];
        const auto& h = d.graphs[j];
        CHECK(at(V, i, j) == oracle::vertexKernel(g, h));
        CHECK(vertexKernel(g, h) == oracle::vertexKernel(g, h));
        CHECK(at(E, i, j) == oracle::edgeKernel(g, h));
        CHECK(edgeKernel(g, h) == oracle::edgeKernel(g, h));
        const auto gl = oracle::dot(oracle::graphletCounts(g), oracle::graphletCounts(h));
        CHECK(at(GL, i, j) == gl);
        CHECK(graphletKernel(g, h) == gl);
        const auto sp = oracle::dot(oracle::shortestPathCounts(g), oracle::shortestPathCounts(h));
        CHECK(at(SP, i, j) == sp);
        CHECK(shortestPathKernel(g, h) == sp);
      }
  }
}

TEST_CASE("property: assignment kernels match the Hungarian method") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    const auto d = randomDataset(seed);
    const auto VOA = gram(d, KernelKind::VertexOA);
    const auto EOA = gram(d, KernelKind::EdgeOA);
    const int h = static_cast<int>(seed % 4);
    const auto WLOA = gram(d, KernelKind::WLOA, {h, 1});
    CHECK(WLOA.params.at("h") == std::to_string(h));
    const auto names = oracle::wlStrings(d.graphs, h);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) {
        const auto& g = d.graphs[i];
        const auto& k = d.graphs[j];
        const auto v = assignmentByHungarian(g.vertexCount(), k.vertexCount(), [&](auto a, auto b) {
          return g.label(static_cast<Vertex>(a)) == k.label(static_cast<Vertex>(b)) ? 1 : 0;
        });
        CHECK(at(VOA, i, j) == v);
        CHECK(vertexOAKernel(g, k) == v);
        const auto e = assignmentByHungarian(g.edgeCount(), k.edgeCount(), [&](auto a, auto b) {
          return endLabels(g, g.edges()[a]) == endLabels(k, k.edges()[b]) ? 1 : 0;
        });
        CHECK(at(EOA, i, j) == e);
        CHECK(edgeOAKernel(g, k) == e);
        const auto w = assignmentByHungarian(g.vertexCount(), k.vertexCount(), [&](auto a, auto b) {
          return oracle::matchingColours(names, i, static_cast<Vertex>(a), j, static_cast<Vertex>(b));
        });
        CHECK(at(WLOA, i, j) == w);
      }
  }
}

TEST_CASE("property: WL subtree kernel counts shared colours") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto d = randomDataset(seed, 6);
    const int h = 2;
    const auto WL = gram(d, KernelKind::WL, {h, 1});
    const auto colours = refine(d.graphs, h);
    const auto names = oracle::wlStrings(d.graphs, h);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) {
        double expected = 0;
        for (int it = 0; it <= h; ++it)
          for (const auto& x : names[i][it])
            for (const auto& y : names[j][it])
              expected += x == y ? 1 : 0;
        CHECK(at(WL, i, j) == expected);
        CHECK(wlKernel(colours, i, j) == doctest::Approx(expected));
      }
  }
}

TEST_CASE("pairwise WL-OA agrees with the Gram matrix") {
  const auto d = randomDataset(3, 5);
  const auto colours = refine(d.graphs, 2);
  const auto W = gram(d, KernelKind::WLOA, {2, 1});
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(wlOAKernel(colours, i, j) == at(W, i, j));
}

TEST_CASE("threads do not change results") {
  const auto d = randomDataset(4, 12);
  for (auto kind : kAllKernels) {
    CAPTURE(kernelName(kind));
    const auto one = gram(d, kind, {3, 1});
    const auto three = gram(d, kind, {3, 3});
    CHECK(one.values == three.values);
    CHECK(one.values == one.values.transpose());
    CHECK(one.kernelName == kernelName(kind));
  }
}

TEST_CASE("empty graphs") {
  Dataset d;
  d.graphs = {Graph(), Graph({0}, {})};
  for (auto kind : kAllKernels) {
    const auto g = gram(d, kind);
    CHECK(g.values(0, 0) == 0.0);
    CHECK(g.values(0, 1) == 0.0);
    const auto n = normalize(g);
    CHECK(n.normalized);
    CHECK(n.values(0, 0) == 0.0);
  }
}

TEST_CASE("normalization") {
  Eigen::MatrixXd K(3, 3);
  K << 4, 2, 0, 2, 9, 0, 0, 0, 0;
  const auto N = normalize(K);
  CHECK(N(0, 0) == 1.0);
  CHECK(N(1, 1) == 1.0);
  CHECK(N(0, 1) == doctest::Approx(2.0 / 6.0));
  CHECK(N(1, 0) == N(0, 1));
  CHECK(N(2, 2) == 0.0);
  CHECK(N.row(2).isZero());

  const auto d = randomDataset(8, 10);
  const auto g = normalize(gram(d, KernelKind::WLOA));
  for (Eigen::Index i = 0; i < g.size(); ++i)
    CHECK(g.values(i, i) == 1.0);
  CHECK(g.values.maxCoeff() <= 1.0 + 1e-12);
}
