#include "oak/validation.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <random>
#include <set>

namespace oak {

std::ostream& operator<<(std::ostream& out, const PsdReport& report) {
  const auto precision = out.precision(10);
  out << "min_eigenvalue=" << report.minEigenvalue << " max_eigenvalue=" << report.maxEigenvalue
      << " tolerance=" << report.tolerance << " passed=" << (report.passed ? "yes" : "no");
  out.precision(precision);
  return out;
}

Hierarchy<std::int64_t> randomHierarchy(std::uint64_t seed, std::size_t maxLeaves,
                                        std::int64_t maxWeight) {
  if (maxLeaves == 0)
    throw InvalidParameter("randomHierarchy: maxLeaves must be at least 1");
  std::mt19937_64 rng(seed);
  const auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, std::max(lo, hi))(rng);
  };
  const auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  const auto leafTotal = static_cast<std::size_t>(uniform(1, static_cast<std::int64_t>(maxLeaves)));
  Hierarchy<std::int64_t> H(uniform(0, maxWeight));
  // (leaf, multiplicity) in creation order; object ids are assigned afterwards.
  std::vector<std::pair<NodeId, std::size_t>> leaves;
  const auto addLeaf = [&](NodeId leaf) { leaves.emplace_back(leaf, chance(0.15) ? 2 : 1); };

  std::function<void(NodeId, std::size_t)> split = [&](NodeId node, std::size_t count) {
    const auto parts = static_cast<std::size_t>(
        uniform(2, static_cast<std::int64_t>(std::min<std::size_t>(count, 4))));
    std::vector<std::size_t> sizes(parts, 1);
    for (std::size_t k = parts; k < count; ++k)
      ++sizes[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(parts) - 1))];
    for (auto size : sizes) {
      const auto child = H.addNode(node, uniform(H.weight(node), maxWeight));
      if (size > 1) {
        split(child, size);
      } else if (chance(0.2)) {
        // Redundant single-child chain, removed by canonicalize.
        addLeaf(H.addNode(child, uniform(H.weight(child), maxWeight)));
      } else {
        addLeaf(child);
      }
    }
  };

  if (leafTotal == 1)
    leaves.emplace_back(H.root(), 1);
  else
    split(H.root(), leafTotal);

  std::size_t objectTotal = 0;
  for (const auto& leaf : leaves)
    objectTotal += leaf.second;
  std::vector<ObjectId> ids(objectTotal);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::size_t next = 0;
  for (const auto& [leaf, multiplicity] : leaves)
    for (std::size_t m = 0; m < multiplicity; ++m)
      H.attachObject(ids[next++], leaf);
  return H;
}

Hierarchy<std::int64_t> balancedHierarchy(std::size_t branching, std::size_t depth) {
  Hierarchy<std::int64_t> H(0);
  std::vector<NodeId> frontier{H.root()};
  for (std::size_t level = 1; level <= depth; ++level) {
    std::vector<NodeId> next;
    next.reserve(frontier.size() * branching);
    for (auto v : frontier)
      for (std::size_t b = 0; b < branching; ++b)
        next.push_back(H.addNode(v, static_cast<std::int64_t>(level)));
    frontier = std::move(next);
  }
  for (std::size_t i = 0; i < frontier.size(); ++i)
    H.attachObject(i, frontier[i]);
  return H;
}

std::vector<TimingRow> benchmarkLinearTime(const Hierarchy<std::int64_t>& hierarchy,
                                           const std::vector<std::size_t>& sizes,
                                           const BenchmarkOptions& options) {
  using Clock = std::chrono::steady_clock;
  std::vector<TimingRow> rows;
  if (sizes.empty())
    return rows;
  const auto objects = hierarchy.objects();
  if (objects.empty())
    throw InvalidParameter("benchmarkLinearTime: hierarchy carries no objects");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, objects.size() - 1);
  const auto elapsedNs = [](Clock::time_point start) {
    return std::chrono::duration<double, std::nano>(Clock::now() - start).count();
  };

  volatile std::int64_t sink = 0;
  for (auto size : sizes) {
    Multiset X(size), Y(size);
    for (auto& x : X)
      x = objects[pick(rng)];
    for (auto& y : Y)
      y = objects[pick(rng)];

    TimingRow row;
    row.size = size;
    row.histogramNs = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(options.repetitions, 1); ++r) {
      const auto start = Clock::now();
      sink = sink + assignmentKernel(hierarchy, X, Y);
      row.histogramNs = std::min(row.histogramNs, elapsedNs(start));
    }
    if (size <= options.hungarianMaxSize) {
      const auto cross = crossMatrix(hierarchy, X, Y);
      const auto start = Clock::now();
      sink = sink + solveHungarian(cross).value;
      row.hungarianNs = elapsedNs(start);
    }
    rows.push_back(row);
  }
  return rows;
}

void writeTimingCsv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "size,histogram_ns,hungarian_ns\n";
  char buffer[64];
  for (const auto& row : rows) {
    std::snprintf(buffer, sizeof buffer, "%.0f", row.histogramNs);
    out << row.size << ',' << buffer << ',';
    if (row.hungarianNs) {
      std::snprintf(buffer, sizeof buffer, "%.0f", *row.hungarianNs);
      out << buffer;
    }
    out << '\n';
  }
}

std::int64_t assignmentOracle(const Dataset& dataset, KernelKind kind, std::size_t i, std::size_t j,
                              const ColourSequence* colours) {
  const auto& g = dataset.graphs.at(i);
  const auto& h = dataset.graphs.at(j);
  KernelMatrix<std::int64_t> cross;
  const auto square = [&](std::size_t a, std::size_t b) {
    const auto n = static_cast<Eigen::Index>(std::max(a, b));
    cross = KernelMatrix<std::int64_t>::Zero(n, n);
  };

  switch (kind) {
  case KernelKind::VertexOA:
    square(g.vertexCount(), h.vertexCount());
    for (Vertex u = 0; u < g.vertexCount(); ++u)
      for (Vertex v = 0; v < h.vertexCount(); ++v)
        cross(u, v) = g.label(u) == h.label(v) ? 1 : 0;
    break;
  case KernelKind::EdgeOA:
    square(g.edgeCount(), h.edgeCount());
    for (std::size_t a = 0; a < g.edgeCount(); ++a)
      for (std::size_t b = 0; b < h.edgeCount(); ++b) {
        const auto [u, v] = g.edges()[a];
        const auto [s, t] = h.edges()[b];
        const bool straight = g.label(u) == h.label(s) && g.label(v) == h.label(t);
        const bool crossed = g.label(u) == h.label(t) && g.label(v) == h.label(s);
        cross(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = straight || crossed ? 1 : 0;
      }
    break;
  case KernelKind::WLOA: {
    if (!colours)
      throw InvalidParameter("assignmentOracle: WL-OA needs a colour sequence");
    square(g.vertexCount(), h.vertexCount());
    for (Vertex u = 0; u < g.vertexCount(); ++u)
      for (Vertex v = 0; v < h.vertexCount(); ++v) {
        std::int64_t matches = 0;
        for (std::size_t it = 0; it <= colours->h; ++it)
          matches += colours->colour(it, i, u) == colours->colour(it, j, v) ? 1 : 0;
        cross(u, v) = matches;
      }
    break;
  }
  default:
    throw InvalidParameter("assignmentOracle: " + kernelName(kind) +
                           " is not an optimal assignment kernel");
  }
  return solveHungarian(cross).value;
}

std::vector<OracleMismatch> oracleCrossCheck(const Dataset& dataset, const GramMatrix& gram,
                                             std::size_t sampleSize, std::uint64_t seed,
                                             double tol) {
  const auto kind = parseKernelName(gram.kernelName);
  if (!isAssignmentKernel(kind))
    throw InvalidParameter("oracleCrossCheck: " + gram.kernelName +
                           " is not an optimal assignment kernel");
  const auto n = dataset.size();
  if (static_cast<std::size_t>(gram.size()) != n)
    throw InvalidParameter("oracleCrossCheck: Gram matrix size does not match the dataset");

  std::optional<ColourSequence> colours;
  if (kind == KernelKind::WLOA) {
    const auto it = gram.params.find("h");
    if (it == gram.params.end())
      throw InvalidParameter("oracleCrossCheck: WL-OA Gram matrix lacks parameter h");
    colours = refine(dataset.graphs, std::stoi(it->second));
  }
  const auto oracle = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(assignmentOracle(dataset, kind, i, j, colours ? &*colours : nullptr));
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n * (n + 1) / 2 <= sampleSize) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < sampleSize) {
      auto i = pick(rng), j = pick(rng);
      chosen.emplace(std::min(i, j), std::max(i, j));
    }
    pairs.assign(chosen.begin(), chosen.end());
  }

  std::vector<OracleMismatch> mismatches;
  for (auto [i, j] : pairs) {
    double expected = oracle(i, j);
    if (gram.normalized) {
      const double di = i == j ? expected : oracle(i, i);
      const double dj = i == j ? expected : oracle(j, j);
      if (di <= 0.0 || dj <= 0.0)
        expected = 0.0;
      else
        expected = i == j ? 1.0 : expected / std::sqrt(di * dj);
    }
    const double actual = gram.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (std::abs(expected - actual) > tol * std::max(1.0, std::abs(expected)))
      mismatches.push_back({i, j, expected, actual});
  }
  return mismatches;
}

} // namespace oak
