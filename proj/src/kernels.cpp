#include "oak/kernels.hpp"

#include "oak/assignment.hpp"
#include "oak/errors.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <queue>
#include <thread>

namespace oak {

namespace {

struct KernelEntry {
  KernelKind kind;
  const char* name;
};

constexpr KernelEntry kKernelNames[] = {
    {KernelKind::Vertex, "V"},    {KernelKind::Edge, "E"},    {KernelKind::VertexOA, "V-OA"},
    {KernelKind::EdgeOA, "E-OA"}, {KernelKind::WL, "WL"},     {KernelKind::WLOA, "WL-OA"},
    {KernelKind::Graphlet, "GL"}, {KernelKind::ShortestPath, "SP"}};

template <typename F>
void parallelFor(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads)
        body(i);
    });
  for (auto& w : workers)
    w.join();
}

FeatureKey sortedPair(Label a, Label b) { return {std::min(a, b), std::max(a, b), 0, 0}; }

std::vector<FeatureKey> vertexKeys(const Graph& g) {
  std::vector<FeatureKey> keys;
  keys.reserve(g.vertexCount());
  for (auto l : g.labels())
    keys.push_back({l, 0, 0, 0});
  return keys;
}

std::vector<FeatureKey> edgeKeys(const Graph& g) {
  std::vector<FeatureKey> keys;
  keys.reserve(g.edgeCount());
  for (auto [u, v] : g.edges())
    keys.push_back(sortedPair(g.label(u), g.label(v)));
  return keys;
}

FeatureCounts countKeys(const std::vector<FeatureKey>& keys) {
  FeatureCounts counts;
  for (const auto& k : keys)
    ++counts[k];
  return counts;
}

/// Dense object ids for categorical keys, shared by all graphs of a Gram matrix.
class KeyDictionary {
public:
  ObjectId id(const FeatureKey& key) { return ids_.try_emplace(key, ids_.size()).first->second; }
  std::size_t size() const { return ids_.size(); }

  Multiset objects(const std::vector<FeatureKey>& keys) {
    Multiset out;
    out.reserve(keys.size());
    for (const auto& k : keys)
      out.push_back(id(k));
    return out;
  }

private:
  std::map<FeatureKey, ObjectId> ids_;
};

// Assignment kernel with the Dirac base kernel on keys.
double diracAssignment(const std::vector<FeatureKey>& a, const std::vector<FeatureKey>& b) {
  KeyDictionary dictionary;
  const auto X = dictionary.objects(a);
  const auto Y = dictionary.objects(b);
  return static_cast<double>(assignmentKernel(diracHierarchy(dictionary.size()), X, Y));
}

Eigen::MatrixXd explicitGram(const std::vector<FeatureCounts>& counts) {
  std::map<FeatureKey, Eigen::Index> columns;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t g = 0; g < counts.size(); ++g)
    for (const auto& [key, c] : counts[g]) {
      const auto col = columns.try_emplace(key, static_cast<Eigen::Index>(columns.size())).first->second;
      triplets.emplace_back(static_cast<Eigen::Index>(g), col, static_cast<double>(c));
    }
  Eigen::SparseMatrix<double, Eigen::RowMajor> phi(static_cast<Eigen::Index>(counts.size()),
                                                   static_cast<Eigen::Index>(columns.size()));
  phi.setFromTriplets(triplets.begin(), triplets.end());
  return Eigen::MatrixXd(phi * phi.transpose());
}

Eigen::MatrixXd intersectionGram(const std::vector<Histogram<std::int64_t>>& histograms,
                                 unsigned threads) {
  const auto n = static_cast<Eigen::Index>(histograms.size());
  Eigen::MatrixXd values(n, n);
  parallelFor(histograms.size(), threads, [&](std::size_t i) {
    for (std::size_t j = i; j < histograms.size(); ++j) {
      const auto v = static_cast<double>(intersect(histograms[i], histograms[j]));
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  });
  return values;
}

} // namespace

std::string kernelName(KernelKind kind) {
  for (const auto& e : kKernelNames)
    if (e.kind == kind)
      return e.name;
  throw UnknownKernel("unknown kernel kind");
}

KernelKind parseKernelName(const std::string& name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& e : kKernelNames)
    if (upper == e.name)
      return e.kind;
  throw UnknownKernel("unknown kernel '" + name + "' (expected one of v, e, v-oa, e-oa, wl, wl-oa, gl, sp)");
}

bool isAssignmentKernel(KernelKind kind) {
  return kind == KernelKind::VertexOA || kind == KernelKind::EdgeOA || kind == KernelKind::WLOA;
}

bool usesRefinement(KernelKind kind) { return kind == KernelKind::WL || kind == KernelKind::WLOA; }

FeatureCounts vertexLabelCounts(const Graph& g) { return countKeys(vertexKeys(g)); }

FeatureCounts edgeLabelCounts(const Graph& g) { return countKeys(edgeKeys(g)); }

FeatureCounts graphletCounts(const Graph& g) {
  FeatureCounts counts;
  for (Vertex c = 0; c < g.vertexCount(); ++c) {
    const auto& nb = g.neighbours(c);
    for (std::size_t x = 0; x < nb.size(); ++x)
      for (std::size_t y = x + 1; y < nb.size(); ++y) {
        const Vertex a = nb[x], b = nb[y];
        if (g.adjacent(a, b)) {
          // Each triangle once, from its smallest vertex.
          if (c < a) {
            std::array<std::uint64_t, 3> l{g.label(c), g.label(a), g.label(b)};
            std::sort(l.begin(), l.end());
            ++counts[{1, l[0], l[1], l[2]}];
          }
        } else {
          const auto ends = sortedPair(g.label(a), g.label(b));
          ++counts[{0, g.label(c), ends[0], ends[1]}];
        }
      }
  }
  return counts;
}

FeatureCounts shortestPathCounts(const Graph& g) {
  FeatureCounts counts;
  const auto n = g.vertexCount();
  std::vector<std::size_t> dist(n);
  std::queue<Vertex> queue;
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  for (Vertex s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), unreached);
    dist[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop();
      for (auto u : g.neighbours(v))
        if (dist[u] == unreached) {
          dist[u] = dist[v] + 1;
          queue.push(u);
        }
    }
    for (Vertex t = s + 1; t < n; ++t)
      if (dist[t] != unreached) {
        auto key = sortedPair(g.label(s), g.label(t));
        key[2] = dist[t];
        ++counts[key];
      }
  }
  return counts;
}

std::int64_t dot(const FeatureCounts& a, const FeatureCounts& b) {
  std::int64_t sum = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else
      sum += (i++)->second * (j++)->second;
  }
  return sum;
}

double vertexKernel(const Graph& g, const Graph& h) {
  return static_cast<double>(dot(vertexLabelCounts(g), vertexLabelCounts(h)));
}

double edgeKernel(const Graph& g, const Graph& h) {
  return static_cast<double>(dot(edgeLabelCounts(g), edgeLabelCounts(h)));
}

double vertexOAKernel(const Graph& g, const Graph& h) {
  return diracAssignment(vertexKeys(g), vertexKeys(h));
}

double edgeOAKernel(const Graph& g, const Graph& h) {
  return diracAssignment(edgeKeys(g), edgeKeys(h));
}

double wlKernel(const ColourSequence& colours, std::size_t i, std::size_t j) {
  return wlFeatureVector(colours, i).dot(wlFeatureVector(colours, j));
}

double wlOAKernel(const ColourSequence& colours, std::size_t i, std::size_t j) {
  return wlOAKernel(wlHierarchy(colours), colours, i, j);
}

double wlOAKernel(const Hierarchy<std::int64_t>& hierarchy, const ColourSequence& colours,
                  std::size_t i, std::size_t j) {
  return static_cast<double>(
      assignmentKernel(hierarchy, colours.vertexObjects(i), colours.vertexObjects(j)));
}

double graphletKernel(const Graph& g, const Graph& h) {
  return static_cast<double>(dot(graphletCounts(g), graphletCounts(h)));
}

double shortestPathKernel(const Graph& g, const Graph& h) {
  return static_cast<double>(dot(shortestPathCounts(g), shortestPathCounts(h)));
}

Hierarchy<std::int64_t> diracHierarchy(std::size_t keyCount) {
  Hierarchy<std::int64_t> H(0);
  for (std::size_t k = 0; k < keyCount; ++k)
    H.attachObject(k, H.addNode(H.root(), 1));
  return H;
}

GramMatrix gram(const Dataset& dataset, KernelKind kind, const GramParams& params) {
  GramMatrix out;
  out.kernelName = kernelName(kind);
  const auto& graphs = dataset.graphs;
  const auto n = graphs.size();

  const auto explicitFeatures = [&](FeatureCounts (*extract)(const Graph&)) {
    std::vector<FeatureCounts> counts(n);
    parallelFor(n, params.threads, [&](std::size_t i) { counts[i] = extract(graphs[i]); });
    return explicitGram(counts);
  };
  const auto diracFeatures = [&](std::vector<FeatureKey> (*keys)(const Graph&)) {
    KeyDictionary dictionary;
    std::vector<Multiset> sets;
    sets.reserve(n);
    for (const auto& g : graphs)
      sets.push_back(dictionary.objects(keys(g)));
    const auto H = diracHierarchy(dictionary.size());
    std::vector<Histogram<std::int64_t>> histograms;
    histograms.reserve(n);
    for (const auto& X : sets)
      histograms.push_back(histogram(H, X));
    return intersectionGram(histograms, params.threads);
  };

  if (usesRefinement(kind))
    out.params["h"] = std::to_string(params.h);

  switch (kind) {
  case KernelKind::Vertex:
    out.values = explicitFeatures(&vertexLabelCounts);
    break;
  case KernelKind::Edge:
    out.values = explicitFeatures(&edgeLabelCounts);
    break;
  case KernelKind::Graphlet:
    out.values = explicitFeatures(&graphletCounts);
    break;
  case KernelKind::ShortestPath:
    out.values = explicitFeatures(&shortestPathCounts);
    break;
  case KernelKind::VertexOA:
    out.values = diracFeatures(&vertexKeys);
    break;
  case KernelKind::EdgeOA:
    out.values = diracFeatures(&edgeKeys);
    break;
  case KernelKind::WL: {
    const auto colours = refine(graphs, params.h);
    Eigen::SparseMatrix<double, Eigen::RowMajor> phi(static_cast<Eigen::Index>(n),
                                                     static_cast<Eigen::Index>(colours.colourCount));
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t g = 0; g < n; ++g) {
      const auto row = wlFeatureVector(colours, g);
      for (Eigen::SparseVector<double>::InnerIterator it(row); it; ++it)
        triplets.emplace_back(static_cast<Eigen::Index>(g), it.index(), it.value());
    }
    phi.setFromTriplets(triplets.begin(), triplets.end());
    out.values = Eigen::MatrixXd(phi * phi.transpose());
    break;
  }
  case KernelKind::WLOA: {
    const auto colours = refine(graphs, params.h);
    const auto H = wlHierarchy(colours);
    std::vector<Histogram<std::int64_t>> histograms(n);
    parallelFor(n, params.threads,
                [&](std::size_t g) { histograms[g] = histogram(H, colours.vertexObjects(g)); });
    out.values = intersectionGram(histograms, params.threads);
    break;
  }
  }
  return out;
}

GramMatrix gram(const Dataset& dataset, const std::string& kernel, const GramParams& params) {
  return gram(dataset, parseKernelName(kernel), params);
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& values) {
  const auto n = values.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) <= 0.0)
      continue;
    out(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && values(j, j) > 0.0)
        out(i, j) = values(i, j) / std::sqrt(values(i, i) * values(j, j));
  }
  return out;
}

GramMatrix normalize(const GramMatrix& gram) {
  GramMatrix out = gram;
  out.values = normalize(gram.values);
  out.normalized = true;
  return out;
}

} // namespace oak
