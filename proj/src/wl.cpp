#include "oak/wl.hpp"

#include "oak/errors.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace oak {

namespace {

struct SignatureHash {
  std::size_t operator()(const std::vector<Colour>& s) const noexcept {
    std::size_t seed = s.size();
    for (auto c : s)
      seed ^= std::hash<Colour>{}(c) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

} // namespace

std::size_t ColourSequence::offset(std::size_t graph) const {
  if (graph >= graphCount())
    throw UnknownGraph("ColourSequence: unknown graph " + std::to_string(graph));
  return offsets[graph];
}

std::size_t ColourSequence::vertexCount(std::size_t graph) const {
  const auto begin = offset(graph);
  return offsets[graph + 1] - begin;
}

Multiset ColourSequence::vertexObjects(std::size_t graph) const {
  Multiset objects(vertexCount(graph));
  std::iota(objects.begin(), objects.end(), offsets[graph]);
  return objects;
}

ColourSequence refine(const std::vector<Graph>& graphs, int h) {
  if (h < 0)
    throw InvalidParameter("refine: h must be nonnegative, got " + std::to_string(h));
  ColourSequence seq;
  seq.h = static_cast<std::size_t>(h);
  for (const auto& g : graphs)
    seq.offsets.push_back(seq.offsets.back() + g.vertexCount());

  std::vector<Colour> current;
  current.reserve(seq.vertexTotal());
  Colour next = 0;
  for (const auto& g : graphs)
    for (auto l : g.labels()) {
      current.push_back(l);
      next = std::max<Colour>(next, Colour(l) + 1);
    }
  seq.colours.push_back(current);

  std::vector<Colour> signature;
  for (std::size_t i = 1; i <= seq.h; ++i) {
    std::unordered_map<std::vector<Colour>, Colour, SignatureHash> dictionary;
    std::vector<Colour> refined(seq.vertexTotal());
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const auto& g = graphs[gi];
      const auto base = seq.offsets[gi];
      for (Vertex v = 0; v < g.vertexCount(); ++v) {
        signature.clear();
        for (auto u : g.neighbours(v))
          signature.push_back(current[base + u]);
        std::sort(signature.begin(), signature.end());
        signature.insert(signature.begin(), current[base + v]);
        auto [it, inserted] = dictionary.try_emplace(signature, next);
        if (inserted)
          ++next;
        refined[base + v] = it->second;
      }
    }
    current = std::move(refined);
    seq.colours.push_back(current);
  }
  seq.colourCount = next;
  return seq;
}

Eigen::SparseVector<double> wlFeatureVector(const ColourSequence& colours, std::size_t graph) {
  const auto begin = colours.offset(graph);
  const auto end = begin + colours.vertexCount(graph);
  std::vector<Colour> seen;
  seen.reserve((end - begin) * colours.colours.size());
  for (const auto& level : colours.colours)
    seen.insert(seen.end(), level.begin() + static_cast<std::ptrdiff_t>(begin),
                level.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(seen.begin(), seen.end());

  Eigen::SparseVector<double> counts(static_cast<Eigen::Index>(colours.colourCount));
  counts.reserve(static_cast<Eigen::Index>(seen.size()));
  for (std::size_t k = 0; k < seen.size();) {
    std::size_t run = k;
    while (run < seen.size() && seen[run] == seen[k])
      ++run;
    counts.insertBack(static_cast<Eigen::Index>(seen[k])) = static_cast<double>(run - k);
    k = run;
  }
  return counts;
}

Hierarchy<std::int64_t> wlHierarchy(const ColourSequence& colours) {
  Hierarchy<std::int64_t> H(0);
  std::vector<NodeId> nodeOf(colours.colourCount, kNoNode);
  for (std::size_t i = 0; i <= colours.h; ++i) {
    const auto& level = colours.colours[i];
    for (std::size_t v = 0; v < level.size(); ++v) {
      auto& node = nodeOf[level[v]];
      if (node == kNoNode) {
        const NodeId parent = i == 0 ? H.root() : nodeOf[colours.colours[i - 1][v]];
        node = H.addNode(parent, static_cast<std::int64_t>(i + 1));
      }
    }
  }
  for (std::size_t v = 0; v < colours.vertexTotal(); ++v)
    H.attachObject(v, nodeOf[colours.colours[colours.h][v]]);
  return H;
}

} // namespace oak
