#ifndef OAK_WL_HPP
#define OAK_WL_HPP

#include "oak/assignment.hpp"
#include "oak/graph.hpp"
#include "oak/hierarchy.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace oak {

using Colour = std::uint64_t;

/**
 * Weisfeiler-Lehman colours of every vertex of a graph collection for
 * iterations 0..h. Colours share one dictionary across all graphs, and ids
 * of different iterations never coincide. Vertices are addressed globally:
 * graph g owns the range [offset(g), offset(g+1)).
 */
struct ColourSequence {
  std::size_t h = 0;
  std::vector<std::size_t> offsets{0};
  /// colours[i][globalVertex]
  std::vector<std::vector<Colour>> colours;
  /// All colour ids lie in [0, colourCount).
  std::size_t colourCount = 0;

  std::size_t graphCount() const { return offsets.size() - 1; }
  std::size_t vertexTotal() const { return offsets.back(); }
  std::size_t vertexCount(std::size_t graph) const;
  std::size_t offset(std::size_t graph) const;
  Colour colour(std::size_t iteration, std::size_t graph, Vertex v) const {
    return colours[iteration][offset(graph) + v];
  }
  /// Global vertex ids of one graph, usable as hierarchy objects.
  Multiset vertexObjects(std::size_t graph) const;
};

/// Refines the initial labels h times; throws InvalidParameter for h < 0.
ColourSequence refine(const std::vector<Graph>& graphs, int h);

/// Colour counts of one graph over all iterations; dimension colourCount.
Eigen::SparseVector<double> wlFeatureVector(const ColourSequence& colours, std::size_t graph);

/**
 * Hierarchy of nested colour classes: below the root (weight 0) one node per
 * colour of iteration i with weight i + 1. The iteration-h classes are the
 * leaves; every vertex (global id) is attached to the leaf of its final colour.
 * The induced kernel counts matching colours over all iterations.
 */
Hierarchy<std::int64_t> wlHierarchy(const ColourSequence& colours);

} // namespace oak

#endif // OAK_WL_HPP
