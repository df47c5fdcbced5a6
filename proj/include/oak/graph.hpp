#ifndef OAK_GRAPH_HPP
#define OAK_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace oak {

using Vertex = std::uint32_t;
using Label = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/**
 * Simple undirected graph with one categorical label per vertex.
 *
 * Edges are stored once, as (u, v) with u < v, in ascending order. The
 * constructor rejects self-loops and out-of-range endpoints; duplicate edges
 * (in either orientation) collapse to one.
 */
class Graph {
public:
  Graph() = default;
  Graph(std::vector<Label> labels, std::vector<Edge> edges);

  std::size_t vertexCount() const { return labels_.size(); }
  std::size_t edgeCount() const { return edges_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Label>& labels() const { return labels_; }
  Label label(Vertex v) const { return labels_[v]; }
  const std::vector<Vertex>& neighbours(Vertex v) const { return adjacency_[v]; }
  bool adjacent(Vertex u, Vertex v) const;

  /// Graph with vertex v renamed to perm[v].
  Graph permuted(const std::vector<Vertex>& perm) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.labels_ == b.labels_ && a.edges_ == b.edges_;
  }

private:
  std::vector<Label> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> classLabels;
  /// Original file value of each dense label id.
  std::vector<long long> labelValues;

  std::size_t size() const { return graphs.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/**
 * Reads a dataset in the graph-benchmark text format from `directory`:
 * `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_graph_labels.txt` and
 * optionally `<name>_node_labels.txt`. Edge label files are ignored. Vertex
 * labels are remapped to dense ids in ascending order of their file values.
 *
 * Throws ParseError on missing files, malformed tokens, self-loops and edges
 * that leave their graph.
 */
Dataset parseDataset(const std::filesystem::path& directory, const std::string& name);

/// Writes `dataset` in the same format parseDataset reads (edges in both directions).
void writeDataset(const Dataset& dataset, const std::filesystem::path& directory);

/// G(n, p) random graph with labels drawn uniformly from [0, alphabet).
Graph syntheticGraph(std::uint64_t seed, std::size_t n, double p, Label alphabet);

/// `count` synthetic graphs with 1..maxVertices vertices and class labels in {0, 1}.
Dataset syntheticDataset(std::uint64_t seed, std::size_t count, std::size_t maxVertices,
                         double p, Label alphabet);

} // namespace oak

#endif // OAK_GRAPH_HPP
