#ifndef OAK_KERNELS_HPP
#define OAK_KERNELS_HPP

#include "oak/graph.hpp"
#include "oak/hierarchy.hpp"
#include "oak/wl.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oak {

enum class KernelKind { Vertex, Edge, VertexOA, EdgeOA, WL, WLOA, Graphlet, ShortestPath };

inline constexpr std::array<KernelKind, 8> kAllKernels = {
    KernelKind::Vertex, KernelKind::Edge, KernelKind::VertexOA,  KernelKind::EdgeOA,
    KernelKind::WL,     KernelKind::WLOA, KernelKind::Graphlet, KernelKind::ShortestPath};

/// Display name: V, E, V-OA, E-OA, WL, WL-OA, GL, SP.
std::string kernelName(KernelKind kind);
/// Case-insensitive inverse of kernelName; throws UnknownKernel.
KernelKind parseKernelName(const std::string& name);
bool isAssignmentKernel(KernelKind kind);
bool usesRefinement(KernelKind kind);

/// Key of an explicit feature; unused trailing slots are zero.
using FeatureKey = std::array<std::uint64_t, 4>;
using FeatureCounts = std::map<FeatureKey, std::int64_t>;

FeatureCounts vertexLabelCounts(const Graph& g);
/// Unordered endpoint-label pairs {ℓ(u), ℓ(v)} of all edges.
FeatureCounts edgeLabelCounts(const Graph& g);
/// Connected induced 3-vertex subgraphs: (0, centre, end, end) paths and (1, a, b, c) triangles.
FeatureCounts graphletCounts(const Graph& g);
/// (min label, max label, distance) over unordered vertex pairs at finite distance ≥ 1.
FeatureCounts shortestPathCounts(const Graph& g);

std::int64_t dot(const FeatureCounts& a, const FeatureCounts& b);

double vertexKernel(const Graph& g, const Graph& h);
double edgeKernel(const Graph& g, const Graph& h);
double vertexOAKernel(const Graph& g, const Graph& h);
double edgeOAKernel(const Graph& g, const Graph& h);
double wlKernel(const ColourSequence& colours, std::size_t i, std::size_t j);
double wlOAKernel(const ColourSequence& colours, std::size_t i, std::size_t j);
/// Same as above with a prebuilt wlHierarchy(colours).
double wlOAKernel(const Hierarchy<std::int64_t>& hierarchy, const ColourSequence& colours,
                  std::size_t i, std::size_t j);
double graphletKernel(const Graph& g, const Graph& h);
double shortestPathKernel(const Graph& g, const Graph& h);

/// Depth-1 hierarchy: root of weight 0 and leaf i (object i) of weight 1 for i < keyCount.
Hierarchy<std::int64_t> diracHierarchy(std::size_t keyCount);

struct GramParams {
  int h = 3;
  unsigned threads = 1;
};

struct GramMatrix {
  Eigen::MatrixXd values;
  std::string kernelName;
  std::map<std::string, std::string> params;
  bool normalized = false;

  Eigen::Index size() const { return values.rows(); }
};

GramMatrix gram(const Dataset& dataset, KernelKind kind, const GramParams& params = {});
GramMatrix gram(const Dataset& dataset, const std::string& kernel, const GramParams& params = {});

/// K(i,j)/√(K(i,i)K(j,j)); rows and columns with zero self-similarity become zero.
Eigen::MatrixXd normalize(const Eigen::MatrixXd& values);
GramMatrix normalize(const GramMatrix& gram);

} // namespace oak

#endif // OAK_KERNELS_HPP
