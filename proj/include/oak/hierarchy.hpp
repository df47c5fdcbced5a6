#ifndef OAK_HIERARCHY_HPP
#define OAK_HIERARCHY_HPP

#include "oak/errors.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace oak {

using NodeId = std::size_t;
using ObjectId = std::size_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
/// Padding object: k(null, anything) = 0, never stored in a hierarchy.
inline constexpr ObjectId kNullObject = std::numeric_limits<ObjectId>::max();

template <typename Scalar>
using KernelMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultTolerance = 1e-12;

namespace detail {

inline std::uint64_t nextHierarchyTag() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// Integers compare exactly; floating values with a relative tolerance.
template <typename Scalar>
bool definitelyLess(Scalar a, Scalar b, double tol) {
  if constexpr (std::is_floating_point_v<Scalar>)
    return a < b - static_cast<Scalar>(tol) * std::max(std::abs(a), std::abs(b));
  else
    return a < b;
}

template <typename Scalar>
bool nearlyEqual(Scalar a, Scalar b, double tol) {
  return !definitelyLess(a, b, tol) && !definitelyLess(b, a, tol);
}

template <typename Derived>
void requireKernelMatrix(const Eigen::MatrixBase<Derived>& K, double tol) {
  using Scalar = typename Derived::Scalar;
  if (K.rows() != K.cols())
    throw InvalidKernelMatrix("kernel matrix must be square");
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      if (K(i, j) < Scalar(0))
        throw InvalidKernelMatrix("kernel matrix has a negative entry at (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
      if (j > i && !nearlyEqual<Scalar>(K(i, j), K(j, i), tol))
        throw InvalidKernelMatrix("kernel matrix is not symmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
    }
}

} // namespace detail

/**
 * Rooted tree with nonnegative node weights that never decrease from the root
 * towards the leaves. Objects are attached to leaves; several objects on one
 * leaf are indistinguishable under the induced kernel (leaf multiplicity).
 *
 * Every structural mutation assigns a fresh tag, so histograms and feature
 * vectors built against one hierarchy cannot silently be mixed with another.
 */
template <typename Scalar>
class Hierarchy {
public:
  using scalar_type = Scalar;

  Hierarchy() : tag_(detail::nextHierarchyTag()) {}

  explicit Hierarchy(Scalar rootWeight) : Hierarchy() { newNode(kNoNode, rootWeight); }

  /// Builds the tree from a parent array (parent[root] == root). Validates structure and weights.
  static Hierarchy fromParents(const std::vector<NodeId>& parent, const std::vector<Scalar>& weight) {
    if (parent.size() != weight.size())
      throw InvalidParameter("Hierarchy: parent and weight arrays differ in length");
    Hierarchy h;
    const auto n = parent.size();
    h.parent_ = parent;
    h.weight_ = weight;
    h.children_.assign(n, {});
    h.objectsAt_.assign(n, {});
    h.depth_.assign(n, kNoNode);
    for (NodeId v = 0; v < n; ++v) {
      if (parent[v] >= n)
        throw InvalidParameter("Hierarchy: parent of node " + std::to_string(v) + " out of range");
      if (parent[v] == v) {
        if (h.root_ != kNoNode)
          throw InvalidParameter("Hierarchy: more than one root");
        h.root_ = v;
      } else {
        h.children_[parent[v]].push_back(v);
      }
    }
    if (n > 0 && h.root_ == kNoNode)
      throw InvalidParameter("Hierarchy: no root");
    if (n > 0) {
      std::vector<NodeId> stack{h.root_};
      h.depth_[h.root_] = 0;
      std::size_t reached = 0;
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        ++reached;
        for (auto c : h.children_[v]) {
          h.depth_[c] = h.depth_[v] + 1;
          stack.push_back(c);
        }
      }
      if (reached != n)
        throw InvalidParameter("Hierarchy: parent links contain a cycle");
    }
    for (NodeId v = 0; v < n; ++v)
      if (weight[v] < Scalar(0) || weight[v] < weight[parent[v]])
        throw InvalidParameter("Hierarchy: weight of node " + std::to_string(v) +
                               " is negative or below its parent's");
    return h;
  }

  /// Adds a child of `parent`; its weight must not be below the parent's.
  NodeId addNode(NodeId parent, Scalar weight) {
    requireNode(parent);
    if (weight < weight_[parent])
      throw InvalidParameter("Hierarchy: child weight below parent weight");
    if (!objectsAt_[parent].empty())
      throw InvalidParameter("Hierarchy: cannot add a child below a leaf carrying objects");
    return newNode(parent, weight);
  }

  /// Inserts a new node with `weight` between `child` and its parent and returns it.
  NodeId spliceAbove(NodeId child, Scalar weight) {
    requireNode(child);
    if (weight_[child] < weight || (child != root_ && weight < weight_[parent_[child]]))
      throw InvalidParameter("Hierarchy: spliced weight breaks monotonicity");
    const bool wasRoot = child == root_;
    const NodeId p = newNode(wasRoot ? kNoNode : parent_[child], weight);
    if (!wasRoot) {
      auto& siblings = children_[parent_[child]];
      siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    }
    parent_[child] = p;
    children_[p].push_back(child);
    // Subtree of `child` moved one level down.
    std::vector<NodeId> stack{child};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      depth_[v] = depth_[parent_[v]] + 1;
      for (auto c : children_[v])
        stack.push_back(c);
    }
    return p;
  }

  void attachObject(ObjectId object, NodeId leaf) {
    requireNode(leaf);
    if (object == kNullObject)
      throw InvalidParameter("Hierarchy: the null object cannot be attached");
    if (!children_[leaf].empty())
      throw InvalidParameter("Hierarchy: objects attach to leaves only");
    if (object >= leafOf_.size())
      leafOf_.resize(object + 1, kNoNode);
    if (leafOf_[object] != kNoNode)
      throw InvalidParameter("Hierarchy: object " + std::to_string(object) + " already attached");
    leafOf_[object] = leaf;
    objectsAt_[leaf].push_back(object);
    ++objectCount_;
    tag_ = detail::nextHierarchyTag();
  }

  std::size_t nodeCount() const { return parent_.size(); }
  bool empty() const { return parent_.empty(); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_[requireNode(v)]; }
  Scalar weight(NodeId v) const { return weight_[requireNode(v)]; }
  std::size_t depth(NodeId v) const { return depth_[requireNode(v)]; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[requireNode(v)]; }
  bool isLeaf(NodeId v) const { return children_[requireNode(v)].empty(); }

  /// ω(v) = w(v) − w(parent(v)); ω(root) = w(root).
  Scalar additiveWeight(NodeId v) const {
    requireNode(v);
    return v == root_ ? weight_[v] : weight_[v] - weight_[parent_[v]];
  }

  const std::vector<Scalar>& weights() const { return weight_; }
  const std::vector<NodeId>& parents() const { return parent_; }

  bool hasObject(ObjectId x) const { return x < leafOf_.size() && leafOf_[x] != kNoNode; }

  NodeId leafOf(ObjectId x) const {
    if (!hasObject(x))
      throw UnknownObject("Hierarchy: unknown object " + std::to_string(x));
    return leafOf_[x];
  }

  const std::vector<ObjectId>& objectsAt(NodeId leaf) const { return objectsAt_[requireNode(leaf)]; }
  std::size_t multiplicity(NodeId leaf) const { return objectsAt(leaf).size(); }
  std::size_t objectCount() const { return objectCount_; }

  /// Attached objects in ascending id order.
  std::vector<ObjectId> objects() const {
    std::vector<ObjectId> out;
    out.reserve(objectCount_);
    for (ObjectId x = 0; x < leafOf_.size(); ++x)
      if (leafOf_[x] != kNoNode)
        out.push_back(x);
    return out;
  }

  std::uint64_t tag() const { return tag_; }

  /// True when `ancestor` lies on the root path of `v` (v counts as its own ancestor).
  bool isAncestor(NodeId ancestor, NodeId v) const {
    requireNode(ancestor);
    requireNode(v);
    while (depth_[v] > depth_[ancestor])
      v = parent_[v];
    return v == ancestor;
  }

  /// Checks every structural invariant, throwing InvalidParameter on the first violation.
  void validate() const {
    static_cast<void>(fromParents(parent_, weight_));
    for (NodeId v = 0; v < nodeCount(); ++v)
      if (!objectsAt_[v].empty() && !children_[v].empty())
        throw InvalidParameter("Hierarchy: inner node " + std::to_string(v) + " carries objects");
  }

private:
  NodeId requireNode(NodeId v) const {
    if (v >= parent_.size())
      throw UnknownNode("Hierarchy: unknown node " + std::to_string(v));
    return v;
  }

  NodeId newNode(NodeId parent, Scalar weight) {
    if (weight < Scalar(0))
      throw InvalidParameter("Hierarchy: negative weight");
    const NodeId id = parent_.size();
    if (parent == kNoNode) {
      root_ = id;
      parent_.push_back(id);
      depth_.push_back(0);
    } else {
      parent_.push_back(parent);
      depth_.push_back(depth_[parent] + 1);
      children_[parent].push_back(id);
    }
    weight_.push_back(weight);
    children_.emplace_back();
    objectsAt_.emplace_back();
    tag_ = detail::nextHierarchyTag();
    return id;
  }

  std::vector<NodeId> parent_;
  std::vector<Scalar> weight_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<ObjectId>> objectsAt_;
  std::vector<NodeId> leafOf_;
  std::size_t objectCount_ = 0;
  NodeId root_ = kNoNode;
  std::uint64_t tag_;
};

/// Deepest node that is an ancestor of both u and v.
template <typename Scalar>
NodeId lowestCommonAncestor(const Hierarchy<Scalar>& H, NodeId u, NodeId v) {
  while (H.depth(u) > H.depth(v))
    u = H.parent(u);
  while (H.depth(v) > H.depth(u))
    v = H.parent(v);
  while (u != v) {
    u = H.parent(u);
    v = H.parent(v);
  }
  return u;
}

/// k(x,y) = w(LCA(x,y)); zero whenever either argument is the null object.
template <typename Scalar>
Scalar inducedKernel(const Hierarchy<Scalar>& H, ObjectId x, ObjectId y) {
  if (x == kNullObject || y == kNullObject)
    return Scalar(0);
  return H.weight(lowestCommonAncestor(H, H.leafOf(x), H.leafOf(y)));
}

/// Kernel matrix of the induced kernel over `objects` (all attached objects by default).
template <typename Scalar>
KernelMatrix<Scalar> inducedMatrix(const Hierarchy<Scalar>& H, const std::vector<ObjectId>& objects) {
  const auto n = static_cast<Eigen::Index>(objects.size());
  KernelMatrix<Scalar> K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      K(i, j) = K(j, i) = inducedKernel(H, objects[i], objects[j]);
  return K;
}

template <typename Scalar>
KernelMatrix<Scalar> inducedMatrix(const Hierarchy<Scalar>& H) {
  return inducedMatrix(H, H.objects());
}

struct StrongnessCheck {
  bool strong = true;
  std::optional<Witness> witness;

  explicit operator bool() const { return strong; }
};

/**
 * Tests k(x,y) ≥ min{k(x,z), k(z,y)} over all triples. The first violating
 * triple in (x, y, z) lexicographic order is returned as the witness.
 * Throws InvalidKernelMatrix for non-square, asymmetric or negative input.
 */
template <typename Derived>
StrongnessCheck isStrong(const Eigen::MatrixBase<Derived>& K, double tol = kDefaultTolerance) {
  using Scalar = typename Derived::Scalar;
  detail::requireKernelMatrix(K, tol);
  const auto n = K.rows();
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      for (Eigen::Index z = 0; z < n; ++z)
        if (detail::definitelyLess<Scalar>(K(x, y), std::min<Scalar>(K(x, z), K(z, y)), tol))
          return {false, Witness{static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                 static_cast<std::size_t>(z)}};
  return {};
}

/**
 * Hierarchy on objects 0..n-1 that induces the strong kernel K, by inserting
 * objects one at a time in index order. The next object z gets a parent of
 * weight k_max = max_y K(y,z) spliced above the node whose leaves are exactly
 * the inserted objects attaining k_max. Objects identical under K to an
 * inserted object share its leaf (multiplicity) instead of receiving a
 * zero-weight leaf of their own.
 *
 * Throws NotStrongError with a violating triple when K is not strong.
 */
template <typename Derived>
Hierarchy<typename Derived::Scalar> buildHierarchy(const Eigen::MatrixBase<Derived>& K,
                                                   double tol = kDefaultTolerance) {
  using Scalar = typename Derived::Scalar;
  detail::requireKernelMatrix(K, tol);
  const auto n = static_cast<std::size_t>(K.rows());
  if (n == 0)
    throw InvalidKernelMatrix("buildHierarchy: empty kernel matrix");

  const auto fail = [&]() -> Hierarchy<Scalar> {
    auto check = isStrong(K, tol);
    if (check.strong)
      check = isStrong(K, 0.0);
    if (check.strong)
      throw std::logic_error("buildHierarchy: construction failed on a strong kernel");
    throw NotStrongError(*check.witness);
  };

  Hierarchy<Scalar> H(K(0, 0));
  H.attachObject(0, H.root());
  try {
    for (std::size_t z = 1; z < n; ++z) {
      const auto zi = static_cast<Eigen::Index>(z);
      Scalar kMax = K(0, zi);
      for (std::size_t y = 1; y < z; ++y)
        kMax = std::max<Scalar>(kMax, K(static_cast<Eigen::Index>(y), zi));

      std::vector<bool> inB(z);
      NodeId b = kNoNode;
      for (std::size_t y = 0; y < z; ++y) {
        inB[y] = detail::nearlyEqual<Scalar>(K(static_cast<Eigen::Index>(y), zi), kMax, tol);
        if (inB[y])
          b = b == kNoNode ? H.leafOf(y) : lowestCommonAncestor(H, b, H.leafOf(y));
      }
      // b must cover exactly the argmax set.
      for (std::size_t y = 0; y < z; ++y)
        if (inB[y] != H.isAncestor(b, H.leafOf(y)))
          return fail();

      const Scalar self = K(zi, zi);
      if (H.isLeaf(b) && detail::nearlyEqual<Scalar>(self, kMax, tol) &&
          detail::nearlyEqual<Scalar>(H.weight(b), kMax, tol)) {
        H.attachObject(z, b);
        continue;
      }
      const NodeId p = H.spliceAbove(b, kMax);
      H.attachObject(z, H.addNode(p, self));
    }
  } catch (const InvalidParameter&) {
    return fail();
  }

  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y)
      if (!detail::nearlyEqual<Scalar>(inducedKernel(H, x, y),
                                       K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)),
                                       tol))
        return fail();
  return H;
}

/**
 * Equivalent hierarchy without redundant nodes: inner nodes whose weight
 * equals their parent's are merged into the parent, and non-root inner nodes
 * with a single child are removed. The root is always kept. Surviving nodes
 * keep their relative id order, so canonical input comes back unchanged.
 */
template <typename Scalar>
Hierarchy<Scalar> canonicalize(const Hierarchy<Scalar>& H) {
  const auto n = H.nodeCount();
  std::vector<NodeId> parent = H.parents();
  std::vector<std::set<NodeId>> children(n);
  for (NodeId v = 0; v < n; ++v)
    if (v != H.root())
      children[parent[v]].insert(v);
  std::vector<bool> alive(n, true);

  const auto removeInto = [&](NodeId v) {
    const NodeId p = parent[v];
    children[p].erase(v);
    for (auto c : children[v]) {
      parent[c] = p;
      children[p].insert(c);
    }
    children[v].clear();
    alive[v] = false;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v = 0; v < n; ++v) {
      if (!alive[v] || v == H.root() || children[v].empty())
        continue;
      if (H.weight(v) == H.weight(parent[v]) || children[v].size() == 1) {
        removeInto(v);
        changed = true;
      }
    }
  }

  std::vector<NodeId> remap(n, kNoNode);
  std::vector<NodeId> newParent;
  std::vector<Scalar> newWeight;
  for (NodeId v = 0; v < n; ++v)
    if (alive[v]) {
      remap[v] = newWeight.size();
      newWeight.push_back(H.weight(v));
    }
  for (NodeId v = 0; v < n; ++v)
    if (alive[v])
      newParent.push_back(remap[parent[v]]);
  auto out = Hierarchy<Scalar>::fromParents(newParent, newWeight);
  for (NodeId v = 0; v < n; ++v)
    for (auto x : H.objectsAt(v))
      out.attachObject(x, remap[v]);
  return out;
}

/**
 * Explicit feature vector of an object: component √ω(v) for every node v on
 * its root path. Components are stored squared (ω itself) so inner products
 * over integer weights stay exact.
 */
template <typename Scalar>
struct FeatureVector {
  std::uint64_t hierarchyTag = 0;
  std::size_t dimension = 0;
  /// (node, ω(node)) along the root path, ascending node id.
  std::vector<std::pair<NodeId, Scalar>> squared;

  std::size_t supportSize() const { return squared.size(); }

  Eigen::SparseVector<double> values() const {
    Eigen::SparseVector<double> out(static_cast<Eigen::Index>(dimension));
    for (auto [v, w] : squared)
      out.insert(static_cast<Eigen::Index>(v)) = std::sqrt(static_cast<double>(w));
    return out;
  }
};

template <typename Scalar>
FeatureVector<Scalar> featureMap(const Hierarchy<Scalar>& H, ObjectId x) {
  FeatureVector<Scalar> phi{H.tag(), H.nodeCount(), {}};
  NodeId v = H.leafOf(x);
  while (true) {
    phi.squared.emplace_back(v, H.additiveWeight(v));
    if (v == H.root())
      break;
    v = H.parent(v);
  }
  std::sort(phi.squared.begin(), phi.squared.end());
  return phi;
}

/// Inner product of two feature vectors of the same hierarchy; √ω·√ω is taken as ω exactly.
template <typename Scalar>
Scalar dot(const FeatureVector<Scalar>& a, const FeatureVector<Scalar>& b) {
  if (a.hierarchyTag != b.hierarchyTag)
    throw HierarchyMismatch("feature vectors stem from different hierarchies");
  Scalar sum(0);
  auto i = a.squared.begin();
  auto j = b.squared.begin();
  while (i != a.squared.end() && j != b.squared.end()) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else {
      sum += i->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

/// Number of distinct values the induced kernel takes over all attached objects.
template <typename Scalar>
std::size_t inducedImageSize(const Hierarchy<Scalar>& H) {
  const auto objects = H.objects();
  std::set<Scalar> values;
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = i; j < objects.size(); ++j)
      values.insert(inducedKernel(H, objects[i], objects[j]));
  return values.size();
}

/// |img(k)| ≤ 2n − 1 for n attached objects.
template <typename Scalar>
bool imageSizeBound(const Hierarchy<Scalar>& H) {
  const auto n = H.objectCount();
  if (n == 0)
    return true;
  return inducedImageSize(H) <= 2 * n - 1;
}

/**
 * Text form, one node per line: `id parentId weight [objects multiplicity]`.
 * The root is its own parent. A leaf line lists its objects as a
 * comma-separated id list followed by their count.
 */
template <typename Scalar>
void writeHierarchy(std::ostream& out, const Hierarchy<Scalar>& H) {
  const auto precision = out.precision(std::numeric_limits<Scalar>::max_digits10);
  for (NodeId v = 0; v < H.nodeCount(); ++v) {
    out << v << ' ' << H.parent(v) << ' ' << H.weight(v);
    const auto& objects = H.objectsAt(v);
    if (!objects.empty()) {
      out << ' ';
      for (std::size_t i = 0; i < objects.size(); ++i)
        out << (i ? "," : "") << objects[i];
      out << ' ' << objects.size();
    }
    out << '\n';
  }
  out.precision(precision);
}

template <typename Scalar>
Hierarchy<Scalar> readHierarchy(std::istream& in) {
  std::vector<NodeId> parent;
  std::vector<Scalar> weight;
  std::vector<std::pair<NodeId, std::vector<ObjectId>>> attachments;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream fields(line);
    NodeId id = 0, p = 0;
    Scalar w{};
    if (!(fields >> id >> p >> w) || id != parent.size())
      throw ParseError("hierarchy", lineNo, "expected 'id parentId weight' with consecutive ids");
    parent.push_back(p);
    weight.push_back(w);
    std::string list;
    if (fields >> list) {
      std::size_t count = 0;
      if (!(fields >> count))
        throw ParseError("hierarchy", lineNo, "object list without multiplicity");
      std::vector<ObjectId> objects;
      std::istringstream ids(list);
      std::string token;
      while (std::getline(ids, token, ',')) {
        std::istringstream value(token);
        ObjectId x = 0;
        if (!(value >> x) || !value.eof())
          throw ParseError("hierarchy", lineNo, "bad object id '" + token + "'");
        objects.push_back(x);
      }
      if (objects.size() != count)
        throw ParseError("hierarchy", lineNo, "multiplicity does not match object list");
      attachments.emplace_back(id, std::move(objects));
    }
  }
  auto H = Hierarchy<Scalar>::fromParents(parent, weight);
  for (auto& [leaf, objects] : attachments)
    for (auto x : objects)
      H.attachObject(x, leaf);
  return H;
}

} // namespace oak

#endif // OAK_HIERARCHY_HPP
