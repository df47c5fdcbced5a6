#ifndef OAK_ASSIGNMENT_HPP
#define OAK_ASSIGNMENT_HPP

#include "oak/errors.hpp"
#include "oak/hierarchy.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oak {

/// Multiset of objects; repeated ids are distinct elements.
using Multiset = std::vector<ObjectId>;
using Bijection = std::vector<std::pair<std::size_t, std::size_t>>;

/// Fills up the smaller multiset with null objects so both have equal size.
inline std::pair<Multiset, Multiset> pad(Multiset X, Multiset Y) {
  const auto n = std::max(X.size(), Y.size());
  X.resize(n, kNullObject);
  Y.resize(n, kNullObject);
  return {std::move(X), std::move(Y)};
}

template <typename Scalar>
struct Assignment {
  Scalar value{};
  /// (index into X, index into Y) pairs of the padded instance.
  Bijection pairs;
};

/// Base kernel given as a matrix indexed by object id; x and y must be of equal size.
template <typename Scalar>
struct AssignmentInstance {
  Multiset x;
  Multiset y;
  KernelMatrix<Scalar> base;
};

/// |X|×|Y| matrix of base-kernel values k(x_i, y_j), with zero rows/columns for null objects.
template <typename Derived>
KernelMatrix<typename Derived::Scalar> crossMatrix(const Eigen::MatrixBase<Derived>& base,
                                                   const Multiset& X, const Multiset& Y) {
  using Scalar = typename Derived::Scalar;
  KernelMatrix<Scalar> C(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < Y.size(); ++j) {
      const auto x = X[i], y = Y[j];
      if (x == kNullObject || y == kNullObject) {
        C(i, j) = Scalar(0);
        continue;
      }
      if (x >= static_cast<ObjectId>(base.rows()) || y >= static_cast<ObjectId>(base.cols()))
        throw UnknownObject("crossMatrix: object outside the base kernel matrix");
      C(i, j) = base(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  return C;
}

template <typename Scalar>
KernelMatrix<Scalar> crossMatrix(const Hierarchy<Scalar>& H, const Multiset& X, const Multiset& Y) {
  KernelMatrix<Scalar> C(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < Y.size(); ++j)
      C(i, j) = inducedKernel(H, X[i], Y[j]);
  return C;
}

/**
 * Maximum-weight perfect matching on a square weight matrix (the Hungarian
 * method with row/column potentials, O(n³)). Weights are negated into costs;
 * integer scalars keep the whole computation exact.
 */
template <typename Derived>
Assignment<typename Derived::Scalar> solveHungarian(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_signed_v<Scalar>, "solveHungarian needs a signed scalar");
  if (weights.rows() != weights.cols())
    throw InstanceError("solveHungarian: weight matrix is " + std::to_string(weights.rows()) + "x" +
                        std::to_string(weights.cols()) + ", pad the smaller set first");
  const auto n = static_cast<std::size_t>(weights.rows());
  Assignment<Scalar> result;
  if (n == 0)
    return result;

  const Scalar inf = std::numeric_limits<Scalar>::has_infinity ? std::numeric_limits<Scalar>::infinity()
                                                               : std::numeric_limits<Scalar>::max() / 4;
  const auto cost = [&](std::size_t i, std::size_t j) {
    return -weights(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  };

  // 1-based; column 0 is the virtual start of each augmenting path.
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0)), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      Scalar delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j])
          continue;
        const Scalar reduced = cost(i0, j) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.pairs.resize(n);
  for (std::size_t j = 1; j <= n; ++j)
    result.pairs[match[j] - 1] = {match[j] - 1, j - 1};
  for (auto [i, j] : result.pairs)
    result.value += weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return result;
}

template <typename Scalar>
Assignment<Scalar> solveHungarian(const AssignmentInstance<Scalar>& instance) {
  if (instance.x.size() != instance.y.size())
    throw InstanceError("solveHungarian: instance sets differ in size (" +
                        std::to_string(instance.x.size()) + " vs " +
                        std::to_string(instance.y.size()) + ")");
  return solveHungarian(crossMatrix(instance.base, instance.x, instance.y));
}

/**
 * Sparse histogram over hierarchy nodes: entry ω(v)·|X_v| for every node with
 * ω(v) > 0 whose subtree holds an element of X. Entries are sorted by node.
 */
template <typename Scalar>
struct Histogram {
  /// Tag of the source hierarchy; 0 for histograms built from raw components.
  std::uint64_t hierarchyTag = 0;
  std::vector<std::pair<NodeId, Scalar>> entries;

  /// Histogram over component indices 0..n-1 of a plain vector (zeros dropped).
  static Histogram fromComponents(const std::vector<Scalar>& components) {
    Histogram h;
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i] != Scalar(0))
        h.entries.emplace_back(i, components[i]);
    return h;
  }

  Scalar mass() const {
    Scalar sum(0);
    for (const auto& e : entries)
      sum += e.second;
    return sum;
  }

  Scalar operator[](NodeId v) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), v,
                               [](const auto& e, NodeId key) { return e.first < key; });
    return it != entries.end() && it->first == v ? it->second : Scalar(0);
  }
};

namespace detail {

// Nodes on the root paths of `leaves`, grouped by depth (deepest last).
template <typename Scalar>
std::vector<std::vector<NodeId>> touchedByDepth(const Hierarchy<Scalar>& H,
                                                const std::vector<NodeId>& leaves,
                                                std::unordered_map<NodeId, std::size_t>& seen) {
  std::vector<std::vector<NodeId>> levels;
  const auto add = [&](NodeId v) {
    const auto d = H.depth(v);
    if (d >= levels.size())
      levels.resize(d + 1);
    levels[d].push_back(v);
  };
  for (auto leaf : leaves) {
    add(leaf);
    for (NodeId v = leaf; v != H.root();) {
      v = H.parent(v);
      if (!seen.try_emplace(v, 0).second)
        break;
      add(v);
    }
  }
  return levels;
}

} // namespace detail

/// Histogram of X in one bottom-up pass over the nodes its elements touch. Null objects are skipped.
template <typename Scalar>
Histogram<Scalar> histogram(const Hierarchy<Scalar>& H, const Multiset& X) {
  Histogram<Scalar> result;
  result.hierarchyTag = H.tag();
  std::unordered_map<NodeId, std::size_t> count;
  count.reserve(2 * X.size());
  std::vector<NodeId> leaves;
  for (auto x : X) {
    if (x == kNullObject)
      continue;
    auto [it, inserted] = count.try_emplace(H.leafOf(x), 0);
    if (inserted)
      leaves.push_back(it->first);
    ++it->second;
  }
  const auto levels = detail::touchedByDepth(H, leaves, count);
  for (auto level = levels.rbegin(); level != levels.rend(); ++level)
    for (auto v : *level) {
      const auto c = count[v];
      if (v != H.root())
        count[H.parent(v)] += c;
      const Scalar omega = H.additiveWeight(v);
      if (omega > Scalar(0))
        result.entries.emplace_back(v, omega * static_cast<Scalar>(c));
    }
  std::sort(result.entries.begin(), result.entries.end());
  return result;
}

/// Histogram intersection Σ_v min(g(v), h(v)).
template <typename Scalar>
Scalar intersect(const Histogram<Scalar>& g, const Histogram<Scalar>& h) {
  if (g.hierarchyTag != h.hierarchyTag)
    throw HierarchyMismatch("histograms stem from different hierarchies");
  Scalar sum(0);
  auto i = g.entries.begin();
  auto j = h.entries.begin();
  while (i != g.entries.end() && j != h.entries.end()) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else {
      sum += std::min(i->second, j->second);
      ++i;
      ++j;
    }
  }
  return sum;
}

/// Optimal assignment kernel for the base kernel induced by H, by histogram intersection.
template <typename Scalar>
Scalar assignmentKernel(const Hierarchy<Scalar>& H, const Multiset& X, const Multiset& Y) {
  return intersect(histogram(H, X), histogram(H, Y));
}

/**
 * Explicit optimal bijection between pad(X, Y): a bottom-up traversal pairs,
 * at every node, the still unmatched elements of X and Y below it. Elements
 * are paired in ascending index order; leftovers after the root are matched
 * to null objects.
 */
template <typename Scalar>
Assignment<Scalar> greedyAssignment(const Hierarchy<Scalar>& H, const Multiset& X, const Multiset& Y) {
  const auto [xs, ys] = pad(X, Y);
  const auto n = xs.size();

  struct Pool {
    std::vector<std::size_t> x, y;
  };
  std::unordered_map<NodeId, Pool> pools;
  std::unordered_map<NodeId, std::size_t> seen;
  std::vector<NodeId> leaves;
  Pool unplaced;
  const auto place = [&](const Multiset& set, bool isX) {
    for (std::size_t i = 0; i < n; ++i) {
      if (set[i] == kNullObject) {
        (isX ? unplaced.x : unplaced.y).push_back(i);
        continue;
      }
      const auto leaf = H.leafOf(set[i]);
      if (seen.try_emplace(leaf, 0).second)
        leaves.push_back(leaf);
      auto& pool = pools[leaf];
      (isX ? pool.x : pool.y).push_back(i);
    }
  };
  place(xs, true);
  place(ys, false);

  Assignment<Scalar> result;
  const auto levels = detail::touchedByDepth(H, leaves, seen);
  for (auto level = levels.rbegin(); level != levels.rend(); ++level)
    for (auto v : *level) {
      auto it = pools.find(v);
      if (it == pools.end())
        continue;
      auto pool = std::move(it->second);
      pools.erase(it);
      std::sort(pool.x.begin(), pool.x.end());
      std::sort(pool.y.begin(), pool.y.end());
      const auto matched = std::min(pool.x.size(), pool.y.size());
      for (std::size_t k = 0; k < matched; ++k)
        result.pairs.emplace_back(pool.x[k], pool.y[k]);
      result.value += H.weight(v) * static_cast<Scalar>(matched);
      auto& rest = v == H.root() ? unplaced : pools[H.parent(v)];
      rest.x.insert(rest.x.end(), pool.x.begin() + static_cast<std::ptrdiff_t>(matched), pool.x.end());
      rest.y.insert(rest.y.end(), pool.y.begin() + static_cast<std::ptrdiff_t>(matched), pool.y.end());
    }

  std::sort(unplaced.x.begin(), unplaced.x.end());
  std::sort(unplaced.y.begin(), unplaced.y.end());
  for (std::size_t k = 0; k < unplaced.x.size(); ++k)
    result.pairs.emplace_back(unplaced.x[k], unplaced.y[k]);
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

} // namespace oak

#endif // OAK_ASSIGNMENT_HPP
