#ifndef OAK_VALIDATION_HPP
#define OAK_VALIDATION_HPP

#include "oak/assignment.hpp"
#include "oak/errors.hpp"
#include "oak/hierarchy.hpp"
#include "oak/kernels.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

namespace oak {

inline constexpr double kPsdTolerance = 1e-8;

struct PsdReport {
  double minEigenvalue = 0.0;
  double maxEigenvalue = 0.0;
  double tolerance = kPsdTolerance;
  bool passed = true;
};

std::ostream& operator<<(std::ostream& out, const PsdReport& report);

/**
 * Eigenvalue test for positive semidefiniteness: passes when the smallest
 * eigenvalue is at least −tolerance·max(1, largest eigenvalue).
 * Throws InvalidMatrix for non-square or asymmetric input.
 */
template <typename Derived>
PsdReport checkPsd(const Eigen::MatrixBase<Derived>& M, double tolerance = kPsdTolerance) {
  if (M.rows() != M.cols())
    throw InvalidMatrix("checkPsd: matrix is not square");
  const Eigen::MatrixXd A = M.template cast<double>();
  PsdReport report;
  report.tolerance = tolerance;
  if (A.size() == 0)
    return report;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidMatrix("checkPsd: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw InvalidMatrix("checkPsd: eigenvalue computation did not converge");
  report.minEigenvalue = solver.eigenvalues().minCoeff();
  report.maxEigenvalue = solver.eigenvalues().maxCoeff();
  report.passed = report.minEigenvalue >= -tolerance * std::max(1.0, report.maxEigenvalue);
  return report;
}

/// Random hierarchy with at most maxLeaves leaves and integer weights in [0, maxWeight].
Hierarchy<std::int64_t> randomHierarchy(std::uint64_t seed, std::size_t maxLeaves,
                                        std::int64_t maxWeight);

inline constexpr std::size_t kBruteForceLimit = 7;

/// Maximum over all n! bijections of a square cross matrix. Throws TooLarge for n > maxSize.
template <typename Derived>
typename Derived::Scalar bruteForceAssignment(const Eigen::MatrixBase<Derived>& cross,
                                              std::size_t maxSize = kBruteForceLimit) {
  using Scalar = typename Derived::Scalar;
  if (cross.rows() != cross.cols())
    throw InstanceError("bruteForceAssignment: cross matrix is not square");
  const auto n = static_cast<std::size_t>(cross.rows());
  if (n > maxSize)
    throw TooLarge("bruteForceAssignment: n = " + std::to_string(n) + " exceeds " +
                   std::to_string(maxSize));
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Scalar best(0);
  bool first = true;
  do {
    Scalar sum(0);
    for (std::size_t i = 0; i < n; ++i)
      sum += cross(static_cast<Eigen::Index>(i), perm[i]);
    if (first || sum > best)
      best = sum;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct TimingRow {
  std::size_t size = 0;
  double histogramNs = 0.0;
  /// Empty when the size exceeds the Hungarian cap.
  std::optional<double> hungarianNs;
};

struct BenchmarkOptions {
  std::uint64_t seed = 1;
  /// Timed repetitions per size; the fastest run is reported.
  std::size_t repetitions = 5;
  std::size_t hungarianMaxSize = 1024;
};

/**
 * Per-pair evaluation time of the assignment kernel for random multisets
 * |X| = |Y| = size: histogram construction plus intersection, and the
 * Hungarian method on the same instance for contrast. Single-threaded.
 */
std::vector<TimingRow> benchmarkLinearTime(const Hierarchy<std::int64_t>& hierarchy,
                                           const std::vector<std::size_t>& sizes,
                                           const BenchmarkOptions& options = {});

/// Hierarchy of fixed depth: `branching` children per inner node, `depth` levels below the root.
Hierarchy<std::int64_t> balancedHierarchy(std::size_t branching, std::size_t depth);

/// CSV `size,histogram_ns,hungarian_ns`; missing Hungarian timings are left empty.
void writeTimingCsv(std::ostream& out, const std::vector<TimingRow>& rows);

struct OracleMismatch {
  std::size_t i = 0;
  std::size_t j = 0;
  double expected = 0.0;
  double actual = 0.0;
};

/**
 * Value of an optimal assignment kernel between graphs i and j computed with
 * the Hungarian method on its base kernel: Dirac on vertex labels (V-OA), on
 * unordered edge label pairs (E-OA), or the number of matching refinement
 * colours (WL-OA, using `colours`).
 */
std::int64_t assignmentOracle(const Dataset& dataset, KernelKind kind, std::size_t i, std::size_t j,
                              const ColourSequence* colours = nullptr);

/**
 * Compares up to sampleSize seeded random entries of `gram` (normalized or
 * not) against assignmentOracle, at relative tolerance tol.
 */
std::vector<OracleMismatch> oracleCrossCheck(const Dataset& dataset, const GramMatrix& gram,
                                             std::size_t sampleSize, std::uint64_t seed,
                                             double tol = 1e-9);

} // namespace oak

#endif // OAK_VALIDATION_HPP
