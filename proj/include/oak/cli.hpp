#ifndef OAK_CLI_HPP
#define OAK_CLI_HPP

#include "oak/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace oak::cli {

enum ExitCode : int {
  kOk = 0,
  kParseFailure = 1,
  kUnknownKernel = 2,
  kIoFailure = 3,
  kCheckFailure = 4,
};

enum class OutputFormat { Dense, Libsvm };

struct RunConfig {
  std::string command;
  /// Dataset directory; its last path component is the dataset name unless `name` is set.
  std::filesystem::path dataset;
  std::string name;
  /// Generate a synthetic dataset of this many graphs instead of reading one.
  std::size_t synthetic = 0;
  std::string kernel = "wl-oa";
  int h = 3;
  bool normalize = false;
  OutputFormat outputFormat = OutputFormat::Dense;
  std::string outputPath = "-";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // validate
  bool oracle = false;
  std::size_t oracleSamples = 50;
  std::filesystem::path matrix;
  // bench
  std::size_t scale = 0;
};

/// Header `n kernel params`, then n rows; 9 significant digits.
void writeDense(std::ostream& out, const GramMatrix& gram);
/// Precomputed-kernel rows `label 0:i 1:v1 ... n:vn` with 1-based sample index i.
void writeLibsvm(std::ostream& out, const GramMatrix& gram, const std::vector<int>& classLabels);
/// Inverse of writeDense; throws ParseError.
GramMatrix readDense(std::istream& in, const std::string& source = "matrix");

int cmdGram(const RunConfig& config, std::ostream& err);
int cmdValidate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmdBench(const RunConfig& config, std::ostream& err);
int cmdInspect(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the subcommand.
int run(int argc, const char* const* argv);

} // namespace oak::cli

#endif // OAK_CLI_HPP
