#include "oak/cli.hpp"

#include "oak/errors.hpp"
#include "oak/graph.hpp"
#include "oak/validation.hpp"
#include "oak/wl.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace oak::cli {

namespace {

std::string formatValue(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", v);
  return buffer;
}

std::string paramString(const GramMatrix& gram) {
  std::string out;
  for (const auto& [key, value] : gram.params)
    out += key + "=" + value + ",";
  return out + "normalized=" + (gram.normalized ? "1" : "0");
}

// Writes through `body` to stdout ("-") or a file; I/O failures map to kIoFailure.
int withOutput(const std::string& path, std::ostream& err,
               const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return std::cout ? kOk : kIoFailure;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "error: cannot open " << path << " for writing\n";
    return kIoFailure;
  }
  body(file);
  file.close();
  if (!file) {
    err << "error: failed writing " << path << "\n";
    return kIoFailure;
  }
  return kOk;
}

struct Loaded {
  std::optional<Dataset> dataset;
  int status = kOk;
};

Loaded loadDataset(const RunConfig& config, std::ostream& err) {
  Loaded result;
  try {
    if (config.synthetic > 0) {
      result.dataset = syntheticDataset(config.seed, config.synthetic, 20, 0.2, 3);
    } else if (!config.dataset.empty()) {
      auto dir = config.dataset;
      if (!dir.has_filename())
        dir = dir.parent_path();
      const auto name = config.name.empty() ? dir.filename().string() : config.name;
      result.dataset = parseDataset(dir, name);
    } else {
      err << "error: no dataset given (use --dataset or --synthetic)\n";
      result.status = kParseFailure;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    result.status = kParseFailure;
  } catch (const std::invalid_argument& e) {
    err << "parse error: " << e.what() << "\n";
    result.status = kParseFailure;
  }
  return result;
}

std::optional<KernelKind> resolveKernel(const std::string& name, std::ostream& err) {
  try {
    return parseKernelName(name);
  } catch (const UnknownKernel& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

GramMatrix computeGram(const Dataset& dataset, KernelKind kind, const RunConfig& config) {
  auto g = gram(dataset, kind, GramParams{config.h, config.threads});
  return config.normalize ? normalize(g) : g;
}

} // namespace

void writeDense(std::ostream& out, const GramMatrix& gram) {
  const auto n = gram.size();
  out << n << ' ' << gram.kernelName << ' ' << paramString(gram) << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      out << (j ? " " : "") << formatValue(gram.values(i, j));
    out << '\n';
  }
}

void writeLibsvm(std::ostream& out, const GramMatrix& gram, const std::vector<int>& classLabels) {
  const auto n = gram.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto label = static_cast<std::size_t>(i) < classLabels.size() ? classLabels[i] : 0;
    out << label << " 0:" << i + 1;
    for (Eigen::Index j = 0; j < n; ++j)
      out << ' ' << j + 1 << ':' << formatValue(gram.values(i, j));
    out << '\n';
  }
}

GramMatrix readDense(std::istream& in, const std::string& source) {
  std::string header;
  if (!std::getline(in, header))
    throw ParseError(source, 1, "missing header");
  std::istringstream fields(header);
  long long n = -1;
  GramMatrix gram;
  std::string params;
  if (!(fields >> n >> gram.kernelName) || n < 0)
    throw ParseError(source, 1, "expected header 'n kernel params'");
  fields >> params;
  std::istringstream list(params);
  std::string item;
  while (std::getline(list, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParseError(source, 1, "malformed parameter '" + item + "'");
    const auto key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "normalized")
      gram.normalized = value == "1";
    else
      gram.params[key] = value;
  }
  gram.values.resize(n, n);
  for (long long i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(in, line))
      throw ParseError(source, static_cast<std::size_t>(i + 2), "missing matrix row");
    std::istringstream row(line);
    for (long long j = 0; j < n; ++j)
      if (!(row >> gram.values(i, j)))
        throw ParseError(source, static_cast<std::size_t>(i + 2), "expected " + std::to_string(n) + " values");
  }
  return gram;
}

int cmdGram(const RunConfig& config, std::ostream& err) {
  const auto kind = resolveKernel(config.kernel, err);
  if (!kind)
    return kUnknownKernel;
  auto loaded = loadDataset(config, err);
  if (!loaded.dataset)
    return loaded.status;
  const auto g = computeGram(*loaded.dataset, *kind, config);
  return withOutput(config.outputPath, err, [&](std::ostream& out) {
    if (config.outputFormat == OutputFormat::Libsvm)
      writeLibsvm(out, g, loaded.dataset->classLabels);
    else
      writeDense(out, g);
  });
}

int cmdValidate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<Dataset> dataset;
  GramMatrix g;
  if (!config.matrix.empty()) {
    std::ifstream in(config.matrix);
    if (!in) {
      err << "error: cannot read " << config.matrix.string() << "\n";
      return kIoFailure;
    }
    try {
      g = readDense(in, config.matrix.string());
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << "\n";
      return kParseFailure;
    }
    if (config.oracle) {
      auto loaded = loadDataset(config, err);
      if (!loaded.dataset)
        return loaded.status;
      dataset = std::move(loaded.dataset);
    }
  } else {
    const auto kind = resolveKernel(config.kernel, err);
    if (!kind)
      return kUnknownKernel;
    auto loaded = loadDataset(config, err);
    if (!loaded.dataset)
      return loaded.status;
    dataset = std::move(loaded.dataset);
    g = computeGram(*dataset, *kind, config);
  }

  bool ok = true;
  try {
    const auto report = checkPsd(g.values);
    out << "psd " << g.kernelName << ": " << report << "\n";
    ok = report.passed;
  } catch (const InvalidMatrix& e) {
    out << "psd " << g.kernelName << ": " << e.what() << "\n";
    ok = false;
  }

  if (config.oracle) {
    const auto kind = resolveKernel(g.kernelName, err);
    if (!kind)
      return kUnknownKernel;
    if (!isAssignmentKernel(*kind)) {
      out << "oracle: skipped, " << g.kernelName << " is not an optimal assignment kernel\n";
    } else {
      try {
        const auto mismatches = oracleCrossCheck(*dataset, g, config.oracleSamples, config.seed);
        for (const auto& m : mismatches)
          out << "oracle mismatch at (" << m.i << "," << m.j << "): expected "
              << formatValue(m.expected) << ", got " << formatValue(m.actual) << "\n";
        out << "oracle: " << (mismatches.empty() ? "passed" : "failed") << "\n";
        ok = ok && mismatches.empty();
      } catch (const InvalidParameter& e) {
        out << "oracle: " << e.what() << "\n";
        ok = false;
      }
    }
  }
  return ok ? kOk : kCheckFailure;
}

int cmdBench(const RunConfig& config, std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  std::vector<KernelKind> kinds(kAllKernels.begin(), kAllKernels.end());
  if (!config.kernel.empty() && config.kernel != "all") {
    const auto kind = resolveKernel(config.kernel, err);
    if (!kind)
      return kUnknownKernel;
    kinds = {*kind};
  }
  auto loaded = loadDataset(config, err);
  if (!loaded.dataset)
    return loaded.status;
  const auto& dataset = *loaded.dataset;
  if (dataset.size() == 0) {
    err << "error: dataset is empty\n";
    return kParseFailure;
  }

  std::ostringstream csv;
  csv << "kernel,graphs,gram_ns,pair_ns,pair_hungarian_ns\n";
  const auto n = dataset.size();
  const double pairCount = static_cast<double>(n * (n + 1) / 2);
  for (auto kind : kinds) {
    const auto start = Clock::now();
    const auto g = gram(dataset, kind, GramParams{config.h, 1});
    const double gramNs = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    csv << kernelName(kind) << ',' << n << ',' << formatValue(gramNs) << ','
        << formatValue(gramNs / pairCount) << ',';
    if (isAssignmentKernel(kind)) {
      std::optional<ColourSequence> colours;
      if (kind == KernelKind::WLOA)
        colours = refine(dataset.graphs, config.h);
      std::mt19937_64 rng(config.seed);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      constexpr int samples = 20;
      const auto hStart = Clock::now();
      for (int s = 0; s < samples; ++s)
        assignmentOracle(dataset, kind, pick(rng), pick(rng), colours ? &*colours : nullptr);
      csv << formatValue(std::chrono::duration<double, std::nano>(Clock::now() - hStart).count() /
                         samples);
    }
    csv << '\n';
  }
  if (config.scale > 0) {
    std::vector<std::size_t> sizes;
    for (std::size_t s = 256; s <= config.scale; s *= 2)
      sizes.push_back(s);
    BenchmarkOptions options;
    options.seed = config.seed;
    csv << '\n';
    writeTimingCsv(csv, benchmarkLinearTime(balancedHierarchy(8, 3), sizes, options));
  }
  return withOutput(config.outputPath, err, [&](std::ostream& out) { out << csv.str(); });
}

int cmdInspect(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto loaded = loadDataset(config, err);
  if (!loaded.dataset)
    return loaded.status;
  const auto& dataset = *loaded.dataset;
  std::size_t vertices = 0, edges = 0;
  std::map<int, std::size_t> classes;
  for (std::size_t g = 0; g < dataset.size(); ++g) {
    vertices += dataset.graphs[g].vertexCount();
    edges += dataset.graphs[g].edgeCount();
    ++classes[dataset.classLabels[g]];
  }
  const double count = std::max<double>(1.0, static_cast<double>(dataset.size()));
  out << "dataset " << dataset.name << "\n"
      << "graphs " << dataset.size() << "\n"
      << "vertices " << vertices << " (mean " << formatValue(vertices / count) << ")\n"
      << "edges " << edges << " (mean " << formatValue(edges / count) << ")\n"
      << "vertex_labels " << dataset.labelValues.size() << "\n";
  for (const auto& [label, c] : classes)
    out << "class " << label << " " << c << "\n";

  if (config.outputPath.empty() || config.outputPath == "-")
    return kOk;
  const auto colours = refine(dataset.graphs, config.h);
  const auto H = wlHierarchy(colours);
  out << "wl_hierarchy_nodes " << H.nodeCount() << " (h=" << config.h << ")\n";
  return withOutput(config.outputPath, err, [&](std::ostream& file) { writeHierarchy(file, H); });
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Optimal assignment graph kernels: Gram matrices, validation and timing"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  RunConfig config;

  const auto addDataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", config.dataset, "Dataset directory in graph-benchmark text format");
    sub->add_option("--name", config.name, "Dataset name (defaults to the directory name)");
    sub->add_option("--synthetic", config.synthetic, "Use a synthetic dataset of this many graphs");
    sub->add_option("--seed", config.seed, "Seed for synthetic data and sampling");
  };
  const auto addKernel = [&](CLI::App* sub) {
    sub->add_option("--kernel", config.kernel, "v, e, v-oa, e-oa, wl, wl-oa, gl or sp");
    sub->add_option("--h", config.h, "Refinement iterations for wl and wl-oa")->check(CLI::NonNegativeNumber);
    sub->add_flag("--normalize", config.normalize, "Normalize to unit self-similarity");
    sub->add_option("--threads", config.threads, "Worker threads for Gram assembly");
  };

  auto* gramCmd = app.add_subcommand("gram", "Compute a Gram matrix");
  addDataset(gramCmd);
  addKernel(gramCmd);
  gramCmd->add_option("--format", config.outputFormat, "dense or libsvm")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, OutputFormat>{{"dense", OutputFormat::Dense}, {"libsvm", OutputFormat::Libsvm}},
          CLI::ignore_case));
  gramCmd->add_option("--output,-o", config.outputPath, "Output file ('-' for stdout)");

  auto* validateCmd = app.add_subcommand("validate", "Check positive semidefiniteness and oracle agreement");
  addDataset(validateCmd);
  addKernel(validateCmd);
  validateCmd->add_option("--matrix", config.matrix, "Validate a dense matrix file instead of computing one");
  validateCmd->add_flag("--oracle", config.oracle, "Cross-check sampled entries with the Hungarian method");
  validateCmd->add_option("--samples", config.oracleSamples, "Number of sampled pairs for --oracle");

  auto* benchCmd = app.add_subcommand("bench", "Time Gram computation per kernel");
  addDataset(benchCmd);
  benchCmd->add_option("--kernel", config.kernel, "Kernel to time (default: all)");
  benchCmd->add_option("--h", config.h, "Refinement iterations for wl and wl-oa");
  benchCmd->add_option("--scale", config.scale, "Also time per-pair evaluation for sizes 256, 512, ... up to this");
  benchCmd->add_option("--output,-o", config.outputPath, "Output file ('-' for stdout)");

  auto* inspectCmd = app.add_subcommand("inspect", "Summarize a dataset");
  addDataset(inspectCmd);
  inspectCmd->add_option("--h", config.h, "Refinement iterations for the hierarchy dump");
  inspectCmd->add_option("--output,-o", config.outputPath, "Write the WL hierarchy to this file");

  benchCmd->preparse_callback([&](std::size_t) { config.kernel = "all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParseFailure;
  }

  if (gramCmd->parsed())
    config.command = "gram";
  else if (validateCmd->parsed())
    config.command = "validate";
  else if (benchCmd->parsed())
    config.command = "bench";
  else
    config.command = "inspect";

  try {
    if (config.command == "gram")
      return cmdGram(config, std::cerr);
    if (config.command == "validate")
      return cmdValidate(config, std::cout, std::cerr);
    if (config.command == "bench")
      return cmdBench(config, std::cerr);
    return cmdInspect(config, std::cout, std::cerr);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoFailure;
  }
}

} // namespace oak::cli
