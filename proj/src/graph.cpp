#include "oak/graph.hpp"

#include "oak/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace oak {

Graph::Graph(std::vector<Label> labels, std::vector<Edge> edges) : labels_(std::move(labels)) {
  const auto n = labels_.size();
  for (auto& [u, v] : edges) {
    if (u >= n || v >= n)
      throw std::invalid_argument("Graph: edge endpoint out of range");
    if (u == v)
      throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
    if (u > v)
      std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  adjacency_.resize(n);
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& list : adjacency_)
    std::sort(list.begin(), list.end());
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

Graph Graph::permuted(const std::vector<Vertex>& perm) const {
  if (perm.size() != vertexCount())
    throw std::invalid_argument("Graph::permuted: permutation size mismatch");
  std::vector<Label> labels(vertexCount());
  for (std::size_t v = 0; v < vertexCount(); ++v)
    labels[perm[v]] = labels_[v];
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (auto [u, v] : edges_)
    edges.emplace_back(perm[u], perm[v]);
  return Graph(std::move(labels), std::move(edges));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parseInteger(std::string_view token, const std::string& file, std::size_t line) {
  token = trim(token);
  long long value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end)
    throw ParseError(file, line, "expected integer, got '" + std::string(token) + "'");
  return value;
}

/// Non-blank lines of a file, each split on commas into integers, with their line numbers.
struct IntegerRows {
  std::vector<std::vector<long long>> rows;
  std::vector<std::size_t> lineNumbers;
};

std::optional<IntegerRows> readRows(const std::filesystem::path& path, bool required) {
  std::ifstream in(path);
  if (!in) {
    if (required)
      throw ParseError(path.string(), 0, "cannot open file");
    return std::nullopt;
  }
  IntegerRows result;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string_view view = trim(line);
    if (view.empty())
      continue;
    std::vector<long long> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      row.push_back(parseInteger(view.substr(start, comma - start), path.string(), lineNo));
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    result.rows.push_back(std::move(row));
    result.lineNumbers.push_back(lineNo);
  }
  return result;
}

} // namespace

Dataset parseDataset(const std::filesystem::path& directory, const std::string& name) {
  const auto file = [&](const char* suffix) { return directory / (name + suffix); };
  const auto indicatorPath = file("_graph_indicator.txt");
  const auto edgePath = file("_A.txt");
  const auto classPath = file("_graph_labels.txt");
  const auto labelPath = file("_node_labels.txt");

  const auto indicator = *readRows(indicatorPath, true);
  const auto edgeRows = *readRows(edgePath, true);
  const auto classes = *readRows(classPath, true);
  const auto nodeLabels = readRows(labelPath, false);

  Dataset dataset;
  dataset.name = name;
  const std::size_t graphCount = classes.rows.size();
  for (std::size_t i = 0; i < graphCount; ++i) {
    if (classes.rows[i].size() != 1)
      throw ParseError(classPath.string(), classes.lineNumbers[i], "expected one class label");
    dataset.classLabels.push_back(static_cast<int>(classes.rows[i][0]));
  }

  // Global vertex index -> (graph, local index).
  const std::size_t vertexTotal = indicator.rows.size();
  std::vector<std::size_t> graphOf(vertexTotal);
  std::vector<Vertex> localIndex(vertexTotal);
  std::vector<std::size_t> sizes(graphCount, 0);
  for (std::size_t v = 0; v < vertexTotal; ++v) {
    const auto& row = indicator.rows[v];
    const auto lineNo = indicator.lineNumbers[v];
    if (row.size() != 1)
      throw ParseError(indicatorPath.string(), lineNo, "expected one graph id");
    if (row[0] < 1 || static_cast<std::size_t>(row[0]) > graphCount)
      throw ParseError(indicatorPath.string(), lineNo,
                       "graph id " + std::to_string(row[0]) + " outside 1.." +
                           std::to_string(graphCount));
    graphOf[v] = static_cast<std::size_t>(row[0] - 1);
    localIndex[v] = static_cast<Vertex>(sizes[graphOf[v]]++);
  }

  std::vector<long long> rawLabels(vertexTotal, 0);
  if (nodeLabels) {
    if (nodeLabels->rows.size() != vertexTotal)
      throw ParseError(labelPath.string(), 0,
                       "expected " + std::to_string(vertexTotal) + " vertex labels, found " +
                           std::to_string(nodeLabels->rows.size()));
    for (std::size_t v = 0; v < vertexTotal; ++v) {
      if (nodeLabels->rows[v].empty())
        throw ParseError(labelPath.string(), nodeLabels->lineNumbers[v], "missing label");
      rawLabels[v] = nodeLabels->rows[v][0];
    }
  }
  std::map<long long, Label> dictionary;
  for (auto value : rawLabels)
    dictionary.emplace(value, 0);
  for (Label id = 0; auto& [value, dense] : dictionary) {
    dense = id++;
    dataset.labelValues.push_back(value);
  }

  std::vector<std::vector<Label>> labels(graphCount);
  for (std::size_t g = 0; g < graphCount; ++g)
    labels[g].reserve(sizes[g]);
  for (std::size_t v = 0; v < vertexTotal; ++v)
    labels[graphOf[v]].push_back(dictionary.at(rawLabels[v]));

  std::vector<std::vector<Edge>> edges(graphCount);
  for (std::size_t i = 0; i < edgeRows.rows.size(); ++i) {
    const auto& row = edgeRows.rows[i];
    const auto lineNo = edgeRows.lineNumbers[i];
    if (row.size() != 2)
      throw ParseError(edgePath.string(), lineNo, "expected two vertex ids");
    for (auto id : row)
      if (id < 1 || static_cast<std::size_t>(id) > vertexTotal)
        throw ParseError(edgePath.string(), lineNo,
                         "vertex " + std::to_string(id) + " does not exist");
    const auto u = static_cast<std::size_t>(row[0] - 1);
    const auto v = static_cast<std::size_t>(row[1] - 1);
    if (graphOf[u] != graphOf[v])
      throw ParseError(edgePath.string(), lineNo, "edge connects vertices of different graphs");
    if (u == v)
      throw ParseError(edgePath.string(), lineNo, "self-loop at vertex " + std::to_string(u + 1));
    edges[graphOf[u]].emplace_back(localIndex[u], localIndex[v]);
  }

  dataset.graphs.reserve(graphCount);
  for (std::size_t g = 0; g < graphCount; ++g)
    dataset.graphs.emplace_back(std::move(labels[g]), std::move(edges[g]));
  return dataset;
}

void writeDataset(const Dataset& dataset, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const auto open = [&](const char* suffix) {
    const auto path = directory / (dataset.name + suffix);
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot write " + path.string());
    return out;
  };
  auto edgesOut = open("_A.txt");
  auto indicatorOut = open("_graph_indicator.txt");
  auto classOut = open("_graph_labels.txt");
  auto labelOut = open("_node_labels.txt");

  std::size_t offset = 1;
  for (std::size_t g = 0; g < dataset.size(); ++g) {
    const auto& graph = dataset.graphs[g];
    for (std::size_t v = 0; v < graph.vertexCount(); ++v) {
      indicatorOut << g + 1 << '\n';
      const auto label = graph.label(static_cast<Vertex>(v));
      if (label < dataset.labelValues.size())
        labelOut << dataset.labelValues[label] << '\n';
      else
        labelOut << label << '\n';
    }
    for (auto [u, v] : graph.edges()) {
      edgesOut << offset + u << ", " << offset + v << '\n';
      edgesOut << offset + v << ", " << offset + u << '\n';
    }
    offset += graph.vertexCount();
    classOut << dataset.classLabels.at(g) << '\n';
  }
  if (!edgesOut || !indicatorOut || !classOut || !labelOut)
    throw std::runtime_error("I/O error writing dataset " + dataset.name);
}

Graph syntheticGraph(std::uint64_t seed, std::size_t n, double p, Label alphabet) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(std::clamp(p, 0.0, 1.0));
  std::uniform_int_distribution<Label> pick(0, std::max<Label>(alphabet, 1) - 1);
  std::vector<Label> labels(n);
  for (auto& l : labels)
    l = pick(rng);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (coin(rng))
        edges.emplace_back(u, v);
  return Graph(std::move(labels), std::move(edges));
}

Dataset syntheticDataset(std::uint64_t seed, std::size_t count, std::size_t maxVertices, double p,
                         Label alphabet) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(maxVertices, 1));
  Dataset dataset;
  dataset.name = "SYNTH";
  for (std::size_t i = 0; i < count; ++i) {
    dataset.graphs.push_back(syntheticGraph(rng(), size(rng), p, alphabet));
    dataset.classLabels.push_back(static_cast<int>(rng() % 2));
  }
  dataset.labelValues.resize(std::max<Label>(alphabet, 1));
  std::iota(dataset.labelValues.begin(), dataset.labelValues.end(), 0LL);
  return dataset;
}

} // namespace oak
