#include "sbmlab/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sbmlab/generator.hpp"

namespace sbmlab {

namespace {

constexpr const char* kMatrixMarketHeader = "%%MatrixMarket matrix coordinate pattern symmetric";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void write_matrix_market(std::ostream& os, const AdjacencyMatrix& a) {
  os << kMatrixMarketHeader << '\n';
  os << a.size() << ' ' << a.size() << ' ' << a.edge_count() << '\n';
  for (int i = 0; i < a.size(); ++i) {
    for (int j : a.neighbors(i)) {
      if (j < i) os << i + 1 << ' ' << j + 1 << '\n';
    }
  }
}

AdjacencyMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("matrix market: empty input");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate" || field != "pattern" ||
      symmetry != "symmetric") {
    throw Error("matrix market: expected '" + std::string(kMatrixMarketHeader) + "'");
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz) || rows != cols || rows < 0 || nnz < 0) {
    throw Error("matrix market: bad size line '" + line + "'");
  }
  const int n = static_cast<int>(rows);
  Matrix m = Matrix::Zero(n, n);
  for (long e = 0; e < nnz; ++e) {
    long i = 0, j = 0;
    if (!(is >> i >> j)) throw Error("matrix market: truncated entry list");
    if (i < 1 || j < 1 || i > n || j > n) throw Error("matrix market: index out of range");
    m(i - 1, j - 1) = 1.0;
    m(j - 1, i - 1) = 1.0;
  }
  return validate_adjacency(m);
}

void write_labels(std::ostream& os, const CommunityAssignment& z) {
  for (int l : z.labels()) os << l << '\n';
}

CommunityAssignment read_labels(std::istream& is, std::optional<int> k) {
  std::vector<int> labels;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw Error("labels: not an integer: '" + token + "'");
    labels.push_back(value);
  }
  int top = 1;
  for (int l : labels) top = std::max(top, l);
  return CommunityAssignment(std::move(labels), k.value_or(top));
}

AdjacencyMatrix load_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void save_matrix_market(const std::filesystem::path& path, const AdjacencyMatrix& a) {
  auto out = open_out(path);
  write_matrix_market(out, a);
}

CommunityAssignment load_labels(const std::filesystem::path& path, std::optional<int> k) {
  auto in = open_in(path);
  return read_labels(in, k);
}

void save_labels(const std::filesystem::path& path, const CommunityAssignment& z) {
  auto out = open_out(path);
  write_labels(out, z);
}

void save_instance(const std::filesystem::path& prefix, const GeneratedInstance& instance) {
  const std::string base = prefix.string();
  save_matrix_market(base + ".mtx", instance.adjacency);
  save_labels(base + ".labels", instance.truth);

  nlohmann::ordered_json meta;
  meta["n"] = instance.scenario.n;
  meta["k"] = instance.scenario.k;
  meta["beta"] = instance.scenario.beta;
  meta["b"] = instance.scenario.b;
  meta["seed"] = instance.scenario.seed;
  meta["rho"] = instance.scenario.rho();
  meta["alpha"] = instance.proportions.values();
  meta["latent"] = instance.latent;
  meta["edges"] = instance.adjacency.edge_count();
  auto out = open_out(base + ".meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace sbmlab
