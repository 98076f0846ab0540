#include "sbmlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "sbmlab/generator.hpp"
#include "sbmlab/metrics.hpp"
#include "sbmlab/spectral.hpp"

namespace sbmlab {

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

struct ConfigLine {
  int line;
  std::string key;
  std::vector<std::string_view> values;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line, key, message); }

  std::string_view single() const {
    if (values.size() != 1) fail("expected a single value");
    return values.front();
  }

  template <typename T>
  T number() const {
    auto v = parse_number<T>(single());
    if (!v) fail("not a number: '" + std::string(single()) + "'");
    return *v;
  }

  template <typename T>
  std::vector<T> numbers() const {
    std::vector<T> out;
    for (auto s : values) {
      auto v = parse_number<T>(s);
      if (!v) fail("not a number: '" + std::string(s) + "'");
      out.push_back(*v);
    }
    return out;
  }

  bool flag() const {
    auto v = parse_bool(single());
    if (!v) fail("expected true or false");
    return *v;
  }
};

using KeyHandler = void (*)(SweepConfig&, const ConfigLine&);

const std::map<std::string, KeyHandler, std::less<>>& key_handlers() {
  static const std::map<std::string, KeyHandler, std::less<>> handlers = {
      {"n", [](SweepConfig& c, const ConfigLine& l) { c.n_list = l.numbers<int>(); }},
      {"k", [](SweepConfig& c, const ConfigLine& l) { c.k_list = l.numbers<int>(); }},
      {"beta", [](SweepConfig& c, const ConfigLine& l) { c.beta_list = l.numbers<double>(); }},
      {"b", [](SweepConfig& c, const ConfigLine& l) { c.b_list = l.numbers<double>(); }},
      {"methods",
       [](SweepConfig& c, const ConfigLine& l) {
         c.methods.clear();
         for (auto s : l.values) {
           auto m = parse_method(trim(s));
           if (!m) l.fail("unknown method '" + std::string(trim(s)) + "'");
           c.methods.push_back(*m);
         }
       }},
      {"seeds", [](SweepConfig& c, const ConfigLine& l) { c.n_seeds = l.number<int>(); }},
      {"base_seed", [](SweepConfig& c, const ConfigLine& l) { c.base_seed = l.number<std::uint64_t>(); }},
      {"output", [](SweepConfig& c, const ConfigLine& l) { c.output_path = std::string(l.single()); }},
      {"score_clip", [](SweepConfig& c, const ConfigLine& l) { c.options.score_clip = l.number<double>(); }},
      {"rsc_tau",
       [](SweepConfig& c, const ConfigLine& l) {
         if (l.single() == "paper" || l.single() == "degree-sum") {
           c.options.rsc_tau.reset();
         } else {
           c.options.rsc_tau = l.number<double>();
         }
       }},
      {"kmeans.n_init", [](SweepConfig& c, const ConfigLine& l) { c.options.kmeans.n_init = l.number<int>(); }},
      {"kmeans.max_iter", [](SweepConfig& c, const ConfigLine& l) { c.options.kmeans.max_iter = l.number<int>(); }},
      {"gibbs.iters", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.n_iter = l.number<int>(); }},
      {"gibbs.burnin", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.burn_in = l.number<int>(); }},
      {"gibbs.thin", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.thin = l.number<int>(); }},
      {"gibbs.chains", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.chains = l.number<int>(); }},
      {"gibbs.a", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.a = l.number<double>(); }},
      {"gibbs.b", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.b_prior = l.number<double>(); }},
      {"gibbs.unit_beta_shape", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.unit_beta_shape = l.flag(); }},
      {"gibbs.random_order", [](SweepConfig& c, const ConfigLine& l) { c.options.gibbs.randomize_order = l.flag(); }},
      {"vb.beta", [](SweepConfig& c, const ConfigLine& l) { c.options.vb.beta_hyper = l.number<double>(); }},
      {"vb.max_iter", [](SweepConfig& c, const ConfigLine& l) { c.options.vb.max_iter = l.number<int>(); }},
      {"vb.tol", [](SweepConfig& c, const ConfigLine& l) { c.options.vb.tol = l.number<double>(); }},
      {"vb.d", [](SweepConfig& c, const ConfigLine& l) { c.options.vb.d_const = l.number<double>(); }},
      {"vem.tol", [](SweepConfig& c, const ConfigLine& l) { c.options.vem.tol = l.number<double>(); }},
      {"vem.max_iter", [](SweepConfig& c, const ConfigLine& l) { c.options.vem.max_iter = l.number<int>(); }},
      {"vem.inner_tol", [](SweepConfig& c, const ConfigLine& l) { c.options.vem.inner_tol = l.number<double>(); }},
      {"vem.inner_max", [](SweepConfig& c, const ConfigLine& l) { c.options.vem.inner_max = l.number<int>(); }},
      {"vem.eta", [](SweepConfig& c, const ConfigLine& l) { c.options.vem.eta = l.number<double>(); }},
  };
  return handlers;
}

std::string parse_message(int line, const std::string& key, const std::string& message) {
  std::ostringstream os;
  os << "config line " << line;
  if (!key.empty()) os << " (" << key << ")";
  os << ": " << message;
  return os.str();
}

}  // namespace

ParseError::ParseError(int line, std::string key, const std::string& message)
    : Error(parse_message(line, key, message)), line_(line), key_(std::move(key)) {}

void SweepConfig::validate() const {
  if (n_list.empty()) throw ValidationError("n grid is empty");
  if (k_list.empty()) throw ValidationError("k grid is empty");
  if (beta_list.empty()) throw ValidationError("beta grid is empty");
  if (b_list.empty()) throw ValidationError("b grid is empty");
  if (methods.empty()) throw ValidationError("methods list is empty");
  if (n_seeds < 1) throw ValidationError("seeds must be >= 1");
  for (int k : k_list) {
    if (k < 1) throw ValidationError("every k must be >= 1");
  }
  for (double beta : beta_list) {
    if (!(beta >= 0.0)) throw ValidationError("every beta must be >= 0");
  }
  for (int n : n_list) {
    for (int k : k_list) {
      if (n < k) throw ValidationError("every n must be >= every k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    for (double b : b_list) {
      if (!(b > 0.0)) throw ValidationError("every b must be > 0");
      if (!(std::pow(static_cast<double>(n), -b) < 2.0 / 3.0)) {
        throw ValidationError("rho = n^-b must be < 2/3 (n=" + std::to_string(n) + ", b=" + format_double(b) + ")");
      }
    }
  }
  try {
    options.gibbs.validate(1);
    options.vb.validate();
    options.vem.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  if (options.score_clip && !(*options.score_clip > 0.0)) throw ValidationError("score_clip must be positive");
  if (options.rsc_tau && !(*options.rsc_tau > 0.0)) throw ValidationError("rsc_tau must be positive");
  if (options.kmeans.n_init < 1 || options.kmeans.max_iter < 1) throw ValidationError("kmeans settings must be >= 1");
}

std::vector<Cell> SweepConfig::cells() const {
  std::vector<Cell> out;
  for (int n : n_list) {
    for (int k : k_list) {
      for (double beta : beta_list) {
        for (double b : b_list) out.push_back({n, k, beta, b});
      }
    }
  }
  return out;
}

SweepConfig parse_config_text(std::string_view text) {
  SweepConfig config;
  std::set<std::string, std::less<>> seen;
  const auto& handlers = key_handlers();
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
    ConfigLine entry{line_no, std::string(trim(line.substr(0, eq))), {}};
    const std::string_view rhs = trim(line.substr(eq + 1));
    if (entry.key.empty()) throw ParseError(line_no, "", "missing key");
    if (rhs.empty()) entry.fail("missing value");
    for (auto v : split(rhs, ',')) {
      v = trim(v);
      if (v.empty()) entry.fail("empty list element");
      entry.values.push_back(v);
    }
    auto handler = handlers.find(entry.key);
    if (handler == handlers.end()) entry.fail("unknown key");
    if (!seen.insert(entry.key).second) entry.fail("duplicate key");
    handler->second(config, entry);
  }
  config.validate();
  return config;
}

SweepConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// ---------------------------------------------------------------------------
// Single runs

std::uint64_t scenario_seed(std::uint64_t base_seed, const Cell& cell, int seed_index) {
  return hash_words({base_seed, static_cast<std::uint64_t>(cell.n), static_cast<std::uint64_t>(cell.k),
                     double_bits(cell.beta), double_bits(cell.b), static_cast<std::uint64_t>(seed_index)});
}

std::uint64_t method_stream(Method method) { return 100 + static_cast<std::uint64_t>(method); }

MethodOutcome run_method(const AdjacencyMatrix& a, int k, Method method, const MethodOptions& options,
                         RngHandle& rng) {
  auto spectral = [&](SpectralTag tag) {
    SpectralVariant variant{tag, options.score_clip, options.rsc_tau};
    SpectralResult r = spectral_cluster(a, k, variant, rng, options.kmeans);
    return MethodOutcome{std::move(r.labels), true, r.kmeans_iterations};
  };
  switch (method) {
    case Method::SC: return spectral(SpectralTag::Vanilla);
    case Method::SCORE: return spectral(SpectralTag::Score);
    case Method::L2: return spectral(SpectralTag::L2Norm);
    case Method::RSC: return spectral(SpectralTag::Regularized);
    case Method::GIBBS: {
      GibbsResult r = run_gibbs(a, k, options.gibbs, rng);
      return {std::move(r.labels), true, options.gibbs.n_iter};
    }
    case Method::VB: {
      VBResult r = run_vb(a, k, options.vb, rng);
      return {std::move(r.labels), r.converged, r.iterations};
    }
    case Method::VEMB:
    case Method::VEMG: {
      VEMConfig cfg = options.vem;
      cfg.model = method == Method::VEMB ? EmissionModel::Bernoulli : EmissionModel::Gaussian;
      VEMResult r = run_vem(a, k, cfg, rng);
      return {std::move(r.labels), r.converged, r.iterations};
    }
  }
  throw Error("unknown method");
}

RunRecord run_cell(const ScenarioConfig& scenario, Method method, const MethodOptions& options) {
  RunRecord record;
  record.method = method;
  record.scenario = scenario;
  try {
    const GeneratedInstance instance = generate(scenario);
    RngHandle rng = seeded_rng(scenario.seed, method_stream(method));
    const auto start = std::chrono::steady_clock::now();
    MethodOutcome outcome = run_method(instance.adjacency, scenario.k, method, options, rng);
    const auto stop = std::chrono::steady_clock::now();
    record.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    record.converged = outcome.converged;
    record.iterations = outcome.iterations;
    record.ari = ari(instance.truth, outcome.labels);
    record.nmi = nmi(instance.truth, outcome.labels);
  } catch (const std::exception& e) {
    record.error = e.what();
  } catch (...) {
    record.error = "unknown exception";
  }
  if (record.failed()) {
    record.ari = std::numeric_limits<double>::quiet_NaN();
    record.nmi = std::numeric_limits<double>::quiet_NaN();
    record.converged = false;
  }
  return record;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string format_runtime(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

using RecordKey = std::tuple<int, int, double, double, std::uint64_t, int>;

RecordKey record_key(const RunRecord& r) {
  return {r.scenario.n, r.scenario.k, r.scenario.beta, r.scenario.b, r.scenario.seed, static_cast<int>(r.method)};
}

template <typename T>
T field_number(std::string_view s, std::string_view what) {
  auto v = parse_number<T>(s);
  if (!v) throw Error("csv: bad " + std::string(what) + " field '" + std::string(s) + "'");
  return *v;
}

Method field_method(std::string_view s) {
  auto m = parse_method(trim(s));
  if (!m) throw Error("csv: unknown method '" + std::string(s) + "'");
  return *m;
}

std::optional<double> field_optional(std::string_view s) {
  s = trim(s);
  if (s == "NA" || s.empty()) return std::nullopt;
  return field_number<double>(s, "quantile");
}

std::vector<std::string> read_data_lines(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) throw Error(path.string() + ": unexpected CSV header");
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_run_row(const RunRecord& r) {
  std::string row;
  row += to_string(r.method);
  row += ',' + std::to_string(r.scenario.n);
  row += ',' + std::to_string(r.scenario.k);
  row += ',' + format_double(r.scenario.beta);
  row += ',' + format_double(r.scenario.b);
  row += ',' + std::to_string(r.scenario.seed);
  row += ',' + (r.failed() ? std::string() : format_double(r.ari));
  row += ',' + (r.failed() ? std::string() : format_double(r.nmi));
  row += ',' + format_runtime(r.runtime_ms);
  row += ',' + std::string(r.converged ? "1" : "0");
  row += ',' + std::to_string(r.iterations);
  return row;
}

RunRecord parse_run_row(std::string_view line) {
  const auto f = split(trim(line), ',');
  if (f.size() != 11) throw Error("csv: expected 11 fields in run row");
  RunRecord r;
  r.method = field_method(f[0]);
  r.scenario.n = field_number<int>(f[1], "n");
  r.scenario.k = field_number<int>(f[2], "k");
  r.scenario.beta = field_number<double>(f[3], "beta");
  r.scenario.b = field_number<double>(f[4], "b");
  r.scenario.seed = field_number<std::uint64_t>(f[5], "seed");
  if (trim(f[6]).empty()) {
    r.error = "failed";
    r.ari = r.nmi = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.ari = field_number<double>(f[6], "ari");
    r.nmi = field_number<double>(f[7], "nmi");
  }
  r.runtime_ms = field_number<double>(f[8], "runtime_ms");
  r.converged = field_number<int>(f[9], "converged") != 0;
  r.iterations = field_number<int>(f[10], "iterations");
  return r;
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::vector<RunRecord> records;
  for (const auto& line : read_data_lines(path, kRunCsvHeader)) records.push_back(parse_run_row(line));
  return records;
}

void write_runs_csv(const std::filesystem::path& path, std::span<const RunRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << kRunCsvHeader << '\n';
  for (const auto& r : records) out << format_run_row(r) << '\n';
}

void sort_records(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RunRecord& x, const RunRecord& y) { return record_key(x) < record_key(y); });
}

// ---------------------------------------------------------------------------
// Sweep

int thread_budget(int requested) {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  int n = requested > 0 ? requested : hw;
  if (const char* cap = std::getenv("SBMLAB_THREADS")) {
    if (auto v = parse_number<int>(cap); v && *v > 0) n = std::min(n, *v);
  }
  return std::max(1, n);
}

std::vector<RunRecord> run_sweep(const SweepConfig& config, const SweepOptions& options) {
  config.validate();

  struct Task {
    ScenarioConfig scenario;
    Method method;
  };

  std::vector<RunRecord> existing;
  const bool streaming = !config.output_path.empty();
  const std::filesystem::path out_path(config.output_path);
  bool need_header = true;
  if (streaming && std::filesystem::exists(out_path) && std::filesystem::file_size(out_path) > 0) {
    existing = read_runs_csv(out_path);
    need_header = false;
  }
  std::set<RecordKey> done;
  for (const auto& r : existing) done.insert(record_key(r));

  std::vector<Task> tasks;
  for (const Cell& cell : config.cells()) {
    for (int s = 0; s < config.n_seeds; ++s) {
      const ScenarioConfig scenario{cell.n, cell.k, cell.beta, cell.b, scenario_seed(config.base_seed, cell, s)};
      for (Method m : config.methods) {
        RunRecord probe;
        probe.method = m;
        probe.scenario = scenario;
        if (!done.contains(record_key(probe))) tasks.push_back({scenario, m});
      }
    }
  }

  std::ofstream sink;
  if (streaming) {
    sink.open(out_path, std::ios::app);
    if (!sink) throw Error("cannot open " + out_path.string() + " for writing");
    if (need_header) sink << kRunCsvHeader << '\n' << std::flush;
  }

  std::vector<RunRecord> fresh;
  fresh.reserve(tasks.size());
  std::mutex sink_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      RunRecord record = run_cell(tasks[idx].scenario, tasks[idx].method, config.options);
      std::lock_guard lock(sink_mutex);
      if (streaming) {
        sink << format_run_row(record) << '\n' << std::flush;
        if (!sink) throw Error("write to " + out_path.string() + " failed");
      }
      if (options.on_record) options.on_record(record);
      fresh.push_back(std::move(record));
    }
  };

  const int workers = std::min<int>(thread_budget(options.threads), std::max<std::size_t>(tasks.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  existing.insert(existing.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  sort_records(existing);
  return existing;
}

// ---------------------------------------------------------------------------
// Aggregation

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<SummaryRow> aggregate(std::span<const RunRecord> records) {
  using GroupKey = std::tuple<int, int, double, double, int>;
  std::map<GroupKey, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.scenario.n, r.scenario.k, r.scenario.beta, r.scenario.b, static_cast<int>(r.method)}].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.method = static_cast<Method>(std::get<4>(key));
    row.cell = {std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key)};
    std::vector<double> aris, nmis;
    for (const RunRecord* r : members) {
      ++row.n_runs;
      if (r->converged) ++row.n_converged;
      if (r->failed()) continue;
      aris.push_back(r->ari);
      nmis.push_back(r->nmi);
    }
    if (!aris.empty()) {
      std::sort(aris.begin(), aris.end());
      std::sort(nmis.begin(), nmis.end());
      row.q25_ari = quantile(aris, 0.25);
      row.median_ari = quantile(aris, 0.5);
      row.q75_ari = quantile(aris, 0.75);
      row.q25_nmi = quantile(nmis, 0.25);
      row.median_nmi = quantile(nmis, 0.5);
      row.q75_nmi = quantile(nmis, 0.75);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary_row(const SummaryRow& s) {
  std::string row;
  row += to_string(s.method);
  row += ',' + std::to_string(s.cell.n);
  row += ',' + std::to_string(s.cell.k);
  row += ',' + format_double(s.cell.beta);
  row += ',' + format_double(s.cell.b);
  for (const auto* v : {&s.median_ari, &s.q25_ari, &s.q75_ari, &s.median_nmi, &s.q25_nmi, &s.q75_nmi}) {
    row += ',' + format_optional(*v);
  }
  row += ',' + std::to_string(s.n_runs);
  row += ',' + std::to_string(s.n_converged);
  return row;
}

SummaryRow parse_summary_row(std::string_view line) {
  const auto f = split(trim(line), ',');
  if (f.size() != 13) throw Error("csv: expected 13 fields in summary row");
  SummaryRow s;
  s.method = field_method(f[0]);
  s.cell = {field_number<int>(f[1], "n"), field_number<int>(f[2], "k"), field_number<double>(f[3], "beta"),
            field_number<double>(f[4], "b")};
  s.median_ari = field_optional(f[5]);
  s.q25_ari = field_optional(f[6]);
  s.q75_ari = field_optional(f[7]);
  s.median_nmi = field_optional(f[8]);
  s.q25_nmi = field_optional(f[9]);
  s.q75_nmi = field_optional(f[10]);
  s.n_runs = field_number<int>(f[11], "n_runs");
  s.n_converged = field_number<int>(f[12], "n_converged");
  return s;
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::vector<SummaryRow> rows;
  for (const auto& line : read_data_lines(path, kSummaryCsvHeader)) rows.push_back(parse_summary_row(line));
  return rows;
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
  os << kSummaryCsvHeader << '\n';
  for (const auto& r : rows) os << format_summary_row(r) << '\n';
}

std::string ranking_report(std::span<const SummaryRow> rows) {
  using CellKey = std::tuple<int, int, double, double>;
  std::map<CellKey, std::vector<const SummaryRow*>> cells;
  for (const auto& r : rows) cells[{r.cell.n, r.cell.k, r.cell.beta, r.cell.b}].push_back(&r);

  std::ostringstream os;
  char buf[160];
  for (auto& [key, members] : cells) {
    const auto& [n, k, beta, b] = key;
    std::stable_sort(members.begin(), members.end(), [](const SummaryRow* x, const SummaryRow* y) {
      const double mx = x->median_ari.value_or(-std::numeric_limits<double>::infinity());
      const double my = y->median_ari.value_or(-std::numeric_limits<double>::infinity());
      if (mx != my) return mx > my;
      return static_cast<int>(x->method) < static_cast<int>(y->method);
    });
    os << "n=" << n << " k=" << k << " beta=" << format_double(beta) << " b=" << format_double(b);
    if (b >= 1.0) os << "  (sparsest regime: recovery not expected)";
    os << '\n';
    // Competition ranking: methods with equal medians share a rank.
    int rank = 0;
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const SummaryRow* r = members[pos];
      if (pos == 0 || r->median_ari != members[pos - 1]->median_ari) rank = static_cast<int>(pos) + 1;
      if (r->median_ari) {
        std::snprintf(buf, sizeof buf, "  %d. %-6s median ARI %.4f [%.4f, %.4f]  median NMI %.4f  runs %d (%d converged)\n",
                      rank, std::string(to_string(r->method)).c_str(), *r->median_ari, *r->q25_ari, *r->q75_ari,
                      *r->median_nmi, r->n_runs, r->n_converged);
      } else {
        std::snprintf(buf, sizeof buf, "  %d. %-6s no successful runs  runs %d (%d converged)\n", rank,
                      std::string(to_string(r->method)).c_str(), r->n_runs, r->n_converged);
      }
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

void emit_plot_data(std::span<const SummaryRow> summaries, std::span<const RunRecord> records,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot open " + (dir / name).string() + " for writing");
    return out;
  };
  {
    auto out = open("summary.csv");
    write_summary_csv(out, summaries);
  }
  {
    std::vector<RunRecord> sorted(records.begin(), records.end());
    sort_records(sorted);
    auto out = open("runs_long.csv");
    out << "method,n,k,beta,b,seed,metric,value\n";
    for (const auto& r : sorted) {
      const std::string prefix = std::string(to_string(r.method)) + ',' + std::to_string(r.scenario.n) + ',' +
                                 std::to_string(r.scenario.k) + ',' + format_double(r.scenario.beta) + ',' +
                                 format_double(r.scenario.b) + ',' + std::to_string(r.scenario.seed) + ',';
      out << prefix << "ARI," << (r.failed() ? std::string() : format_double(r.ari)) << '\n';
      out << prefix << "NMI," << (r.failed() ? std::string() : format_double(r.nmi)) << '\n';
    }
  }
  {
    auto out = open("ranking.txt");
    out << ranking_report(summaries);
  }
}

}  // namespace sbmlab
