#pragma once

// Benchmark harness: sweep configuration, per-run evaluation, the parallel
// sweep engine with resumable CSV output, and boxplot-style aggregation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbmlab/gibbs.hpp"
#include "sbmlab/model.hpp"
#include "sbmlab/numkit.hpp"
#include "sbmlab/rng.hpp"
#include "sbmlab/vb.hpp"
#include "sbmlab/vem.hpp"

namespace sbmlab {

/// Per-method parameters shared by every run of a sweep.
struct MethodOptions {
  std::optional<double> score_clip;
  std::optional<double> rsc_tau;
  KMeansOptions kmeans;
  GibbsConfig gibbs;
  VBConfig vb;
  /// The emission model is taken from the method (VEMB / VEMG).
  VEMConfig vem;
};

struct Cell {
  int n = 0;
  int k = 0;
  double beta = 0.0;
  double b = 0.0;

  bool operator==(const Cell&) const = default;
};

struct SweepConfig {
  std::vector<int> n_list;
  std::vector<int> k_list;
  std::vector<double> beta_list;
  std::vector<double> b_list;
  std::vector<Method> methods;
  int n_seeds = 1;
  std::uint64_t base_seed = 0;
  MethodOptions options;
  std::string output_path;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
  /// Cartesian product, n outermost and b innermost.
  std::vector<Cell> cells() const;
};

class ParseError : public Error {
 public:
  ParseError(int line, std::string key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Line-oriented `key = value[, value...]` text; `#` starts a comment.
/// Unknown or repeated keys are rejected.
SweepConfig parse_config_text(std::string_view text);
SweepConfig parse_config(const std::filesystem::path& path);

/// Seed for replicate `seed_index` of a cell; every method sees the same graph.
std::uint64_t scenario_seed(std::uint64_t base_seed, const Cell& cell, int seed_index);
/// RNG stream used by a method on a scenario seed (streams 0..2 belong to the
/// generator).
std::uint64_t method_stream(Method method);

struct MethodOutcome {
  CommunityAssignment labels;
  bool converged = true;
  int iterations = 0;
};

MethodOutcome run_method(const AdjacencyMatrix& a, int k, Method method, const MethodOptions& options,
                         RngHandle& rng);

/// Generates the scenario's graph, runs the method and scores it. Exceptions
/// from the method are captured into the record.
RunRecord run_cell(const ScenarioConfig& scenario, Method method, const MethodOptions& options);

struct SweepOptions {
  /// 0 means hardware concurrency. SBMLAB_THREADS caps either value.
  int threads = 0;
  /// Called under the sink lock for every newly completed record.
  std::function<void(const RunRecord&)> on_record;
};

/// Worker count after applying the SBMLAB_THREADS cap.
int thread_budget(int requested);

/// Runs every (cell, seed, method) task not already present in the output
/// CSV, appending rows as they complete. Returns existing and new records
/// sorted by key.
std::vector<RunRecord> run_sweep(const SweepConfig& config, const SweepOptions& options = {});

inline constexpr std::string_view kRunCsvHeader = "method,n,k,beta,b,seed,ari,nmi,runtime_ms,converged,iterations";
inline constexpr std::string_view kSummaryCsvHeader =
    "method,n,k,beta,b,median_ari,q25_ari,q75_ari,median_nmi,q25_nmi,q75_nmi,n_runs,n_converged";

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Failed runs write empty ari and nmi fields.
std::string format_run_row(const RunRecord& record);
RunRecord parse_run_row(std::string_view line);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);
void write_runs_csv(const std::filesystem::path& path, std::span<const RunRecord> records);
/// Orders by (n, k, beta, b, seed, method).
void sort_records(std::vector<RunRecord>& records);

struct SummaryRow {
  Method method = Method::SC;
  Cell cell;
  std::optional<double> median_ari, q25_ari, q75_ari;
  std::optional<double> median_nmi, q25_nmi, q75_nmi;
  int n_runs = 0;
  int n_converged = 0;
};

/// Linear interpolation between order statistics of sorted values.
double quantile(std::span<const double> sorted, double p);

/// Per (cell, method) quartiles over seeds. Failed runs are counted in n_runs
/// but excluded from the quantiles.
std::vector<SummaryRow> aggregate(std::span<const RunRecord> records);

std::string format_summary_row(const SummaryRow& row);
SummaryRow parse_summary_row(std::string_view line);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

/// Methods of each cell sorted by median ARI (best first); equal medians
/// share a rank.
std::string ranking_report(std::span<const SummaryRow> rows);

/// Writes summary.csv, runs_long.csv (one row per run and metric) and
/// ranking.txt into `dir`.
void emit_plot_data(std::span<const SummaryRow> summaries, std::span<const RunRecord> records,
                    const std::filesystem::path& dir);

}  // namespace sbmlab
