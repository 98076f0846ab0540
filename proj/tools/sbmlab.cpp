// sbmlab command-line front end: generate, run, sweep, aggregate, report.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sbmlab/generator.hpp"
#include "sbmlab/harness.hpp"
#include "sbmlab/io.hpp"
#include "sbmlab/metrics.hpp"
#include "sbmlab/spectral.hpp"

using namespace sbmlab;

namespace {

// Method flags shared by `run` and `sweep`. Unset flags leave the defaults (or
// the config file values) alone.
struct MethodFlags {
  std::optional<double> score_clip;
  std::string rsc_tau;
  std::optional<int> gibbs_iters, gibbs_burnin, gibbs_chains;
  std::optional<double> gibbs_a, gibbs_b;
  bool paper_literal_beta = false;
  std::optional<double> vb_beta, vb_tol;
  std::optional<int> vb_max_iter;
  std::optional<double> vem_tol;
  std::optional<int> vem_max_iter;

  void attach(CLI::App* app) {
    app->add_option("--score-clip", score_clip, "SCORE ratio clip (default log n)");
    app->add_option("--rsc-tau", rsc_tau, "RSC degree regularizer, a number or 'paper' (sum of degrees)");
    app->add_option("--gibbs-iters", gibbs_iters, "Gibbs sweeps");
    app->add_option("--gibbs-burnin", gibbs_burnin, "Gibbs burn-in sweeps");
    app->add_option("--gibbs-chains", gibbs_chains, "Independent Gibbs chains per run");
    app->add_option("--gibbs-a", gibbs_a, "Beta prior first shape");
    app->add_option("--gibbs-b", gibbs_b, "Beta prior second shape");
    app->add_flag("--paper-literal-beta", paper_literal_beta, "Use 1 as the second Beta shape in the B update");
    app->add_option("--vb-beta", vb_beta, "VB Gamma-family scale");
    app->add_option("--vb-max-iter", vb_max_iter, "VB iteration cap");
    app->add_option("--vb-tol", vb_tol, "VB objective tolerance");
    app->add_option("--vem-tol", vem_tol, "VEM objective tolerance");
    app->add_option("--vem-max-iter", vem_max_iter, "VEM cycle cap");
  }

  void apply(MethodOptions& o) const {
    if (score_clip) o.score_clip = score_clip;
    if (!rsc_tau.empty()) {
      if (rsc_tau == "paper") {
        o.rsc_tau.reset();
      } else {
        o.rsc_tau = std::stod(rsc_tau);
      }
    }
    if (gibbs_iters) o.gibbs.n_iter = *gibbs_iters;
    if (gibbs_burnin) o.gibbs.burn_in = *gibbs_burnin;
    if (gibbs_chains) o.gibbs.chains = *gibbs_chains;
    if (gibbs_a) o.gibbs.a = *gibbs_a;
    if (gibbs_b) o.gibbs.b_prior = *gibbs_b;
    if (paper_literal_beta) o.gibbs.unit_beta_shape = true;
    if (vb_beta) o.vb.beta_hyper = *vb_beta;
    if (vb_max_iter) o.vb.max_iter = *vb_max_iter;
    if (vb_tol) o.vb.tol = *vb_tol;
    if (vem_tol) o.vem.tol = *vem_tol;
    if (vem_max_iter) o.vem.max_iter = *vem_max_iter;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

struct RunArgs {
  std::string graph;
  int k = 0;
  std::string method;
  std::string vem_model;
  std::uint64_t seed = 0;
  std::string truth;
  std::string labels_out;
  std::string trace;
};

int do_run(const RunArgs& args, const MethodFlags& flags) {
  auto method = parse_method(args.method);
  if (!method && (args.method == "vem" || args.method == "VEM")) method = Method::VEMB;
  if (!method) throw Error("unknown method '" + args.method + "'");
  if (!args.vem_model.empty()) {
    if (*method != Method::VEMB && *method != Method::VEMG) throw Error("--vem-model only applies to method vem");
    if (args.vem_model == "bernoulli") {
      method = Method::VEMB;
    } else if (args.vem_model == "gaussian") {
      method = Method::VEMG;
    } else {
      throw Error("--vem-model must be bernoulli or gaussian");
    }
  }
  MethodOptions options;
  flags.apply(options);

  const AdjacencyMatrix a = load_matrix_market(args.graph);
  RngHandle rng = seeded_rng(args.seed, method_stream(*method));
  std::optional<std::ofstream> trace;
  if (!args.trace.empty()) trace = open_out(args.trace);

  CommunityAssignment labels;
  bool converged = true;
  int iterations = 0;
  switch (*method) {
    case Method::GIBBS: {
      GibbsResult r = run_gibbs(a, args.k, options.gibbs, rng);
      if (trace) {
        *trace << "sweep,log_posterior\n";
        for (std::size_t s = 0; s < r.trace.size(); ++s) *trace << s + 1 << ',' << format_double(r.trace[s]) << '\n';
      }
      labels = std::move(r.labels);
      iterations = options.gibbs.n_iter;
      break;
    }
    case Method::VB: {
      VBResult r = run_vb(a, args.k, options.vb, rng);
      if (trace) {
        *trace << "t,L_t,labels_changed\n";
        for (const auto& row : r.trace) *trace << row.t << ',' << format_double(row.objective) << ',' << row.labels_changed << '\n';
      }
      labels = std::move(r.labels);
      converged = r.converged;
      iterations = r.iterations;
      break;
    }
    case Method::VEMB:
    case Method::VEMG: {
      VEMConfig cfg = options.vem;
      cfg.model = *method == Method::VEMB ? EmissionModel::Bernoulli : EmissionModel::Gaussian;
      VEMResult r = run_vem(a, args.k, cfg, rng);
      if (trace) {
        *trace << "cycle,J,max_tau_change,bound\n";
        for (const auto& row : r.trace) {
          *trace << row.cycle << ',' << format_double(row.objective) << ',' << format_double(row.max_tau_change) << ','
                 << format_double(row.bound) << '\n';
        }
      }
      labels = std::move(r.labels);
      converged = r.converged;
      iterations = r.iterations;
      break;
    }
    default: {
      if (trace) throw Error("--trace is only available for gibbs, vb and vem");
      MethodOutcome r = run_method(a, args.k, *method, options, rng);
      labels = std::move(r.labels);
      iterations = r.iterations;
    }
  }

  if (args.labels_out.empty()) {
    write_labels(std::cout, labels);
  } else {
    save_labels(args.labels_out, labels);
  }
  std::cerr << "method=" << to_string(*method) << " converged=" << converged << " iterations=" << iterations;
  if (!args.truth.empty()) {
    const CommunityAssignment truth = load_labels(args.truth);
    std::cerr << " ari=" << format_double(ari(truth, labels)) << " nmi=" << format_double(nmi(truth, labels));
  }
  std::cerr << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic block model community detection toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Simulate one planted-partition instance");
  ScenarioConfig scenario;
  std::string prefix;
  gen->add_option("--n", scenario.n, "Node count")->required();
  gen->add_option("--k", scenario.k, "Community count")->required();
  gen->add_option("--beta", scenario.beta, "Heterogeneity exponent")->required();
  gen->add_option("--b", scenario.b, "Sparsity exponent, rho = n^-b")->required();
  gen->add_option("--seed", scenario.seed, "Random seed")->required();
  gen->add_option("--out", prefix, "Output prefix for .mtx, .labels and .meta.json")->required();

  auto* run = app.add_subcommand("run", "Run one method on one graph");
  RunArgs run_args;
  MethodFlags run_flags;
  run->add_option("--graph", run_args.graph, "Matrix Market adjacency")->required()->check(CLI::ExistingFile);
  run->add_option("--k", run_args.k, "Community count")->required();
  run->add_option("--method", run_args.method, "sc, score, l2, rsc, gibbs, vb, vemb, vemg (or vem with --vem-model)")
      ->required();
  run->add_option("--vem-model", run_args.vem_model, "bernoulli or gaussian");
  run->add_option("--seed", run_args.seed, "Method seed");
  run->add_option("--truth", run_args.truth, "Ground-truth labels; prints ARI and NMI")->check(CLI::ExistingFile);
  run->add_option("--labels-out", run_args.labels_out, "Write labels here instead of stdout");
  run->add_option("--trace", run_args.trace, "Write the method's convergence trace as CSV");
  run_flags.attach(run);

  auto* sweep = app.add_subcommand("sweep", "Run a configured grid of scenarios and methods");
  std::string config_path, sweep_output;
  int threads = 0;
  MethodFlags sweep_flags;
  sweep->add_option("--config", config_path, "Sweep configuration file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output", sweep_output, "Run-level CSV (overrides the config)");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep_flags.attach(sweep);

  auto* agg = app.add_subcommand("aggregate", "Summarize run-level records");
  std::string runs_path, summary_path, plot_dir;
  agg->add_option("--runs", runs_path, "Run-level CSV")->required()->check(CLI::ExistingFile);
  agg->add_option("--out", summary_path, "Summary CSV (stdout if omitted)");
  agg->add_option("--plot-dir", plot_dir, "Also write summary, long-format runs and ranking files here");

  auto* rep = app.add_subcommand("report", "Rank methods per cell from a summary CSV");
  std::string report_in, report_out;
  rep->add_option("--summary", report_in, "Summary CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", report_out, "Ranking text file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      save_instance(prefix, generate(scenario));
    } else if (*run) {
      return do_run(run_args, run_flags);
    } else if (*sweep) {
      SweepConfig config = parse_config(config_path);
      sweep_flags.apply(config.options);
      if (!sweep_output.empty()) config.output_path = sweep_output;
      if (config.output_path.empty()) throw Error("no output path: set 'output' in the config or pass --output");
      std::size_t done = 0;
      SweepOptions options;
      options.threads = threads;
      options.on_record = [&](const RunRecord& r) {
        ++done;
        if (r.failed()) std::cerr << "failed: " << format_run_row(r) << " (" << r.error << ")\n";
      };
      const auto records = run_sweep(config, options);
      std::cerr << "sweep: " << done << " new runs, " << records.size() << " total in " << config.output_path << '\n';
    } else if (*agg) {
      const auto records = read_runs_csv(runs_path);
      const auto summaries = aggregate(records);
      if (summary_path.empty()) {
        write_summary_csv(std::cout, summaries);
      } else {
        auto out = open_out(summary_path);
        write_summary_csv(out, summaries);
      }
      if (!plot_dir.empty()) emit_plot_data(summaries, records, plot_dir);
    } else if (*rep) {
      const std::string text = ranking_report(read_summary_csv(report_in));
      if (report_out.empty()) {
        std::cout << text;
      } else {
        open_out(report_out) << text;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sbmlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
