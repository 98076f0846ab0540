#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sbmlab/harness.hpp"

using namespace sbmlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "sbmlab_test_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// Row text with the runtime field blanked.
std::string without_runtime(RunRecord r) {
  r.runtime_ms = 0.0;
  return format_run_row(r);
}

std::multiset<std::string> row_set(const std::vector<RunRecord>& records) {
  std::multiset<std::string> out;
  for (const auto& r : records) out.insert(without_runtime(r));
  return out;
}

SweepConfig small_sweep(const fs::path& out) {
  SweepConfig c;
  c.n_list = {60};
  c.k_list = {2};
  c.beta_list = {0.0};
  c.b_list = {0.5, 0.1};
  c.methods = {Method::SC, Method::VB};
  c.n_seeds = 3;
  c.base_seed = 77;
  c.output_path = out.string();
  return c;
}

}  // namespace

TEST_CASE("shipped paper config covers the full grid") {
  const SweepConfig c = parse_config(fs::path(SBMLAB_SOURCE_DIR) / "configs" / "paper.conf");
  CHECK(c.n_list == std::vector<int>{250, 500, 1000, 2000});
  CHECK(c.k_list == std::vector<int>{5, 10, 20});
  CHECK(c.cells().size() == 4 * 3 * 3 * 3);
  CHECK(c.methods.size() == 8);
  CHECK(c.n_seeds == 100);
}

TEST_CASE("shipped desk config parses") {
  const SweepConfig c = parse_config(fs::path(SBMLAB_SOURCE_DIR) / "configs" / "desk.conf");
  CHECK(c.cells().size() == 2 * 2 * 3 * 3);
  CHECK(c.n_seeds == 20);
  CHECK(c.options.gibbs.n_iter == 1000);
  CHECK(c.options.gibbs.burn_in == 500);
}

TEST_CASE("config grammar") {
  const SweepConfig c = parse_config_text(
      "# comment\n"
      "n = 250   # trailing\n"
      "k = 5, 10\n"
      "beta = 0\n"
      "b = 1\n"
      "methods = SC, GIBBS\n"
      "seeds = 4\n"
      "base_seed = 18446744073709551615\n"
      "rsc_tau = 2.5\n"
      "gibbs.unit_beta_shape = true\n");
  CHECK(c.k_list == std::vector<int>{5, 10});
  CHECK(c.methods == std::vector<Method>{Method::SC, Method::GIBBS});
  CHECK(c.base_seed == 18446744073709551615ull);
  CHECK(c.options.rsc_tau == 2.5);
  CHECK(c.options.gibbs.unit_beta_shape);
  // rho(250, b=1) = 0.004
  CHECK(ScenarioConfig{250, 5, 0.0, 1.0, 0}.rho() == doctest::Approx(0.004));
}

TEST_CASE("config errors carry line and key") {
  const std::string head = "n = 250\nk = 5\nbeta = 0\nb = 0.5\nseeds = 2\n";
  auto parse_error = [](const std::string& text) -> ParseError {
    try {
      parse_config_text(text);
    } catch (const ParseError& e) {
      return e;
    }
    FAIL("expected ParseError");
    return ParseError(0, "", "");
  };

  ParseError unknown = parse_error(head + "methods = SC\ncolour = red\n");
  CHECK(unknown.line() == 7);
  CHECK(unknown.key() == "colour");

  ParseError dup = parse_error(head + "methods = SC\nk = 10\n");
  CHECK(dup.line() == 7);
  CHECK(dup.key() == "k");

  ParseError bad_method = parse_error(head + "methods = SC, KMEANS\n");
  CHECK(bad_method.key() == "methods");

  ParseError nan_value = parse_error("n = many\n");
  CHECK(nan_value.line() == 1);
  CHECK(nan_value.key() == "n");

  CHECK(parse_error("n 250\n").line() == 1);
  CHECK(parse_error("\n\n= 3\n").line() == 3);

  CHECK_THROWS_AS(parse_config_text(head + "methods =\n"), ParseError);
  CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/sbmlab.conf")), Error);
}

TEST_CASE("config validation") {
  const std::string grid = "n = 250\nk = 5\nbeta = 0\nb = 0.5\nseeds = 2\n";
  CHECK_THROWS_AS(parse_config_text(grid), ValidationError);  // no methods
  CHECK_THROWS_WITH_AS(parse_config_text(grid + "methods = \n"), doctest::Contains("missing value"), ParseError);

  SweepConfig c = parse_config_text(grid + "methods = SC\n");
  c.methods.clear();
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("methods"), ValidationError);

  c = parse_config_text(grid + "methods = SC\n");
  c.b_list = {0.01};  // rho(250, 0.01) = 0.946
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("rho"), ValidationError);
  c.b_list = {0.1};
  CHECK_NOTHROW(c.validate());

  c.n_seeds = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.n_seeds = 1;
  c.k_list.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);

  c = parse_config_text(grid + "methods = SC\n");
  c.options.gibbs.burn_in = c.options.gibbs.n_iter;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = parse_config_text(grid + "methods = SC\n");
  c.options.score_clip = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("cells are n-major, b-minor") {
  SweepConfig c;
  c.n_list = {100, 200};
  c.k_list = {2};
  c.beta_list = {0.0, 5.0};
  c.b_list = {0.5, 0.1};
  const auto cells = c.cells();
  REQUIRE(cells.size() == 8);
  CHECK(cells[0] == Cell{100, 2, 0.0, 0.5});
  CHECK(cells[1] == Cell{100, 2, 0.0, 0.1});
  CHECK(cells[2] == Cell{100, 2, 5.0, 0.5});
  CHECK(cells[7] == Cell{200, 2, 5.0, 0.1});
}

TEST_CASE("scenario seeds depend on every key component") {
  const Cell cell{250, 5, 0.0, 0.5};
  const auto s = scenario_seed(1, cell, 0);
  CHECK(s == scenario_seed(1, cell, 0));
  std::set<std::uint64_t> seen{s,
                               scenario_seed(2, cell, 0),
                               scenario_seed(1, cell, 1),
                               scenario_seed(1, {500, 5, 0.0, 0.5}, 0),
                               scenario_seed(1, {250, 10, 0.0, 0.5}, 0),
                               scenario_seed(1, {250, 5, 5.0, 0.5}, 0),
                               scenario_seed(1, {250, 5, 0.0, 0.1}, 0)};
  CHECK(seen.size() == 7);

  std::set<std::uint64_t> streams;
  for (Method m : kAllMethods) streams.insert(method_stream(m));
  CHECK(streams.size() == std::size(kAllMethods));
  CHECK(*streams.begin() > 2);
}

TEST_CASE("run_cell records a scored run") {
  const ScenarioConfig scenario{250, 5, 0.0, 0.1, 3};
  const MethodOptions options;
  const RunRecord r = run_cell(scenario, Method::SCORE, options);
  CHECK_FALSE(r.failed());
  CHECK(r.method == Method::SCORE);
  CHECK(r.scenario == scenario);
  CHECK(r.ari >= -1.0);
  CHECK(r.ari <= 1.0);
  CHECK(r.nmi >= 0.0);
  CHECK(r.nmi <= 1.0);
  CHECK(r.runtime_ms > 0.0);
  CHECK(r.converged);

  const RunRecord again = run_cell(scenario, Method::SCORE, options);
  CHECK(again.ari == r.ari);
  CHECK(again.nmi == r.nmi);
  CHECK(again.iterations == r.iterations);

  const RunRecord vb1 = run_cell({120, 3, 0.0, 0.1, 5}, Method::VB, options);
  const RunRecord vb2 = run_cell({120, 3, 0.0, 0.1, 5}, Method::VB, options);
  CHECK(without_runtime(vb1) == without_runtime(vb2));
}

TEST_CASE("run_cell captures method errors") {
  MethodOptions options;
  options.gibbs.burn_in = options.gibbs.n_iter + 5;
  const RunRecord r = run_cell({60, 2, 0.0, 0.5, 1}, Method::GIBBS, options);
  CHECK(r.failed());
  CHECK_FALSE(r.converged);
  CHECK(std::isnan(r.ari));
  CHECK(std::isnan(r.nmi));

  const std::string row = format_run_row(r);
  CHECK(row.find(",,,") != std::string::npos);
  const RunRecord back = parse_run_row(row);
  CHECK(back.failed());
  CHECK_FALSE(back.converged);
  CHECK(std::isnan(back.ari));

  // An invalid scenario is also a failed row, not an exception.
  const RunRecord bad = run_cell({60, 0, 0.0, 0.5, 1}, Method::SC, MethodOptions{});
  CHECK(bad.failed());
}

TEST_CASE("run rows round-trip") {
  RunRecord r;
  r.method = Method::VEMG;
  r.scenario = {500, 10, 5.0, 0.5, 18446744073709551615ull};
  r.ari = 0.1 + 0.2;
  r.nmi = 1.0 / 3.0;
  r.runtime_ms = 12.75;
  r.converged = true;
  r.iterations = 17;
  const std::string row = format_run_row(r);
  CHECK(row.starts_with("VEMG,500,10,5,0.5,18446744073709551615,"));
  const RunRecord back = parse_run_row(row);
  CHECK(back.method == r.method);
  CHECK(back.scenario == r.scenario);
  CHECK(back.ari == r.ari);
  CHECK(back.nmi == r.nmi);
  CHECK(back.runtime_ms == r.runtime_ms);
  CHECK(back.converged);
  CHECK(back.iterations == 17);
  CHECK(format_run_row(back) == row);

  CHECK_THROWS(parse_run_row("SC,1,2"));
  CHECK_THROWS(parse_run_row("XX,60,2,0,0.5,1,0.5,0.5,1,1,3"));
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
}

TEST_CASE("sweep writes one row per task and resumes") {
  const fs::path dir = scratch_dir("resume");
  const fs::path out = dir / "runs.csv";
  const SweepConfig config = small_sweep(out);

  const auto records = run_sweep(config);
  CHECK(records.size() == 2 * 2 * 3);
  const auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() == 13);
  CHECK(lines[0] == kRunCsvHeader);

  std::set<std::string> keys;
  for (const auto& r : records) {
    keys.insert(std::string(to_string(r.method)) + '/' + std::to_string(r.scenario.seed) + '/' +
                format_double(r.scenario.b));
  }
  CHECK(keys.size() == 12);

  // A second run has nothing left to do.
  int fresh = 0;
  SweepOptions count_new;
  count_new.on_record = [&](const RunRecord&) { ++fresh; };
  CHECK(run_sweep(config, count_new).size() == 12);
  CHECK(fresh == 0);
  CHECK(lines_of(slurp(out)).size() == 13);

  // Interrupt after five rows: only the missing seven run again.
  {
    std::ofstream truncated(out, std::ios::trunc);
    for (int i = 0; i < 6; ++i) truncated << lines[i] << '\n';
  }
  fresh = 0;
  const auto resumed = run_sweep(config, count_new);
  CHECK(fresh == 7);
  CHECK(lines_of(slurp(out)).size() == 13);
  CHECK(row_set(resumed) == row_set(records));
  CHECK(row_set(read_runs_csv(out)) == row_set(records));
}

TEST_CASE("parallel and sequential sweeps agree") {
  const fs::path dir = scratch_dir("parallel");
  SweepConfig seq = small_sweep(dir / "seq.csv");
  SweepConfig par = small_sweep(dir / "par.csv");
  SweepOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = run_sweep(seq, one);
  const auto b = run_sweep(par, four);
  CHECK(row_set(a) == row_set(b));
  CHECK(row_set(read_runs_csv(dir / "seq.csv")) == row_set(read_runs_csv(dir / "par.csv")));

  // Sorted output is identical row by row, not just as a set.
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(without_runtime(a[i]) == without_runtime(b[i]));
}

TEST_CASE("sweep without an output path stays in memory") {
  SweepConfig c = small_sweep("");
  c.b_list = {0.1};
  c.n_seeds = 1;
  CHECK(run_sweep(c).size() == 2);
}

TEST_CASE("thread budget honours SBMLAB_THREADS") {
  const char* saved = std::getenv("SBMLAB_THREADS");
  const std::string restore = saved ? saved : "";
  ::setenv("SBMLAB_THREADS", "2", 1);
  CHECK(thread_budget(8) == 2);
  CHECK(thread_budget(1) == 1);
  CHECK(thread_budget(0) <= 2);
  ::setenv("SBMLAB_THREADS", "junk", 1);
  CHECK(thread_budget(3) == 3);
  ::unsetenv("SBMLAB_THREADS");
  CHECK(thread_budget(5) == 5);
  CHECK(thread_budget(0) >= 1);
  if (saved) ::setenv("SBMLAB_THREADS", restore.c_str(), 1);
}

TEST_CASE("quantiles interpolate linearly") {
  const std::vector<double> three{0.2, 0.4, 0.6};
  CHECK(quantile(three, 0.5) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(quantile(three, 0.25) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(quantile(three, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(quantile(three, 0.0) == 0.2);
  CHECK(quantile(three, 1.0) == 0.6);

  // Hand computation: h = (n - 1) p, interpolate between floor(h) and ceil(h).
  const std::vector<double> four{1.0, 2.0, 4.0, 8.0};
  CHECK(quantile(four, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(four, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(four, 0.75) == doctest::Approx(5.0));
  CHECK_THROWS(quantile(std::vector<double>{}, 0.5));
}

namespace {

RunRecord fake(Method m, const Cell& c, std::uint64_t seed, double ari, bool converged = true) {
  RunRecord r;
  r.method = m;
  r.scenario = {c.n, c.k, c.beta, c.b, seed};
  r.ari = ari;
  r.nmi = ari / 2.0;
  r.converged = converged;
  r.iterations = 1;
  return r;
}

RunRecord failed_fake(Method m, const Cell& c, std::uint64_t seed) {
  RunRecord r = fake(m, c, seed, 0.0, false);
  r.error = "boom";
  r.ari = r.nmi = std::nan("");
  return r;
}

}  // namespace

TEST_CASE("aggregate computes per-cell quartiles") {
  const Cell cell{250, 5, 0.0, 0.5};
  const Cell other{250, 5, 0.0, 0.1};
  std::vector<RunRecord> records{fake(Method::SC, cell, 1, 0.6), fake(Method::SC, cell, 2, 0.2),
                                 fake(Method::SC, cell, 3, 0.4, false), fake(Method::VB, cell, 1, 0.9),
                                 failed_fake(Method::SCORE, cell, 1), failed_fake(Method::SCORE, cell, 2),
                                 fake(Method::SC, other, 1, 0.7), failed_fake(Method::SC, other, 2)};
  const auto rows = aggregate(records);
  REQUIRE(rows.size() == 4);

  auto find = [&](Method m, const Cell& c) -> const SummaryRow& {
    for (const auto& r : rows) {
      if (r.method == m && r.cell == c) return r;
    }
    FAIL("missing row");
    return rows.front();
  };

  const SummaryRow& sc = find(Method::SC, cell);
  CHECK(*sc.median_ari == doctest::Approx(0.4));
  CHECK(*sc.q25_ari == doctest::Approx(0.3));
  CHECK(*sc.q75_ari == doctest::Approx(0.5));
  CHECK(*sc.median_nmi == doctest::Approx(0.2));
  CHECK(sc.n_runs == 3);
  CHECK(sc.n_converged == 2);

  const SummaryRow& vb = find(Method::VB, cell);
  CHECK(*vb.median_ari == 0.9);
  CHECK(*vb.q25_ari == 0.9);
  CHECK(*vb.q75_ari == 0.9);

  const SummaryRow& score = find(Method::SCORE, cell);
  CHECK_FALSE(score.median_ari.has_value());
  CHECK_FALSE(score.q25_nmi.has_value());
  CHECK(score.n_runs == 2);
  CHECK(score.n_converged == 0);

  // The failed run is counted but not part of the quantiles.
  const SummaryRow& mixed = find(Method::SC, other);
  CHECK(mixed.n_runs == 2);
  CHECK(*mixed.median_ari == 0.7);

  for (const auto& r : rows) {
    if (!r.median_ari) continue;
    CHECK(*r.q25_ari <= *r.median_ari);
    CHECK(*r.median_ari <= *r.q75_ari);
    CHECK(*r.q25_nmi <= *r.median_nmi);
    CHECK(*r.median_nmi <= *r.q75_nmi);
  }

  const std::string na = format_summary_row(score);
  CHECK(na == "SCORE,250,5,0,0.5,NA,NA,NA,NA,NA,NA,2,0");
  const SummaryRow back = parse_summary_row(na);
  CHECK_FALSE(back.median_ari.has_value());
  CHECK(back.n_runs == 2);
  const SummaryRow sc_back = parse_summary_row(format_summary_row(sc));
  CHECK(sc_back.median_ari == sc.median_ari);
  CHECK(sc_back.q75_nmi == sc.q75_nmi);
  CHECK(sc_back.cell == sc.cell);
}

TEST_CASE("ranking report orders by median and shares tied ranks") {
  const Cell cell{250, 5, 0.0, 0.5};
  const Cell sparse{250, 5, 0.0, 1.0};
  std::vector<RunRecord> records{fake(Method::SC, cell, 1, 0.5),     fake(Method::VB, cell, 1, 0.8),
                                 fake(Method::GIBBS, cell, 1, 0.8),  fake(Method::RSC, cell, 1, 0.1),
                                 failed_fake(Method::SCORE, cell, 1), fake(Method::SC, sparse, 1, 0.0)};
  const std::string text = ranking_report(aggregate(records));
  const auto lines = lines_of(text);
  REQUIRE(lines.size() >= 9);
  CHECK(lines[0] == "n=250 k=5 beta=0 b=0.5");
  CHECK(lines[1].starts_with("  1. GIBBS"));
  CHECK(lines[2].starts_with("  1. VB"));
  CHECK(lines[3].starts_with("  3. SC"));
  CHECK(lines[4].starts_with("  4. RSC"));
  CHECK(lines[5].starts_with("  5. SCORE"));
  CHECK(lines[5].find("no successful runs") != std::string::npos);
  CHECK(lines[7].find("b=1") != std::string::npos);
  CHECK(lines[7].find("recovery not expected") != std::string::npos);
}

TEST_CASE("plot data is fixed-schema and byte-reproducible") {
  const fs::path dir = scratch_dir("plot");
  SweepConfig config;
  config.n_list = {200};
  config.k_list = {2};
  config.beta_list = {0.0};
  config.b_list = {0.1};
  config.methods = {Method::SCORE, Method::GIBBS, Method::VB};
  config.n_seeds = 3;
  config.base_seed = 5;
  config.options.gibbs.n_iter = 200;
  config.options.gibbs.burn_in = 100;
  config.options.gibbs.chains = 2;
  const auto records = run_sweep(config);
  const auto summaries = aggregate(records);

  emit_plot_data(summaries, records, dir / "a");
  emit_plot_data(summaries, records, dir / "b");
  for (const char* name : {"summary.csv", "runs_long.csv", "ranking.txt"}) {
    CHECK(fs::exists(dir / "a" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }

  const auto summary_lines = lines_of(slurp(dir / "a" / "summary.csv"));
  REQUIRE(summary_lines.size() == 4);
  CHECK(summary_lines[0] == kSummaryCsvHeader);
  const auto long_lines = lines_of(slurp(dir / "a" / "runs_long.csv"));
  CHECK(long_lines[0] == "method,n,k,beta,b,seed,metric,value");
  CHECK(long_lines.size() == 1 + 2 * records.size());

  const auto back = read_summary_csv(dir / "a" / "summary.csv");
  REQUIRE(back.size() == summaries.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(format_summary_row(back[i]) == format_summary_row(summaries[i]));

  // On a well-separated instance the top rank goes to SCORE or GIBBS.
  const auto ranking = lines_of(slurp(dir / "a" / "ranking.txt"));
  bool leader_found = false;
  for (std::size_t i = 1; i < ranking.size() && ranking[i].starts_with("  1. "); ++i) {
    if (ranking[i].find("SCORE") != std::string::npos || ranking[i].find("GIBBS") != std::string::npos) {
      leader_found = true;
    }
  }
  CHECK(leader_found);
}
