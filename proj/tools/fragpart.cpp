// fragpart: exact, analytic and Monte Carlo statistics of partitions of a
// finite system into fragments.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "fragpart/analytic.hpp"
#include "fragpart/brg.hpp"
#include "fragpart/error.hpp"
#include "fragpart/exact.hpp"
#include "fragpart/mcg.hpp"
#include "fragpart/report.hpp"

namespace fs = std::filesystem;
using namespace fragpart;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("FRAGPART_OUT_DIR"); env && *env) return env;
  return "fragpart_out";
}

int cmd_count(int a0, int multiplicity) {
  if (a0 < 1) throw InvalidInput("a0 must be >= 1");
  const CountTable table(a0, a0);
  if (multiplicity > 0) {
    std::cout << table.count(a0, multiplicity).get_str() << "\n";
  } else {
    std::cout << table.count(a0).get_str() << "\n";
    std::cout << "hardy_ramanujan " << format_number(hardy_ramanujan(a0)) << "\n";
  }
  return 0;
}

struct RunOptions {
  int a0 = 0;
  std::string method = "direct";
  std::string weights = "uniform";
  std::string kernel = "redraw-mh";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t samples = 100000;
  std::uint64_t thinning = 1;
  int chains = 1;
  std::vector<std::string> selectors;
  std::string out;
  std::string manifest;
  bool demonstrate_failure = false;
  bool force = false;
  bool dump_samples = false;
};

std::vector<Selector> parse_selectors(const std::vector<std::string>& labels) {
  if (labels.empty()) return default_selectors();
  std::vector<Selector> out;
  for (const auto& l : labels) out.push_back(Selector::parse(l));
  return out;
}

RunManifest manifest_for(const RunOptions& o) {
  RunManifest m;
  if (!o.manifest.empty()) {
    std::ifstream in(o.manifest);
    if (!in) throw InvalidInput("cannot read manifest " + o.manifest);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    m = manifest_from_json(text);
    m.timestamp = utc_timestamp();
    m.tool_version = kToolVersion;
    return m;
  }
  m.a0 = o.a0;
  m.method = o.method;
  m.weights = o.weights;
  const bool sampler = o.method == "brg" || o.method == "mcg";
  if (o.method == "mcg") m.kernel = o.kernel;
  m.seed = o.seed ? *o.seed : std::random_device{}() * 0x100000001ULL ^ std::random_device{}();
  if (!sampler) m.seed = 0;
  m.burn_in = o.method == "mcg" ? o.burn_in.value_or(10000) : 0;
  m.samples = sampler ? o.samples : 0;
  m.thinning = o.method == "mcg" ? o.thinning : 1;
  m.chains = o.method == "mcg" ? o.chains : 1;
  m.demonstrate_failure = o.demonstrate_failure;
  for (const auto& s : parse_selectors(o.selectors)) m.selectors.push_back(s.label());
  m.timestamp = utc_timestamp();
  return m;
}

int cmd_run(const RunOptions& opts) {
  const RunManifest m = manifest_for(opts);
  const fs::path out = opts.out.empty() ? default_out_dir() : fs::path(opts.out);
  const WeightModel model = WeightModel::from_name(m.weights);
  const auto selectors = parse_selectors(m.selectors);
  if (m.a0 < 1) throw InvalidInput("a0 must be >= 1");

  std::ofstream dump;
  if (opts.dump_samples) {
    fs::create_directories(out);
    dump.open(out / "samples.txt");
  }

  Observables obs;
  if (m.method == "direct") {
    EnumerationOptions eo;
    eo.force = opts.force;
    const ExactSummary s = exact_statistics(m.a0, model, selectors, eo);
    std::cout << "partitions " << s.partition_count.get_str() << "\n"
              << "mean_M " << format_number(s.mean_multiplicity) << "\n";
    obs = observables_from(s);
  } else if (m.method == "analytic") {
    const WeightKind kind = model.kind() == WeightModel::Kind::Factorial ? WeightKind::FactorialWeights
                                                                         : WeightKind::EqualWeights;
    if (model.kind() != WeightModel::Kind::Uniform && model.kind() != WeightModel::Kind::Factorial)
      throw InvalidInput("analytic method supports uniform and factorial weights only");
    const AnalyticPrediction p = predict(m.a0, kind);
    std::cout << "fugacity " << format_number(p.fugacity) << "\n"
              << "mean_M_series " << format_number(p.mean_multiplicity_sum) << "\n"
              << "mean_M_closed_form " << format_number(p.mean_multiplicity_closed_form) << "\n"
              << "series_cutoff " << p.series_cutoff << "\n";
    obs = observables_from(p, selectors);
  } else if (m.method == "brg") {
    const CountTable table(m.a0);
    SummaryStatistics s(m.a0, selectors);
    if (model.kind() == WeightModel::Kind::Uniform) {
      s = run_brg(m.a0, table, m.seed, m.samples, selectors);
    } else if (m.demonstrate_failure) {
      std::cerr << "warning: BRG is only correct for equal weights; this estimate is expected to be biased\n";
      s = run_brg_reweighted(m.a0, table, model, m.seed, m.samples, selectors);
    } else {
      throw InvalidInput(
          "brg samples the equal-weight ensemble only; with non-uniform weights its fixed-M reweighting "
          "gives wrong results. Use --method mcg, or pass --demonstrate-failure to produce the biased estimate");
    }
    if (dump.is_open()) {
      const BrgSampler sampler(table, m.a0);
      Rng rng(m.seed);
      for (std::uint64_t i = 0; i < m.samples; ++i) dump << sampler.sample(rng).to_string() << "\n";
    }
    std::cout << "mean_M " << format_number(s.mean_multiplicity()) << "\n";
    obs = observables_from(s);
  } else if (m.method == "mcg") {
    ChainConfig cfg;
    cfg.kernel = kernel_from_name(m.kernel.value_or("redraw-mh"));
    cfg.seed = m.seed;
    cfg.burn_in = m.burn_in;
    cfg.samples = m.samples;
    cfg.thinning = m.thinning;
    SummaryStatistics s(m.a0, selectors);
    if (dump.is_open() && m.chains == 1) {
      s = run_chain(m.a0, model, cfg, std::move(s),
                    [&](const Partition& p) { dump << p.to_string() << "\n"; });
    } else {
      s = run_chains(m.a0, model, cfg, m.chains, selectors);
    }
    std::cout << "mean_M " << format_number(s.mean_multiplicity()) << "\n";
    obs = observables_from(s);
  } else {
    throw InvalidInput("unknown method '" + m.method + "' (expected direct, analytic, brg or mcg)");
  }

  write_observables(out, obs);
  write_manifest(out, m);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_compare(const std::string& dir1, const std::string& dir2, const std::string& metric_name,
                const CompareThresholds& thresholds, const std::string& out_file) {
  const Metric metric = metric_name == "chisq" ? Metric::ChiSquare : Metric::TotalVariation;
  if (metric_name != "tv" && metric_name != "chisq") throw InvalidInput("metric must be tv or chisq");
  const RunManifest ma = read_manifest(dir1), mb = read_manifest(dir2);
  if (ma.a0 != mb.a0) throw InvalidInput("runs have different a0");
  const Observables a = read_observables(dir1), b = read_observables(dir2);
  const auto rows = compare_observables(a, b, metric, thresholds, ma.samples, mb.samples);
  const std::string csv = comparison_csv(rows);
  std::cout << csv;
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    out << csv;
  }
  for (const auto& r : rows)
    if (!r.pass) return 1;
  return 0;
}

int cmd_diagnose(int a0, const std::string& weights, const std::string& kernel, std::uint64_t seed,
                 const MemoryLossOptions& options) {
  const auto r = memory_loss_diagnostic(Partition::single(a0), Partition::all_ones(a0),
                                        WeightModel::from_name(weights), kernel_from_name(kernel), seed, options);
  std::cout << "steps_to_merge " << r.steps_to_merge << "\n"
            << "merged " << (r.merged ? "true" : "false") << "\n";
  return r.merged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact, analytic and Monte Carlo statistics of fragment partitions"};
  app.require_subcommand(1);

  int count_a0 = 0, count_m = 0;
  auto* count = app.add_subcommand("count", "Print P(a0) (or P(a0, M)) and the Hardy-Ramanujan estimate");
  count->add_option("a0", count_a0, "Total mass")->required()->check(CLI::PositiveNumber);
  count->add_option("--multiplicity,-m", count_m, "Count partitions with exactly M fragments");

  RunOptions run_opts;
  std::uint64_t seed_value = 0, burn_in_value = 0;
  auto* run = app.add_subcommand("run", "Compute figure data with one method and write CSV + manifest");
  run->add_option("a0", run_opts.a0, "Total mass");
  run->add_option("--method", run_opts.method, "direct | analytic | brg | mcg")
      ->check(CLI::IsMember({"direct", "analytic", "brg", "mcg"}));
  run->add_option("--weights", run_opts.weights, "uniform | factorial")
      ->check(CLI::IsMember({"uniform", "factorial"}));
  run->add_option("--kernel", run_opts.kernel, "mcg kernel: redraw-mh (default) | exact-mh | paper-literal")
      ->check(CLI::IsMember({"exact-mh", "redraw-mh", "paper-literal"}));
  auto* seed_opt = run->add_option("--seed", seed_value, "RNG seed (random if omitted, always recorded)");
  auto* burn_opt = run->add_option("--burn-in", burn_in_value, "mcg steps discarded before sampling");
  run->add_option("--samples", run_opts.samples, "Recorded samples");
  run->add_option("--thinning", run_opts.thinning, "mcg steps per recorded sample");
  run->add_option("--chains", run_opts.chains, "Independent mcg chains, run in parallel");
  run->add_option("--selector", run_opts.selectors, "Species selector, e.g. 1, 4, >=10 (repeatable)");
  run->add_option("--out", run_opts.out, "Output directory (default $FRAGPART_OUT_DIR or ./fragpart_out)");
  run->add_option("--manifest", run_opts.manifest, "Re-run exactly the configuration of a manifest.json");
  run->add_flag("--demonstrate-failure", run_opts.demonstrate_failure,
                "Allow brg with non-uniform weights (produces the known biased estimate)");
  run->add_flag("--force", run_opts.force, "Enumerate even beyond the partition-count guard");
  run->add_flag("--dump-samples", run_opts.dump_samples, "Write every recorded sample to samples.txt");

  std::string dir1, dir2, metric = "tv", compare_out;
  CompareThresholds thresholds;
  auto* compare = app.add_subcommand("compare", "Compare two run directories; exit 1 if any metric fails");
  compare->add_option("dir1", dir1)->required();
  compare->add_option("dir2", dir2)->required();
  compare->add_option("--metric", metric, "tv | chisq")->check(CLI::IsMember({"tv", "chisq"}));
  compare->add_option("--tv-threshold", thresholds.total_variation, "Maximum total variation");
  compare->add_option("--p-threshold", thresholds.p_value, "Minimum chi-square p-value");
  compare->add_option("--out", compare_out, "Also write the report CSV here");

  int diag_a0 = 0;
  std::string diag_weights = "uniform", diag_kernel = "redraw-mh";
  std::uint64_t diag_seed = 1;
  MemoryLossOptions diag_opts;
  auto* diagnose = app.add_subcommand("diagnose", "Steps until chains from (a0) and (1,...,1) agree on <M>");
  diagnose->add_option("a0", diag_a0)->required()->check(CLI::Range(2, 1 << 20));
  diagnose->add_option("--weights", diag_weights)->check(CLI::IsMember({"uniform", "factorial"}));
  diagnose->add_option("--kernel", diag_kernel)->check(CLI::IsMember({"exact-mh", "redraw-mh", "paper-literal"}));
  diagnose->add_option("--seed", diag_seed);
  diagnose->add_option("--block", diag_opts.block, "Steps per block");
  diagnose->add_option("--window", diag_opts.window, "Blocks per running estimate");
  diagnose->add_option("--max-steps", diag_opts.max_steps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*count) return cmd_count(count_a0, count_m);
    if (*run) {
      if (*seed_opt) run_opts.seed = seed_value;
      if (*burn_opt) run_opts.burn_in = burn_in_value;
      if (run_opts.manifest.empty() && run_opts.a0 < 1) throw InvalidInput("run needs a0 >= 1 or --manifest");
      return cmd_run(run_opts);
    }
    if (*compare) return cmd_compare(dir1, dir2, metric, thresholds, compare_out);
    if (*diagnose) return cmd_diagnose(diag_a0, diag_weights, diag_kernel, diag_seed, diag_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
