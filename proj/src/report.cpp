#include "fragpart/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fragpart/error.hpp"

namespace fragpart {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

std::string to_json(const RunManifest& m) {
  json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["command"] = m.command;
  j["a0"] = m.a0;
  j["weights"] = m.weights;
  j["method"] = m.method;
  j["kernel"] = m.kernel ? json(*m.kernel) : json(nullptr);
  j["seed"] = m.seed;
  j["burn_in"] = m.burn_in;
  j["samples"] = m.samples;
  j["thinning"] = m.thinning;
  j["chains"] = m.chains;
  j["demonstrate_failure"] = m.demonstrate_failure;
  j["selectors"] = m.selectors;
  j["timestamp"] = m.timestamp;
  j["tool_version"] = m.tool_version;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kManifestSchemaVersion)
      throw InvalidInput("unsupported manifest schema version " + j.at("schema_version").dump());
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.a0 = j.at("a0").get<int>();
    m.weights = j.at("weights").get<std::string>();
    m.method = j.at("method").get<std::string>();
    if (!j.at("kernel").is_null()) m.kernel = j.at("kernel").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.burn_in = j.at("burn_in").get<std::uint64_t>();
    m.samples = j.at("samples").get<std::uint64_t>();
    m.thinning = j.at("thinning").get<std::uint64_t>();
    m.chains = j.value("chains", 1);
    m.demonstrate_failure = j.value("demonstrate_failure", false);
    m.selectors = j.value("selectors", std::vector<std::string>{});
    m.timestamp = j.value("timestamp", std::string{});
    m.tool_version = j.value("tool_version", std::string{});
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
}

Observables observables_from(const SummaryStatistics& stats) {
  Observables o;
  o.a0 = stats.a0();
  const auto mean = stats.mean_species();
  for (int a = 1; a <= o.a0; ++a) o.mass_distribution.emplace_back(a, mean[static_cast<std::size_t>(a)]);
  o.m_distribution = stats.m_distribution();
  for (std::size_t s = 0; s < stats.selectors().size(); ++s)
    o.species_distributions.emplace_back(stats.selectors()[s].label(), stats.species_distribution(s));
  return o;
}

Observables observables_from(const ExactSummary& summary) {
  Observables o;
  o.a0 = summary.a0;
  for (int a = 1; a <= o.a0; ++a)
    o.mass_distribution.emplace_back(a, summary.mean_species[static_cast<std::size_t>(a)]);
  o.m_distribution = summary.m_distribution;
  for (std::size_t s = 0; s < summary.selectors.size(); ++s)
    o.species_distributions.emplace_back(summary.selectors[s].label(), summary.species_distributions[s]);
  return o;
}

Observables observables_from(const AnalyticPrediction& prediction, const std::vector<Selector>& selectors) {
  Observables o;
  o.a0 = prediction.a0;
  const auto mean = mean_species_multiplicities(prediction.fugacity, prediction.kind, o.a0);
  for (int a = 1; a <= o.a0; ++a) o.mass_distribution.emplace_back(a, mean[static_cast<std::size_t>(a)]);
  // M counts at least one fragment; the empty configuration of the
  // unconstrained ensemble is dropped and the rest renormalized.
  Distribution m = occupation_distribution(prediction.fugacity, prediction.kind, Selector::at_least(1),
                                           prediction.series_cutoff, o.a0);
  m.erase(0);
  double total = 0.0;
  for (const auto& [k, v] : m) total += v;
  for (auto& [k, v] : m) v /= total;
  o.m_distribution = std::move(m);
  for (const auto& sel : selectors)
    o.species_distributions.emplace_back(
        sel.label(), occupation_distribution(prediction.fugacity, prediction.kind, sel,
                                             prediction.series_cutoff, o.a0));
  return o;
}

namespace {

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << body;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw InvalidInput(path.string() + ": expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(path.string() + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_observables(const fs::path& dir, const Observables& obs) {
  fs::create_directories(dir);
  std::string mass = "A,mean_N_A\n";
  for (const auto& [a, v] : obs.mass_distribution) mass += std::to_string(a) + "," + format_number(v) + "\n";
  write_file(dir / "mass_distribution.csv", mass);

  std::string mdist = "M,probability\n";
  for (const auto& [m, v] : obs.m_distribution) mdist += std::to_string(m) + "," + format_number(v) + "\n";
  write_file(dir / "m_distribution.csv", mdist);

  std::string species = "selector,N,probability\n";
  for (const auto& [label, d] : obs.species_distributions)
    for (const auto& [n, v] : d) species += label + "," + std::to_string(n) + "," + format_number(v) + "\n";
  write_file(dir / "species_distribution.csv", species);
}

Observables read_observables(const fs::path& dir) {
  Observables o;
  const auto mass_path = dir / "mass_distribution.csv";
  for (const auto& row : read_csv(mass_path, "A,mean_N_A")) {
    if (row.size() != 2) throw InvalidInput(mass_path.string() + ": expected 2 columns");
    o.mass_distribution.emplace_back(static_cast<int>(parse_double(row[0], mass_path)),
                                     parse_double(row[1], mass_path));
  }
  o.a0 = o.mass_distribution.empty() ? 0 : o.mass_distribution.back().first;

  const auto m_path = dir / "m_distribution.csv";
  for (const auto& row : read_csv(m_path, "M,probability")) {
    if (row.size() != 2) throw InvalidInput(m_path.string() + ": expected 2 columns");
    o.m_distribution[static_cast<int>(parse_double(row[0], m_path))] = parse_double(row[1], m_path);
  }

  const auto s_path = dir / "species_distribution.csv";
  for (const auto& row : read_csv(s_path, "selector,N,probability")) {
    if (row.size() != 3) throw InvalidInput(s_path.string() + ": expected 3 columns");
    if (o.species_distributions.empty() || o.species_distributions.back().first != row[0])
      o.species_distributions.emplace_back(row[0], Distribution{});
    o.species_distributions.back().second[static_cast<int>(parse_double(row[1], s_path))] =
        parse_double(row[2], s_path);
  }
  return o;
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  fs::create_directories(dir);
  write_file(dir / "manifest.json", to_json(manifest));
}

RunManifest read_manifest(const fs::path& dir) { return manifest_from_json(read_file(dir / "manifest.json")); }

namespace {

Distribution mass_fractions(const Observables& o) {
  Distribution d;
  double total = 0.0;
  for (const auto& [a, v] : o.mass_distribution) total += a * v;
  if (total <= 0.0) throw InvalidInput("mass distribution is empty");
  for (const auto& [a, v] : o.mass_distribution) d[a] = a * v / total;
  return d;
}

Distribution renormalized(const Distribution& d) {
  double total = 0.0;
  for (const auto& [k, v] : d) total += v;
  Distribution out;
  for (const auto& [k, v] : d) out[k] = v / total;
  return out;
}

ComparisonRow tv_row(const std::string& name, const Distribution& a, const Distribution& b, double threshold) {
  const double tv = total_variation(renormalized(a), renormalized(b));
  return {name, "tv", tv, threshold, tv <= threshold};
}

ComparisonRow chisq_row(const std::string& name, const Distribution& expected, const Distribution& sampled,
                        std::uint64_t samples, double threshold) {
  ComparisonRow row{name, "chisq_p", 1.0, threshold, true};
  if (samples == 0) {
    // Two exact runs: agreement is all-or-nothing.
    row.value = total_variation(renormalized(expected), renormalized(sampled)) < 1e-12 ? 1.0 : 0.0;
  } else {
    std::map<int, std::uint64_t> observed;
    std::uint64_t n = 0;
    for (const auto& [k, v] : renormalized(sampled)) {
      const auto c = static_cast<std::uint64_t>(std::llround(v * static_cast<double>(samples)));
      if (c) observed[k] = c;
      n += c;
    }
    try {
      row.value = chi_square_uniformity(observed, renormalized(expected), n).p_value;
    } catch (const PreconditionError&) {
      row.value = total_variation(renormalized(expected), renormalized(sampled)) < 1e-12 ? 1.0 : 0.0;
    }
  }
  row.pass = row.value >= threshold;
  return row;
}

}  // namespace

std::vector<ComparisonRow> compare_observables(const Observables& a, const Observables& b, Metric metric,
                                               const CompareThresholds& thresholds, std::uint64_t samples_a,
                                               std::uint64_t samples_b) {
  if (a.a0 != b.a0)
    throw InvalidInput("runs have different a0 (" + std::to_string(a.a0) + " vs " + std::to_string(b.a0) + ")");
  std::vector<ComparisonRow> rows;
  // The mass table is not count data; it is always compared by TV of mass fractions.
  rows.push_back(tv_row("mass_distribution", mass_fractions(a), mass_fractions(b), thresholds.total_variation));

  const bool b_sampled = samples_b > 0;
  const Distribution& exp_m = b_sampled ? a.m_distribution : b.m_distribution;
  const Distribution& obs_m = b_sampled ? b.m_distribution : a.m_distribution;
  const std::uint64_t n = b_sampled ? samples_b : samples_a;
  if (metric == Metric::TotalVariation)
    rows.push_back(tv_row("m_distribution", a.m_distribution, b.m_distribution, thresholds.total_variation));
  else
    rows.push_back(chisq_row("m_distribution", exp_m, obs_m, n, thresholds.p_value));

  for (const auto& [label, da] : a.species_distributions) {
    const Distribution* db = nullptr;
    for (const auto& [lb, d] : b.species_distributions)
      if (lb == label) db = &d;
    if (!db) throw InvalidInput("selector " + label + " missing from the second run");
    const std::string name = "species[" + label + "]";
    if (metric == Metric::TotalVariation)
      rows.push_back(tv_row(name, da, *db, thresholds.total_variation));
    else
      rows.push_back(chisq_row(name, b_sampled ? da : *db, b_sampled ? *db : da, n, thresholds.p_value));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "observable,metric,value,threshold,pass\n";
  for (const auto& r : rows)
    out += r.observable + "," + r.metric + "," + format_number(r.value) + "," + format_number(r.threshold) + "," +
           (r.pass ? "true" : "false") + "\n";
  return out;
}

}  // namespace fragpart
