#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fragpart/analytic.hpp"
#include "fragpart/exact.hpp"
#include "fragpart/stats.hpp"

namespace fragpart {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

/// Everything needed to regenerate a run's CSV files.
struct RunManifest {
  std::string command = "run";
  int a0 = 0;
  std::string weights = "uniform";
  std::string method = "direct";
  std::optional<std::string> kernel;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t samples = 0;
  std::uint64_t thinning = 1;
  int chains = 1;
  bool demonstrate_failure = false;
  std::vector<std::string> selectors;
  std::string timestamp;
  std::string tool_version = kToolVersion;
};

std::string to_json(const RunManifest& manifest);
/// Throws InvalidInput on malformed JSON or a schema version mismatch.
RunManifest manifest_from_json(const std::string& text);

/// The observables written by `run`.
struct Observables {
  int a0 = 0;
  /// (A, <N_A>) for A = 1..a0.
  std::vector<std::pair<int, double>> mass_distribution;
  Distribution m_distribution;
  /// (selector label, N-distribution).
  std::vector<std::pair<std::string, Distribution>> species_distributions;
};

Observables observables_from(const SummaryStatistics& stats);
Observables observables_from(const ExactSummary& summary);
Observables observables_from(const AnalyticPrediction& prediction,
                             const std::vector<Selector>& selectors);

/// Writes mass_distribution.csv, m_distribution.csv and species_distribution.csv.
void write_observables(const std::filesystem::path& dir, const Observables& obs);
/// Reads the three CSV files back; a0 is taken from the mass table length.
Observables read_observables(const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& dir);

enum class Metric { TotalVariation, ChiSquare };

struct CompareThresholds {
  double total_variation = 0.03;
  double p_value = 0.01;
};

struct ComparisonRow {
  std::string observable;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

/// Per-observable agreement of two runs. The mass distribution is compared
/// as the mass fractions A <N_A> / a0. For the chi-square metric the
/// sampled run's histograms (counts = probability * samples) are tested
/// against the other run's probabilities; `samples` is the sample count of
/// `b`, or of `a` when b is exact (0 = exact). Throws InvalidInput on a0 mismatch.
std::vector<ComparisonRow> compare_observables(const Observables& a, const Observables& b,
                                               Metric metric, const CompareThresholds& thresholds,
                                               std::uint64_t samples_a, std::uint64_t samples_b);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Fixed formatting used by every CSV so reruns are byte-identical.
std::string format_number(double value);

}  // namespace fragpart
