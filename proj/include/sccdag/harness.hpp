#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sccdag/ica.hpp"
#include "sccdag/metrics.hpp"
#include "sccdag/recover.hpp"
#include "sccdag/scm.hpp"

namespace sccdag {

/// Shared generator and estimator settings for every experiment driver.
/// Grid, sweep and sample-complexity drivers default to enumerate-first-stable
/// selection; config loaders switch to hungarian when d exceeds the
/// enumeration limit and no mode is given.
struct ExperimentBase {
  int d = 10;
  double weightLow = 0.5;
  double weightHigh = 0.95;
  NoiseSpec noise;
  double eta = 1e-3;
  IcaOptions ica;
  SelectionMode mode = SelectionMode::EnumerateFirstStable;
  double enumerationPrune = 0.1;
  std::size_t maxCandidates = 20000;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

struct GridConfig : ExperimentBase {
  std::vector<int> kappas{3, 4, 5};
  std::vector<double> lambdas{0.3, 0.5, 0.8};
  std::vector<Regime> regimes{Regime::Stable, Regime::Unstable};
  std::vector<int> sampleSizes{50, 200, 1000, 5000, 20000, 100000};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double tau = 0.1;

  void validate() const;
};

struct SweepConfig : ExperimentBase {
  int kappa = 4;
  double lambda = 0.5;
  Regime regime = Regime::Stable;
  std::vector<double> taus{0.001, 0.003, 0.01, 0.03, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  std::vector<int> sampleSizes{500, 1000, 5000, 20000};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  void validate() const;
};

struct SampleComplexityConfig : ExperimentBase {
  int kappa = 4;
  double lambda = 0.5;
  Regime regime = Regime::Stable;
  /// Seed of the single ground-truth SCM.
  std::uint64_t scmSeed = 0;
  int seedCount = 300;
  std::vector<int> sampleSizes{100, 200, 300, 500, 700, 1000, 2000, 5000, 10000, 20000, 50000, 100000};

  /// tau = tauFactor * betaMin.
  double tauFactor = 0.5;
  double windowLow = 200;
  double windowHigh = 1000;

  void validate() const;
};

/// One (cell, seed) row of a results table.
struct ExperimentRecord {
  int d = 0;
  int kappa = 0;
  double lambda = 0.0;
  Regime regime = Regime::Stable;
  int n = 0;
  std::uint64_t seed = 0;
  double tau = 0.0;
  MetricsReport metrics;
  bool exactSupportRecovery = false;
  double fitMs = 0.0;
  int icaIterations = 0;
  std::string error;

  /// Canonical text key of the identifying fields.
  std::string key() const;
};

/// Orders records by (d, kappa, lambda, regime, n, seed, tau).
bool record_less(const ExperimentRecord& a, const ExperimentRecord& b);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

const std::string& results_csv_header();
std::string to_csv_row(const ExperimentRecord& r);
ExperimentRecord parse_csv_row(const std::string& line);
std::vector<ExperimentRecord> read_results_csv(const std::filesystem::path& path);
void write_results_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);

/// Seed derivation for (cell, seed, purpose). Purposes: "scm", "sample", "ica".
std::uint64_t cell_seed(std::string_view purpose, int d, int kappa, double lambda, Regime regime, int n,
                        std::uint64_t seed);

/// Default summary location: results.csv -> results.summary.json.
std::filesystem::path summary_path_for(const std::filesystem::path& results);

/// Runs every (kappa, lambda, regime, n) cell for every seed. Records whose
/// key already appears in `out` are skipped. The final table is rewritten in
/// key order; a summary JSON is written next to it.
std::vector<ExperimentRecord> run_grid(const GridConfig& cfg, const std::filesystem::path& out);

/// One ICA fit per (n, seed), thresholded at every tau.
std::vector<ExperimentRecord> run_threshold_sweep(const SweepConfig& cfg, const std::filesystem::path& out);

struct SampleComplexityRow {
  int n = 0;
  int seeds = 0;
  int errors = 0;
  double meanHamming = 0.0;
  double hammingCi95 = 0.0;
  double recoveryRate = 0.0;
  double recoveryCi95 = 0.0;
};

struct SampleComplexitySummary {
  double betaMin = 0.0;
  double tau = 0.0;
  std::vector<SampleComplexityRow> rows;
  /// OLS slopes of log(error) on log(n) over window cells with nonzero error;
  /// NaN when fewer than two such cells exist.
  double recoveryErrorSlope = 0.0;
  double hammingSlope = 0.0;
  int windowCells = 0;
};

SampleComplexitySummary summarize_sample_complexity(const std::vector<ExperimentRecord>& records, double beta_min,
                                                    double tau, double window_low, double window_high);

/// Fixed SCM, tau = tauFactor * betaMin, seedCount replicates per n.
SampleComplexitySummary run_sample_complexity(const SampleComplexityConfig& cfg, const std::filesystem::path& out,
                                              std::vector<ExperimentRecord>* records = nullptr);

/// (4 / betaMin^2) * sqrt((k1 + k2) / delta).
double sufficient_n(double beta_min, double delta, double k1, double k2);

/// Per-cell aggregates (mean, median, normal 95% CI half-width across
/// seeds). Deterministic given the records.
nlohmann::json summarize_records(const std::vector<ExperimentRecord>& records);
nlohmann::json to_json(const SampleComplexitySummary& s);

GridConfig grid_config_from_json(const nlohmann::json& j);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
SampleComplexityConfig sample_complexity_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridConfig& cfg);

}  // namespace sccdag
