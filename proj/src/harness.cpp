#include "sccdag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sccdag/rng.hpp"

namespace sccdag {

namespace {

using Clock = std::chrono::steady_clock;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = c == ',' ? ';' : ' ';
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return kNaN;
  double x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("results CSV: bad number '" + s + "'");
  return x;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("results CSV: bad integer '" + s + "'");
  return x;
}

/// Serialized, flushed appends of finished records so interrupted runs resume.
class Appender {
 public:
  explicit Appender(const std::filesystem::path& path) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, std::ios::app);
    if (!out_) throw Error("cannot open results file " + path.string());
    if (fresh) out_ << results_csv_header() << '\n' << std::flush;
  }

  void append(const std::vector<ExperimentRecord>& records) {
    std::lock_guard lock(mutex_);
    for (const auto& r : records) out_ << to_csv_row(r) << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

int worker_count(int requested, std::size_t units) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(t, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(units, 1)));
}

/// Runs work(i) for i in [0, count) on a pool; the callback owns its output.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& work) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) work(i);
  };
  const int workers = worker_count(threads, count);
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
}

std::set<std::string> existing_keys(const std::vector<ExperimentRecord>& records) {
  std::set<std::string> keys;
  for (const auto& r : records) keys.insert(r.key());
  return keys;
}

std::vector<ExperimentRecord> load_existing(const std::filesystem::path& out) {
  if (!std::filesystem::exists(out) || std::filesystem::file_size(out) == 0) return {};
  return read_results_csv(out);
}

std::vector<ExperimentRecord> finalize(const std::filesystem::path& out, std::vector<ExperimentRecord> records) {
  std::stable_sort(records.begin(), records.end(), record_less);
  std::set<std::string> seen;
  std::vector<ExperimentRecord> unique;
  for (auto& r : records)
    if (seen.insert(r.key()).second) unique.push_back(std::move(r));
  write_results_csv(out, unique);
  return unique;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

ExperimentRecord failed_record(ExperimentRecord r, const std::exception& e) {
  r.metrics = {kNaN, kNaN, kNaN, -1, -1};
  r.exactSupportRecovery = false;
  r.error = sanitize(e.what());
  return r;
}

RecoverOptions recover_options(const ExperimentBase& base, double tau, std::uint64_t ica_seed) {
  RecoverOptions o;
  o.tau = tau;
  o.eta = base.eta;
  o.mode = base.mode;
  o.enumerationPrune = base.enumerationPrune;
  o.maxCandidates = base.maxCandidates;
  o.ica = base.ica;
  o.ica.seed = ica_seed;
  return o;
}

void fill_outcome(ExperimentRecord& r, const RecoveryResult& rec, const Eigen::MatrixXd& b_true) {
  r.metrics = evaluate(rec.bHat.B, rec.partition(), b_true);
  r.exactSupportRecovery = r.metrics.hammingSupport == 0;
  r.icaIterations = rec.icaIterations;
  r.fitMs = rec.timings.totalMs;
}

void validate_base(const ExperimentBase& b) {
  if (b.d < 2) throw Error("config: d must be at least 2");
  if (!(b.weightLow > 0) || !(b.weightHigh >= b.weightLow)) throw Error("config: need 0 < weightLow <= weightHigh");
  if (!(b.eta > 0)) throw Error("config: eta must be positive");
  if (b.maxCandidates == 0) throw Error("config: maxCandidates must be positive");
  if (b.mode == SelectionMode::EnumerateFirstStable && b.d > kMaxEnumerationDim)
    throw Error("config: enumerate-first-stable mode requires d <= " + std::to_string(kMaxEnumerationDim));
}

void validate_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw Error("config: sampleSizes must be nonempty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw Error("config: sample sizes must be at least 2");
    if (i && sizes[i] <= sizes[i - 1]) throw Error("config: sampleSizes must be strictly increasing");
  }
}

struct Stats {
  double mean = kNaN, median = kNaN, ci95 = kNaN;
};

Stats stats(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  const double m = static_cast<double>(v.size());
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / m;
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.ci95 = v.size() > 1 ? 1.96 * std::sqrt(ss / (m - 1)) / std::sqrt(m) : 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  return s;
}

nlohmann::json stats_json(const std::vector<double>& v) {
  const Stats s = stats(v);
  return {{"mean", s.mean}, {"median", s.median}, {"ci95", s.ci95}};
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNaN;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* name, T& target) {
  if (j.contains(name)) target = j.at(name).get<T>();
}

void read_base(const nlohmann::json& j, ExperimentBase& b) {
  read_opt(j, "d", b.d);
  if (b.d > kMaxEnumerationDim) b.mode = SelectionMode::Hungarian;
  read_opt(j, "weightLow", b.weightLow);
  read_opt(j, "weightHigh", b.weightHigh);
  read_opt(j, "eta", b.eta);
  read_opt(j, "enumerationPrune", b.enumerationPrune);
  read_opt(j, "maxCandidates", b.maxCandidates);
  read_opt(j, "threads", b.threads);
  if (j.contains("mode")) b.mode = selection_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.contains("family")) b.noise.family = noise_family_from_string(n.at("family").get<std::string>());
    read_opt(n, "scale", b.noise.scale);
  }
  if (j.contains("ica")) {
    const auto& i = j.at("ica");
    if (i.contains("nonlinearity")) b.ica.nonlinearity = nonlinearity_from_string(i.at("nonlinearity").get<std::string>());
    read_opt(i, "tolerance", b.ica.tolerance);
    read_opt(i, "maxIterations", b.ica.maxIterations);
    read_opt(i, "restarts", b.ica.restarts);
  }
}

nlohmann::json base_json(const ExperimentBase& b) {
  return {{"d", b.d},
          {"weightLow", b.weightLow},
          {"weightHigh", b.weightHigh},
          {"eta", b.eta},
          {"mode", to_string(b.mode)},
          {"enumerationPrune", b.enumerationPrune},
          {"maxCandidates", b.maxCandidates},
          {"noise", {{"family", to_string(b.noise.family)}, {"scale", b.noise.scale}}},
          {"ica",
           {{"nonlinearity", to_string(b.ica.nonlinearity)},
            {"tolerance", b.ica.tolerance},
            {"maxIterations", b.ica.maxIterations},
            {"restarts", b.ica.restarts}}}};
}

std::vector<Regime> read_regimes(const nlohmann::json& j) {
  std::vector<Regime> out;
  for (const auto& s : j) out.push_back(regime_from_string(s.get<std::string>()));
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string ExperimentRecord::key() const {
  return std::to_string(d) + ',' + std::to_string(kappa) + ',' + format_double(lambda) + ',' + to_string(regime) +
         ',' + std::to_string(n) + ',' + std::to_string(seed) + ',' + format_double(tau);
}

bool record_less(const ExperimentRecord& a, const ExperimentRecord& b) {
  return std::tie(a.d, a.kappa, a.lambda, a.regime, a.n, a.seed, a.tau) <
         std::tie(b.d, b.kappa, b.lambda, b.regime, b.n, b.seed, b.tau);
}

const std::string& results_csv_header() {
  static const std::string header =
      "d,kappa,lambda,regime,n,seed,tau,ari,cluster_f1,variable_f1,hamming,exact_recovery,pred_clusters,fit_ms,ica_"
      "iters,error";
  return header;
}

std::string to_csv_row(const ExperimentRecord& r) {
  std::string row = r.key();
  row += ',' + format_double(r.metrics.ari);
  row += ',' + format_double(r.metrics.clusterDagF1);
  row += ',' + format_double(r.metrics.variableF1);
  row += ',' + std::to_string(r.metrics.hammingSupport);
  row += ',' + std::string(r.exactSupportRecovery ? "1" : "0");
  row += ',' + std::to_string(r.metrics.predictedPartitionSize);
  row += ',' + format_double(r.fitMs);
  row += ',' + std::to_string(r.icaIterations);
  row += ',' + sanitize(r.error);
  return row;
}

ExperimentRecord parse_csv_row(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != 16) throw Error("results CSV: expected 16 fields, got " + std::to_string(f.size()));
  ExperimentRecord r;
  r.d = parse_int<int>(f[0]);
  r.kappa = parse_int<int>(f[1]);
  r.lambda = parse_double(f[2]);
  r.regime = regime_from_string(f[3]);
  r.n = parse_int<int>(f[4]);
  r.seed = parse_int<std::uint64_t>(f[5]);
  r.tau = parse_double(f[6]);
  r.metrics.ari = parse_double(f[7]);
  r.metrics.clusterDagF1 = parse_double(f[8]);
  r.metrics.variableF1 = parse_double(f[9]);
  r.metrics.hammingSupport = parse_int<int>(f[10]);
  r.exactSupportRecovery = f[11] == "1";
  r.metrics.predictedPartitionSize = parse_int<int>(f[12]);
  r.fitMs = parse_double(f[13]);
  r.icaIterations = parse_int<int>(f[14]);
  r.error = f[15];
  return r;
}

std::vector<ExperimentRecord> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read results file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header())
    throw Error("results file " + path.string() + " has an unexpected header");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_csv_row(line));
  return out;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << results_csv_header() << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t cell_seed(std::string_view purpose, int d, int kappa, double lambda, Regime regime, int n,
                        std::uint64_t seed) {
  return derive_seed({hash_tag(purpose), static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(kappa),
                      std::bit_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(regime),
                      static_cast<std::uint64_t>(n), seed});
}

std::filesystem::path summary_path_for(const std::filesystem::path& results) {
  auto p = results;
  p.replace_extension(".summary.json");
  return p;
}

void GridConfig::validate() const {
  validate_base(*this);
  if (kappas.empty() || lambdas.empty() || regimes.empty() || seeds.empty())
    throw Error("grid config: kappas, lambdas, regimes and seeds must be nonempty");
  for (int k : kappas)
    if (k < 1 || 2 * k > d) throw Error("grid config: kappa " + std::to_string(k) + " infeasible for d");
  validate_sizes(sampleSizes);
  if (!(tau >= 0)) throw Error("grid config: tau must be non-negative");
}

void SweepConfig::validate() const {
  validate_base(*this);
  if (kappa < 1 || 2 * kappa > d) throw Error("sweep config: kappa infeasible for d");
  if (taus.empty() || seeds.empty()) throw Error("sweep config: taus and seeds must be nonempty");
  validate_sizes(sampleSizes);
}

void SampleComplexityConfig::validate() const {
  validate_base(*this);
  if (kappa < 1 || 2 * kappa > d) throw Error("sample-complexity config: kappa infeasible for d");
  if (seedCount < 1) throw Error("sample-complexity config: seedCount must be positive");
  if (!(tauFactor > 0)) throw Error("sample-complexity config: tauFactor must be positive");
  validate_sizes(sampleSizes);
}

std::vector<ExperimentRecord> run_grid(const GridConfig& cfg, const std::filesystem::path& out) {
  cfg.validate();
  std::vector<ExperimentRecord> records = load_existing(out);
  const auto done = existing_keys(records);

  std::vector<ExperimentRecord> pending;
  for (int kappa : cfg.kappas)
    for (double lambda : cfg.lambdas)
      for (Regime regime : cfg.regimes)
        for (int n : cfg.sampleSizes)
          for (std::uint64_t seed : cfg.seeds) {
            ExperimentRecord r;
            r.d = cfg.d;
            r.kappa = kappa;
            r.lambda = lambda;
            r.regime = regime;
            r.n = n;
            r.seed = seed;
            r.tau = cfg.tau;
            if (!done.count(r.key())) pending.push_back(r);
          }

  Appender appender(out);
  std::vector<ExperimentRecord> fresh(pending.size());
  parallel_for(pending.size(), cfg.threads, [&](std::size_t i) {
    ExperimentRecord r = pending[i];
    try {
      const ScmSpec scm = generate_scm(cfg.d, r.kappa, r.lambda, cfg.weightLow, cfg.weightHigh, r.regime,
                                       cell_seed("scm", cfg.d, r.kappa, r.lambda, r.regime, 0, r.seed), cfg.noise);
      const SampleMatrix X = sample(scm, r.n, cell_seed("sample", cfg.d, r.kappa, r.lambda, r.regime, r.n, r.seed));
      const RecoveryResult rec = recover_condensation(
          X, recover_options(cfg, cfg.tau, cell_seed("ica", cfg.d, r.kappa, r.lambda, r.regime, r.n, r.seed)));
      fill_outcome(r, rec, scm.B.matrix());
    } catch (const std::exception& e) {
      r = failed_record(r, e);
    }
    appender.append({r});
    fresh[i] = std::move(r);
  });

  records.insert(records.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  records = finalize(out, std::move(records));
  nlohmann::json summary = summarize_records(records);
  summary["config"] = to_json(cfg);
  write_json(summary_path_for(out), summary);
  return records;
}

std::vector<ExperimentRecord> run_threshold_sweep(const SweepConfig& cfg, const std::filesystem::path& out) {
  cfg.validate();
  std::vector<ExperimentRecord> records = load_existing(out);
  const auto done = existing_keys(records);

  struct Unit {
    int n;
    std::uint64_t seed;
    std::vector<ExperimentRecord> missing;
  };
  std::vector<Unit> units;
  for (int n : cfg.sampleSizes)
    for (std::uint64_t seed : cfg.seeds) {
      Unit u{n, seed, {}};
      for (double tau : cfg.taus) {
        ExperimentRecord r;
        r.d = cfg.d;
        r.kappa = cfg.kappa;
        r.lambda = cfg.lambda;
        r.regime = cfg.regime;
        r.n = n;
        r.seed = seed;
        r.tau = tau;
        if (!done.count(r.key())) u.missing.push_back(r);
      }
      if (!u.missing.empty()) units.push_back(std::move(u));
    }

  Appender appender(out);
  std::vector<std::vector<ExperimentRecord>> fresh(units.size());
  parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
    Unit& u = units[i];
    std::vector<ExperimentRecord> rows;
    try {
      const ScmSpec scm = generate_scm(cfg.d, cfg.kappa, cfg.lambda, cfg.weightLow, cfg.weightHigh, cfg.regime,
                                       cell_seed("scm", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, 0, u.seed),
                                       cfg.noise);
      const SampleMatrix X =
          sample(scm, u.n, cell_seed("sample", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, u.n, u.seed));
      const auto t0 = Clock::now();
      IcaOptions ica = cfg.ica;
      ica.seed = cell_seed("ica", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, u.n, u.seed);
      const DemixingEstimate est = fastica(X, ica);
      const double ica_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      for (ExperimentRecord r : u.missing) {
        try {
          RecoveryResult rec = recover_from_demixing(est.W, recover_options(cfg, r.tau, ica.seed));
          rec.icaIterations = est.iterations;
          rec.timings.totalMs += ica_ms;
          fill_outcome(r, rec, scm.B.matrix());
        } catch (const std::exception& e) {
          r = failed_record(r, e);
        }
        rows.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      rows.clear();
      for (const auto& r : u.missing) rows.push_back(failed_record(r, e));
    }
    appender.append(rows);
    fresh[i] = std::move(rows);
  });

  for (auto& rows : fresh) records.insert(records.end(), rows.begin(), rows.end());
  records = finalize(out, std::move(records));
  nlohmann::json summary = summarize_records(records);
  summary["config"] = base_json(cfg);
  summary["config"]["kappa"] = cfg.kappa;
  summary["config"]["lambda"] = cfg.lambda;
  summary["config"]["regime"] = to_string(cfg.regime);
  summary["config"]["taus"] = cfg.taus;
  write_json(summary_path_for(out), summary);
  return records;
}

SampleComplexitySummary summarize_sample_complexity(const std::vector<ExperimentRecord>& records, double beta_min,
                                                    double tau, double window_low, double window_high) {
  SampleComplexitySummary s;
  s.betaMin = beta_min;
  s.tau = tau;
  std::map<int, std::vector<const ExperimentRecord*>> by_n;
  for (const auto& r : records) by_n[r.n].push_back(&r);

  std::vector<double> lx, ly_rec, hx, hy;
  for (const auto& [n, rows] : by_n) {
    SampleComplexityRow row;
    row.n = n;
    std::vector<double> hamming, recovered;
    for (const auto* r : rows) {
      ++row.seeds;
      if (!r->error.empty()) {
        ++row.errors;
        continue;
      }
      hamming.push_back(r->metrics.hammingSupport);
      recovered.push_back(r->exactSupportRecovery ? 1.0 : 0.0);
    }
    const Stats h = stats(hamming), rec = stats(recovered);
    row.meanHamming = h.mean;
    row.hammingCi95 = h.ci95;
    row.recoveryRate = rec.mean;
    row.recoveryCi95 = rec.ci95;
    s.rows.push_back(row);

    const double nn = static_cast<double>(n);
    if (nn >= window_low && nn <= window_high) {
      if (!recovered.empty() && row.recoveryRate < 1.0) {
        lx.push_back(std::log(nn));
        ly_rec.push_back(std::log(1.0 - row.recoveryRate));
      }
      if (!hamming.empty() && row.meanHamming > 0) {
        hx.push_back(std::log(nn));
        hy.push_back(std::log(row.meanHamming));
      }
    }
  }
  s.recoveryErrorSlope = ols_slope(lx, ly_rec);
  s.hammingSlope = ols_slope(hx, hy);
  s.windowCells = static_cast<int>(lx.size());
  return s;
}

SampleComplexitySummary run_sample_complexity(const SampleComplexityConfig& cfg, const std::filesystem::path& out,
                                              std::vector<ExperimentRecord>* records_out) {
  cfg.validate();
  const ScmSpec scm = generate_scm(cfg.d, cfg.kappa, cfg.lambda, cfg.weightLow, cfg.weightHigh, cfg.regime,
                                   cell_seed("scm", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, 0, cfg.scmSeed),
                                   cfg.noise);
  const double tau = cfg.tauFactor * scm.betaMin;

  std::vector<ExperimentRecord> records = load_existing(out);
  const auto done = existing_keys(records);
  std::vector<ExperimentRecord> pending;
  for (int n : cfg.sampleSizes)
    for (int s = 0; s < cfg.seedCount; ++s) {
      ExperimentRecord r;
      r.d = cfg.d;
      r.kappa = cfg.kappa;
      r.lambda = cfg.lambda;
      r.regime = cfg.regime;
      r.n = n;
      r.seed = static_cast<std::uint64_t>(s);
      r.tau = tau;
      if (!done.count(r.key())) pending.push_back(r);
    }

  Appender appender(out);
  std::vector<ExperimentRecord> fresh(pending.size());
  parallel_for(pending.size(), cfg.threads, [&](std::size_t i) {
    ExperimentRecord r = pending[i];
    try {
      const std::uint64_t replicate = derive_seed({cfg.scmSeed, r.seed});
      const SampleMatrix X = sample(scm, r.n, cell_seed("sample", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, r.n, replicate));
      const RecoveryResult rec = recover_condensation(
          X, recover_options(cfg, tau, cell_seed("ica", cfg.d, cfg.kappa, cfg.lambda, cfg.regime, r.n, replicate)));
      fill_outcome(r, rec, scm.B.matrix());
    } catch (const std::exception& e) {
      r = failed_record(r, e);
    }
    appender.append({r});
    fresh[i] = std::move(r);
  });

  records.insert(records.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  records = finalize(out, std::move(records));
  // Keep only rows of this configuration's threshold.
  std::vector<ExperimentRecord> mine;
  for (const auto& r : records)
    if (r.tau == tau) mine.push_back(r);
  SampleComplexitySummary summary = summarize_sample_complexity(mine, scm.betaMin, tau, cfg.windowLow, cfg.windowHigh);
  nlohmann::json j = to_json(summary);
  j["config"] = base_json(cfg);
  j["config"]["kappa"] = cfg.kappa;
  j["config"]["lambda"] = cfg.lambda;
  j["config"]["regime"] = to_string(cfg.regime);
  j["config"]["scmSeed"] = cfg.scmSeed;
  j["config"]["seedCount"] = cfg.seedCount;
  j["config"]["tauFactor"] = cfg.tauFactor;
  j["config"]["window"] = {cfg.windowLow, cfg.windowHigh};
  write_json(summary_path_for(out), j);
  if (records_out) *records_out = std::move(mine);
  return summary;
}

double sufficient_n(double beta_min, double delta, double k1, double k2) {
  if (!(beta_min > 0)) throw Error("sufficient_n: betaMin must be positive");
  if (!(delta > 0 && delta <= 1)) throw Error("sufficient_n: delta must lie in (0, 1]");
  if (!(k1 > 0) || !(k2 > 0)) throw Error("sufficient_n: K1 and K2 must be positive");
  return 4.0 / (beta_min * beta_min) * std::sqrt((k1 + k2) / delta);
}

nlohmann::json summarize_records(const std::vector<ExperimentRecord>& records) {
  struct Cell {
    const ExperimentRecord* first = nullptr;
    std::vector<double> ari, cluster, variable, hamming, exact, clusters, fit;
    int errors = 0;
  };
  std::map<std::string, Cell> cells;
  std::vector<std::string> order;
  auto sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), record_less);
  for (const auto& r : sorted) {
    const std::string key = std::to_string(r.d) + ',' + std::to_string(r.kappa) + ',' + format_double(r.lambda) + ',' +
                            to_string(r.regime) + ',' + std::to_string(r.n) + ',' + format_double(r.tau);
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    Cell& c = it->second;
    if (!c.first) c.first = &r;
    if (!r.error.empty()) {
      ++c.errors;
      continue;
    }
    c.ari.push_back(r.metrics.ari);
    c.cluster.push_back(r.metrics.clusterDagF1);
    c.variable.push_back(r.metrics.variableF1);
    c.hamming.push_back(r.metrics.hammingSupport);
    c.exact.push_back(r.exactSupportRecovery ? 1.0 : 0.0);
    c.clusters.push_back(r.metrics.predictedPartitionSize);
    c.fit.push_back(r.fitMs);
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& key : order) {
    const Cell& c = cells.at(key);
    const auto& r = *c.first;
    out.push_back({{"d", r.d},
                   {"kappa", r.kappa},
                   {"lambda", r.lambda},
                   {"regime", to_string(r.regime)},
                   {"n", r.n},
                   {"tau", r.tau},
                   {"seeds", c.ari.size() + static_cast<std::size_t>(c.errors)},
                   {"errors", c.errors},
                   {"ari", stats_json(c.ari)},
                   {"cluster_f1", stats_json(c.cluster)},
                   {"variable_f1", stats_json(c.variable)},
                   {"hamming", stats_json(c.hamming)},
                   {"exact_recovery", stats_json(c.exact)},
                   {"pred_clusters", stats_json(c.clusters)},
                   {"fit_ms", stats_json(c.fit)}});
  }
  return {{"ci", "normal approximation over seeds: mean +/- 1.96 * sd / sqrt(seeds)"}, {"cells", std::move(out)}};
}

nlohmann::json to_json(const SampleComplexitySummary& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"n", r.n},
                    {"seeds", r.seeds},
                    {"errors", r.errors},
                    {"meanHamming", r.meanHamming},
                    {"hammingCi95", r.hammingCi95},
                    {"recoveryRate", r.recoveryRate},
                    {"recoveryCi95", r.recoveryCi95}});
  auto num = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
  return {{"betaMin", s.betaMin},
          {"tau", s.tau},
          {"rows", std::move(rows)},
          {"recoveryErrorSlope", num(s.recoveryErrorSlope)},
          {"hammingSlope", num(s.hammingSlope)},
          {"windowCells", s.windowCells},
          {"ci", "normal approximation over seeds: mean +/- 1.96 * sd / sqrt(seeds)"}};
}

GridConfig grid_config_from_json(const nlohmann::json& j) {
  GridConfig c;
  read_base(j, c);
  read_opt(j, "kappas", c.kappas);
  read_opt(j, "lambdas", c.lambdas);
  if (j.contains("regimes")) c.regimes = read_regimes(j.at("regimes"));
  read_opt(j, "sampleSizes", c.sampleSizes);
  read_opt(j, "seeds", c.seeds);
  read_opt(j, "tau", c.tau);
  c.validate();
  return c;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  read_base(j, c);
  read_opt(j, "kappa", c.kappa);
  read_opt(j, "lambda", c.lambda);
  if (j.contains("regime")) c.regime = regime_from_string(j.at("regime").get<std::string>());
  read_opt(j, "taus", c.taus);
  read_opt(j, "sampleSizes", c.sampleSizes);
  read_opt(j, "seeds", c.seeds);
  c.validate();
  return c;
}

SampleComplexityConfig sample_complexity_config_from_json(const nlohmann::json& j) {
  SampleComplexityConfig c;
  read_base(j, c);
  read_opt(j, "kappa", c.kappa);
  read_opt(j, "lambda", c.lambda);
  if (j.contains("regime")) c.regime = regime_from_string(j.at("regime").get<std::string>());
  read_opt(j, "scmSeed", c.scmSeed);
  read_opt(j, "seedCount", c.seedCount);
  read_opt(j, "sampleSizes", c.sampleSizes);
  read_opt(j, "tauFactor", c.tauFactor);
  if (j.contains("window")) {
    c.windowLow = j.at("window").at(0).get<double>();
    c.windowHigh = j.at("window").at(1).get<double>();
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const GridConfig& cfg) {
  nlohmann::json j = base_json(cfg);
  std::vector<std::string> regimes;
  for (Regime r : cfg.regimes) regimes.push_back(to_string(r));
  j["kappas"] = cfg.kappas;
  j["lambdas"] = cfg.lambdas;
  j["regimes"] = regimes;
  j["sampleSizes"] = cfg.sampleSizes;
  j["seeds"] = cfg.seeds;
  j["tau"] = cfg.tau;
  return j;
}

}  // namespace sccdag
