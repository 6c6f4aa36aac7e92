#include "sccdag/scm.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "sccdag/rng.hpp"

namespace sccdag {

namespace {

constexpr double kDetTolerance = 1e-10;
constexpr int kMaxWeightDraws = 100;

void check_sample_count(int n) {
  if (n < 1) throw Error("sample count must be at least 1, got " + std::to_string(n));
}

Eigen::MatrixXd solve_rows(const Eigen::MatrixXd& IminusB, const Eigen::MatrixXd& rhs_rows) {
  // Each row r of the result satisfies (I - B) r^T = rhs^T.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(IminusB);
  if (std::abs(lu.determinant()) < kDetTolerance) throw NumericalError("I - B is singular");
  return lu.solve(rhs_rows.transpose()).transpose();
}

}  // namespace

std::string to_string(Regime r) { return r == Regime::Stable ? "stable" : "unstable"; }

std::string to_string(NoiseFamily f) {
  return f == NoiseFamily::Laplace ? "laplace" : "exponential-centered";
}

Regime regime_from_string(const std::string& s) {
  if (s == "stable") return Regime::Stable;
  if (s == "unstable") return Regime::Unstable;
  throw Error("unknown regime '" + s + "' (expected stable|unstable)");
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "laplace") return NoiseFamily::Laplace;
  if (s == "exponential-centered" || s == "exponential") return NoiseFamily::CenteredExponential;
  throw Error("unknown noise family '" + s + "' (expected laplace|exponential-centered)");
}

double regime_target(Regime r) { return r == Regime::Stable ? 0.9 : 1.5; }

ScmSpec make_scm(WeightedAdjacency B, NoiseSpec noise, std::uint64_t seed) {
  if (!(noise.scale > 0)) throw Error("noise scale must be positive");
  ScmSpec scm;
  scm.regime = spectral_radius(B.matrix()) < 1.0 ? Regime::Stable : Regime::Unstable;
  scm.betaMin = B.beta_min();
  scm.B = std::move(B);
  scm.noise = noise;
  scm.seed = seed;
  return scm;
}

WeightedAdjacency five_node_example() {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(5, 5);
  B(1, 0) = 1.2;
  B(1, 3) = -0.3;
  B(2, 1) = 2.0;
  B(3, 2) = -1.0;
  B(4, 1) = 3.0;
  return WeightedAdjacency(std::move(B));
}

ScmSpec generate_scm(int d, int kappa, double lambda, double weight_low, double weight_high, Regime regime,
                     std::uint64_t seed, NoiseSpec noise) {
  if (kappa < 1) throw Error("generate_scm: kappa must be at least 1");
  if (d < 2 * kappa)
    throw Error("generate_scm: d = " + std::to_string(d) + " cannot hold " + std::to_string(kappa) +
                " SCCs of size >= 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("generate_scm: lambda must lie in [0, 1]");
  if (!(weight_low > 0.0) || !(weight_high >= weight_low))
    throw Error("generate_scm: need 0 < weight_low <= weight_high");
  if (!(noise.scale > 0)) throw Error("generate_scm: noise scale must be positive");

  Rng structure(derive_seed({seed, hash_tag("scm/structure")}));

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  structure.shuffle(std::span<int>(order));

  // Two seed nodes per SCC; every further node is a singleton with
  // probability 1/2, otherwise it joins a uniformly chosen SCC.
  std::vector<std::vector<int>> sccs(static_cast<std::size_t>(kappa));
  std::vector<std::vector<int>> clusters;
  for (int c = 0; c < kappa; ++c) {
    sccs[static_cast<std::size_t>(c)] = {order[static_cast<std::size_t>(2 * c)],
                                         order[static_cast<std::size_t>(2 * c + 1)]};
  }
  std::vector<int> singletons;
  for (int i = 2 * kappa; i < d; ++i) {
    const int v = order[static_cast<std::size_t>(i)];
    if (structure.bernoulli(0.5))
      singletons.push_back(v);
    else
      sccs[static_cast<std::size_t>(structure.below(static_cast<std::uint64_t>(kappa)))].push_back(v);
  }

  DirectedGraph g(d);
  for (const auto& scc : sccs) {
    const std::size_t m = scc.size();
    for (std::size_t i = 0; i < m; ++i) g.add_edge(scc[i], scc[(i + 1) % m]);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && (i + 1) % m != j && structure.bernoulli(lambda)) g.add_edge(scc[i], scc[j]);
    clusters.push_back(scc);
  }
  for (int v : singletons) clusters.push_back({v});

  structure.shuffle(std::span<std::vector<int>>(clusters));
  for (std::size_t a = 0; a < clusters.size(); ++a)
    for (std::size_t b = a + 1; b < clusters.size(); ++b)
      for (int u : clusters[a])
        for (int v : clusters[b])
          if (structure.bernoulli(lambda)) g.add_edge(u, v);

  const Partition scc_partition = tarjan_scc(g);
  int nontrivial = 0;
  for (const auto& c : scc_partition.clusters()) nontrivial += c.size() >= 2 ? 1 : 0;
  if (nontrivial != kappa) throw Error("generate_scm: internal error, SCC count mismatch");

  // Weight draws are rescaled to hit the target radius. A draw whose factor
  // is >= 1 keeps every |weight| >= weight_low and is taken at once; otherwise
  // the draw that shrinks least is used.
  const double target = regime_target(regime);
  std::optional<Eigen::MatrixXd> best;
  double best_factor = 0.0;
  for (int attempt = 0; attempt < kMaxWeightDraws; ++attempt) {
    Rng weights(derive_seed({seed, hash_tag("scm/weights"), static_cast<std::uint64_t>(attempt)}));
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [src, dst] : g.edges()) {
      const double magnitude = weights.uniform(weight_low, weight_high);
      B(dst, src) = weights.bernoulli(0.5) ? -magnitude : magnitude;
    }
    const double rho = spectral_radius(B);
    if (!(rho > 1e-12)) continue;
    const double factor = target / rho;
    B *= factor;
    if (std::abs((Eigen::MatrixXd::Identity(d, d) - B).determinant()) < kDetTolerance) continue;
    if (factor > best_factor) {
      best_factor = factor;
      best = std::move(B);
    }
    if (best_factor >= 1.0) break;
  }
  if (!best)
    throw NumericalError("generate_scm: no non-singular weight draw after " + std::to_string(kMaxWeightDraws) +
                         " attempts");

  ScmSpec scm;
  scm.B = WeightedAdjacency(std::move(*best), kDetTolerance);
  scm.noise = noise;
  scm.regime = regime;
  scm.betaMin = scm.B.beta_min();
  scm.seed = seed;
  return scm;
}

Eigen::MatrixXd sample_noise(const NoiseSpec& noise, int n, int d, std::uint64_t seed) {
  check_sample_count(n);
  Rng rng(seed);
  Eigen::MatrixXd E(n, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c)
      E(r, c) = noise.family == NoiseFamily::Laplace ? rng.laplace(noise.scale)
                                                     : rng.centered_exponential(noise.scale);
  return E;
}

SampleMatrix sample(const ScmSpec& scm, int n, std::uint64_t seed) {
  const int d = scm.B.size();
  const Eigen::MatrixXd E = sample_noise(scm.noise, n, d, seed);
  return solve_rows(scm.B.demixing(), E);
}

SampleMatrix hard_cluster_intervention(const ScmSpec& scm, std::span<const int> pi, const Eigen::VectorXd& c, int n,
                                       std::uint64_t seed) {
  const int d = scm.B.size();
  if (static_cast<Eigen::Index>(pi.size()) != c.size())
    throw Error("hard_cluster_intervention: |c| must equal |pi|");
  std::vector<char> in_pi(static_cast<std::size_t>(d), 0);
  for (int v : pi) {
    if (v < 0 || v >= d) throw Error("hard_cluster_intervention: node index out of range");
    if (in_pi[static_cast<std::size_t>(v)]) throw Error("hard_cluster_intervention: duplicate node in pi");
    in_pi[static_cast<std::size_t>(v)] = 1;
  }
  const Partition sccs = tarjan_scc(scm.B.support());
  for (const auto& scc : sccs.clusters()) {
    const bool first = in_pi[static_cast<std::size_t>(scc.front())];
    for (int v : scc)
      if (static_cast<bool>(in_pi[static_cast<std::size_t>(v)]) != first)
        throw Error("hard_cluster_intervention: target set splits an SCC");
  }
  check_sample_count(n);

  std::vector<int> rest;
  for (int v = 0; v < d; ++v)
    if (!in_pi[static_cast<std::size_t>(v)]) rest.push_back(v);
  const std::vector<int> target(pi.begin(), pi.end());

  const Eigen::MatrixXd E = sample_noise(scm.noise, n, d, seed);
  SampleMatrix X(n, d);
  for (std::size_t k = 0; k < target.size(); ++k)
    X.col(target[k]).setConstant(c(static_cast<Eigen::Index>(k)));
  if (rest.empty()) return X;

  const Eigen::MatrixXd& B = scm.B.matrix();
  const auto m = static_cast<Eigen::Index>(rest.size());
  const Eigen::MatrixXd IminusBrr = Eigen::MatrixXd::Identity(m, m) - B(rest, rest);
  const Eigen::VectorXd drive = target.empty() ? Eigen::VectorXd::Zero(m) : Eigen::VectorXd(B(rest, target) * c);
  Eigen::MatrixXd rhs = E(Eigen::all, rest);
  rhs.rowwise() += drive.transpose();
  X(Eigen::all, rest) = solve_rows(IminusBrr, rhs);
  return X;
}

SampleMatrix soft_cluster_intervention(const ScmSpec& scm, const Eigen::VectorXd& delta, int n, std::uint64_t seed) {
  const int d = scm.B.size();
  if (delta.size() != d) throw Error("soft_cluster_intervention: delta must have length d");
  if (!delta.allFinite()) throw Error("soft_cluster_intervention: delta must be finite");
  Eigen::MatrixXd E = sample_noise(scm.noise, n, d, seed);
  E.rowwise() += delta.transpose();
  return solve_rows(scm.B.demixing(), E);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<double> row(M.cols());
    for (Eigen::Index j = 0; j < M.cols(); ++j) row[static_cast<std::size_t>(j)] = M(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("matrix JSON: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = j.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error("matrix JSON: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = row[static_cast<std::size_t>(k)];
  }
  return M;
}

nlohmann::json to_json(const ScmSpec& scm) {
  return {{"d", scm.B.size()},
          {"B", matrix_to_json(scm.B.matrix())},
          {"noise", {{"family", to_string(scm.noise.family)}, {"scale", scm.noise.scale}}},
          {"regime", to_string(scm.regime)},
          {"betaMin", scm.betaMin},
          {"seed", scm.seed}};
}

ScmSpec scm_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  Eigen::MatrixXd B = matrix_from_json(j.at("B"));
  if (d < 1 || B.rows() != d || B.cols() != d) throw Error("SCM JSON: B must be a d x d array of rows");
  ScmSpec scm;
  scm.B = WeightedAdjacency(std::move(B));
  if (j.contains("noise")) {
    scm.noise.family = noise_family_from_string(j.at("noise").at("family").get<std::string>());
    scm.noise.scale = j.at("noise").at("scale").get<double>();
  }
  scm.regime = j.contains("regime") ? regime_from_string(j.at("regime").get<std::string>())
                                    : (spectral_radius(scm.B.matrix()) < 1 ? Regime::Stable : Regime::Unstable);
  scm.betaMin = scm.B.beta_min();
  scm.seed = j.value("seed", std::uint64_t{0});
  return scm;
}

void write_samples_csv(std::ostream& out, const SampleMatrix& X) {
  for (Eigen::Index c = 0; c < X.cols(); ++c) out << (c ? "," : "") << 'X' << (c + 1);
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", X(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

SampleMatrix read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("sample CSV: empty input");
  const auto d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::string field;
    Eigen::Index count = 0;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw Error("sample CSV: cannot parse '" + field + "' on data row " + std::to_string(rows + 1));
      }
      ++count;
    }
    if (count != d) throw Error("sample CSV: data row " + std::to_string(rows + 1) + " has the wrong column count");
    ++rows;
  }
  SampleMatrix X(rows, d);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < d; ++c) X(r, c) = values[static_cast<std::size_t>(r * d + c)];
  if (!X.allFinite()) throw Error("sample CSV: non-finite value");
  return X;
}

}  // namespace sccdag
