#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sccdag/harness.hpp"
#include "sccdag/lattice.hpp"
#include "sccdag/recover.hpp"
#include "sccdag/scm.hpp"

using namespace sccdag;

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Condensation recovery for linear non-Gaussian cyclic SCMs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a random SCM as JSON");
  int g_d = 10, g_kappa = 4;
  double g_lambda = 0.5, g_low = 0.5, g_high = 0.95, g_scale = 1.0;
  std::string g_regime = "stable", g_noise = "laplace", g_out;
  std::uint64_t g_seed = 0;
  bool g_example = false;
  gen->add_option("--d", g_d, "Number of variables");
  gen->add_option("--kappa", g_kappa, "Number of non-trivial SCCs");
  gen->add_option("--lambda", g_lambda, "Edge density in [0, 1]");
  gen->add_option("--weight-low", g_low);
  gen->add_option("--weight-high", g_high);
  gen->add_option("--regime", g_regime)->check(CLI::IsMember({"stable", "unstable"}));
  gen->add_option("--noise", g_noise)->check(CLI::IsMember({"laplace", "exponential-centered"}));
  gen->add_option("--scale", g_scale, "Noise standard deviation");
  gen->add_option("--seed", g_seed);
  gen->add_flag("--example", g_example, "Emit the fixed five-node example instead");
  gen->add_option("-o,--out", g_out, "Output file (default stdout)");

  // sample
  auto* smp = app.add_subcommand("sample", "Draw observational samples from an SCM JSON");
  std::string s_scm, s_out;
  int s_n = 1000;
  std::uint64_t s_seed = 0;
  smp->add_option("scm", s_scm, "SCM JSON file")->required();
  smp->add_option("-n,--n", s_n, "Number of samples");
  smp->add_option("--seed", s_seed);
  smp->add_option("-o,--out", s_out, "Output CSV (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "Recover the condensation from a sample CSV");
  std::string f_in, f_out, f_mode = "hungarian", f_nl = "logcosh";
  RecoverOptions f_opts;
  fit->add_option("samples", f_in, "CSV with header X1..Xd")->required();
  fit->add_option("--tau", f_opts.tau, "Threshold on |B| entries");
  fit->add_option("--eta", f_opts.eta, "Admissibility tolerance on |W| diagonal");
  fit->add_option("--mode", f_mode)->check(CLI::IsMember({"hungarian", "enumerate-first-stable"}));
  fit->add_option("--nonlinearity", f_nl)->check(CLI::IsMember({"logcosh", "cube"}));
  fit->add_option("--tol", f_opts.ica.tolerance);
  fit->add_option("--max-iter", f_opts.ica.maxIterations);
  fit->add_option("--restarts", f_opts.ica.restarts);
  fit->add_option("--seed", f_opts.ica.seed);
  fit->add_option("-o,--out", f_out, "Output JSON (default stdout)");

  // lattice
  auto* lat = app.add_subcommand("lattice", "Enumerate DAG-coarsenings of a graph JSON");
  std::string l_in, l_out;
  lat->add_option("graph", l_in, "Graph JSON {\"d\", \"edges\"}")->required();
  lat->add_option("-o,--out", l_out);

  // experiment drivers
  std::string e_config, e_out;
  std::optional<int> e_threads;
  auto add_driver = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", e_config, "JSON config; missing keys take defaults");
    sub->add_option("-o,--out", e_out, "Results CSV; a .summary.json is written alongside")->required();
    sub->add_option("--threads", e_threads, "Worker threads (0 = all cores)");
    return sub;
  };
  auto* grid = add_driver("grid", "Main experiment grid");
  auto* sweep = add_driver("sweep-threshold", "Threshold sensitivity sweep");
  auto* sc = add_driver("sample-complexity", "Exact support recovery versus n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const ScmSpec scm = g_example ? make_scm(five_node_example(), {noise_family_from_string(g_noise), g_scale}, g_seed)
                                    : generate_scm(g_d, g_kappa, g_lambda, g_low, g_high, regime_from_string(g_regime),
                                                   g_seed, {noise_family_from_string(g_noise), g_scale});
      emit(g_out, dump(to_json(scm)));
    } else if (*smp) {
      const ScmSpec scm = scm_from_json(read_json_file(s_scm));
      std::ostringstream out;
      write_samples_csv(out, sample(scm, s_n, s_seed));
      emit(s_out, out.str());
    } else if (*fit) {
      std::ifstream in(f_in);
      if (!in) throw Error("cannot open " + f_in);
      f_opts.mode = selection_mode_from_string(f_mode);
      f_opts.ica.nonlinearity = nonlinearity_from_string(f_nl);
      emit(f_out, dump(to_json(recover_condensation(read_samples_csv(in), f_opts))));
    } else if (*lat) {
      emit(l_out, dump(to_json(valid_dag_coarsenings(graph_from_json(read_json_file(l_in))))));
    } else {
      const nlohmann::json cfg = e_config.empty() ? nlohmann::json::object() : read_json_file(e_config);
      if (*grid) {
        GridConfig c = grid_config_from_json(cfg);
        if (e_threads) c.threads = *e_threads;
        run_grid(c, e_out);
      } else if (*sweep) {
        SweepConfig c = sweep_config_from_json(cfg);
        if (e_threads) c.threads = *e_threads;
        run_threshold_sweep(c, e_out);
      } else if (*sc) {
        SampleComplexityConfig c = sample_complexity_config_from_json(cfg);
        if (e_threads) c.threads = *e_threads;
        run_sample_complexity(c, e_out);
      }
      std::cerr << "wrote " << e_out << " and " << summary_path_for(e_out).string() << "\n";
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
