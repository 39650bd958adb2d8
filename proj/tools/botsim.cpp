// botsim: generate follower networks, run the meme diffusion model, and
// sweep the figure experiments. Configuration comes from a JSON file
// (--config) with individual flags taking precedence.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "botsim/config.hpp"
#include "botsim/csv.hpp"
#include "botsim/engine.hpp"
#include "botsim/experiment.hpp"
#include "botsim/metrics.hpp"
#include "botsim/netgen.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliOptions {
  std::string config_path;
  std::string out = "out";
  bool out_set = false;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::size_t workers = 1;
  bool workers_set = false;
  std::size_t replicates = 0;
  bool replicates_set = false;
  std::string kind;
  std::size_t stop_after = 0;
  bool stop_after_set = false;
  bool dump_ledger = false;
  bool verbose = false;

  // model flags; applied only when the user passed them
  double gamma = 0.0, phi = 1.0, mu = 0.75, p = 0.5, beta = 0.1;
  std::size_t n = 10000, alpha = 15, kout = 3, mean_degree = 20;
  bool rewire = false;
  std::string wiring, generator;
  bool gamma_set = false, phi_set = false, mu_set = false, p_set = false,
       beta_set = false, n_set = false, alpha_set = false, kout_set = false,
       mean_degree_set = false, rewire_set = false;
};

void add_model_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file");
  cmd->add_option("--seed", opt.seed, "base RNG seed")
      ->each([&](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--out", opt.out, "output directory")
      ->each([&](const std::string&) { opt.out_set = true; });
  cmd->add_option("--workers", opt.workers, "worker threads")
      ->each([&](const std::string&) { opt.workers_set = true; });
  cmd->add_option("--n", opt.n, "human subnetwork size")
      ->each([&](const std::string&) { opt.n_set = true; });
  cmd->add_option("--beta", opt.beta, "bot/human size ratio")
      ->each([&](const std::string&) { opt.beta_set = true; });
  cmd->add_option("--kout", opt.kout, "out-degree of grown nodes")
      ->each([&](const std::string&) { opt.kout_set = true; });
  cmd->add_option("--p", opt.p, "link-copy probability")
      ->each([&](const std::string&) { opt.p_set = true; });
  cmd->add_option("--gamma", opt.gamma, "infiltration probability")
      ->each([&](const std::string&) { opt.gamma_set = true; });
  cmd->add_option("--phi", opt.phi, "deception level")
      ->each([&](const std::string&) { opt.phi_set = true; });
  cmd->add_option("--mu", opt.mu, "information load")
      ->each([&](const std::string&) { opt.mu_set = true; });
  cmd->add_option("--alpha", opt.alpha, "feed capacity")
      ->each([&](const std::string&) { opt.alpha_set = true; });
  cmd->add_option("--wiring", opt.wiring, "infiltration wiring: random|preferential");
  cmd->add_option("--generator", opt.generator, "growth model: rw|pa|undirected-pa");
  cmd->add_option("--mean-degree", opt.mean_degree,
                  "mean degree of the undirected-pa generator")
      ->each([&](const std::string&) { opt.mean_degree_set = true; });
  cmd->add_flag("--rewire-dead-ends", opt.rewire, "give follower-less nodes a follower")
      ->each([&](const std::string&) { opt.rewire_set = true; });
  cmd->add_flag("-v,--verbose", opt.verbose, "progress output on stderr");
}

botsim::ConfigFile load_config(const CliOptions& opt) {
  botsim::ConfigFile config;
  if (!opt.config_path.empty()) {
    if (!fs::exists(opt.config_path)) {
      throw botsim::config_error("config file not found: " + opt.config_path);
    }
    botsim::json parsed;
    try {
      parsed = botsim::json::parse(botsim::read_file(opt.config_path));
    } catch (const botsim::json::exception& e) {
      throw botsim::config_error("config file " + opt.config_path + ": " + e.what());
    }
    config = botsim::config_from_json(parsed);
  }

  botsim::SimParams& params = config.spec.base;
  if (opt.n_set) params.net.n_humans = opt.n;
  if (opt.beta_set) params.net.beta = opt.beta;
  if (opt.kout_set) params.net.k_out = opt.kout;
  if (opt.p_set) params.net.p = opt.p;
  if (opt.gamma_set) params.net.gamma = opt.gamma;
  if (!opt.wiring.empty()) params.net.wiring = botsim::wiring_from_string(opt.wiring);
  if (!opt.generator.empty()) {
    params.net.generator = botsim::generator_from_string(opt.generator);
  }
  if (opt.rewire_set) params.net.rewire_dead_ends = opt.rewire;
  if (opt.mean_degree_set) params.net.mean_degree = opt.mean_degree;
  if (opt.phi_set) params.phi = opt.phi;
  if (opt.mu_set) params.mu = opt.mu;
  if (opt.alpha_set) params.alpha = opt.alpha;

  if (opt.seed_set) config.spec.base_seed = opt.seed;
  if (opt.workers_set) config.spec.workers = opt.workers;
  if (opt.replicates_set) config.spec.replicates = opt.replicates;
  if (opt.stop_after_set) config.spec.stop_after_points = opt.stop_after;
  if (!opt.kind.empty()) config.spec.kind = botsim::kind_from_string(opt.kind);
  if (opt.out_set || config.out.empty()) config.out = opt.out;
  if (opt.verbose) config.verbose = true;
  return config;
}

int cmd_generate(const CliOptions& opt) {
  const botsim::ConfigFile config = load_config(opt);
  const botsim::NetGenParams& net_params = config.spec.base.net;
  const botsim::Network net =
      botsim::build_network(net_params, config.spec.base_seed);

  fs::create_directories(config.out);
  std::ostringstream dump;
  net.dump_edge_list(dump);
  const fs::path path = fs::path(config.out) / "network.tsv";
  botsim::write_file_atomic(path, dump.str());
  std::cout << "wrote " << path.string() << ": nodes=" << net.size()
            << " humans=" << net.n_humans() << " bots=" << net.n_bots()
            << " links=" << net.link_count() << "\n";
  return kExitOk;
}

int cmd_run(const CliOptions& opt) {
  botsim::ConfigFile config = load_config(opt);
  botsim::SimParams params = config.spec.base;
  params.validate();
  const std::size_t replicates = opt.replicates_set ? opt.replicates : 1;
  if (replicates < 1) throw botsim::config_error("run needs replicates >= 1");

  std::vector<botsim::ReplicateResult> results(replicates);
  botsim::parallel_for(replicates, config.spec.workers, [&](std::size_t k) {
    results[k] =
        botsim::run_replicate(params, botsim::replicate_seed(config.spec.base_seed, k));
    if (config.verbose) {
      std::fprintf(stderr, "replicate %zu/%zu done\n", k + 1, replicates);
    }
  });

  fs::create_directories(config.out);
  std::string table = botsim::run_csv_header();
  for (std::size_t k = 0; k < replicates; ++k) {
    table += botsim::run_csv_row(params, botsim::replicate_seed(config.spec.base_seed, k),
                                 results[k].report);
  }
  const fs::path run_path = fs::path(config.out) / "run.csv";
  botsim::write_file_atomic(run_path, table);
  std::cout << "wrote " << run_path.string() << " (" << replicates << " replicates)\n";

  if (opt.dump_ledger) {
    for (std::size_t k = 0; k < replicates; ++k) {
      const fs::path path =
          fs::path(config.out) / ("ledger_" + std::to_string(k) + ".csv");
      botsim::write_file_atomic(path, botsim::ledger_csv(results[k].ledger));
      std::cout << "wrote " << path.string() << " (" << results[k].ledger.size()
                << " memes)\n";
    }
  }
  return kExitOk;
}

int cmd_sweep(const CliOptions& opt) {
  const botsim::ConfigFile config = load_config(opt);
  const botsim::SweepOutcome outcome =
      botsim::execute_sweep(config.spec, config.out);
  std::cout << "sweep " << botsim::to_string(config.spec.kind) << ": "
            << outcome.completed_points << "/" << outcome.total_points
            << " grid points" << (outcome.finished ? "" : " (paused)") << "\n";
  for (const std::string& name : outcome.files) {
    std::cout << "wrote " << (fs::path(config.out) / name).string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information-ecosystem simulator with deceptive bot accounts"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* generate = app.add_subcommand("generate", "write a network edge list");
  CLI::App* run = app.add_subcommand("run", "run replicates at one parameter point");
  CLI::App* sweep = app.add_subcommand("sweep", "run a figure experiment grid");
  for (CLI::App* cmd : {generate, run, sweep}) add_model_flags(cmd, opt);
  run->add_option("--replicates", opt.replicates, "replicate count")
      ->each([&](const std::string&) { opt.replicates_set = true; });
  run->add_flag("--ledger", opt.dump_ledger, "dump per-replicate meme ledgers");
  sweep->add_option("--replicates", opt.replicates, "replicate count")
      ->each([&](const std::string&) { opt.replicates_set = true; });
  sweep->add_option("--kind", opt.kind,
                    "phase-map|targeting|popularity|amplification|alpha-mu-tau");
  sweep->add_option("--stop-after-points", opt.stop_after,
                    "pause the sweep after this many grid points (testing aid)")
      ->each([&](const std::string&) { opt.stop_after_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return cmd_generate(opt);
    if (run->parsed()) return cmd_run(opt);
    return cmd_sweep(opt);
  } catch (const botsim::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
