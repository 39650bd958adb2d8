#pragma once

// Sweep orchestration: replicate runners with derived seeds, the experiment
// drivers (phase map, targeting ratio, popularity tails, amplification,
// alpha-mu-tau map), per-point checkpointing with resume, and the JSON
// manifest tying outputs to their configuration.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "botsim/config.hpp"
#include "botsim/csv.hpp"
#include "botsim/engine.hpp"
#include "botsim/metrics.hpp"
#include "botsim/netgen.hpp"
#include "botsim/rng.hpp"
#include "botsim/stats.hpp"

namespace botsim {

// Runs fn(0..n-1) across `workers` threads. Tasks claim indices from a
// shared counter; results must go to per-index slots so scheduling cannot
// affect output. The first exception wins and is rethrown after join.
inline void parallel_for(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

enum class ExperimentKind : std::uint8_t {
  PhaseMap,
  Targeting,
  Popularity,
  Amplification,
  AlphaMuTau,
};

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::PhaseMap: return "phase-map";
    case ExperimentKind::Targeting: return "targeting";
    case ExperimentKind::Popularity: return "popularity";
    case ExperimentKind::Amplification: return "amplification";
    case ExperimentKind::AlphaMuTau: return "alpha-mu-tau";
  }
  return "phase-map";
}

inline ExperimentKind kind_from_string(const std::string& s) {
  if (s == "phase-map") return ExperimentKind::PhaseMap;
  if (s == "targeting") return ExperimentKind::Targeting;
  if (s == "popularity") return ExperimentKind::Popularity;
  if (s == "amplification") return ExperimentKind::Amplification;
  if (s == "alpha-mu-tau") return ExperimentKind::AlphaMuTau;
  throw config_error("unknown experiment kind '" + s + "'");
}

struct SweepSpec {
  ExperimentKind kind = ExperimentKind::PhaseMap;
  SimParams base;  // grid fields override copies of this per point
  std::vector<double> gamma_grid;
  std::vector<double> phi_grid;
  std::vector<double> phi_cuts;  // line-cut tables emitted by the phase map
  std::vector<double> mu_grid;
  std::vector<std::size_t> alpha_grid;
  std::vector<std::pair<double, double>> gamma_phi_points;
  std::size_t replicates = 20;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  std::size_t stop_after_points = 0;  // testing aid: pause the sweep early
};

// Fills empty grids with the defaults of the experiment kind.
inline void normalize(SweepSpec& spec) {
  if (spec.replicates < 2) throw config_error("sweep needs replicates >= 2");
  if (spec.gamma_grid.empty()) {
    for (int i = 0; i < 12; ++i) {
      spec.gamma_grid.push_back(std::pow(10.0, -3.0 + 3.0 * i / 11.0));
    }
  }
  if (spec.phi_grid.empty()) {
    for (int i = 1; i <= 10; ++i) spec.phi_grid.push_back(i);
  }
  if (spec.phi_cuts.empty()) spec.phi_cuts = {1.0, 5.0, 10.0};
  if (spec.mu_grid.empty()) {
    spec.mu_grid = spec.kind == ExperimentKind::AlphaMuTau
                       ? std::vector<double>{0.2, 0.5, 0.75, 0.9}
                       : std::vector<double>{0.25, 0.75};
  }
  if (spec.alpha_grid.empty()) spec.alpha_grid = {2, 15, 50};
  if (spec.gamma_phi_points.empty()) {
    spec.gamma_phi_points =
        spec.kind == ExperimentKind::Amplification
            ? std::vector<std::pair<double, double>>{{0.5, 1.0}}
            : std::vector<std::pair<double, double>>{{0.001, 1.0}, {0.01, 10.0}};
  }
}

inline json sweep_to_json(const SweepSpec& spec) {
  json points = json::array();
  for (const auto& [g, p] : spec.gamma_phi_points) points.push_back({g, p});
  return json{{"kind", to_string(spec.kind)},
              {"params", params_to_json(spec.base)},
              {"gamma_grid", spec.gamma_grid},
              {"phi_grid", spec.phi_grid},
              {"phi_cuts", spec.phi_cuts},
              {"mu_grid", spec.mu_grid},
              {"alpha_grid", spec.alpha_grid},
              {"gamma_phi_points", points},
              {"replicates", spec.replicates},
              {"seed", spec.base_seed}};
}

// Config-file surface: flat SimParams keys plus the sweep fields. Unknown
// keys are rejected. Scheduling knobs (workers, stop_after_points, out,
// verbose) are deliberately absent from sweep_to_json, so a resume may change
// them without tripping the manifest match.
struct ConfigFile {
  SweepSpec spec;
  std::string out;  // output directory; empty = flag/default decides
  bool verbose = false;
};

inline ConfigFile config_from_json(const json& j) {
  std::set<std::string> allowed = sim_param_keys();
  allowed.insert({"kind", "gamma_grid", "phi_grid", "phi_cuts", "mu_grid",
                  "alpha_grid", "gamma_phi_points", "replicates", "seed", "workers",
                  "stop_after_points", "out", "verbose"});
  detail::reject_unknown_keys(j, "config", allowed);

  ConfigFile config;
  params_from_json(j, config.spec.base);
  if (const auto it = j.find("kind"); it != j.end()) {
    config.spec.kind = kind_from_string(it->get<std::string>());
  }
  detail::read_key(j, "gamma_grid", config.spec.gamma_grid);
  detail::read_key(j, "phi_grid", config.spec.phi_grid);
  detail::read_key(j, "phi_cuts", config.spec.phi_cuts);
  detail::read_key(j, "mu_grid", config.spec.mu_grid);
  detail::read_key(j, "alpha_grid", config.spec.alpha_grid);
  if (const auto it = j.find("gamma_phi_points"); it != j.end()) {
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2) {
        throw config_error("gamma_phi_points: expected [gamma, phi] pairs");
      }
      config.spec.gamma_phi_points.emplace_back(pair[0].get<double>(),
                                                pair[1].get<double>());
    }
  }
  detail::read_key(j, "replicates", config.spec.replicates);
  detail::read_key(j, "seed", config.spec.base_seed);
  detail::read_key(j, "workers", config.spec.workers);
  detail::read_key(j, "stop_after_points", config.spec.stop_after_points);
  detail::read_key(j, "out", config.out);
  detail::read_key(j, "verbose", config.verbose);
  return config;
}

// Per-run seed: injective over (grid point, replicate) so no two runs in a
// sweep share an RNG stream.
inline std::uint64_t sweep_run_seed(const SweepSpec& spec, std::size_t point,
                                    std::size_t rep) {
  return replicate_seed(spec.base_seed, point * spec.replicates + rep);
}

// ---------------------------------------------------------------------------
// Replicate runners

struct ReplicateResult {
  MetricsReport report;
  MemeLedger ledger;
};

inline ReplicateResult run_replicate(const SimParams& params, std::uint64_t seed) {
  const Network net = build_network(params.net, seed);
  Rng rng(derive_seed(seed, stream::diffusion));
  Engine engine(params, net, rng);
  RunResult result = engine.run();
  return {compute_metrics(result, net), std::move(result.ledger)};
}

// Replicate k of a standalone run uses replicate_seed(base_seed, k).
inline std::vector<MetricsReport> run_replicates(const SimParams& params,
                                                 std::size_t replicates,
                                                 std::uint64_t base_seed,
                                                 std::size_t workers = 1) {
  std::vector<MetricsReport> reports(replicates);
  parallel_for(replicates, workers, [&](std::size_t k) {
    reports[k] = run_replicate(params, replicate_seed(base_seed, k)).report;
  });
  return reports;
}

// ---------------------------------------------------------------------------
// Aggregation helpers

inline std::vector<double> drop_missing(const std::vector<double>& values) {
  std::vector<double> kept;
  for (double v : values) {
    if (!is_missing(v)) kept.push_back(v);
  }
  return kept;
}

// JSON has no NaN: missing values serialize as null, so checkpointed arrays
// read back with nulls where fresh ones hold NaN. This reader accepts both.
inline std::vector<double> json_to_doubles(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    out.push_back(v.is_null() ? kMissing : v.get<double>());
  }
  return out;
}

inline Ci ci_of(const std::vector<double>& values) {
  return confidence_interval(drop_missing(values));
}

inline double top_decile_mean(std::vector<std::uint32_t> sample) {
  if (sample.empty()) return kMissing;
  std::sort(sample.begin(), sample.end(), std::greater<>());
  const std::size_t take = (sample.size() + 9) / 10;
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += sample[i];
  return sum / static_cast<double>(take);
}

namespace detail {

inline json metric_lists_to_json(const std::vector<MetricsReport>& reports) {
  json out;
  auto collect = [&](const char* key, auto getter) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(getter(r));
    out[key] = std::move(arr);
  };
  collect("Q", [](const MetricsReport& r) { return r.Q; });
  collect("D", [](const MetricsReport& r) { return r.D; });
  collect("tau", [](const MetricsReport& r) { return r.tau; });
  collect("gini", [](const MetricsReport& r) { return r.gini_hub; });
  collect("eta", [](const MetricsReport& r) { return r.eta; });
  collect("n_memes", [](const MetricsReport& r) { return r.n_memes; });
  collect("converged", [](const MetricsReport& r) { return r.converged; });
  return out;
}

inline std::size_t count_non_converged(const json& metrics) {
  std::size_t n = 0;
  for (const auto& c : metrics.at("converged")) {
    if (!c.get<bool>()) ++n;
  }
  return n;
}

inline std::string metric_cells(const json& metrics, const char* key) {
  const Ci ci = ci_of(json_to_doubles(metrics.at(key)));
  return format_cell(ci.mean) + "," + format_cell(ci.half_width);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment drivers. Each defines its grid, computes one grid point into a
// JSON payload (the checkpoint unit), and turns the full payload list into
// CSV tables. Payloads must determine the tables exactly, so a resumed sweep
// finishes byte-identical to an uninterrupted one.

class SweepDriver {
 public:
  virtual ~SweepDriver() = default;
  virtual std::size_t n_points() const = 0;
  virtual json run_point(std::size_t index) const = 0;
  // Writes tables; returns the file names it created.
  virtual std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const = 0;
};

namespace detail {

constexpr const char* kGridHeader =
    "gamma,phi,mu,alpha,Q_mean,Q_ci,D_mean,D_ci,tau_mean,tau_ci,"
    "gini_mean,gini_ci,eta_mean,eta_ci,replicates,non_converged\n";

inline std::string grid_row(const json& payload) {
  const json& label = payload.at("label");
  const json& metrics = payload.at("metrics");
  std::string row;
  row += format_cell(label.at("gamma").get<double>()) + ",";
  row += format_cell(label.at("phi").get<double>()) + ",";
  row += format_cell(label.at("mu").get<double>()) + ",";
  row += format_cell(label.at("alpha").get<std::size_t>()) + ",";
  row += metric_cells(metrics, "Q") + ",";
  row += metric_cells(metrics, "D") + ",";
  row += metric_cells(metrics, "tau") + ",";
  row += metric_cells(metrics, "gini") + ",";
  row += metric_cells(metrics, "eta") + ",";
  row += format_cell(metrics.at("Q").size()) + ",";
  row += format_cell(count_non_converged(metrics));
  row += '\n';
  return row;
}

// Shared by the phase map and the alpha-mu map: one payload of per-replicate
// metric lists for a single SimParams instance.
inline json grid_point_payload(const SweepSpec& spec, const SimParams& params,
                               std::size_t point) {
  std::vector<MetricsReport> reports(spec.replicates);
  parallel_for(spec.replicates, spec.workers, [&](std::size_t k) {
    reports[k] = run_replicate(params, sweep_run_seed(spec, point, k)).report;
  });
  json payload;
  payload["label"] = {{"gamma", params.net.gamma},
                      {"phi", params.phi},
                      {"mu", params.mu},
                      {"alpha", params.alpha}};
  payload["metrics"] = metric_lists_to_json(reports);
  return payload;
}

}  // namespace detail

// Fig. 3: Q, D, tau over the (gamma, phi) grid, plus per-phi line cuts.
class PhaseMapDriver : public SweepDriver {
 public:
  explicit PhaseMapDriver(SweepSpec spec) : spec_(std::move(spec)) {}

  std::size_t n_points() const override {
    return spec_.gamma_grid.size() * spec_.phi_grid.size();
  }

  json run_point(std::size_t index) const override {
    const std::size_t gi = index / spec_.phi_grid.size();
    const std::size_t pi = index % spec_.phi_grid.size();
    SimParams params = spec_.base;
    params.net.gamma = spec_.gamma_grid[gi];
    params.phi = spec_.phi_grid[pi];
    return detail::grid_point_payload(spec_, params, index);
  }

  std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const override {
    std::string table = detail::kGridHeader;
    for (const json& payload : payloads) table += detail::grid_row(payload);
    write_file_atomic(out_dir / "phase_map.csv", table);

    std::vector<std::string> files = {"phase_map.csv"};
    for (double cut : spec_.phi_cuts) {
      std::string cut_table = detail::kGridHeader;
      for (const json& payload : payloads) {
        if (payload.at("label").at("phi").get<double>() == cut) {
          cut_table += detail::grid_row(payload);
        }
      }
      const std::string name = "phase_cut_phi" + format_float(cut) + ".csv";
      write_file_atomic(out_dir / name, cut_table);
      files.push_back(name);
    }
    return files;
  }

 private:
  SweepSpec spec_;
};

// Supp. Fig. 9: tau over (mu, alpha) on the no-bot undirected variant.
class AlphaMuTauDriver : public SweepDriver {
 public:
  explicit AlphaMuTauDriver(SweepSpec spec) : spec_(std::move(spec)) {
    spec_.base.net.beta = 0.0;
    spec_.base.net.gamma = 0.0;
    spec_.base.net.generator = Generator::UndirectedPA;
  }

  std::size_t n_points() const override {
    return spec_.mu_grid.size() * spec_.alpha_grid.size();
  }

  json run_point(std::size_t index) const override {
    const std::size_t mi = index / spec_.alpha_grid.size();
    const std::size_t ai = index % spec_.alpha_grid.size();
    SimParams params = spec_.base;
    params.mu = spec_.mu_grid[mi];
    params.alpha = spec_.alpha_grid[ai];
    return detail::grid_point_payload(spec_, params, index);
  }

  std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const override {
    std::string table = detail::kGridHeader;
    for (const json& payload : payloads) table += detail::grid_row(payload);
    write_file_atomic(out_dir / "alpha_mu_tau.csv", table);
    return {"alpha_mu_tau.csv"};
  }

 private:
  SweepSpec spec_;
};

// Fig. 4: Q ratio between preferential and random wiring at matched seeds.
// Each replicate runs the same seed under both wirings, so the human and bot
// subnetworks and the diffusion stream coincide; at gamma = 1 the two
// networks are identical and the per-replicate ratio is exactly 1.
class TargetingDriver : public SweepDriver {
 public:
  explicit TargetingDriver(SweepSpec spec) : spec_(std::move(spec)) {}

  std::size_t n_points() const override {
    return spec_.mu_grid.size() * spec_.gamma_grid.size();
  }

  json run_point(std::size_t index) const override {
    const std::size_t mi = index / spec_.gamma_grid.size();
    const std::size_t gi = index % spec_.gamma_grid.size();
    SimParams params = spec_.base;
    params.mu = spec_.mu_grid[mi];
    params.net.gamma = spec_.gamma_grid[gi];

    std::vector<MetricsReport> rand_reports(spec_.replicates);
    std::vector<MetricsReport> pref_reports(spec_.replicates);
    parallel_for(spec_.replicates, spec_.workers, [&](std::size_t k) {
      const std::uint64_t seed = sweep_run_seed(spec_, index, k);
      SimParams rand_params = params;
      rand_params.net.wiring = Wiring::Random;
      SimParams pref_params = params;
      pref_params.net.wiring = Wiring::Preferential;
      rand_reports[k] = run_replicate(rand_params, seed).report;
      pref_reports[k] = run_replicate(pref_params, seed).report;
    });

    json ratios = json::array();
    for (std::size_t k = 0; k < spec_.replicates; ++k) {
      if (rand_reports[k].Q > 0.0) {
        ratios.push_back(pref_reports[k].Q / rand_reports[k].Q);
      }
    }
    json payload;
    payload["label"] = {{"mu", params.mu}, {"gamma", params.net.gamma}};
    payload["rand"] = detail::metric_lists_to_json(rand_reports);
    payload["pref"] = detail::metric_lists_to_json(pref_reports);
    payload["ratio"] = std::move(ratios);
    return payload;
  }

  std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const override {
    std::string table =
        "mu,gamma,ratio_mean,ratio_ci,ratio_of_means,"
        "Q_rand_mean,Q_rand_ci,Q_pref_mean,Q_pref_ci,"
        "gini_rand_mean,gini_rand_ci,gini_pref_mean,gini_pref_ci,"
        "replicates,non_converged\n";
    for (const json& payload : payloads) {
      const json& label = payload.at("label");
      const json& rand = payload.at("rand");
      const json& pref = payload.at("pref");
      const Ci ratio = ci_of(json_to_doubles(payload.at("ratio")));
      const Ci q_rand = ci_of(json_to_doubles(rand.at("Q")));
      const Ci q_pref = ci_of(json_to_doubles(pref.at("Q")));
      const double ratio_of_means =
          q_rand.mean > 0.0 ? q_pref.mean / q_rand.mean : kMissing;

      std::string row;
      row += format_cell(label.at("mu").get<double>()) + ",";
      row += format_cell(label.at("gamma").get<double>()) + ",";
      row += format_cell(ratio.mean) + "," + format_cell(ratio.half_width) + ",";
      row += format_cell(ratio_of_means) + ",";
      row += format_cell(q_rand.mean) + "," + format_cell(q_rand.half_width) + ",";
      row += format_cell(q_pref.mean) + "," + format_cell(q_pref.half_width) + ",";
      row += detail::metric_cells(rand, "gini") + ",";
      row += detail::metric_cells(pref, "gini") + ",";
      row += format_cell(rand.at("Q").size()) + ",";
      row += format_cell(detail::count_non_converged(rand) +
                         detail::count_non_converged(pref));
      row += '\n';
      table += row;
    }
    write_file_atomic(out_dir / "targeting.csv", table);
    return {"targeting.csv"};
  }

 private:
  SweepSpec spec_;
};

// Fig. 5(c-h): popularity CCDFs of low- vs high-quality memes, pooled across
// replicates, plus per-point KS distance and a top-decile sign test.
class PopularityDriver : public SweepDriver {
 public:
  explicit PopularityDriver(SweepSpec spec) : spec_(std::move(spec)) {}

  std::size_t n_points() const override { return spec_.gamma_phi_points.size(); }

  json run_point(std::size_t index) const override {
    SimParams params = spec_.base;
    params.net.gamma = spec_.gamma_phi_points[index].first;
    params.phi = spec_.gamma_phi_points[index].second;

    std::vector<ReplicateResult> results(spec_.replicates);
    parallel_for(spec_.replicates, spec_.workers, [&](std::size_t k) {
      results[k] = run_replicate(params, sweep_run_seed(spec_, index, k));
    });

    std::vector<std::uint32_t> low_pool, high_pool;
    json low_top = json::array(), high_top = json::array();
    std::size_t non_converged = 0;
    for (const auto& result : results) {
      const auto low = popularity_samples(result.ledger, true);
      const auto high = popularity_samples(result.ledger, false);
      low_pool.insert(low_pool.end(), low.begin(), low.end());
      high_pool.insert(high_pool.end(), high.begin(), high.end());
      low_top.push_back(top_decile_mean(low));
      high_top.push_back(top_decile_mean(high));
      if (!result.report.converged) ++non_converged;
    }

    json payload;
    payload["label"] = {{"gamma", params.net.gamma}, {"phi", params.phi}};
    payload["low"] = std::move(low_pool);
    payload["high"] = std::move(high_pool);
    payload["low_top"] = std::move(low_top);
    payload["high_top"] = std::move(high_top);
    payload["replicates"] = spec_.replicates;
    payload["non_converged"] = non_converged;
    return payload;
  }

  std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const override {
    std::string summary =
        "gamma,phi,ks,n_low,n_high,top_decile_low,top_decile_high,"
        "sign_successes,sign_trials,sign_p,replicates,non_converged\n";
    std::string ccdf_table = "gamma,phi,quality_class,popularity,ccdf\n";
    for (const json& payload : payloads) {
      const double gamma = payload.at("label").at("gamma").get<double>();
      const double phi = payload.at("label").at("phi").get<double>();
      const auto low = payload.at("low").get<std::vector<std::uint32_t>>();
      const auto high = payload.at("high").get<std::vector<std::uint32_t>>();

      const auto low_top = json_to_doubles(payload.at("low_top"));
      const auto high_top = json_to_doubles(payload.at("high_top"));
      std::size_t successes = 0, trials = 0;
      for (std::size_t k = 0; k < low_top.size(); ++k) {
        if (is_missing(low_top[k]) || is_missing(high_top[k])) continue;
        ++trials;
        if (low_top[k] > high_top[k]) ++successes;
      }
      const double ks = (low.empty() || high.empty())
                            ? kMissing
                            : ks_statistic(low, high);
      const double p = trials > 0 ? sign_test_p(successes, trials) : kMissing;

      summary += csv_row(gamma, phi, ks, low.size(), high.size(),
                         mean_of(drop_missing(low_top)),
                         mean_of(drop_missing(high_top)), successes, trials, p,
                         payload.at("replicates").get<std::size_t>(),
                         payload.at("non_converged").get<std::size_t>());

      for (const CcdfPoint& point : popularity_ccdf(low)) {
        ccdf_table += csv_row(gamma, phi, "low", point.popularity, point.prob);
      }
      for (const CcdfPoint& point : popularity_ccdf(high)) {
        ccdf_table += csv_row(gamma, phi, "high", point.popularity, point.prob);
      }
    }
    write_file_atomic(out_dir / "popularity_summary.csv", summary);
    write_file_atomic(out_dir / "popularity_ccdf.csv", ccdf_table);
    return {"popularity_summary.csv", "popularity_ccdf.csv"};
  }

 private:
  SweepSpec spec_;
};

// Fig. 6(b-c): per-replicate amplification exponents plus the binned eta
// curve over the pooled ledger rows.
class AmplificationDriver : public SweepDriver {
 public:
  explicit AmplificationDriver(SweepSpec spec) : spec_(std::move(spec)) {}

  std::size_t n_points() const override { return spec_.gamma_phi_points.size(); }

  json run_point(std::size_t index) const override {
    SimParams params = spec_.base;
    params.net.gamma = spec_.gamma_phi_points[index].first;
    params.phi = spec_.gamma_phi_points[index].second;

    std::vector<ReplicateResult> results(spec_.replicates);
    parallel_for(spec_.replicates, spec_.workers, [&](std::size_t k) {
      results[k] = run_replicate(params, sweep_run_seed(spec_, index, k));
    });

    json etas = json::array(), seeds = json::array(), meme_counts = json::array();
    std::vector<std::uint32_t> vb_pool, vh_pool;
    std::size_t non_converged = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const AmplificationResult amp = amplification_exponent(results[k].ledger);
      etas.push_back(amp.eta_hat);
      seeds.push_back(sweep_run_seed(spec_, index, k));
      meme_counts.push_back(amp.n_memes);
      for (const LedgerRow& row : results[k].ledger) {
        if (row.quality == 0.0f && row.bot_posts >= 2 && row.human_posts >= 1) {
          vb_pool.push_back(row.bot_posts);
          vh_pool.push_back(row.human_posts);
        }
      }
      if (!results[k].report.converged) ++non_converged;
    }

    json payload;
    payload["label"] = {{"gamma", params.net.gamma}, {"phi", params.phi}};
    payload["eta"] = std::move(etas);
    payload["seeds"] = std::move(seeds);
    payload["n_memes"] = std::move(meme_counts);
    payload["vb"] = std::move(vb_pool);
    payload["vh"] = std::move(vh_pool);
    payload["non_converged"] = non_converged;
    return payload;
  }

  std::vector<std::string> finalize(
      const std::vector<json>& payloads,
      const std::filesystem::path& out_dir) const override {
    std::string per_rep = "gamma,phi,replicate,seed,eta_hat,n_memes\n";
    std::string bins_table = "gamma,phi,vb,vh,eta,count\n";
    std::string summary = "gamma,phi,eta_mean,eta_ci,replicates,non_converged\n";
    for (const json& payload : payloads) {
      const double gamma = payload.at("label").at("gamma").get<double>();
      const double phi = payload.at("label").at("phi").get<double>();
      const auto etas = json_to_doubles(payload.at("eta"));
      const auto seeds = payload.at("seeds").get<std::vector<std::uint64_t>>();
      const auto meme_counts = payload.at("n_memes").get<std::vector<std::size_t>>();
      for (std::size_t k = 0; k < etas.size(); ++k) {
        per_rep += csv_row(gamma, phi, k, seeds[k], etas[k], meme_counts[k]);
      }

      MemeLedger pooled;
      const auto vb = payload.at("vb").get<std::vector<std::uint32_t>>();
      const auto vh = payload.at("vh").get<std::vector<std::uint32_t>>();
      pooled.reserve(vb.size());
      for (std::size_t i = 0; i < vb.size(); ++i) {
        LedgerRow row;
        row.origin = Origin::Bot;
        row.bot_posts = vb[i];
        row.human_posts = vh[i];
        pooled.push_back(row);
      }
      for (const AmplificationBin& bin : amplification_exponent(pooled).bins) {
        bins_table += csv_row(gamma, phi, bin.mean_vb, bin.mean_vh, bin.eta, bin.count);
      }

      const Ci eta = ci_of(etas);
      summary += csv_row(gamma, phi, eta.mean, eta.half_width, etas.size(),
                         payload.at("non_converged").get<std::size_t>());
    }
    write_file_atomic(out_dir / "amplification.csv", per_rep);
    write_file_atomic(out_dir / "amplification_bins.csv", bins_table);
    write_file_atomic(out_dir / "amplification_summary.csv", summary);
    return {"amplification.csv", "amplification_bins.csv", "amplification_summary.csv"};
  }

 private:
  SweepSpec spec_;
};

inline std::unique_ptr<SweepDriver> make_driver(const SweepSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::PhaseMap: return std::make_unique<PhaseMapDriver>(spec);
    case ExperimentKind::Targeting: return std::make_unique<TargetingDriver>(spec);
    case ExperimentKind::Popularity: return std::make_unique<PopularityDriver>(spec);
    case ExperimentKind::Amplification:
      return std::make_unique<AmplificationDriver>(spec);
    case ExperimentKind::AlphaMuTau: return std::make_unique<AlphaMuTauDriver>(spec);
  }
  throw config_error("unknown experiment kind");
}

// ---------------------------------------------------------------------------
// Sweep execution with checkpoint + resume

struct SweepOutcome {
  std::size_t total_points = 0;
  std::size_t completed_points = 0;
  bool finished = false;
  std::vector<std::string> files;
};

namespace detail {

inline json initial_manifest(const SweepSpec& spec, std::size_t total_points) {
  json manifest;
  manifest["spec"] = sweep_to_json(spec);
  manifest["ci_method"] = "t";
  manifest["seed_rule"] =
      "run seed = derive(base_seed, point_index * replicates + replicate); "
      "per-run streams: human_net=1 bot_net=2 wiring=3 diffusion=4";
  manifest["total_points"] = total_points;
  manifest["completed_points"] = 0;
  manifest["finished"] = false;
  return manifest;
}

inline std::vector<std::optional<json>> load_checkpoint(
    const std::filesystem::path& path, std::size_t total_points) {
  std::vector<std::optional<json>> payloads(total_points);
  if (!std::filesystem::exists(path)) return payloads;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (entry.is_discarded()) break;  // torn tail from an interrupted write
    const auto index = entry.at("index").get<std::size_t>();
    if (index >= total_points) {
      throw config_error("checkpoint point index out of range");
    }
    payloads[index] = std::move(entry.at("payload"));
  }
  return payloads;
}

}  // namespace detail

// Runs (or resumes) a sweep in out_dir. A manifest written up front pins the
// configuration; resuming with a different spec is a hard error. Completed
// grid points are loaded from checkpoint.jsonl and skipped. When all points
// are done the tables are written and the manifest is sealed with their
// hashes.
inline SweepOutcome execute_sweep(SweepSpec spec, const std::filesystem::path& out_dir) {
  normalize(spec);
  spec.base.validate();
  const auto driver = make_driver(spec);
  const std::size_t total = driver->n_points();

  std::filesystem::create_directories(out_dir);
  const auto manifest_path = out_dir / "manifest.json";
  const auto checkpoint_path = out_dir / "checkpoint.jsonl";

  const json spec_json = sweep_to_json(spec);
  if (std::filesystem::exists(manifest_path)) {
    const json existing = json::parse(read_file(manifest_path));
    if (existing.at("spec") != spec_json) {
      throw config_error("resume rejected: sweep config does not match manifest in " +
                         out_dir.string());
    }
  } else {
    write_file_atomic(manifest_path, detail::initial_manifest(spec, total).dump(2));
  }

  auto payloads = detail::load_checkpoint(checkpoint_path, total);

  SweepOutcome outcome;
  outcome.total_points = total;
  std::ofstream checkpoint(checkpoint_path, std::ios::app);
  for (std::size_t i = 0; i < total; ++i) {
    if (!payloads[i]) {
      json entry;
      entry["index"] = i;
      entry["payload"] = driver->run_point(i);
      const std::string line = entry.dump();
      checkpoint << line << '\n' << std::flush;
      // Round-trip through the serialized form (NaN becomes null) so a
      // resumed sweep finalizes from byte-identical payloads.
      payloads[i] = json::parse(line).at("payload");
    }
    ++outcome.completed_points;
    if (spec.stop_after_points > 0 &&
        outcome.completed_points >= spec.stop_after_points &&
        outcome.completed_points < total) {
      json manifest = detail::initial_manifest(spec, total);
      manifest["completed_points"] = outcome.completed_points;
      write_file_atomic(manifest_path, manifest.dump(2));
      return outcome;
    }
  }
  checkpoint.close();

  std::vector<json> done;
  done.reserve(total);
  for (auto& payload : payloads) done.push_back(std::move(*payload));
  outcome.files = driver->finalize(done, out_dir);
  outcome.finished = true;

  json manifest = detail::initial_manifest(spec, total);
  manifest["completed_points"] = total;
  manifest["finished"] = true;
  json seeds;
  for (std::size_t i = 0; i < total; ++i) {
    json list = json::array();
    for (std::size_t k = 0; k < spec.replicates; ++k) {
      list.push_back(sweep_run_seed(spec, i, k));
    }
    seeds[std::to_string(i)] = std::move(list);
  }
  manifest["derived_seeds"] = std::move(seeds);
  json hashes;
  for (const std::string& name : outcome.files) {
    hashes[name] = hash_file_hex(out_dir / name);
  }
  manifest["files"] = std::move(hashes);
  write_file_atomic(manifest_path, manifest.dump(2));
  return outcome;
}

// ---------------------------------------------------------------------------
// Per-run CSV surfaces shared by the CLI

inline std::string run_csv_header() {
  return "gamma,phi,mu,alpha,wiring,seed,Q,D,tau,gini_hub,eta,n_memes,converged\n";
}

inline std::string run_csv_row(const SimParams& params, std::uint64_t seed,
                               const MetricsReport& report) {
  return csv_row(params.net.gamma, params.phi, params.mu, params.alpha,
                 to_string(params.net.wiring), seed, report.Q, report.D, report.tau,
                 report.gini_hub, report.eta, report.n_memes, report.converged);
}

inline std::string ledger_csv(const MemeLedger& ledger) {
  std::string out =
      "meme_id,origin,quality,fitness,human_posts,bot_posts,"
      "feed_occurrences_at_end\n";
  for (const LedgerRow& row : ledger) {
    out += csv_row(row.meme_id, row.origin == Origin::Bot ? "bot" : "human",
                   row.quality, row.fitness, row.human_posts, row.bot_posts,
                   row.feed_occurrences);
  }
  return out;
}

}  // namespace botsim
