// Acceptance gate: one PASS/FAIL line per ship criterion, nonzero exit if any
// criterion fails. Statistical clauses run at n = 1000 humans with 20
// replicates and 95% confidence intervals; sampler checks use 3-sigma Monte
// Carlo tolerances. Seeds are fixed so the verdicts are reproducible.

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "botsim/experiment.hpp"
#include "botsim/meme.hpp"
#include "oracles.hpp"

using namespace botsim;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kReps = 20;
constexpr std::size_t kHumans = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt_ci(const Ci& ci) {
  return fmt(ci.mean) + "±" + fmt(ci.half_width);
}

SimParams desk_params(double gamma, double phi) {
  SimParams params;
  params.net.n_humans = kHumans;
  params.net.beta = 0.1;
  params.net.gamma = gamma;
  params.phi = phi;
  return params;
}

std::vector<double> field_of(const std::vector<MetricsReport>& reports,
                             double MetricsReport::*field) {
  std::vector<double> values;
  values.reserve(reports.size());
  for (const MetricsReport& r : reports) values.push_back(r.*field);
  return values;
}

Ci ci_field(const std::vector<MetricsReport>& reports,
            double MetricsReport::*field) {
  return ci_of(field_of(reports, field));
}

double mean_field(const std::vector<MetricsReport>& reports,
                  double MetricsReport::*field) {
  return mean_of(field_of(reports, field));
}

// --- C1: fitness samplers match their analytic means; equal laws at phi = 1.

Outcome check_samplers() {
  constexpr std::size_t kDraws = 1'000'000;
  double worst_z = 0.0;
  bool pass = true;
  for (const double phi : {1.0, 3.0, 10.0}) {
    for (const bool bot : {false, true}) {
      Rng rng(derive_seed(1100, static_cast<std::uint64_t>(phi) * 2 + bot));
      double sum = 0.0, sumsq = 0.0;
      for (std::size_t i = 0; i < kDraws; ++i) {
        const double f = bot ? sample_bot_fitness(phi, rng)
                             : sample_human_fitness(phi, rng);
        sum += f;
        sumsq += f * f;
      }
      const double m = sum / kDraws;
      const double var = (sumsq - kDraws * m * m) / (kDraws - 1);
      const double se = std::sqrt(var / kDraws);
      const double analytic = bot ? phi / (2.0 * phi + 1.0) : 1.0 / (phi + 2.0);
      const double z = std::abs(m - analytic) / se;
      worst_z = std::max(worst_z, z);
      if (z > 3.0) pass = false;
    }
  }

  constexpr std::size_t kKsDraws = 100'000;
  Rng rng_h(derive_seed(1100, 50)), rng_b(derive_seed(1100, 51));
  std::vector<double> human(kKsDraws), bot(kKsDraws);
  for (std::size_t i = 0; i < kKsDraws; ++i) {
    human[i] = sample_human_fitness(1.0, rng_h);
    bot[i] = sample_bot_fitness(1.0, rng_b);
  }
  const double ks = ks_statistic(human, bot);
  const double crit = ks_critical(0.01, kKsDraws, kKsDraws);
  if (ks >= crit) pass = false;

  return {pass, "means within 3σ at 1e6 draws (worst " + fmt(worst_z, 2) +
                    "σ); KS(φ=1)=" + fmt(ks, 4) + " vs crit " + fmt(crit, 4)};
}

// --- C2: rank correlation agrees exactly with the brute-force oracle.

Outcome check_tau_oracle() {
  std::mt19937_64 gen(4242);
  const std::vector<int> levels = {2, 4, 11, 1001};
  std::size_t mismatches = 0;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 99;
    const int lx = levels[trial % levels.size()];
    const int ly = levels[(trial / levels.size()) % levels.size()];
    std::vector<std::pair<double, double>> pts(n);
    for (auto& [x, y] : pts) {
      x = static_cast<double>(gen() % lx);
      y = static_cast<double>(gen() % ly);
    }
    const double fast = kendall_tau_b(pts);
    const double slow = oracles::kendall_tau_b_quadratic(pts);
    const bool same = (fast == slow) || (is_missing(fast) && is_missing(slow));
    if (!same) ++mismatches;
  }

  std::vector<std::pair<double, double>> up, down;
  for (int i = 0; i < 40; ++i) {
    up.emplace_back(i, 2.0 * i + 1.0);
    down.emplace_back(i, -3.0 * i);
  }
  const bool monotone = kendall_tau_b(up) == 1.0 && kendall_tau_b(down) == -1.0;

  return {mismatches == 0 && monotone,
          "0 of 1000 random tied instances allowed to differ, got " +
              std::to_string(mismatches) + "; τ(up)=" + fmt(kendall_tau_b(up), 1) +
              " τ(down)=" + fmt(kendall_tau_b(down), 1)};
}

// --- C3: infiltration suppresses quality; τ and D halve inside γ ∈ [0.005, 0.05].

Outcome check_suppression() {
  const std::vector<double> gammas = {0.001, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<std::vector<MetricsReport>> runs;
  for (const double g : gammas) {
    runs.push_back(run_replicates(desk_params(g, 1.0), kReps, 301));
  }
  const Ci q_low = ci_field(runs.front(), &MetricsReport::Q);
  const Ci q_high = ci_field(runs.back(), &MetricsReport::Q);
  const bool q_ok = q_low.lo() > q_high.hi();

  const double tau0 = mean_field(runs.front(), &MetricsReport::tau);
  const double d0 = mean_field(runs.front(), &MetricsReport::D);
  double tau_min_ratio = 1.0, d_min_ratio = 1.0;
  bool bracket_ok = false;
  for (std::size_t i = 1; i + 1 < gammas.size(); ++i) {  // the inner bracket
    const double tr = mean_field(runs[i], &MetricsReport::tau) / tau0;
    const double dr = mean_field(runs[i], &MetricsReport::D) / d0;
    tau_min_ratio = std::min(tau_min_ratio, tr);
    d_min_ratio = std::min(d_min_ratio, dr);
    if (tr <= 0.5 && dr <= 0.5) bracket_ok = true;
  }

  return {q_ok && bracket_ok,
          "Q " + fmt_ci(q_low) + " at γ=1e-3 vs " + fmt_ci(q_high) +
              " at γ=0.1 (non-overlap " + (q_ok ? "yes" : "NO") +
              "); min in-bracket τ ratio " + fmt(tau_min_ratio) +
              ", D ratio " + fmt(d_min_ratio) + " (need both ≤ 0.5)"};
}

// --- C4: deception hurts at low infiltration, barely matters at high.

Outcome check_deception() {
  const auto low1 = run_replicates(desk_params(0.001, 1.0), kReps, 401);
  const auto low10 = run_replicates(desk_params(0.001, 10.0), kReps, 402);
  const auto high1 = run_replicates(desk_params(0.5, 1.0), kReps, 403);
  const auto high10 = run_replicates(desk_params(0.5, 10.0), kReps, 404);

  const Ci q1 = ci_field(low1, &MetricsReport::Q);
  const Ci q10 = ci_field(low10, &MetricsReport::Q);
  const bool low_ok = q10.hi() < q1.lo();

  const double gap_low = std::abs(mean_field(low1, &MetricsReport::Q) -
                                  mean_field(low10, &MetricsReport::Q));
  const double gap_high = std::abs(mean_field(high1, &MetricsReport::Q) -
                                   mean_field(high10, &MetricsReport::Q));
  const bool attenuated = gap_high < gap_low;

  return {low_ok && attenuated,
          "γ=1e-3: Q(φ=1) " + fmt_ci(q1) + " vs Q(φ=10) " + fmt_ci(q10) +
              "; |Q gap| " + fmt(gap_low) + " → " + fmt(gap_high) +
              " at γ=0.5 (attenuated " + (attenuated ? "yes" : "NO") + ")"};
}

// --- C5: targeting ratio crosses 1 and gini shows hub concentration.

struct MatchedPair {
  std::vector<MetricsReport> random, preferential;
};

MatchedPair run_matched(double mu, double gamma, std::size_t reps,
                        std::uint64_t base_seed) {
  MatchedPair out;
  for (std::size_t k = 0; k < reps; ++k) {
    const std::uint64_t seed = replicate_seed(base_seed, k);
    SimParams params = desk_params(gamma, 1.0);
    params.mu = mu;
    params.net.wiring = Wiring::Random;
    out.random.push_back(run_replicate(params, seed).report);
    params.net.wiring = Wiring::Preferential;
    out.preferential.push_back(run_replicate(params, seed).report);
  }
  return out;
}

Ci ratio_ci(const MatchedPair& pair) {
  std::vector<double> ratios;
  for (std::size_t k = 0; k < pair.random.size(); ++k) {
    ratios.push_back(pair.preferential[k].Q / pair.random[k].Q);
  }
  return ci_of(ratios);
}

Outcome check_targeting() {
  const MatchedPair sparse = run_matched(0.25, 0.005, kReps, 501);
  const MatchedPair dense = run_matched(0.75, 0.5, kReps, 502);
  const MatchedPair saturated = run_matched(0.75, 1.0, 4, 503);

  const Ci r_sparse = ratio_ci(sparse);
  const Ci r_dense = ratio_ci(dense);
  const bool below = r_sparse.hi() < 1.0;
  const bool above = r_dense.lo() > 1.0;

  bool exact = true;
  for (std::size_t k = 0; k < saturated.random.size(); ++k) {
    if (saturated.preferential[k].Q != saturated.random[k].Q) exact = false;
  }

  const Ci gini_pref = ci_field(dense.preferential, &MetricsReport::gini_hub);
  const Ci gini_rand = ci_field(dense.random, &MetricsReport::gini_hub);
  const bool gini_ok = gini_pref.lo() > gini_rand.hi();

  return {below && above && exact && gini_ok,
          "ratio " + fmt_ci(r_sparse) + " (<1 " + (below ? "yes" : "NO") +
              "), " + fmt_ci(r_dense) + " (>1 " + (above ? "yes" : "NO") +
              "), γ=1 exact " + (exact ? "yes" : "NO") + "; gini pref " +
              fmt_ci(gini_pref) + " vs rand " + fmt_ci(gini_rand)};
}

// --- C6: popularity laws coincide at weak infiltration, bot tail dominates
//         at strong deception.

Outcome check_popularity() {
  std::vector<std::uint32_t> low_pool, high_pool;
  for (std::size_t k = 0; k < kReps; ++k) {
    const auto res =
        run_replicate(desk_params(0.001, 1.0), replicate_seed(601, k));
    for (std::uint32_t v : popularity_samples(res.ledger, true)) {
      low_pool.push_back(v);
    }
    for (std::uint32_t v : popularity_samples(res.ledger, false)) {
      high_pool.push_back(v);
    }
  }
  const double ks = ks_statistic(low_pool, high_pool);
  const bool ks_ok = ks < 0.1;

  std::size_t successes = 0, trials = 0;
  for (std::size_t k = 0; k < kReps; ++k) {
    const auto res =
        run_replicate(desk_params(0.01, 10.0), replicate_seed(602, k));
    const double top_low =
        top_decile_mean(popularity_samples(res.ledger, true));
    const double top_high =
        top_decile_mean(popularity_samples(res.ledger, false));
    if (is_missing(top_low) || is_missing(top_high)) continue;
    ++trials;
    if (top_low > top_high) ++successes;
  }
  const double p = sign_test_p(successes, trials);
  const bool sign_ok = p < 0.05;

  return {ks_ok && sign_ok,
          "pooled KS=" + fmt(ks) + " at (γ=1e-3,φ=1) (need <0.1: " +
              (ks_ok ? "yes" : "NO") + "); top-decile sign test " +
              std::to_string(successes) + "/" + std::to_string(trials) +
              ", p=" + fmt(p, 4) + " at (γ=1e-2,φ=10)"};
}

// --- C7: amplification exponent exceeds 1; synthetic ledgers recover it.

Outcome check_amplification() {
  std::vector<double> etas;
  for (std::size_t k = 0; k < kReps; ++k) {
    const auto res =
        run_replicate(desk_params(0.5, 1.0), replicate_seed(701, k));
    const AmplificationResult amp = amplification_exponent(res.ledger);
    etas.push_back(amp.eta_hat);
  }
  const Ci eta = ci_of(etas);
  const bool above_one = eta.lo() > 1.0;

  const auto synthetic = [](bool squared) {
    MemeLedger ledger;
    for (std::uint32_t vb = 2; vb <= 50; ++vb) {
      LedgerRow row;
      row.meme_id = vb;
      row.origin = Origin::Bot;
      row.quality = 0.0f;
      row.bot_posts = vb;
      row.human_posts = squared ? vb * vb : vb;
      ledger.push_back(row);
    }
    return amplification_exponent(ledger).eta_hat;
  };
  const double eta_lin = synthetic(false);
  const double eta_sq = synthetic(true);
  const bool oracle_ok = eta_lin == 1.0 && std::abs(eta_sq - 2.0) <= 0.01;

  return {above_one && oracle_ok,
          "η̂ " + fmt_ci(eta) + " at (γ=0.5,φ=1), CI>1 " +
              (above_one ? "yes" : "NO") + "; synthetic η̂=" + fmt(eta_lin) +
              " (want 1.000) and " + fmt(eta_sq) + " (want 2.00±0.01)"};
}

// --- C8: idle bots are statistically invisible.

Outcome check_no_bot_consistency() {
  SimParams with_bots = desk_params(0.0, 1.0);
  SimParams without = with_bots;
  without.net.beta = 0.0;
  const auto a = run_replicates(with_bots, kReps, 801);
  const auto b = run_replicates(without, kReps, 801);

  bool pass = true;
  std::string detail;
  const std::pair<const char*, double MetricsReport::*> fields[] = {
      {"Q", &MetricsReport::Q}, {"D", &MetricsReport::D},
      {"τ", &MetricsReport::tau}};
  for (const auto& [name, field] : fields) {
    const Ci ca = ci_field(a, field);
    const Ci cb = ci_field(b, field);
    if (!ca.overlaps(cb)) pass = false;
    if (!detail.empty()) detail += ", ";
    detail += std::string(name) + " " + fmt_ci(ca) + " vs " + fmt_ci(cb);
  }
  return {pass, detail + " (γ=0 with bots vs β=0)"};
}

// --- C9: discrimination falls with load, rises with attention.

Outcome check_load_attention_map() {
  const auto tau_at = [](double mu, std::size_t alpha, std::uint64_t seed) {
    SimParams params;
    params.net.n_humans = kHumans;
    params.net.beta = 0.0;
    params.net.gamma = 0.0;
    params.net.generator = Generator::UndirectedPA;
    params.mu = mu;
    params.alpha = alpha;
    return mean_field(run_replicates(params, kReps, seed),
                      &MetricsReport::tau);
  };

  const double t_mu[] = {tau_at(0.2, 15, 901), tau_at(0.5, 15, 902),
                         tau_at(0.9, 15, 903)};
  const bool mu_ok = t_mu[0] > t_mu[1] && t_mu[1] > t_mu[2];

  const double t_alpha[] = {tau_at(0.75, 2, 904), tau_at(0.75, 15, 905),
                            tau_at(0.75, 50, 906)};
  const bool alpha_ok = t_alpha[0] < t_alpha[1] && t_alpha[1] < t_alpha[2];

  return {mu_ok && alpha_ok,
          "τ over μ {0.2,0.5,0.9}: " + fmt(t_mu[0]) + " > " + fmt(t_mu[1]) +
              " > " + fmt(t_mu[2]) + " (" + (mu_ok ? "yes" : "NO") +
              "); over α {2,15,50}: " + fmt(t_alpha[0]) + " < " +
              fmt(t_alpha[1]) + " < " + fmt(t_alpha[2]) + " (" +
              (alpha_ok ? "yes" : "NO") + ")"};
}

// --- C10: suppression conclusions survive generator substitution.

Outcome check_generator_robustness() {
  bool pass = true;
  std::string detail;
  const std::pair<const char*, std::function<void(SimParams&)>> variants[] = {
      {"rewired-rw", [](SimParams& p) { p.net.rewire_dead_ends = true; }},
      {"pa", [](SimParams& p) {
         p.net.generator = Generator::PreferentialAttachment;
       }}};
  std::uint64_t seed = 1001;
  for (const auto& [name, tweak] : variants) {
    SimParams low = desk_params(0.001, 1.0);
    SimParams high = desk_params(0.1, 1.0);
    tweak(low);
    tweak(high);
    const auto a = run_replicates(low, kReps, seed++);
    const auto b = run_replicates(high, kReps, seed++);
    const Ci qa = ci_field(a, &MetricsReport::Q);
    const Ci qb = ci_field(b, &MetricsReport::Q);
    const bool q_ok = qa.lo() > qb.hi();
    const bool tau_ok = mean_field(a, &MetricsReport::tau) >
                        mean_field(b, &MetricsReport::tau);
    const bool d_ok =
        mean_field(a, &MetricsReport::D) > mean_field(b, &MetricsReport::D);
    if (!(q_ok && tau_ok && d_ok)) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += std::string(name) + ": Q " + fmt_ci(qa) + " → " + fmt_ci(qb) +
              ", τ/D decrease " + (tau_ok && d_ok ? "yes" : "NO");
  }
  return {pass, detail};
}

// --- C11: every CLI command is byte-reproducible under a fixed seed.

int run_cmd(const std::string& bin, const std::string& args) {
  const std::string cmd = "\"" + bin + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome check_cli_reproducibility() {
  const char* bin = std::getenv("BOTSIM_BIN");
  if (bin == nullptr) return {false, "BOTSIM_BIN not set"};

  const fs::path root = fs::temp_directory_path() / "botsim_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "sweep.json";
  {
    std::ofstream out(cfg);
    out << R"({"kind": "phase-map", "n": 60, "beta": 0.1,
               "gamma_grid": [0.001, 0.1], "phi_grid": [1.0],
               "phi_cuts": [1.0], "replicates": 2, "seed": 5})";
  }

  struct Job {
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs = {
      {"generate --n 1000 --beta 0.1 --gamma 0.01 --seed 9", {"network.tsv"}},
      {"run --n 300 --gamma 0.05 --phi 2 --seed 9 --replicates 2 --ledger",
       {"run.csv", "ledger_0.csv", "ledger_1.csv"}},
      {"sweep --config " + cfg.string(),
       {"phase_map.csv", "phase_cut_phi1.csv", "manifest.json"}}};

  bool pass = true;
  std::size_t files_checked = 0;
  std::string bad;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const fs::path d1 = root / ("a" + std::to_string(j));
    const fs::path d2 = root / ("b" + std::to_string(j));
    for (const fs::path& d : {d1, d2}) {
      if (run_cmd(bin, jobs[j].args + " --out " + d.string()) != 0) {
        pass = false;
        bad += " [exit!=0: " + jobs[j].args + "]";
      }
    }
    for (const std::string& f : jobs[j].files) {
      ++files_checked;
      if (hash_file_hex(d1 / f) != hash_file_hex(d2 / f)) {
        pass = false;
        bad += " [differs: " + f + "]";
      }
    }
  }
  return {pass, std::to_string(files_checked) +
                    " files hash-identical across generate/run/sweep reruns" +
                    bad};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"C1", check_samplers},
      {"C2", check_tau_oracle},
      {"C3", check_suppression},
      {"C4", check_deception},
      {"C5", check_targeting},
      {"C6", check_popularity},
      {"C7", check_amplification},
      {"C8", check_no_bot_consistency},
      {"C9", check_load_attention_map},
      {"C10", check_generator_robustness},
      {"C11", check_cli_reproducibility},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %s — %s\n", name, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/11 criteria pass\n",
              11 - failures);
  return failures == 0 ? 0 : 1;
}
