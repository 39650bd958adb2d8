#pragma once

// JSON (de)serialization of simulation parameters with strict unknown-key
// rejection, shared by the config file parser and the sweep manifest.

#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "botsim/engine.hpp"
#include "botsim/netgen.hpp"

namespace botsim {

using json = nlohmann::json;

// Bad configuration (file contents, flag values, resume mismatch). The CLI
// maps this to its config-error exit code.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string to_string(Wiring w) {
  return w == Wiring::Preferential ? "preferential" : "random";
}

inline Wiring wiring_from_string(const std::string& s) {
  if (s == "random") return Wiring::Random;
  if (s == "preferential") return Wiring::Preferential;
  throw config_error("unknown wiring '" + s + "' (expected random|preferential)");
}

inline std::string to_string(Generator g) {
  switch (g) {
    case Generator::PreferentialAttachment: return "pa";
    case Generator::UndirectedPA: return "undirected-pa";
    default: return "rw";
  }
}

inline Generator generator_from_string(const std::string& s) {
  if (s == "rw") return Generator::RandomWalk;
  if (s == "pa") return Generator::PreferentialAttachment;
  if (s == "undirected-pa") return Generator::UndirectedPA;
  throw config_error("unknown generator '" + s + "' (expected rw|pa|undirected-pa)");
}

namespace detail {

inline void reject_unknown_keys(const json& j, const std::string& context,
                                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw config_error(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw config_error(context + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw config_error(std::string("key '") + key + "': wrong value type");
    }
  }
}

inline void read_key(const json& j, const char* key, Wiring& out) {
  if (const auto it = j.find(key); it != j.end()) {
    out = wiring_from_string(it->get<std::string>());
  }
}

inline void read_key(const json& j, const char* key, Generator& out) {
  if (const auto it = j.find(key); it != j.end()) {
    out = generator_from_string(it->get<std::string>());
  }
}

}  // namespace detail

inline json steady_to_json(const SteadyConfig& s) {
  return json{{"window", s.window},
              {"rel_tol", s.rel_tol},
              {"consecutive", s.consecutive},
              {"max_steps", s.max_steps}};
}

inline SteadyConfig steady_from_json(const json& j) {
  detail::reject_unknown_keys(j, "steady",
                              {"window", "rel_tol", "consecutive", "max_steps"});
  SteadyConfig s;
  detail::read_key(j, "window", s.window);
  detail::read_key(j, "rel_tol", s.rel_tol);
  detail::read_key(j, "consecutive", s.consecutive);
  detail::read_key(j, "max_steps", s.max_steps);
  return s;
}

inline json params_to_json(const SimParams& p) {
  return json{{"n", p.net.n_humans},
              {"beta", p.net.beta},
              {"k_out", p.net.k_out},
              {"p", p.net.p},
              {"gamma", p.net.gamma},
              {"wiring", to_string(p.net.wiring)},
              {"generator", to_string(p.net.generator)},
              {"rewire_dead_ends", p.net.rewire_dead_ends},
              {"mean_degree", p.net.mean_degree},
              {"mu", p.mu},
              {"alpha", p.alpha},
              {"phi", p.phi},
              {"steady", steady_to_json(p.steady)},
              {"measure_steps", p.measure_steps}};
}

inline const std::set<std::string>& sim_param_keys() {
  static const std::set<std::string> keys = {
      "n",         "beta",  "k_out", "p",      "gamma",
      "wiring",    "generator",      "rewire_dead_ends", "mean_degree",
      "mu",        "alpha", "phi",   "steady", "measure_steps"};
  return keys;
}

// Reads SimParams fields present in `j` over the defaults in `p`. Key checks
// happen at the caller, which knows the full allowed set.
inline void params_from_json(const json& j, SimParams& p) {
  detail::read_key(j, "n", p.net.n_humans);
  detail::read_key(j, "beta", p.net.beta);
  detail::read_key(j, "k_out", p.net.k_out);
  detail::read_key(j, "p", p.net.p);
  detail::read_key(j, "gamma", p.net.gamma);
  detail::read_key(j, "wiring", p.net.wiring);
  detail::read_key(j, "generator", p.net.generator);
  detail::read_key(j, "rewire_dead_ends", p.net.rewire_dead_ends);
  detail::read_key(j, "mean_degree", p.net.mean_degree);
  detail::read_key(j, "mu", p.mu);
  detail::read_key(j, "alpha", p.alpha);
  detail::read_key(j, "phi", p.phi);
  if (const auto it = j.find("steady"); it != j.end()) {
    p.steady = steady_from_json(*it);
  }
  detail::read_key(j, "measure_steps", p.measure_steps);
}

}  // namespace botsim
