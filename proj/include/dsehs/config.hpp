#pragma once

#include <string>
#include <vector>

#include "dsehs/pmf.hpp"

namespace dsehs {

// Full parameterization of the scheduling MDP: buffer/battery sizes, channel
// chain, arrival and harvest distributions, costs, and discount factor.
struct ModelConfig {
  int buffer_capacity = 0;             // N_b, packets
  int battery_capacity = 0;            // N_e, energy packets
  std::vector<double> plr;             // q(h), one entry per channel state
  std::vector<std::vector<double>> channel_kernel;  // row-stochastic, N_h x N_h
  Pmf arrival_pmf;                     // data packets per slot
  Pmf harvest_pmf;                     // energy packets per slot
  int tx_energy = 1;                   // energy packets per transmission
  double overflow_penalty = 0.0;       // eta
  double discount = 0.0;               // gamma in [0,1)
  bool allow_flat_plr = false;         // relax strict monotonicity of q

  int num_channel_states() const { return static_cast<int>(plr.size()); }

  // Throws std::invalid_argument with a description on the first violated
  // invariant (stochasticity, q monotone decreasing, tx_energy <= N_e, ...).
  void validate() const;

  // Birth-death chain on n states: interior states move up/down w.p. 1/4 and
  // stay w.p. 1/2; boundary states move inward w.p. 1/2 and stay w.p. 1/2.
  static std::vector<std::vector<double>> birth_death_kernel(int n);

  // Reference configuration: 25/25 buffers, 8-state birth-death channel with
  // PLR 0.8..0.1, Bernoulli(p) arrivals, Bernoulli(0.7) harvest, eta=50,
  // gamma=0.98, e_TX=1.
  static ModelConfig reference(double arrival_p = 0.4);

  // Small instance for exhaustive oracles: 2/2 buffers, 2-state channel,
  // Bernoulli(0.4)/Bernoulli(0.7), gamma=0.9.
  static ModelConfig tiny(double arrival_p = 0.4, double gamma = 0.9);
};

// Raised by parse_config with a 1-based line number of the offending entry.
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

// Parses the flat key-value config format documented in docs/config.md.
ModelConfig parse_config_file(const std::string& path);
ModelConfig parse_config_text(const std::string& text);

}  // namespace dsehs
