#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsehs/model.hpp"
#include "dsehs/solver.hpp"

namespace dsehs {

struct SlotRecord {
  int n = 0;
  int b = 0;
  int e = 0;
  int h = 0;
  int a = 0;
  int f = 0;
  int l = 0;
  int e_harvest = 0;
  int dropped = 0;
};

struct SimTrace {
  std::vector<SlotRecord> slots;
  std::uint64_t seed = 0;
  int tx_energy = 1;  // needed to classify outage slots
};

struct Metrics {
  double avg_backlog = 0.0;
  double avg_battery = 0.0;
  double overflow_prob = 0.0;       // dropped packets per arriving packet
  double overflow_per_slot = 0.0;   // dropped packets per slot
  double outage_prob = 0.0;         // fraction of slots with b > 0 and e < e_TX
  double throughput = 0.0;          // successful packets per slot
  double delay = 0.0;               // avg_backlog / throughput (Little's law)
  long long total_arrived = 0;
  long long total_dropped = 0;
  long long total_transmissions = 0;
  long long total_delivered = 0;
};

// Any state -> action rule; must be feasible at every visited state.
using PolicyRule = std::function<int(StateIndex)>;

// Transmit whenever there is data and enough energy.
int greedy_action(const Model& model, int b, int e);
PolicyRule greedy_rule(const Model& model);
PolicyRule table_rule(const Model& model, Policy policy);

// Runs the buffer/battery/channel recursions for `horizon` slots under a
// seeded deterministic RNG. Four independent substreams (arrival, harvest,
// channel, loss) each consume exactly one variate per slot, so two policies
// driven by the same seed see common random numbers. The default initial
// state is b = 0, e = N_e, h sampled from the stationary channel distribution.
SimTrace simulate(const Model& model, const PolicyRule& rule, int horizon, std::uint64_t seed,
                  std::optional<StateIndex> initial = std::nullopt);

Metrics compute_metrics(const SimTrace& trace);

// Re-applies the recursions to the recorded draws and checks every slot
// matches; returns false at the first mismatch.
bool replay_matches(const Model& model, const SimTrace& trace);

struct SweepRow {
  double arrival_p = 0.0;
  std::string policy;
  std::uint64_t seed = 0;
  Metrics metrics;
};

// For each arrival rate, solves the instance, then simulates the optimal and
// greedy policies (common random numbers by default) for each seed.
std::vector<SweepRow> compare_policies(const ModelConfig& base, const std::vector<double>& p_grid,
                                       int horizon, const std::vector<std::uint64_t>& seeds,
                                       bool common_random = true, double theta = 1e-6,
                                       int tau_max = 100000,
                                       const Policy* fixed_policy = nullptr);

void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace dsehs
