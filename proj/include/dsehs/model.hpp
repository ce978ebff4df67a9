#pragma once

#include <utility>
#include <vector>

#include "dsehs/config.hpp"
#include "dsehs/pmf.hpp"

namespace dsehs {

// Coordinates (b, e, h) on the state grid. The same shape is used for
// post-decision states (b - f, e - a*e_TX, h).
struct StateIndex {
  int b = 0;
  int e = 0;
  int h = 0;
  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

// Immutable view of a validated config plus the state-space geometry and the
// one-step transition kernels. All member functions are pure; instances are
// safe to share read-only across threads.
class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  int buffer_capacity() const { return cfg_.buffer_capacity; }
  int battery_capacity() const { return cfg_.battery_capacity; }
  int num_channel_states() const { return cfg_.num_channel_states(); }
  int num_states() const { return num_states_; }

  int flatten(StateIndex s) const;
  StateIndex unflatten(int idx) const;

  // {0,1} iff b > 0 and e >= e_TX, else {0}.
  std::vector<int> feasible_actions(int b, int e) const;
  bool is_feasible(int b, int e, int a) const;

  // Distribution of the goodput f given action and channel state.
  Pmf goodput_pmf(int a, int h) const;

  // Holding cost b plus expected overflow penalty over (f, l).
  double buffer_cost(int b, int h, int a) const;

  // Auxiliary cost: buffer_cost with a coerced to 0 where infeasible.
  double auxiliary_cost(int b, int e, int h, int a) const;

  // Distribution of min(e - a*e_TX + e_H, N_e).
  Pmf battery_kernel(int e, int a) const;

  // Distribution of min(b - f + l, N_b).
  Pmf buffer_kernel(int b, int h, int a) const;

  // Sparse joint kernel over flattened next states; probabilities sum to 1.
  std::vector<std::pair<int, double>> joint_kernel(StateIndex s, int a) const;

  // (b - f, e - a*e_TX, h). Requires f <= a <= min(b,1) and a*e_TX <= e.
  StateIndex post_decision(StateIndex s, int a, int f) const;

  // eta * E_l[max(b_pds + l - N_b, 0)], the overflow term of the PDS update.
  double overflow_expectation(int b_pds) const;

  // Stationary distribution of the channel chain by power iteration.
  std::vector<double> stationary_channel(double tol = 1e-14, int max_iter = 1000000) const;

 private:
  void check_state(int b, int e, int h) const;

  ModelConfig cfg_;
  int num_states_ = 0;
};

}  // namespace dsehs
