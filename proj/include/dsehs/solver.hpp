#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dsehs/model.hpp"

namespace dsehs {

// Dense real-valued function over the flattened state grid. Used for both the
// conventional value function V and the post-decision table.
using ValueTable = std::vector<double>;

// Deterministic action per flattened state.
using Policy = std::vector<int>;

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  double wall_time_s = 0.0;
  bool converged = false;
};

struct Solution {
  ValueTable pds_value;
  ValueTable value;
  Policy policy;
  SolveReport report;
};

double sup_distance(const ValueTable& a, const ValueTable& b);

// One application of the value-update half step: V(s) = min over feasible a of
// b + E_f[pds(b - f, e - a*e_TX, h)]. Ties within 1e-12 break toward a = 0.
std::pair<ValueTable, Policy> value_from_pds(const Model& model, const ValueTable& pds);

// One application of the PDS-update half step: overflow term plus discounted
// expectation of V over arrivals, harvest, and the channel transition.
ValueTable pds_from_value(const Model& model, const ValueTable& value);

// Post-decision-state value iteration starting from the zero table. Stops when
// the sup-norm change of the PDS table drops below theta; the policy is
// re-extracted from the converged PDS table.
Solution pds_value_iteration(const Model& model, double theta = 1e-6, int tau_max = 100000);

// Conventional value iteration on the joint kernel; cross-validation oracle
// for the PDS route.
struct ConventionalSolution {
  ValueTable value;
  Policy policy;
  SolveReport report;
};
ConventionalSolution conventional_value_iteration(const Model& model, double theta = 1e-6,
                                                  int tau_max = 100000);

// Discounted cost of following a fixed feasible policy from every state,
// via a direct sparse solve of (I - gamma * P_pi) V = c_pi.
ValueTable exact_policy_evaluation(const Model& model, const Policy& policy);

// Enumerates every deterministic feasible policy, evaluates each exactly, and
// returns the elementwise-minimal value function with its argmin policy.
// Refuses (std::invalid_argument) when the policy count exceeds max_policies.
std::pair<ValueTable, Policy> brute_force_optimal(const Model& model,
                                                  std::uint64_t max_policies = 1u << 20);

}  // namespace dsehs
