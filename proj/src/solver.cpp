#include "dsehs/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dsehs {

namespace {

constexpr double kTieTol = 1e-12;

}  // namespace

double sup_distance(const ValueTable& a, const ValueTable& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::pair<ValueTable, Policy> value_from_pds(const Model& model, const ValueTable& pds) {
  const int n = model.num_states();
  if (static_cast<int>(pds.size()) != n)
    throw std::invalid_argument("value_from_pds: table size mismatch");
  const auto& cfg = model.config();
  ValueTable value(static_cast<std::size_t>(n));
  Policy policy(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    // a = 0: f = 0 with certainty, PDS equals the state itself.
    double best = s.b + pds[static_cast<std::size_t>(i)];
    int best_a = 0;
    if (model.is_feasible(s.b, s.e, 1)) {
      const double q = cfg.plr[static_cast<std::size_t>(s.h)];
      const int e_spent = s.e - cfg.tx_energy;
      const double miss = pds[static_cast<std::size_t>(model.flatten({s.b, e_spent, s.h}))];
      const double hit = pds[static_cast<std::size_t>(model.flatten({s.b - 1, e_spent, s.h}))];
      const double v1 = s.b + q * miss + (1.0 - q) * hit;
      if (v1 < best - kTieTol) {
        best = v1;
        best_a = 1;
      }
    }
    value[static_cast<std::size_t>(i)] = best;
    policy[static_cast<std::size_t>(i)] = best_a;
  }
  return {std::move(value), std::move(policy)};
}

ValueTable pds_from_value(const Model& model, const ValueTable& value) {
  const int n = model.num_states();
  if (static_cast<int>(value.size()) != n)
    throw std::invalid_argument("pds_from_value: table size mismatch");
  const auto& cfg = model.config();
  const int nb = cfg.buffer_capacity;
  const int ne = cfg.battery_capacity;
  const int nh = cfg.num_channel_states();

  // Channel expectation first: W(b', e', h) = sum_h' P^h(h'|h) V(b', e', h').
  ValueTable w(static_cast<std::size_t>(n), 0.0);
  for (int b = 0; b <= nb; ++b) {
    for (int e = 0; e <= ne; ++e) {
      const int base = model.flatten({b, e, 0});
      for (int h = 0; h < nh; ++h) {
        const auto& row = cfg.channel_kernel[static_cast<std::size_t>(h)];
        double acc = 0.0;
        for (int hn = 0; hn < nh; ++hn)
          acc += row[static_cast<std::size_t>(hn)] * value[static_cast<std::size_t>(base + hn)];
        w[static_cast<std::size_t>(base + h)] = acc;
      }
    }
  }

  const Pmf& pl = cfg.arrival_pmf;
  const Pmf& peh = cfg.harvest_pmf;
  ValueTable pds(static_cast<std::size_t>(n));
  for (int b = 0; b <= nb; ++b) {
    const double overflow = model.overflow_expectation(b);
    for (int e = 0; e <= ne; ++e) {
      for (int h = 0; h < nh; ++h) {
        double future = 0.0;
        for (int l = pl.min_value(); l <= pl.max_value(); ++l) {
          const double probl = pl.prob_of(l);
          if (probl == 0.0) continue;
          const int bn = std::min(b + l, nb);
          for (int eh = peh.min_value(); eh <= peh.max_value(); ++eh) {
            const double p = probl * peh.prob_of(eh);
            if (p == 0.0) continue;
            const int en = std::min(e + eh, ne);
            future += p * w[static_cast<std::size_t>(model.flatten({bn, en, h}))];
          }
        }
        pds[static_cast<std::size_t>(model.flatten({b, e, h}))] =
            overflow + cfg.discount * future;
      }
    }
  }
  return pds;
}

Solution pds_value_iteration(const Model& model, double theta, int tau_max) {
  if (theta <= 0.0) throw std::invalid_argument("pds_value_iteration: theta must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const int n = model.num_states();
  Solution sol;
  sol.pds_value.assign(static_cast<std::size_t>(n), 0.0);
  int tau = 0;
  double delta = 0.0;
  while (tau < tau_max) {
    auto [value, policy] = value_from_pds(model, sol.pds_value);
    ValueTable next = pds_from_value(model, value);
    delta = sup_distance(next, sol.pds_value);
    sol.pds_value = std::move(next);
    sol.report.residual_history.push_back(delta);
    ++tau;
    if (delta < theta) {
      sol.report.converged = true;
      break;
    }
  }
  auto [value, policy] = value_from_pds(model, sol.pds_value);
  sol.value = std::move(value);
  sol.policy = std::move(policy);
  sol.report.iterations = tau;
  sol.report.residual = delta;
  sol.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

ConventionalSolution conventional_value_iteration(const Model& model, double theta, int tau_max) {
  if (theta <= 0.0) throw std::invalid_argument("conventional_value_iteration: theta must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const int n = model.num_states();
  const double gamma = model.config().discount;

  struct ActionData {
    double cost;
    std::vector<std::pair<int, double>> row;
  };
  std::vector<std::vector<ActionData>> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    for (int a : model.feasible_actions(s.b, s.e))
      rows[static_cast<std::size_t>(i)].push_back(
          {model.buffer_cost(s.b, s.h, a), model.joint_kernel(s, a)});
  }

  ConventionalSolution sol;
  sol.value.assign(static_cast<std::size_t>(n), 0.0);
  sol.policy.assign(static_cast<std::size_t>(n), 0);
  ValueTable next(static_cast<std::size_t>(n));
  int tau = 0;
  double delta = 0.0;
  while (tau < tau_max) {
    for (int i = 0; i < n; ++i) {
      double best = 0.0;
      int best_a = 0;
      bool first = true;
      int a = 0;
      for (const auto& ad : rows[static_cast<std::size_t>(i)]) {
        double q = ad.cost;
        for (const auto& [j, p] : ad.row) q += gamma * p * sol.value[static_cast<std::size_t>(j)];
        if (first || q < best - kTieTol) {
          best = q;
          best_a = a;
          first = false;
        }
        ++a;
      }
      next[static_cast<std::size_t>(i)] = best;
      sol.policy[static_cast<std::size_t>(i)] = best_a;
    }
    delta = sup_distance(next, sol.value);
    sol.value.swap(next);
    sol.report.residual_history.push_back(delta);
    ++tau;
    if (delta < theta) {
      sol.report.converged = true;
      break;
    }
  }
  sol.report.iterations = tau;
  sol.report.residual = delta;
  sol.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

ValueTable exact_policy_evaluation(const Model& model, const Policy& policy) {
  const int n = model.num_states();
  if (static_cast<int>(policy.size()) != n)
    throw std::invalid_argument("exact_policy_evaluation: policy size mismatch");
  const double gamma = model.config().discount;

  Eigen::VectorXd cost(n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    const int a = policy[static_cast<std::size_t>(i)];
    if (!model.is_feasible(s.b, s.e, a))
      throw std::invalid_argument("exact_policy_evaluation: infeasible policy action");
    cost(i) = model.buffer_cost(s.b, s.h, a);
    triplets.emplace_back(i, i, 1.0);
    for (const auto& [j, p] : model.joint_kernel(s, a)) triplets.emplace_back(i, j, -gamma * p);
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(system);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("exact_policy_evaluation: factorization failed");
  const Eigen::VectorXd v = lu.solve(cost);
  return ValueTable(v.data(), v.data() + n);
}

std::pair<ValueTable, Policy> brute_force_optimal(const Model& model, std::uint64_t max_policies) {
  const int n = model.num_states();
  std::vector<int> choice_states;
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    if (model.feasible_actions(s.b, s.e).size() == 2) choice_states.push_back(i);
  }
  const std::size_t k = choice_states.size();
  if (k >= 63 || (std::uint64_t{1} << k) > max_policies)
    throw std::invalid_argument("brute_force_optimal: " + std::to_string(k) +
                                " binary-choice states exceed the policy cap");

  ValueTable best_value;
  Policy best_policy;
  double best_sum = 0.0;
  Policy policy(static_cast<std::size_t>(n), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    for (std::size_t j = 0; j < k; ++j)
      policy[static_cast<std::size_t>(choice_states[j])] = (mask >> j) & 1u;
    ValueTable v = exact_policy_evaluation(model, policy);
    double sum = 0.0;
    for (double x : v) sum += x;
    if (best_value.empty()) {
      best_value = v;
      best_policy = policy;
      best_sum = sum;
    } else {
      for (int i = 0; i < n; ++i)
        best_value[static_cast<std::size_t>(i)] =
            std::min(best_value[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      if (sum < best_sum) {
        best_sum = sum;
        best_policy = policy;
      }
    }
  }
  return {std::move(best_value), std::move(best_policy)};
}

}  // namespace dsehs
