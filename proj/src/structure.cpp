#include "dsehs/structure.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dsehs {

namespace {

constexpr double kExactTol = 1e-12;

struct ViolationTracker {
  double worst = -std::numeric_limits<double>::infinity();
  StateIndex witness;
  bool any = false;

  void record(double violation, StateIndex at) {
    any = true;
    if (violation > worst) {
      worst = violation;
      witness = at;
    }
  }

  PropertyReport finish(std::string name, double tol) const {
    PropertyReport r;
    r.name = std::move(name);
    r.worst_violation = any ? worst : 0.0;
    r.witness = any ? witness : StateIndex{};
    r.tolerance = tol;
    r.pass = r.worst_violation <= tol;
    return r;
  }
};

}  // namespace

PropertyReport check_monotone(const Model& model, const ValueTable& table, Axis axis,
                              Direction dir, double tol, const std::string& name) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  ViolationTracker t;
  const double sign = (dir == Direction::NonDecreasing) ? 1.0 : -1.0;
  for (int b = 0; b <= nb; ++b) {
    for (int e = 0; e <= ne; ++e) {
      for (int h = 0; h < nh; ++h) {
        const StateIndex s{b, e, h};
        StateIndex next = s;
        if (axis == Axis::Buffer) {
          if (b == nb) continue;
          next.b = b + 1;
        } else {
          if (e == ne) continue;
          next.e = e + 1;
        }
        const double diff = table[static_cast<std::size_t>(model.flatten(next))] -
                            table[static_cast<std::size_t>(model.flatten(s))];
        t.record(-sign * diff, s);
      }
    }
  }
  return t.finish(name, tol);
}

PropertyReport check_increasing_differences(const Model& model, const ValueTable& table,
                                            Axis axis, double tol, const std::string& name) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  ViolationTracker t;
  for (int b = 0; b <= nb; ++b) {
    for (int e = 0; e <= ne; ++e) {
      for (int h = 0; h < nh; ++h) {
        StateIndex lo{b, e, h}, mid{b, e, h}, hi{b, e, h};
        if (axis == Axis::Buffer) {
          if (b == 0 || b == nb) continue;
          lo.b = b - 1;
          hi.b = b + 1;
        } else {
          if (e == 0 || e == ne) continue;
          lo.e = e - 1;
          hi.e = e + 1;
        }
        const double left = table[static_cast<std::size_t>(model.flatten(mid))] -
                            table[static_cast<std::size_t>(model.flatten(lo))];
        const double right = table[static_cast<std::size_t>(model.flatten(hi))] -
                             table[static_cast<std::size_t>(model.flatten(mid))];
        t.record(left - right, mid);
      }
    }
  }
  return t.finish(name, tol);
}

PropertyReport check_submodular(const Model& model, const ValueTable& table, double tol,
                                const std::string& name) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  ViolationTracker t;
  for (int b = 0; b < nb; ++b) {
    for (int e = 0; e < ne; ++e) {
      for (int h = 0; h < nh; ++h) {
        auto at = [&](int bb, int ee) {
          return table[static_cast<std::size_t>(model.flatten({bb, ee, h}))];
        };
        const double high = at(b + 1, e + 1) - at(b, e + 1);
        const double low = at(b + 1, e) - at(b, e);
        t.record(high - low, {b, e, h});
      }
    }
  }
  return t.finish(name, tol);
}

PropertyReport check_stochastic_dominance(const Model& model, Axis axis) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  const int etx = model.config().tx_energy;
  ViolationTracker t;
  auto tail = [](const Pmf& p, int threshold) {
    double s = 0.0;
    for (int v = std::max(threshold, p.min_value()); v <= p.max_value(); ++v) s += p.prob_of(v);
    return s;
  };
  if (axis == Axis::Battery) {
    for (int a : {0, 1}) {
      const int e_min = a * etx;
      for (int e = e_min; e < ne; ++e) {
        const Pmf lo = model.battery_kernel(e, a);
        const Pmf hi = model.battery_kernel(e + 1, a);
        for (int bar = 0; bar <= ne; ++bar) t.record(tail(lo, bar) - tail(hi, bar), {0, e, 0});
      }
    }
  } else {
    for (int h = 0; h < nh; ++h) {
      for (int a : {0, 1}) {
        for (int b = a; b < nb; ++b) {
          const Pmf lo = model.buffer_kernel(b, h, a);
          const Pmf hi = model.buffer_kernel(b + 1, h, a);
          for (int bar = 0; bar <= nb; ++bar) t.record(tail(lo, bar) - tail(hi, bar), {b, 0, h});
        }
      }
    }
  }
  const char* name = axis == Axis::Battery ? "battery_kernel_stochastic_dominance"
                                           : "buffer_kernel_stochastic_dominance";
  return t.finish(name, kExactTol);
}

PropertyReport check_value_decomposition(const Model& model, const ValueTable& value,
                                         const ValueTable& pds, const Policy& policy,
                                         double tol) {
  const int n = model.num_states();
  const auto& cfg = model.config();
  ViolationTracker t;
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    const int a = policy[static_cast<std::size_t>(i)];
    double expected = s.b;
    if (a == 0) {
      expected += pds[static_cast<std::size_t>(i)];
    } else {
      const double q = cfg.plr[static_cast<std::size_t>(s.h)];
      const int e_spent = s.e - cfg.tx_energy;
      expected += q * pds[static_cast<std::size_t>(model.flatten({s.b, e_spent, s.h}))] +
                  (1.0 - q) * pds[static_cast<std::size_t>(model.flatten({s.b - 1, e_spent, s.h}))];
    }
    t.record(std::abs(value[static_cast<std::size_t>(i)] - expected), s);
  }
  return t.finish("value_decomposition", tol);
}

PropertyReport check_cost_monotonicity(const Model& model) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  ViolationTracker t;
  for (int h = 0; h < nh; ++h) {
    for (int a : {0, 1}) {
      for (int e = 0; e <= ne; ++e)
        for (int b = 0; b < nb; ++b)
          t.record(model.auxiliary_cost(b, e, h, a) - model.auxiliary_cost(b + 1, e, h, a),
                   {b, e, h});
      for (int b = 0; b <= nb; ++b)
        for (int e = 0; e < ne; ++e)
          t.record(model.auxiliary_cost(b, e + 1, h, a) - model.auxiliary_cost(b, e, h, a),
                   {b, e, h});
    }
  }
  return t.finish("auxiliary_cost_monotonicity", kExactTol);
}

std::vector<PropertyReport> run_full_suite(const Model& model, double theta, int tau_max) {
  const Solution sol = pds_value_iteration(model, theta, tau_max);
  if (!sol.report.converged) throw std::runtime_error("run_full_suite: solver did not converge");
  return run_full_suite(model, sol, theta);
}

std::vector<PropertyReport> run_full_suite(const Model& model, const Solution& sol,
                                           double theta) {
  std::vector<PropertyReport> reports;
  reports.push_back(check_cost_monotonicity(model));
  reports.push_back(check_stochastic_dominance(model, Axis::Battery));
  reports.push_back(check_stochastic_dominance(model, Axis::Buffer));

  const double vtol = 1e-9;
  reports.push_back(check_monotone(model, sol.value, Axis::Buffer, Direction::NonDecreasing,
                                   vtol, "value_nondecreasing_buffer"));
  reports.push_back(check_monotone(model, sol.value, Axis::Battery, Direction::NonIncreasing,
                                   vtol, "value_nonincreasing_battery"));
  {
    auto r = check_increasing_differences(model, sol.pds_value, Axis::Buffer, vtol,
                                          "pds_increasing_differences_buffer");
    r.finite_buffer_caveat = true;  // proven only for infinite buffers
    reports.push_back(std::move(r));
  }
  reports.push_back(check_increasing_differences(model, sol.pds_value, Axis::Battery, vtol,
                                                 "pds_increasing_differences_battery"));
  reports.push_back(
      check_submodular(model, sol.pds_value, vtol, "pds_submodular_buffer_battery"));
  reports.push_back(check_value_decomposition(model, sol.value, sol.pds_value, sol.policy, 1e-8));

  // Solver invariants: fixed-point consistency and policy feasibility.
  {
    auto [value2, policy2] = value_from_pds(model, sol.pds_value);
    const ValueTable pds2 = pds_from_value(model, value2);
    PropertyReport r;
    r.name = "solver_fixed_point";
    r.tolerance = theta;
    r.worst_violation = sup_distance(pds2, sol.pds_value);
    r.pass = r.worst_violation <= theta;
    reports.push_back(std::move(r));
  }
  {
    ViolationTracker t;
    for (int i = 0; i < model.num_states(); ++i) {
      const StateIndex s = model.unflatten(i);
      const bool ok = model.is_feasible(s.b, s.e, sol.policy[static_cast<std::size_t>(i)]);
      t.record(ok ? 0.0 : 1.0, s);
    }
    reports.push_back(t.finish("policy_feasibility", 0.0));
  }
  return reports;
}

std::vector<std::vector<int>> transmit_thresholds(const Model& model, const Policy& policy) {
  const int nb = model.buffer_capacity();
  const int ne = model.battery_capacity();
  const int nh = model.num_channel_states();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(nb) + 1,
                                    std::vector<int>(static_cast<std::size_t>(nh), -1));
  for (int b = 0; b <= nb; ++b)
    for (int h = 0; h < nh; ++h)
      for (int e = 0; e <= ne; ++e)
        if (policy[static_cast<std::size_t>(model.flatten({b, e, h}))] == 1) {
          out[static_cast<std::size_t>(b)][static_cast<std::size_t>(h)] = e;
          break;
        }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<PropertyReport>& reports) {
  out << "property,pass,worst_violation,witness_b,witness_e,witness_h,tolerance,caveat\n";
  for (const auto& r : reports) {
    out << r.name << ',' << (r.pass ? 1 : 0) << ',' << r.worst_violation << ',' << r.witness.b
        << ',' << r.witness.e << ',' << r.witness.h << ',' << r.tolerance << ','
        << (r.finite_buffer_caveat ? "finite_buffer_empirical" : "") << '\n';
  }
}

}  // namespace dsehs
