#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dsehs/model.hpp"
#include "dsehs/solver.hpp"

namespace dsehs {

enum class Axis { Buffer, Battery };
enum class Direction { NonDecreasing, NonIncreasing };

// Outcome of one structural check. worst_violation is the largest signed
// amount by which the checked inequality is broken (<= 0 means it held
// everywhere); witness is the grid coordinate achieving it.
struct PropertyReport {
  std::string name;
  bool pass = false;
  double worst_violation = 0.0;
  StateIndex witness;
  double tolerance = 0.0;
  bool finite_buffer_caveat = false;
};

PropertyReport check_monotone(const Model& model, const ValueTable& table, Axis axis,
                              Direction dir, double tol, const std::string& name);

// Increasing differences along one axis: f(n+1) - f(n) >= f(n) - f(n-1).
PropertyReport check_increasing_differences(const Model& model, const ValueTable& table,
                                            Axis axis, double tol, const std::string& name);

// Decreasing cross-differences in (b, e) on every unit square at every h.
PropertyReport check_submodular(const Model& model, const ValueTable& table, double tol,
                                const std::string& name);

// First-order stochastic dominance of the buffer/battery kernels in their own
// coordinate, over every action, threshold, and (for the buffer) channel state.
PropertyReport check_stochastic_dominance(const Model& model, Axis axis);

// Identity expressing V through the PDS table and the chosen action.
PropertyReport check_value_decomposition(const Model& model, const ValueTable& value,
                                         const ValueTable& pds, const Policy& policy, double tol);

// Auxiliary cost non-decreasing in b and non-increasing in e, all (b,e,h,a).
PropertyReport check_cost_monotonicity(const Model& model);

// Solves the instance and runs every structural check at the default
// tolerances (1e-9 for value-table inequalities, 1e-8 for the decomposition,
// 1e-12 for exact kernel arithmetic).
std::vector<PropertyReport> run_full_suite(const Model& model, double theta = 1e-6,
                                           int tau_max = 100000);

// Same checks against an externally supplied solution triple.
std::vector<PropertyReport> run_full_suite(const Model& model, const Solution& sol,
                                           double theta = 1e-6);

// Descriptive only: per (b, h), the minimum battery level at which the policy
// transmits, or -1 when it never does.
std::vector<std::vector<int>> transmit_thresholds(const Model& model, const Policy& policy);

void write_report_csv(std::ostream& out, const std::vector<PropertyReport>& reports);

}  // namespace dsehs
