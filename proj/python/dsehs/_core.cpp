#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dsehs/config.hpp"
#include "dsehs/sim.hpp"
#include "dsehs/solver.hpp"
#include "dsehs/structure.hpp"
#include "dsehs/table_io.hpp"

namespace py = pybind11;
using namespace dsehs;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-harvesting transmission scheduling: MDP solver, structural checks, simulator";

  py::class_<Pmf>(m, "Pmf")
      .def(py::init<int, std::vector<double>>(), py::arg("offset"), py::arg("probs"))
      .def_readonly("offset", &Pmf::offset)
      .def_readonly("probs", &Pmf::probs)
      .def("mean", &Pmf::mean)
      .def_static("bernoulli", &Pmf::bernoulli)
      .def_static("point", &Pmf::point);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("buffer_capacity", &ModelConfig::buffer_capacity)
      .def_readwrite("battery_capacity", &ModelConfig::battery_capacity)
      .def_readwrite("plr", &ModelConfig::plr)
      .def_readwrite("channel_kernel", &ModelConfig::channel_kernel)
      .def_readwrite("arrival_pmf", &ModelConfig::arrival_pmf)
      .def_readwrite("harvest_pmf", &ModelConfig::harvest_pmf)
      .def_readwrite("tx_energy", &ModelConfig::tx_energy)
      .def_readwrite("overflow_penalty", &ModelConfig::overflow_penalty)
      .def_readwrite("discount", &ModelConfig::discount)
      .def("validate", &ModelConfig::validate)
      .def_static("birth_death_kernel", &ModelConfig::birth_death_kernel)
      .def_static("reference", &ModelConfig::reference, py::arg("arrival_p") = 0.4)
      .def_static("tiny", &ModelConfig::tiny, py::arg("arrival_p") = 0.4, py::arg("gamma") = 0.9);

  m.def("parse_config_file", &parse_config_file);
  m.def("parse_config_text", &parse_config_text);

  py::class_<StateIndex>(m, "StateIndex")
      .def(py::init<int, int, int>(), py::arg("b"), py::arg("e"), py::arg("h"))
      .def_readwrite("b", &StateIndex::b)
      .def_readwrite("e", &StateIndex::e)
      .def_readwrite("h", &StateIndex::h)
      .def("__repr__", [](const StateIndex& s) {
        std::ostringstream o;
        o << "StateIndex(b=" << s.b << ", e=" << s.e << ", h=" << s.h << ")";
        return o.str();
      });

  py::class_<Model>(m, "Model")
      .def(py::init<ModelConfig>())
      .def_property_readonly("num_states", &Model::num_states)
      .def("flatten", &Model::flatten)
      .def("unflatten", &Model::unflatten)
      .def("feasible_actions", &Model::feasible_actions)
      .def("buffer_cost", &Model::buffer_cost)
      .def("stationary_channel", &Model::stationary_channel, py::arg("tol") = 1e-14,
           py::arg("max_iter") = 1000000);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual", &SolveReport::residual)
      .def_readonly("residual_history", &SolveReport::residual_history)
      .def_readonly("wall_time_s", &SolveReport::wall_time_s)
      .def_readonly("converged", &SolveReport::converged);

  py::class_<Solution>(m, "Solution")
      .def_readonly("pds_value", &Solution::pds_value)
      .def_readonly("value", &Solution::value)
      .def_readonly("policy", &Solution::policy)
      .def_readonly("report", &Solution::report);

  m.def("pds_value_iteration", &pds_value_iteration, py::arg("model"), py::arg("theta") = 1e-6,
        py::arg("tau_max") = 100000);
  m.def("exact_policy_evaluation", &exact_policy_evaluation);
  m.def("brute_force_optimal", &brute_force_optimal, py::arg("model"),
        py::arg("max_policies") = std::uint64_t{1} << 20);

  py::class_<PropertyReport>(m, "PropertyReport")
      .def_readonly("name", &PropertyReport::name)
      .def_readonly("passed", &PropertyReport::pass)
      .def_readonly("worst_violation", &PropertyReport::worst_violation)
      .def_readonly("witness", &PropertyReport::witness)
      .def_readonly("tolerance", &PropertyReport::tolerance)
      .def_readonly("finite_buffer_caveat", &PropertyReport::finite_buffer_caveat);

  m.def("run_full_suite", py::overload_cast<const Model&, double, int>(&run_full_suite),
        py::arg("model"), py::arg("theta") = 1e-6, py::arg("tau_max") = 100000);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("avg_backlog", &Metrics::avg_backlog)
      .def_readonly("avg_battery", &Metrics::avg_battery)
      .def_readonly("overflow_prob", &Metrics::overflow_prob)
      .def_readonly("overflow_per_slot", &Metrics::overflow_per_slot)
      .def_readonly("outage_prob", &Metrics::outage_prob)
      .def_readonly("throughput", &Metrics::throughput)
      .def_readonly("delay", &Metrics::delay);

  m.def(
      "simulate_policy",
      [](const Model& model, const std::string& policy, int horizon, std::uint64_t seed,
         double theta, int tau_max) {
        PolicyRule rule;
        if (policy == "greedy") {
          rule = greedy_rule(model);
        } else if (policy == "optimal") {
          rule = table_rule(model, pds_value_iteration(model, theta, tau_max).policy);
        } else {
          throw std::invalid_argument("policy must be 'optimal' or 'greedy'");
        }
        return compute_metrics(simulate(model, rule, horizon, seed));
      },
      py::arg("model"), py::arg("policy"), py::arg("horizon") = 50000, py::arg("seed") = 1,
      py::arg("theta") = 1e-6, py::arg("tau_max") = 100000);
}
