#include "dsehs/table_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dsehs {

void write_solution_csv(std::ostream& out, const Model& model, const Solution& sol) {
  const int n = model.num_states();
  if (static_cast<int>(sol.value.size()) != n || static_cast<int>(sol.pds_value.size()) != n ||
      static_cast<int>(sol.policy.size()) != n)
    throw std::invalid_argument("write_solution_csv: table sizes do not match the grid");
  out << "index,b,e,h,V,V_pds,action\n";
  out << std::setprecision(17);
  for (int i = 0; i < n; ++i) {
    const StateIndex s = model.unflatten(i);
    out << i << ',' << s.b << ',' << s.e << ',' << s.h << ',' << sol.value[static_cast<std::size_t>(i)]
        << ',' << sol.pds_value[static_cast<std::size_t>(i)] << ','
        << sol.policy[static_cast<std::size_t>(i)] << '\n';
  }
}

void save_solution(const std::string& path, const Model& model, const Solution& sol) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_solution_csv(out, model, sol);
}

Solution load_solution(const std::string& path, const Model& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,b,e,h,V,V_pds,action", 0) != 0)
    throw std::runtime_error(path + ": missing solution header row");

  const int n = model.num_states();
  Solution sol;
  sol.value.assign(static_cast<std::size_t>(n), 0.0);
  sol.pds_value.assign(static_cast<std::size_t>(n), 0.0);
  sol.policy.assign(static_cast<std::size_t>(n), 0);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    int idx, b, e, h, action;
    double v, pds;
    char c;
    if (!(row >> idx >> c >> b >> c >> e >> c >> h >> c >> v >> c >> pds >> c >> action))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    if (idx < 0 || idx >= n)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": index out of range");
    const StateIndex s = model.unflatten(idx);
    if (s.b != b || s.e != e || s.h != h)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": coordinates disagree with the model grid");
    if (!model.is_feasible(b, e, action))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": infeasible policy action");
    sol.value[static_cast<std::size_t>(idx)] = v;
    sol.pds_value[static_cast<std::size_t>(idx)] = pds;
    sol.policy[static_cast<std::size_t>(idx)] = action;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw std::runtime_error(path + ": missing row for state index " + std::to_string(i));
  sol.report.converged = true;
  return sol;
}

}  // namespace dsehs
