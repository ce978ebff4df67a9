#pragma once

#include <iosfwd>
#include <string>

#include "dsehs/model.hpp"
#include "dsehs/solver.hpp"

namespace dsehs {

// Solution table format: CSV with columns index,b,e,h,V,V_pds,action and one
// row per flattened state, in index order. Values are written with full
// double precision so a reload round-trips exactly.
void write_solution_csv(std::ostream& out, const Model& model, const Solution& sol);
void save_solution(const std::string& path, const Model& model, const Solution& sol);

// Loads a solution written by save_solution; validates the grid shape and
// policy feasibility against the model.
Solution load_solution(const std::string& path, const Model& model);

}  // namespace dsehs
