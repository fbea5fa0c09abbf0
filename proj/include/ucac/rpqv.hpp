#pragma once

#include <string>
#include <vector>

#include "ucac/case.hpp"
#include "ucac/model.hpp"
#include "ucac/solution.hpp"
#include "ucac/uc_model.hpp"

namespace ucac {

/// Add the rectangular power-voltage network block: bus balances, branch
/// flow definitions, voltage box and apparent-power circles. Declares the
/// voltage and flow variables of the layout. One reference bus per
/// connected component gets v_j = 0, v_r >= 0.
void add_rpqv_voltage(ModelInstance& m, const VariableLayout& lay, const NetworkCase& c);

struct ResidualFamily {
    std::string name;
    double max_abs = 0.0;
    double l1 = 0.0;
};

struct ResidualReport {
    std::vector<ResidualFamily> families;
    double max_abs = 0.0;
    bool ac_feasible(double tol = 1e-6) const { return max_abs <= tol; }
};

/// Physical residuals of a voltage-space solution against the network
/// equations and limits (violations only for inequality families).
ResidualReport rpqv_residuals(const SolutionPoint& sol, const NetworkCase& c);

/// Branch flows implied by a voltage point (evaluating the flow equations).
void flows_from_voltage(const NetworkCase& c, SolutionPoint& sol);

}  // namespace ucac
