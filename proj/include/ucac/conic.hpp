#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace ucac {

/// Composite cone: nonneg orthant block followed by second-order cone blocks.
struct ConeDims {
    int nonneg = 0;
    std::vector<int> soc;
    int total() const {
        int m = nonneg;
        for (int q : soc) m += q;
        return m;
    }
    int degree() const { return nonneg + static_cast<int>(soc.size()); }
};

/// min c'x  s.t.  Ax = b,  Gx + s = h,  s in K.
struct StandardConic {
    int n = 0;
    Eigen::SparseMatrix<double> A;  // p x n
    Eigen::SparseMatrix<double> G;  // m x n
    Eigen::VectorXd b, h, c;
    ConeDims dims;
};

enum class ConicStatus {
    optimal,
    primal_infeasible,
    dual_infeasible,  // primal unbounded
    max_iterations,
    numerical_error,
};

struct ConicSettings {
    int max_iters = 120;
    double feastol = 1e-9;
    double abstol = 1e-9;
    double reltol = 1e-9;
    double step_frac = 0.99;
    bool verbose = false;
};

struct ConicSolution {
    ConicStatus status = ConicStatus::numerical_error;
    Eigen::VectorXd x, y, z, s;
    double pobj = 0.0;
    double dobj = 0.0;
    double pres = 0.0, dres = 0.0, relgap = 0.0;
    int iterations = 0;
    std::string message;
};

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling, for linear and second-order cone rows.
ConicSolution solve_standard_conic(const StandardConic& prob,
                                   const ConicSettings& settings = {});

}  // namespace ucac
