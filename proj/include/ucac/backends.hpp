#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucac/model.hpp"

namespace ucac {

enum class SolveStatus {
    optimal,      // within requested gap / tolerances
    feasible,     // has a point but no optimality certificate
    infeasible,
    unbounded,
    time_limit,
    error,
};

const char* to_string(SolveStatus s);

struct SolveRequest {
    const ModelInstance* model = nullptr;
    double gap_target = 1e-4;     // relative, mixed-integer solves
    double time_limit_s = 1e9;
    std::optional<std::vector<double>> warm_start;
    int threads = 1;
    std::uint64_t seed = 0;
    double feas_tol = 1e-8;
};

struct SolveResult {
    SolveStatus status = SolveStatus::error;
    std::vector<double> x;
    double objective = 0.0;
    double bound = -kInf;     // certified lower bound (conic / mixed-integer)
    double kkt_residual = kInf;  // NLP stationarity+feasibility residual
    double wall_s = 0.0;
    int iterations = 0;
    std::string message;

    bool has_point() const { return !x.empty(); }
};

/// Continuous conic solve (linear + rotated-cone + convex quadratic rows).
/// Model must have no unfixed binaries.
SolveResult solve_conic(const SolveRequest& req);

/// Mixed-integer conic: best-bound branch and bound over solve_conic,
/// branching on the most fractional binary, ties by lowest index.
SolveResult solve_mixed_conic(const SolveRequest& req);

/// Local NLP solve (interior point with filter line search) for smooth
/// quadratic models; returns a local optimum, bound stays -inf.
SolveResult solve_nlp_local(const SolveRequest& req);

/// Backend classes used for external adapter selection.
enum class BackendClass { conic, mixed_conic, nlp };

/// Configure an external adapter command for a backend class (empty string
/// restores the built-in). Also reads UCAC_BACKEND_CONIC,
/// UCAC_BACKEND_MIXED_CONIC and UCAC_BACKEND_NLP at first use.
void set_backend_command(BackendClass cls, const std::string& command);
std::string backend_command(BackendClass cls);

/// Run one solve through the adapter protocol: write the problem JSON,
/// invoke `cmd <problem> <result>`, read the result JSON.
SolveResult solve_via_adapter(const std::string& cmd, const SolveRequest& req);

std::string result_to_json(const SolveResult& r);
SolveResult result_from_json(const std::string& text);

}  // namespace ucac
