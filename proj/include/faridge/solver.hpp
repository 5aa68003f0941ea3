#pragma once

#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"

#include <vector>

namespace faridge {

struct SolveOptions {
    int max_iters = 5000;
    double grad_tol = 1e-9;
    double step_init = 1.0;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double min_step = 1e-14;

    void validate() const;
};

struct SolveResult {
    FactorParams params;
    double f = 0.0;
    double grad_inf = 0.0;
    int iters = 0;
    bool converged = false;
    int start_index = 0;
    /// Objective after the initial point and after every accepted step.
    std::vector<double> f_trace;
};

/// Gradient descent with Armijo backtracking. A trial step whose model
/// covariance leaves the positive-definite cone counts as objective +inf and
/// is backtracked past. Stops on grad_tol (infinity norm of the full
/// gradient), the iteration cap, or step underflow.
SolveResult minimize(const SampleCovariance& c, const FactorParams& init,
                     const SolveOptions& opts = {});

/// Runs minimize from n_starts random feasible points, start k seeded with
/// seed + k. Results are sorted by objective, ties broken lexicographically
/// over the flattened parameters, so the output is independent of thread
/// scheduling. FARIDGE_THREADS caps the worker count.
std::vector<SolveResult> multi_start(const SampleCovariance& c, int q, int n_starts,
                                     unsigned long long seed, const SolveOptions& opts = {});

struct SolutionCluster {
    SolveResult representative;
    std::vector<int> members;  // indices into the clustered result list
    double f = 0.0;
    bool is_ridge = false;
};

/// Greedy clustering: a result joins the first cluster whose representative
/// is within param_tol in parameter infinity-distance. Clusters that share an
/// objective value within f_tol with another cluster are flagged is_ridge.
std::vector<SolutionCluster> cluster_solutions(const std::vector<SolveResult>& results,
                                               double param_tol, double f_tol);

/// Infinity distance between two parameter points of equal shape.
double param_distance(const FactorParams& a, const FactorParams& b);

}  // namespace faridge
