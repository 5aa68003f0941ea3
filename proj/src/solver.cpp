#include "faridge/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace faridge {

void SolveOptions::validate() const {
    if (max_iters < 1) throw UsageError("max_iters must be positive");
    if (!(grad_tol > 0.0)) throw UsageError("grad_tol must be positive");
    if (!(step_init > 0.0)) throw UsageError("step_init must be positive");
    if (!(armijo_c > 0.0)) throw UsageError("armijo_c must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw UsageError("backtrack must be in (0,1)");
    if (!(min_step > 0.0)) throw UsageError("min_step must be positive");
}

namespace {

double objective_or_inf(const SampleCovariance& c, const FactorParams& params) {
    try {
        return objective(EvalPoint(c, params));
    } catch (const InfeasiblePointError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

SolveResult minimize(const SampleCovariance& c, const FactorParams& init,
                     const SolveOptions& opts) {
    opts.validate();
    init.validate();

    SolveResult result;
    result.params = init;
    try {
        result.f = objective(EvalPoint(c, init));
    } catch (const InfeasiblePointError& e) {
        throw UsageError(std::string("initial point is infeasible: ") + e.what());
    }
    result.f_trace.push_back(result.f);

    Eigen::VectorXd x = flatten(init);
    const int p = init.p;
    const int q = init.q;

    while (true) {
        const GradientBundle g = analytic_gradient(EvalPoint(c, result.params));
        result.grad_inf = g.inf_norm();
        if (result.grad_inf <= opts.grad_tol) {
            result.converged = true;
            return result;
        }
        if (result.iters >= opts.max_iters) {
            return result;
        }

        const Eigen::VectorXd direction = g.flatten();
        const double decrement = direction.squaredNorm();
        double step = opts.step_init;
        bool accepted = false;
        while (step >= opts.min_step) {
            const FactorParams trial = unflatten(p, q, x - step * direction);
            const double f_trial = objective_or_inf(c, trial);
            if (f_trial <= result.f - opts.armijo_c * step * decrement) {
                x -= step * direction;
                result.params = trial;
                result.f = f_trial;
                result.f_trace.push_back(f_trial);
                ++result.iters;
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            return result;
        }
    }
}

namespace {

int worker_count(int n_starts) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("FARIDGE_THREADS")) {
        char* end = nullptr;
        const long requested = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && requested >= 1) {
            threads = static_cast<int>(requested);
        }
    }
    return std::min(threads, n_starts);
}

bool result_less(const SolveResult& a, const SolveResult& b) {
    if (a.f != b.f) return a.f < b.f;
    const Eigen::VectorXd fa = flatten(a.params);
    const Eigen::VectorXd fb = flatten(b.params);
    for (Eigen::Index i = 0; i < std::min(fa.size(), fb.size()); ++i) {
        if (fa(i) != fb(i)) return fa(i) < fb(i);
    }
    if (fa.size() != fb.size()) return fa.size() < fb.size();
    return a.start_index < b.start_index;
}

}  // namespace

std::vector<SolveResult> multi_start(const SampleCovariance& c, int q, int n_starts,
                                     unsigned long long seed, const SolveOptions& opts) {
    opts.validate();
    if (n_starts < 1) throw UsageError("multi_start needs at least one start");
    if (q < 1 || q >= c.dim()) {
        throw UsageError("factor count q = " + std::to_string(q) + " must be in [1, " +
                         std::to_string(c.dim() - 1) + "]");
    }

    std::vector<SolveResult> results(static_cast<std::size_t>(n_starts));
    std::atomic<int> next{0};
    auto run_start = [&](int k) {
        std::mt19937_64 rng(seed + static_cast<unsigned long long>(k));
        const FactorParams init = random_feasible_point(c.dim(), q, rng);
        SolveResult r = minimize(c, init, opts);
        r.start_index = k;
        results[static_cast<std::size_t>(k)] = std::move(r);
    };

    const int threads = worker_count(n_starts);
    if (threads <= 1) {
        for (int k = 0; k < n_starts; ++k) run_start(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    const int k = next.fetch_add(1);
                    if (k >= n_starts || failed.load()) return;
                    try {
                        run_start(k);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::sort(results.begin(), results.end(), result_less);
    return results;
}

double param_distance(const FactorParams& a, const FactorParams& b) {
    if (a.p != b.p || a.q != b.q) {
        throw UsageError("parameter points have different shapes");
    }
    return (flatten(a) - flatten(b)).lpNorm<Eigen::Infinity>();
}

std::vector<SolutionCluster> cluster_solutions(const std::vector<SolveResult>& results,
                                               double param_tol, double f_tol) {
    if (!(param_tol >= 0.0) || !(f_tol >= 0.0)) {
        throw UsageError("cluster tolerances must be nonnegative");
    }
    std::vector<SolutionCluster> clusters;
    for (std::size_t i = 0; i < results.size(); ++i) {
        bool placed = false;
        for (SolutionCluster& cluster : clusters) {
            if (param_distance(results[i].params, cluster.representative.params) <= param_tol) {
                cluster.members.push_back(static_cast<int>(i));
                placed = true;
                break;
            }
        }
        if (!placed) {
            SolutionCluster cluster;
            cluster.representative = results[i];
            cluster.members.push_back(static_cast<int>(i));
            cluster.f = results[i].f;
            clusters.push_back(std::move(cluster));
        }
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            if (std::abs(clusters[i].f - clusters[j].f) <= f_tol) {
                clusters[i].is_ridge = true;
                clusters[j].is_ridge = true;
            }
        }
    }
    return clusters;
}

}  // namespace faridge
