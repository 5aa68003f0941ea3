#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"
#include "faridge/solver.hpp"
#include "faridge/variety.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

using namespace faridge;

namespace {

SampleCovariance worked_c() {
    return SampleCovariance(SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
}

FactorParams point21(double tau1, double tau2, double b1, double b2) {
    FactorParams params;
    params.p = 2;
    params.q = 1;
    params.tau = Eigen::VectorXd(2);
    params.tau << tau1, tau2;
    params.beta = Eigen::MatrixXd(1, 2);
    params.beta << b1, b2;
    params.r = Eigen::VectorXd(0);
    return params;
}

bool same_results(const std::vector<SolveResult>& a, const std::vector<SolveResult>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].f != b[i].f) return false;
        if (a[i].start_index != b[i].start_index) return false;
        if (a[i].converged != b[i].converged) return false;
        if (flatten(a[i].params) != flatten(b[i].params)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("options validate their ranges") {
    SolveOptions opts;
    CHECK_NOTHROW(opts.validate());
    opts.max_iters = 0;
    CHECK_THROWS_AS(opts.validate(), UsageError);
    opts = SolveOptions{};
    opts.backtrack = 1.0;
    CHECK_THROWS_AS(opts.validate(), UsageError);
    opts = SolveOptions{};
    opts.grad_tol = -1e-9;
    CHECK_THROWS_AS(opts.validate(), UsageError);
}

TEST_CASE("a critical initial point converges in zero iterations") {
    const CurvePoint cp = curve_point(worked_c(), 1.0);
    const SolveResult res = minimize(worked_c(), cp.params);
    CHECK(res.converged);
    CHECK(res.iters == 0);
    CHECK(res.f == doctest::Approx(std::log(3.0) + 2.0).epsilon(1e-12));
}

TEST_CASE("the worked start descends to the ridge value") {
    const SolveResult res = minimize(worked_c(), point21(1.2, 0.9, 0.8, 0.4));
    CHECK(res.converged);
    CHECK(res.grad_inf <= 1e-9);
    CHECK(std::abs(res.f - (std::log(3.0) + 2.0)) <= 1e-8);
}

TEST_CASE("accepted steps never increase the objective") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        const SolveResult res = minimize(c, random_feasible_point(2, 1, rng));
        REQUIRE(res.f_trace.size() >= 1);
        for (std::size_t i = 1; i < res.f_trace.size(); ++i) {
            CHECK(res.f_trace[i] <= res.f_trace[i - 1]);
        }
        CHECK(res.f == doctest::Approx(res.f_trace.back()));
    }
}

TEST_CASE("convergence implies the gradient tolerance") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        const SolveResult res = minimize(c, random_feasible_point(2, 1, rng));
        if (res.converged) {
            CHECK(res.grad_inf <= SolveOptions{}.grad_tol);
            CHECK(verify_critical(c, res.params, 1e-8).pass);
        }
    }
}

TEST_CASE("an infeasible start is a usage error") {
    CHECK_THROWS_AS(minimize(worked_c(), point21(0.0, 0.0, 1.0, 0.0)), UsageError);
}

TEST_CASE("multi-start output is sorted and deterministic") {
    const std::vector<SolveResult> a = multi_start(worked_c(), 1, 12, 7);
    const std::vector<SolveResult> b = multi_start(worked_c(), 1, 12, 7);
    CHECK(same_results(a, b));
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].f <= a[i].f);

    const std::vector<SolveResult> other = multi_start(worked_c(), 1, 12, 8);
    CHECK_FALSE(same_results(a, other));
}

TEST_CASE("thread count does not change the result list") {
    setenv("FARIDGE_THREADS", "1", 1);
    const std::vector<SolveResult> serial = multi_start(worked_c(), 1, 8, 3);
    setenv("FARIDGE_THREADS", "4", 1);
    const std::vector<SolveResult> parallel = multi_start(worked_c(), 1, 8, 3);
    unsetenv("FARIDGE_THREADS");
    CHECK(same_results(serial, parallel));
}

TEST_CASE("converged points land on the ridge or an isolated point") {
    const std::vector<SolveResult> results = multi_start(worked_c(), 1, 20, 7);
    const std::array<FactorParams, 4> isolated = isolated_points(worked_c());
    int converged = 0;
    for (const SolveResult& res : results) {
        if (!res.converged) continue;
        ++converged;
        const SymMatrix sigma = model_covariance(res.params);
        double mismatch = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j)
                mismatch = std::max(mismatch, std::abs(sigma(i, j) - worked_c()(i, j)));
        bool near_isolated = false;
        for (const FactorParams& iso : isolated) {
            if (param_distance(res.params, iso) <= 1e-6) near_isolated = true;
        }
        CHECK((mismatch <= 1e-6 || near_isolated));
    }
    CHECK(converged >= 2);
}

TEST_CASE("separated starts reach one objective value") {
    const std::vector<SolveResult> results = multi_start(worked_c(), 1, 20, 7);
    std::vector<SolveResult> converged;
    for (const SolveResult& res : results)
        if (res.converged) converged.push_back(res);
    REQUIRE(converged.size() >= 2);

    bool found_pair = false;
    for (std::size_t i = 0; i < converged.size() && !found_pair; ++i) {
        for (std::size_t j = i + 1; j < converged.size(); ++j) {
            if (std::abs(converged[i].f - converged[j].f) <= 1e-8 &&
                param_distance(converged[i].params, converged[j].params) >= 0.1) {
                found_pair = true;
                break;
            }
        }
    }
    CHECK(found_pair);
}

TEST_CASE("clustering the worked run flags the ridge") {
    const std::vector<SolveResult> results = multi_start(worked_c(), 1, 20, 7);
    std::vector<SolveResult> converged;
    for (const SolveResult& res : results)
        if (res.converged) converged.push_back(res);
    const std::vector<SolutionCluster> clusters = cluster_solutions(converged, 0.05, 1e-8);
    int ridge_clusters = 0;
    for (const SolutionCluster& cluster : clusters)
        if (cluster.is_ridge) ++ridge_clusters;
    CHECK(ridge_clusters >= 2);
}

TEST_CASE("clustering edge cases") {
    const SolveResult base = minimize(worked_c(), point21(1.2, 0.9, 0.8, 0.4));
    const std::vector<SolveResult> duplicated = {base, base, base};
    const std::vector<SolutionCluster> one = cluster_solutions(duplicated, 0.05, 1e-8);
    REQUIRE(one.size() == 1);
    CHECK(one[0].members.size() == 3);
    CHECK_FALSE(one[0].is_ridge);

    const std::vector<SolveResult> spread = multi_start(worked_c(), 1, 10, 7);
    const std::vector<SolutionCluster> merged =
        cluster_solutions(spread, std::numeric_limits<double>::infinity(), 1e-8);
    CHECK(merged.size() == 1);

    CHECK(cluster_solutions({}, 0.05, 1e-8).empty());
    CHECK_THROWS_AS(cluster_solutions(duplicated, -1.0, 1e-8), UsageError);
    CHECK_THROWS_AS(cluster_solutions(duplicated, 0.05, -1e-8), UsageError);
}

TEST_CASE("parameter distance requires matching shapes") {
    const FactorParams a = point21(1, 1, 1, 1);
    const FactorParams b = point21(1, 1, 0.5, 1);
    CHECK(param_distance(a, b) == doctest::Approx(0.5));
    std::mt19937_64 rng(53);
    const FactorParams c = random_feasible_point(3, 1, rng);
    CHECK_THROWS_AS(param_distance(a, c), UsageError);
}

TEST_CASE("multi-start validates its inputs") {
    CHECK_THROWS_AS(multi_start(worked_c(), 1, 0, 7), UsageError);
    CHECK_THROWS_AS(multi_start(worked_c(), 2, 4, 7), UsageError);
}
