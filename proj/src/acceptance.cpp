#include "faridge/acceptance.hpp"

#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"
#include "faridge/polysys.hpp"
#include "faridge/solver.hpp"
#include "faridge/variety.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <utility>

namespace faridge {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SampleCovariance worked_covariance() {
    SymMatrix m(2);
    m.set(0, 0, 2.0);
    m.set(0, 1, 1.0);
    m.set(1, 1, 2.0);
    return SampleCovariance(m);
}

CriterionResult criterion_gradients() {
    CriterionResult res{1, "analytic gradients match central differences", false, ""};
    const std::array<std::pair<int, int>, 4> shapes{{{2, 1}, {3, 1}, {3, 2}, {4, 2}}};
    double worst = 0.0;
    for (const auto& [p, q] : shapes) {
        std::mt19937_64 rng(9100ull + 10ull * static_cast<unsigned>(p) + static_cast<unsigned>(q));
        for (int trial = 0; trial < 100; ++trial) {
            const SampleCovariance c = random_pd_covariance(p, rng);
            const FactorParams params = random_feasible_point(p, q, rng);
            const EvalPoint pt(c, params);
            const Eigen::VectorXd va = analytic_gradient(pt).flatten();
            const Eigen::VectorXd vf = fd_gradient(pt).flatten();
            for (Eigen::Index i = 0; i < va.size(); ++i) {
                const double err = std::abs(va(i) - vf(i));
                const double tol = std::max(1e-6, 1e-6 * std::abs(va(i)));
                worst = std::max(worst, err / tol);
                if (err > tol) {
                    res.detail = "shape (" + std::to_string(p) + "," + std::to_string(q) +
                                 ") trial " + std::to_string(trial) + " component " +
                                 std::to_string(i) + ": error " + fmt(err) + " > " + fmt(tol);
                    return res;
                }
            }
        }
    }
    res.pass = true;
    res.detail = "400 random points over 4 shapes, worst error at " + fmt(worst) +
                 " of tolerance";
    return res;
}

CriterionResult criterion_curve_family() {
    CriterionResult res{2, "curve of critical points with constant objective", false, ""};
    std::mt19937_64 rng(9200);
    double worst_grad = 0.0;
    double worst_spread = 0.0;
    for (int m = 0; m < 20; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        const std::vector<CurvePoint> points = sample_curve(c, 50);
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -std::numeric_limits<double>::infinity();
        for (const CurvePoint& cp : points) {
            const CriticalReport rep = verify_critical(c, cp.params, 1.0);
            const double allowed = 1e-8 * (1.0 + std::abs(rep.f));
            worst_grad = std::max(worst_grad, rep.grad_inf / allowed);
            if (rep.grad_inf > allowed) {
                res.detail = "matrix " + std::to_string(m) + ", t = " + fmt(cp.t) +
                             ": gradient " + fmt(rep.grad_inf) + " > " + fmt(allowed);
                return res;
            }
            fmin = std::min(fmin, rep.f);
            fmax = std::max(fmax, rep.f);
        }
        const double spread = fmax - fmin;
        const double allowed = 1e-10 * (1.0 + std::abs(fmax));
        worst_spread = std::max(worst_spread, spread / allowed);
        if (spread > allowed) {
            res.detail = "matrix " + std::to_string(m) + ": objective spread " + fmt(spread) +
                         " > " + fmt(allowed);
            return res;
        }
    }
    res.pass = true;
    res.detail = "20 matrices x 50 points; worst gradient at " + fmt(worst_grad) +
                 " and spread at " + fmt(worst_spread) + " of tolerance";
    return res;
}

CriterionResult criterion_worked_example() {
    CriterionResult res{3, "worked 2x2 example values", false, ""};
    const SampleCovariance c = worked_covariance();
    const FeasibleSet fs = feasible_interval(c);
    const double lo_expect = std::sqrt(0.5);
    const double hi_expect = std::sqrt(2.0);
    if (std::abs(fs.lo - lo_expect) > 1e-15 || std::abs(fs.hi - hi_expect) > 1e-15) {
        res.detail = "interval [" + fmt(fs.lo) + ", " + fmt(fs.hi) + "] != [" + fmt(lo_expect) +
                     ", " + fmt(hi_expect) + "]";
        return res;
    }
    const double f_curve = std::log(3.0) + 2.0;
    double worst = 0.0;
    for (const CurvePoint& cp : sample_curve(c, 50)) {
        worst = std::max(worst, std::abs(objective(EvalPoint(c, cp.params)) - f_curve));
    }
    worst = std::max(worst, std::abs(objective(EvalPoint(c, curve_point(c, 1.0).params)) - f_curve));
    if (worst > 1e-12) {
        res.detail = "curve objective off by " + fmt(worst);
        return res;
    }
    const double f_isolated = std::log(4.0) + 2.0;
    double worst_iso = 0.0;
    for (const FactorParams& iso : isolated_points(c)) {
        worst_iso = std::max(worst_iso, std::abs(objective(EvalPoint(c, iso)) - f_isolated));
    }
    if (worst_iso > 1e-12) {
        res.detail = "isolated objective off by " + fmt(worst_iso);
        return res;
    }
    res.pass = true;
    res.detail = "interval endpoints exact; curve off by " + fmt(worst) + ", isolated by " +
                 fmt(worst_iso);
    return res;
}

CriterionResult criterion_decomposition() {
    CriterionResult res{4, "component residuals and Jacobian ranks", false, ""};
    std::mt19937_64 rng(9400);
    double worst_j1 = 0.0;
    for (int m = 0; m < 10; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        for (const CurvePoint& cp : sample_curve(c, 20)) {
            const DecompositionPoint lift = lift_point(c, cp.params);
            worst_j1 = std::max(worst_j1,
                                j1_residuals(lift).lpNorm<Eigen::Infinity>());
        }
    }
    if (worst_j1 > 1e-9) {
        res.detail = "curve lift residual " + fmt(worst_j1) + " > 1e-9";
        return res;
    }
    const SampleCovariance worked = worked_covariance();
    double worst_j2 = 0.0;
    for (const FactorParams& iso : isolated_points(worked)) {
        const DecompositionPoint lift = lift_point(worked, iso);
        worst_j2 = std::max(worst_j2, j2_residuals(lift).lpNorm<Eigen::Infinity>());
    }
    if (worst_j2 > 1e-12) {
        res.detail = "isolated lift residual " + fmt(worst_j2) + " > 1e-12";
        return res;
    }

    const PolynomialSystem j1 = j1_system();
    const PolynomialSystem j2 = j2_system();
    std::mt19937_64 rng2(9401);
    std::uniform_real_distribution<double> interior(0.25, 0.75);
    for (int m = 0; m < 10; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng2);
        const FeasibleSet fs = feasible_interval(c);
        const double t = fs.lo + interior(rng2) * (fs.hi - fs.lo);
        const DecompositionPoint curve_lift = lift_point(c, curve_point(c, t).params);
        const int rank1 = jacobian_rank(j1, curve_lift.to_vector());
        if (rank1 != 7) {
            res.detail = "curve lift " + std::to_string(m) + ": rank " + std::to_string(rank1) +
                         " != 7";
            return res;
        }
        const FactorParams iso = isolated_points(c)[static_cast<std::size_t>(m % 4)];
        const int rank2 = jacobian_rank(j2, lift_point(c, iso).to_vector());
        if (rank2 != 8) {
            res.detail = "isolated lift " + std::to_string(m) + ": rank " +
                         std::to_string(rank2) + " != 8";
            return res;
        }
    }
    res.pass = true;
    res.detail = "200 curve lifts at " + fmt(worst_j1) + ", 4 isolated lifts at " + fmt(worst_j2) +
                 "; ranks 7 and 8 at 10 points each";
    return res;
}

CriterionResult criterion_system_membership() {
    CriterionResult res{5, "stationarity system vanishes on critical points only", false, ""};
    std::mt19937_64 rng(9500);
    const SampleCovariance c = random_pd_covariance(2, rng);
    const PolynomialSystem sys = build_system(c, 2, 1);

    double worst_on = 0.0;
    auto residual_at = [&](const FactorParams& params) {
        const double det = determinant(model_covariance(params));
        return evaluate_system(sys, numeric_point(params, 1.0 / det)).lpNorm<Eigen::Infinity>();
    };
    for (const CurvePoint& cp : sample_curve(c, 50)) {
        worst_on = std::max(worst_on, residual_at(cp.params));
    }
    for (const FactorParams& iso : isolated_points(c)) {
        worst_on = std::max(worst_on, residual_at(iso));
    }
    if (worst_on > 1e-9) {
        res.detail = "critical-point residual " + fmt(worst_on) + " > 1e-9";
        return res;
    }

    std::mt19937_64 rng2(9501);
    std::uniform_real_distribution<double> bump(0.1, 0.2);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    const std::vector<CurvePoint> base = sample_curve(c, 100);
    double min_off = std::numeric_limits<double>::infinity();
    for (const CurvePoint& cp : base) {
        FactorParams params = cp.params;
        params.tau(0) += bump(rng2);
        params.tau(1) += jitter(rng2);
        params.beta(0, 0) += jitter(rng2);
        params.beta(0, 1) += jitter(rng2);
        min_off = std::min(min_off, residual_at(params));
    }
    if (!(min_off > 1e-3)) {
        res.detail = "perturbed residual " + fmt(min_off) + " <= 1e-3";
        return res;
    }
    res.pass = true;
    res.detail = "on-set residual at most " + fmt(worst_on) + "; perturbed at least " +
                 fmt(min_off);
    return res;
}

CriterionResult criterion_embedded_curves() {
    CriterionResult res{6, "embedded critical curves for larger shapes", false, ""};
    const std::array<std::pair<int, int>, 4> shapes{{{3, 1}, {3, 2}, {4, 2}, {5, 3}}};
    double worst = 0.0;
    for (const auto& [p, q] : shapes) {
        const SampleCovariance c = witness_covariance(p, q, 2.0, 1.0, 2.0);
        SymMatrix block(2);
        block.set(0, 0, c(0, 0));
        block.set(0, 1, c(0, 1));
        block.set(1, 1, c(1, 1));
        for (const CurvePoint& cp : sample_curve(SampleCovariance(block), 20)) {
            const FactorParams params = embed_curve(p, q, c, cp.t);
            const CriticalReport rep = verify_critical(c, params, 1e-8);
            worst = std::max(worst, rep.grad_inf);
            if (!rep.pass) {
                res.detail = "shape (" + std::to_string(p) + "," + std::to_string(q) +
                             "), t = " + fmt(cp.t) + ": gradient " + fmt(rep.grad_inf) + " > 1e-8";
                return res;
            }
        }
    }
    res.pass = true;
    res.detail = "4 shapes x 20 embedded points, worst gradient " + fmt(worst);
    return res;
}

CriterionResult criterion_multistart() {
    CriterionResult res{7, "multi-start finds one objective on separated points", false, ""};
    const SampleCovariance c = worked_covariance();
    const std::vector<SolveResult> results = multi_start(c, 1, 20, 7);
    std::vector<SolveResult> converged;
    for (const SolveResult& r : results) {
        if (r.converged) converged.push_back(r);
    }
    if (converged.size() < 2) {
        res.detail = "only " + std::to_string(converged.size()) + " of 20 starts converged";
        return res;
    }

    const std::array<FactorParams, 4> isos = isolated_points(c);
    for (const SolveResult& r : converged) {
        const SymMatrix sigma = model_covariance(r.params);
        double mismatch = 0.0;
        for (int i = 0; i < 2; ++i) {
            for (int j = i; j < 2; ++j) {
                mismatch = std::max(mismatch, std::abs(sigma(i, j) - c(i, j)));
            }
        }
        double iso_dist = std::numeric_limits<double>::infinity();
        for (const FactorParams& iso : isos) {
            iso_dist = std::min(iso_dist, param_distance(r.params, iso));
        }
        if (mismatch > 1e-6 && iso_dist > 1e-6) {
            res.detail = "start " + std::to_string(r.start_index) +
                         " converged off the critical set (mismatch " + fmt(mismatch) + ")";
            return res;
        }
    }

    const std::vector<SolutionCluster> clusters = cluster_solutions(converged, 0.05, 1e-8);
    bool found_pair = false;
    double pair_dist = 0.0;
    for (std::size_t i = 0; i < clusters.size() && !found_pair; ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            const double df = std::abs(clusters[i].f - clusters[j].f);
            const double dist =
                param_distance(clusters[i].representative.params, clusters[j].representative.params);
            if (df <= 1e-8 && dist >= 0.1 && clusters[i].is_ridge && clusters[j].is_ridge) {
                found_pair = true;
                pair_dist = dist;
                break;
            }
        }
    }
    if (!found_pair) {
        res.detail = std::to_string(clusters.size()) +
                     " clusters, none sharing an objective at parameter distance >= 0.1";
        return res;
    }
    res.pass = true;
    res.detail = std::to_string(converged.size()) + "/20 converged into " +
                 std::to_string(clusters.size()) + " clusters; ridge pair at distance " +
                 fmt(pair_dist);
    return res;
}

CriterionResult criterion_export_roundtrip() {
    CriterionResult res{8, "plain export round-trip", false, ""};
    const PolynomialSystem sys = build_symbolic_system(2, 1);
    const std::string text = export_system(sys, ExportFormat::Plain);
    const std::string again = export_system(sys, ExportFormat::Plain);
    if (text != again) {
        res.detail = "two exports of the same system differ";
        return res;
    }
    const PolynomialSystem parsed = parse_system(text);
    if (!(parsed == sys)) {
        res.detail = "parsed system differs from the original";
        return res;
    }
    if (export_system(parsed, ExportFormat::Plain) != text) {
        res.detail = "re-export of the parsed system differs byte-wise";
        return res;
    }
    res.pass = true;
    res.detail = std::to_string(sys.polys.size()) + " polynomials, " +
                 std::to_string(text.size()) + " bytes, byte-identical round-trip";
    return res;
}

CriterionResult guarded(CriterionResult (*fn)(), int id, const char* name) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return CriterionResult{id, name, false, std::string("raised: ") + e.what()};
    }
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
    std::vector<CriterionResult> out;
    out.push_back(guarded(criterion_gradients, 1, "analytic gradients match central differences"));
    out.push_back(guarded(criterion_curve_family, 2,
                          "curve of critical points with constant objective"));
    out.push_back(guarded(criterion_worked_example, 3, "worked 2x2 example values"));
    out.push_back(guarded(criterion_decomposition, 4, "component residuals and Jacobian ranks"));
    out.push_back(guarded(criterion_system_membership, 5,
                          "stationarity system vanishes on critical points only"));
    out.push_back(guarded(criterion_embedded_curves, 6,
                          "embedded critical curves for larger shapes"));
    out.push_back(guarded(criterion_multistart, 7,
                          "multi-start finds one objective on separated points"));
    out.push_back(guarded(criterion_export_roundtrip, 8, "plain export round-trip"));
    return out;
}

}  // namespace faridge
