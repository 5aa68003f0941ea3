#include "faridge/variety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace faridge {

namespace {

double boundary_slack(double scale) { return 1e-12 * std::max(1.0, std::abs(scale)); }

// Clamps a tiny negative variance produced by cancellation at the interval
// endpoints; anything below the slack is a genuine infeasibility.
double clamp_variance(double v, double scale) {
    if (v >= 0.0) return v;
    if (v >= -boundary_slack(scale)) return 0.0;
    throw InfeasiblePointError("negative variance " + std::to_string(v) +
                               " outside the feasible loading range");
}

}  // namespace

bool FeasibleSet::contains(double t) const {
    const double a = std::abs(t);
    const double slack = boundary_slack(hi);
    return a >= lo - slack && a <= hi + slack;
}

FeasibleSet feasible_interval(const SampleCovariance& c) {
    if (c.dim() != 2) {
        throw UsageError("feasible_interval requires a 2x2 covariance, got dim " +
                         std::to_string(c.dim()));
    }
    const double c11 = c(0, 0);
    const double c12 = c(0, 1);
    const double c22 = c(1, 1);
    FeasibleSet fs;
    fs.lo = std::sqrt(c12 * c12 / c22);
    fs.hi = std::sqrt(c11);
    fs.degenerate = (c12 == 0.0);
    return fs;
}

CurvePoint curve_point(const SampleCovariance& c, double t) {
    const FeasibleSet fs = feasible_interval(c);
    if (t == 0.0) {
        throw UsageError("curve point at t = 0 is undefined (division by the loading)");
    }
    if (!fs.contains(t)) {
        throw UsageError("loading t = " + std::to_string(t) +
                         " outside the feasible range [" + std::to_string(fs.lo) + ", " +
                         std::to_string(fs.hi) + "]");
    }
    const double c11 = c(0, 0);
    const double c12 = c(0, 1);
    const double c22 = c(1, 1);

    FactorParams params;
    params.p = 2;
    params.q = 1;
    params.beta.resize(1, 2);
    params.beta(0, 0) = t;
    params.beta(0, 1) = c12 / t;
    params.tau.resize(2);
    params.tau(0) = std::sqrt(clamp_variance(c11 - t * t, c11));
    params.tau(1) = std::sqrt(clamp_variance(c22 - (c12 / t) * (c12 / t), c22));
    params.r.resize(0);
    params.validate();
    return CurvePoint{t, std::move(params)};
}

std::vector<CurvePoint> sample_curve(const SampleCovariance& c, int n,
                                     bool include_negative_branch) {
    if (n < 2) {
        throw UsageError("sample_curve needs at least 2 points, got " + std::to_string(n));
    }
    const FeasibleSet fs = feasible_interval(c);
    constexpr double eps = 1e-6;
    const double start = std::max(fs.lo * (1.0 + eps), 1e-9);
    const double end = fs.hi * (1.0 - eps);
    if (!(start < end)) {
        throw UsageError("feasible loading range [" + std::to_string(fs.lo) + ", " +
                         std::to_string(fs.hi) + "] is too narrow to sample");
    }
    std::vector<CurvePoint> points;
    points.reserve(include_negative_branch ? 2 * static_cast<std::size_t>(n)
                                           : static_cast<std::size_t>(n));
    const double step = (end - start) / (n - 1);
    for (int i = 0; i < n; ++i) {
        points.push_back(curve_point(c, start + step * i));
    }
    if (include_negative_branch) {
        for (int i = 0; i < n; ++i) {
            points.push_back(curve_point(c, -(start + step * i)));
        }
    }
    return points;
}

std::array<FactorParams, 4> isolated_points(const SampleCovariance& c) {
    if (c.dim() != 2) {
        throw UsageError("isolated_points requires a 2x2 covariance, got dim " +
                         std::to_string(c.dim()));
    }
    const double s1 = std::sqrt(c(0, 0));
    const double s2 = std::sqrt(c(1, 1));
    std::array<FactorParams, 4> out;
    const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (int k = 0; k < 4; ++k) {
        FactorParams params;
        params.p = 2;
        params.q = 1;
        params.beta = Eigen::MatrixXd::Zero(1, 2);
        params.tau.resize(2);
        params.tau(0) = signs[k][0] * s1;
        params.tau(1) = signs[k][1] * s2;
        params.r.resize(0);
        params.validate();
        out[static_cast<std::size_t>(k)] = std::move(params);
    }
    return out;
}

SampleCovariance witness_covariance(int p, int q, double c11, double c12, double c22,
                                    const std::vector<double>& d) {
    if (p < 2) {
        throw UsageError("witness covariance needs p >= 2, got " + std::to_string(p));
    }
    if (q < 1 || q >= p) {
        throw UsageError("witness covariance needs 1 <= q < p, got q = " + std::to_string(q));
    }
    if (!(c11 > 0.0) || !(c22 > 0.0) || !(c11 * c22 - c12 * c12 > 0.0)) {
        throw UsageError("witness 2x2 block is not positive definite");
    }
    std::vector<double> diag = d;
    if (diag.empty()) {
        diag.assign(static_cast<std::size_t>(p - 2), 1.0);
    }
    if (static_cast<int>(diag.size()) != p - 2) {
        throw UsageError("witness needs " + std::to_string(p - 2) + " tail variances, got " +
                         std::to_string(diag.size()));
    }
    for (std::size_t k = 0; k < diag.size(); ++k) {
        if (!(diag[k] > 0.0)) {
            throw UsageError("witness tail variance d_" + std::to_string(k + 3) +
                             " must be positive, got " + std::to_string(diag[k]));
        }
    }
    SymMatrix m(p);
    m.set(0, 0, c11);
    m.set(0, 1, c12);
    m.set(1, 1, c22);
    for (int k = 2; k < p; ++k) {
        m.set(k, k, diag[static_cast<std::size_t>(k - 2)]);
    }
    return SampleCovariance(m);
}

FactorParams embed_curve(int p, int q, const SampleCovariance& c, double t) {
    if (c.dim() != p) {
        throw UsageError("embed_curve covariance dim " + std::to_string(c.dim()) +
                         " does not match p = " + std::to_string(p));
    }
    if (p < 3 || q < 1 || q >= p) {
        throw UsageError("embed_curve needs p >= 3 and 1 <= q < p");
    }
    SymMatrix block(2);
    block.set(0, 0, c(0, 0));
    block.set(0, 1, c(0, 1));
    block.set(1, 1, c(1, 1));
    const CurvePoint base = curve_point(SampleCovariance(block), t);

    FactorParams params;
    params.p = p;
    params.q = q;
    params.beta = Eigen::MatrixXd::Zero(q, p);
    params.beta(0, 0) = base.params.beta(0, 0);
    params.beta(0, 1) = base.params.beta(0, 1);
    params.tau.resize(p);
    params.tau(0) = base.params.tau(0);
    params.tau(1) = base.params.tau(1);
    for (int k = 2; k < p; ++k) {
        params.tau(k) = std::sqrt(c(k, k));
    }
    params.r = Eigen::VectorXd::Zero(FactorParams::r_size(q));
    params.validate();
    return params;
}

CriticalReport verify_critical(const SampleCovariance& c, const FactorParams& params,
                               double tol) {
    const EvalPoint pt(c, params);
    const GradientBundle g = analytic_gradient(pt);
    const SymMatrix sigma = model_covariance(params);
    const DetInverse di = det_adjugate_inverse(sigma);
    CriticalReport report;
    report.grad_inf = g.inf_norm();
    report.f = objective(pt);
    report.gamma = 1.0 / di.det;
    report.pass = report.grad_inf <= tol;
    return report;
}

double ridge_spread(const std::vector<FactorParams>& points, const SampleCovariance& c) {
    if (points.size() < 2) {
        throw UsageError("ridge_spread needs at least 2 points, got " +
                         std::to_string(points.size()));
    }
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -std::numeric_limits<double>::infinity();
    for (const FactorParams& params : points) {
        const double f = objective(EvalPoint(c, params));
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    return fmax - fmin;
}

}  // namespace faridge
