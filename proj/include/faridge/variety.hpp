#pragma once

#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"

#include <array>
#include <vector>

namespace faridge {

/// Feasible loading range for p = 2, q = 1: t in [-hi, -lo] union [lo, hi]
/// with lo = sqrt(c12^2 / c22) and hi = sqrt(c11). degenerate marks c12 = 0,
/// where the lower endpoint collapses to 0.
struct FeasibleSet {
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate = false;

    bool contains(double t) const;
};

FeasibleSet feasible_interval(const SampleCovariance& c);

/// One point of the critical curve: beta = (t, c12/t),
/// tau = (sqrt(c11 - t^2), sqrt(c22 - c12^2/t^2)). By construction the model
/// covariance reproduces c exactly.
struct CurvePoint {
    double t = 0.0;
    FactorParams params;
};

CurvePoint curve_point(const SampleCovariance& c, double t);

/// n >= 2 curve points with t equally spaced on the positive branch
/// [lo (1+eps), hi (1-eps)], eps = 1e-6; a floor of 1e-9 keeps t away from
/// the degenerate c12 = 0 endpoint. Mirrored negative-branch points are
/// appended on request.
std::vector<CurvePoint> sample_curve(const SampleCovariance& c, int n,
                                     bool include_negative_branch = false);

/// The four isolated critical points: beta = 0,
/// tau = (+-sqrt(c11), +-sqrt(c22)), ordered (+,+), (+,-), (-,+), (-,-).
std::array<FactorParams, 4> isolated_points(const SampleCovariance& c);

/// Block-diagonal covariance with [[c11,c12],[c12,c22]] in the top-left and
/// diag(d_3,...,d_p) below; every d_k defaults to 1. Positive definite by
/// construction, enforced on the inputs.
SampleCovariance witness_covariance(int p, int q, double c11, double c12, double c22,
                                    const std::vector<double>& d = {});

/// Embeds the 2x2 curve solution into a p-dimensional, q-factor parameter
/// point for a block witness covariance: beta_11 = t, beta_12 = c12/t, every
/// other loading 0, tau_k = +sqrt(c_kk) for k >= 3, all correlations 0.
FactorParams embed_curve(int p, int q, const SampleCovariance& c, double t);

/// Residual report for one candidate critical point.
struct CriticalReport {
    double grad_inf = 0.0;
    double f = 0.0;
    double gamma = 0.0;  // 1 / det(Sigma)
    bool pass = false;
};

CriticalReport verify_critical(const SampleCovariance& c, const FactorParams& params,
                               double tol);

/// Maximum pairwise |f_i - f_j| over the given parameter points.
double ridge_spread(const std::vector<FactorParams>& points, const SampleCovariance& c);

}  // namespace faridge
