#include "faridge/likelihood.hpp"

#include <cmath>

namespace faridge {

namespace {

struct Feasible {
    SymMatrix sigma;
    double det;
    Eigen::MatrixXd cof;  // cofactor matrix of sigma (symmetric)
    Eigen::MatrixXd inv;  // adjugate inverse cof / det
};

// Shared feasibility gate: Sigma nonsingular with det > 0.
Feasible factor_sigma(const FactorParams& params) {
    const SymMatrix sigma = model_covariance(params);
    const double det = determinant(sigma);
    if (std::abs(det) <= singularity_threshold(sigma) || det == 0.0)
        throw InfeasiblePointError("model covariance is singular");
    if (det < 0.0)
        throw InfeasiblePointError("model covariance has negative determinant");
    const int p = sigma.dim();
    Eigen::MatrixXd cof(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double v = cofactor(sigma, i, j);
            cof(i, j) = v;
            cof(j, i) = v;
        }
    return Feasible{sigma, det, cof, cof / det};
}

double objective_from(const SampleCovariance& c, const Feasible& fs) {
    const int p = fs.sigma.dim();
    double tr = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) tr += c(i, j) * fs.inv(j, i);
    return std::log(fs.det) + tr;
}

// Perturbation of Sigma for one loading entry (k,l):
// D_ij = delta_il (R beta)_kj + delta_jl (R beta)_ki.
Eigen::MatrixXd beta_perturbation(const Eigen::MatrixXd& rbeta, int k, int l, int p) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        d(l, j) += rbeta(k, j);
        d(j, l) += rbeta(k, j);
    }
    return d;
}

}  // namespace

EvalPoint::EvalPoint(SampleCovariance c_, FactorParams params_)
    : c(std::move(c_)), params(std::move(params_)) {
    params.validate();
    if (c.dim() != params.p)
        throw UsageError("EvalPoint: covariance dim " + std::to_string(c.dim()) +
                         " does not match p = " + std::to_string(params.p));
}

double objective(const EvalPoint& pt) {
    return objective_from(pt.c, factor_sigma(pt.params));
}

Eigen::VectorXd grad_tau(const EvalPoint& pt) {
    const Feasible fs = factor_sigma(pt.params);
    const int p = pt.params.p;
    Eigen::VectorXd g(p);
    for (int k = 0; k < p; ++k) {
        double quad = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) quad += pt.c(i, j) * fs.cof(j, k) * fs.cof(k, i);
        g[k] = 2.0 * pt.params.tau[k] * fs.cof(k, k) / fs.det -
               2.0 * pt.params.tau[k] * quad / (fs.det * fs.det);
    }
    return g;
}

Eigen::MatrixXd grad_beta(const EvalPoint& pt) {
    const Feasible fs = factor_sigma(pt.params);
    const int p = pt.params.p;
    const int q = pt.params.q;
    const Eigen::MatrixXd rbeta = pt.params.correlation_matrix() * pt.params.beta;
    const Eigen::MatrixXd cmat = pt.c.matrix().to_eigen();
    Eigen::MatrixXd g(q, p);
    for (int k = 0; k < q; ++k) {
        for (int l = 0; l < p; ++l) {
            const Eigen::MatrixXd d = beta_perturbation(rbeta, k, l, p);
            double term1 = 0.0;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) term1 += fs.cof(i, j) * d(j, i);
            term1 /= fs.det;
            const double term2 = (cmat * fs.inv * d * fs.inv).trace();
            g(k, l) = term1 - term2;
        }
    }
    return g;
}

Eigen::VectorXd grad_r(const EvalPoint& pt) {
    const int p = pt.params.p;
    const int q = pt.params.q;
    Eigen::VectorXd g(FactorParams::r_size(q));
    if (g.size() == 0) return g;
    const Feasible fs = factor_sigma(pt.params);
    const Eigen::MatrixXd cmat = pt.c.matrix().to_eigen();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    for (int k = 0; k < q; ++k) {
        for (int l = k + 1; l < q; ++l) {
            Eigen::MatrixXd m(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j)
                    m(i, j) = pt.params.beta(k, i) * pt.params.beta(l, j) +
                              pt.params.beta(l, i) * pt.params.beta(k, j);
            g[FactorParams::r_index(k, l, q)] =
                (fs.inv * m * (identity - fs.inv * cmat)).trace();
        }
    }
    return g;
}

GradientBundle analytic_gradient(const EvalPoint& pt) {
    return GradientBundle{grad_tau(pt), grad_beta(pt), grad_r(pt)};
}

GradientBundle fd_gradient(const EvalPoint& pt, double h) {
    if (h <= 0.0) throw UsageError("fd_gradient: h must be positive");
    const int p = pt.params.p;
    const int q = pt.params.q;
    const Eigen::VectorXd x0 = flatten(pt.params);
    const int n = static_cast<int>(x0.size());

    auto f_at = [&](const Eigen::VectorXd& x) {
        return objective_from(pt.c, factor_sigma(unflatten(p, q, x)));
    };

    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
        double hi = h;
        for (int attempt = 0;; ++attempt) {
            Eigen::VectorXd xp = x0, xm = x0;
            xp[i] += hi;
            xm[i] -= hi;
            try {
                g[i] = (f_at(xp) - f_at(xm)) / (2.0 * hi);
                break;
            } catch (const InfeasiblePointError&) {
                if (attempt >= 1)
                    throw InfeasiblePointError(
                        "fd_gradient: perturbed point infeasible along coordinate " +
                        std::to_string(i) + " even after shrinking h");
                hi /= 10.0;
            }
        }
    }

    GradientBundle out;
    out.dtau = g.segment(0, p);
    out.dbeta.resize(q, p);
    for (int k = 0; k < q; ++k)
        for (int l = 0; l < p; ++l) out.dbeta(k, l) = g[p + k * p + l];
    out.dr = g.segment(p + q * p, FactorParams::r_size(q));
    return out;
}

FactorParams random_feasible_point(int p, int q, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> utau(0.5, 1.5);
    std::uniform_real_distribution<double> ubeta(-1.0, 1.0);
    std::uniform_real_distribution<double> ur(-0.5, 0.5);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        FactorParams params;
        params.p = p;
        params.q = q;
        params.tau.resize(p);
        params.beta.resize(q, p);
        params.r.resize(FactorParams::r_size(q));
        for (int i = 0; i < p; ++i) params.tau[i] = utau(rng);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < p; ++j) params.beta(i, j) = ubeta(rng);
        for (int i = 0; i < params.r.size(); ++i) params.r[i] = ur(rng);
        if (is_positive_definite(model_covariance(params))) return params;
    }
    throw UsageError("random_feasible_point: no positive definite draw in 1000 attempts");
}

SampleCovariance random_pd_covariance(int p, std::mt19937_64& rng) {
    if (p < 1) throw UsageError("dimension must be at least 1");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> lift(0.5, 1.5);
    Eigen::MatrixXd b(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) b(i, j) = unit(rng);
    }
    const Eigen::MatrixXd gram = (b.transpose() * b) / static_cast<double>(p);
    SymMatrix sym(p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            sym.set(i, j, gram(i, j) + (i == j ? lift(rng) : 0.0));
        }
    }
    return SampleCovariance(sym);
}

}  // namespace faridge
