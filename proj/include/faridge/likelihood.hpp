#pragma once

#include "faridge/matcore.hpp"

#include <random>

namespace faridge {

/// A sample covariance paired with a parameter point of matching dimension.
struct EvalPoint {
    SampleCovariance c;
    FactorParams params;

    EvalPoint(SampleCovariance c_, FactorParams params_);
};

/// Objective value log det(Sigma) + tr(C Sigma^{-1}) with
/// Sigma = model_covariance(params). Throws InfeasiblePointError when Sigma
/// is singular or det(Sigma) <= 0.
double objective(const EvalPoint& pt);

/// Partial derivatives of the objective in tau, written with the cofactors
/// of Sigma:
///   d f / d tau_k = 2 tau_k det^{-1} Cof_kk
///                 - 2 tau_k det^{-2} sum_{i,j} c_ij Cof_jk Cof_ki.
Eigen::VectorXd grad_tau(const EvalPoint& pt);

/// Partial derivatives in the loadings. Entry (k,l) is
///   det^{-1} sum_{i,j} Cof_ij D_ij - tr(C Sigma^{-1} D Sigma^{-1})
/// with the perturbation matrix D_ij = delta_il (R beta)_kj
///                                   + delta_jl (R beta)_ki.
Eigen::MatrixXd grad_beta(const EvalPoint& pt);

/// Partial derivatives in the latent correlations r_kl (k < l); empty for
/// q = 1. Component (k,l) is
///   tr[Sigma^{-1} M (I_p - Sigma^{-1} C)]
/// with the symmetrized perturbation M_ij = beta_ki beta_lj + beta_li beta_kj.
/// M is the exact derivative of beta' R beta in r_kl: that matrix is linear
/// in each off-diagonal correlation, so no r-dependent prefactor appears.
/// Validated against central differences of the objective.
Eigen::VectorXd grad_r(const EvalPoint& pt);

/// All three blocks at once.
GradientBundle analytic_gradient(const EvalPoint& pt);

/// Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h over every
/// coordinate of (tau, beta, r). If a perturbed point is infeasible the step
/// is shrunk once by 10x for that coordinate; if still infeasible, throws.
GradientBundle fd_gradient(const EvalPoint& pt, double h = 1e-5);

/// Random parameter point with tau_k ~ U[0.5, 1.5], beta ~ U[-1, 1],
/// r ~ U[-0.5, 0.5], redrawn until the model covariance is positive
/// definite.
FactorParams random_feasible_point(int p, int q, std::mt19937_64& rng);

/// Random well-conditioned positive definite matrix: a scaled Gram matrix of
/// U[-1, 1] entries with the diagonal lifted by U[0.5, 1.5].
SampleCovariance random_pd_covariance(int p, std::mt19937_64& rng);

}  // namespace faridge
