#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace faridge {

/// An argument violated a documented precondition.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A matrix is numerically singular where an inverse is required.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The model covariance at a parameter point is unusable (singular, or the
/// determinant is not positive so the log term is undefined).
struct InfeasiblePointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix with packed upper-triangle storage. entry(i,j) and
/// entry(j,i) share one slot, so symmetry holds by construction rather than
/// by numerical accident.
class SymMatrix {
public:
    explicit SymMatrix(int dim);

    static SymMatrix identity(int dim);
    static SymMatrix diagonal(const Eigen::VectorXd& d);

    /// Builds from full row-major entries. Rejects any asymmetry with an
    /// exact (tolerance-zero) comparison.
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static SymMatrix from_eigen(const Eigen::MatrixXd& m);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    void set(int i, int j, double v) { data_[index(i, j)] = v; }

    Eigen::MatrixXd to_eigen() const;
    double max_abs() const;

    bool operator==(const SymMatrix& other) const = default;

private:
    int index(int i, int j) const;

    int dim_ = 0;
    std::vector<double> data_;
};

/// Determinant of a row-major n-by-n grid by first-row minor expansion.
/// Works over any commutative ring type with +, *, unary -, given its zero.
/// Intended for small n; the scalar entry points below cap n themselves.
template <typename T>
T det_minor_expansion(const std::vector<T>& m, int n, const T& zero) {
    if (n == 1) return m[0];
    T acc = zero;
    std::vector<T> sub;
    sub.reserve(static_cast<size_t>(n - 1) * (n - 1));
    for (int j = 0; j < n; ++j) {
        sub.clear();
        for (int r = 1; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (c != j) sub.push_back(m[static_cast<size_t>(r) * n + c]);
        T term = m[static_cast<size_t>(j)] * det_minor_expansion(sub, n - 1, zero);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

/// Determinant: minor expansion for dim <= 4, fraction-free (Bareiss)
/// elimination with partial pivoting above. dim is capped at 8.
double determinant(const SymMatrix& a);

/// Signed (i,j) minor, 0-based: (-1)^{i+j} times the determinant of the
/// submatrix with row i and column j removed.
double cofactor(const SymMatrix& a, int i, int j);

struct DetInverse {
    double det = 0.0;
    SymMatrix inv;
};

/// Determinant together with the adjugate-based inverse,
/// inv(i,j) = cofactor(a,j,i) / det. Throws SingularMatrixError when
/// |det| <= 1e-12 * max_abs(a)^dim.
DetInverse det_adjugate_inverse(const SymMatrix& a);

/// Threshold below which det_adjugate_inverse treats a as singular.
double singularity_threshold(const SymMatrix& a);

/// Leading principal minors det(a[0..k][0..k]) for k = 0..dim-1.
std::vector<double> leading_minors(const SymMatrix& a);

/// All leading principal minors strictly positive.
bool is_positive_definite(const SymMatrix& a);

/// Sample covariance wrapper; construction validates positive definiteness
/// via the leading principal minors.
class SampleCovariance {
public:
    explicit SampleCovariance(SymMatrix m);

    const SymMatrix& matrix() const { return m_; }
    int dim() const { return m_.dim(); }
    double operator()(int i, int j) const { return m_(i, j); }

    bool operator==(const SampleCovariance& other) const = default;

private:
    SymMatrix m_;
};

/// Parameter point of the factor model: p observed dimensions, q < p latent
/// factors. tau holds the signed square roots of the noise variances, beta
/// is the q-by-p loading matrix, and r the strict upper triangle of the
/// latent correlation matrix R (row-major; empty for q = 1, where R = (1)).
struct FactorParams {
    int p = 0;
    int q = 0;
    Eigen::VectorXd tau;
    Eigen::MatrixXd beta;
    Eigen::VectorXd r;

    /// Throws UsageError on shape violations, p < 2, q < 1, q >= p, or any
    /// stored |r_kl| > 1.
    void validate() const;

    /// Full q-by-q correlation matrix with unit diagonal.
    Eigen::MatrixXd correlation_matrix() const;

    static int r_size(int q) { return q * (q - 1) / 2; }
    /// Position of r_kl (0-based, k < l) in the packed row-major triangle.
    static int r_index(int k, int l, int q);
};

/// Concatenated partial derivatives matching the shape of a FactorParams.
struct GradientBundle {
    Eigen::VectorXd dtau;
    Eigen::MatrixXd dbeta;
    Eigen::VectorXd dr;

    double inf_norm() const;
    /// tau block, beta row-major, then r.
    Eigen::VectorXd flatten() const;
};

/// Sigma = diag(tau_1^2,...,tau_p^2) + beta' R beta, exactly symmetric by
/// packed construction.
SymMatrix model_covariance(const FactorParams& params);

/// Packs (tau, beta row-major, r) into one vector.
Eigen::VectorXd flatten(const FactorParams& params);

/// Inverse of flatten for given shape.
FactorParams unflatten(int p, int q, const Eigen::VectorXd& x);

/// Draws n i.i.d. rows from N_p(0, model_covariance(params)) with a seeded
/// generator and returns the centered sample covariance (divisor n).
/// Deterministic per (params, n, seed). Requires n > p.
SampleCovariance simulate_covariance(const FactorParams& params, int n,
                                     unsigned long long seed);

}  // namespace faridge
