#include "faridge/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace faridge {

namespace {

constexpr int kDimCap = 8;  // cofactor-based code paths are for small matrices

void check_dim_cap(int dim, const char* what) {
    if (dim > kDimCap)
        throw UsageError(std::string(what) + ": dimension " + std::to_string(dim) +
                         " exceeds the cap of " + std::to_string(kDimCap));
}

std::vector<double> to_dense(const SymMatrix& a) {
    const int n = a.dim();
    std::vector<double> m(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(i) * n + j] = a(i, j);
    return m;
}

// Fraction-free (Bareiss) elimination with partial pivoting.
double det_bareiss(std::vector<double> m, int n) {
    double sign = 1.0;
    double prev = 1.0;
    for (int k = 0; k + 1 < n; ++k) {
        int piv = k;
        double best = std::abs(m[static_cast<size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double v = std::abs(m[static_cast<size_t>(r) * n + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = 0; c < n; ++c)
                std::swap(m[static_cast<size_t>(k) * n + c], m[static_cast<size_t>(piv) * n + c]);
            sign = -sign;
        }
        const double pivot = m[static_cast<size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m[static_cast<size_t>(i) * n + j] =
                    (pivot * m[static_cast<size_t>(i) * n + j] -
                     m[static_cast<size_t>(i) * n + k] * m[static_cast<size_t>(k) * n + j]) /
                    prev;
        prev = pivot;
    }
    return sign * m[static_cast<size_t>(n) * n - 1];
}

double det_dense(const std::vector<double>& m, int n) {
    if (n <= 4) return det_minor_expansion(m, n, 0.0);
    return det_bareiss(m, n);
}

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw UsageError("SymMatrix: dim must be >= 1");
    data_.assign(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0);
}

int SymMatrix::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
        throw UsageError("SymMatrix: index (" + std::to_string(i) + "," + std::to_string(j) +
                         ") out of range for dim " + std::to_string(dim_));
    if (i > j) std::swap(i, j);
    return i * dim_ - i * (i - 1) / 2 + (j - i);
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix a(dim);
    for (int i = 0; i < dim; ++i) a.set(i, i, 1.0);
    return a;
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
    SymMatrix a(static_cast<int>(d.size()));
    for (int i = 0; i < a.dim(); ++i) a.set(i, i, d[i]);
    return a;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n < 1) throw UsageError("SymMatrix: empty entry list");
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != n)
            throw UsageError("SymMatrix: entries are not a square matrix");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rows[i][j] != rows[j][i])
                throw UsageError("SymMatrix: asymmetric entries at (" + std::to_string(i) + "," +
                                 std::to_string(j) + "): " + std::to_string(rows[i][j]) +
                                 " != " + std::to_string(rows[j][i]));
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rows[i][j]);
    return a;
}

SymMatrix SymMatrix::from_eigen(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw UsageError("SymMatrix: matrix is not square");
    const int n = static_cast<int>(m.rows());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (m(i, j) != m(j, i))
                throw UsageError("SymMatrix: asymmetric entries at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, m(i, j));
    return a;
}

Eigen::MatrixXd SymMatrix::to_eigen() const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

double SymMatrix::max_abs() const {
    double v = 0.0;
    for (double x : data_) v = std::max(v, std::abs(x));
    return v;
}

double determinant(const SymMatrix& a) {
    check_dim_cap(a.dim(), "determinant");
    return det_dense(to_dense(a), a.dim());
}

double cofactor(const SymMatrix& a, int i, int j) {
    const int n = a.dim();
    check_dim_cap(n, "cofactor");
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw UsageError("cofactor: index (" + std::to_string(i) + "," + std::to_string(j) +
                         ") out of range for dim " + std::to_string(n));
    if (n == 1) return 1.0;
    std::vector<double> sub;
    sub.reserve(static_cast<size_t>(n - 1) * (n - 1));
    for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0; c < n; ++c)
            if (c != j) sub.push_back(a(r, c));
    }
    const double minor = det_dense(sub, n - 1);
    return ((i + j) % 2 == 0) ? minor : -minor;
}

double singularity_threshold(const SymMatrix& a) {
    const double scale = a.max_abs();
    if (scale == 0.0) return 0.0;
    return 1e-12 * std::pow(scale, a.dim());
}

DetInverse det_adjugate_inverse(const SymMatrix& a) {
    const int n = a.dim();
    check_dim_cap(n, "det_adjugate_inverse");
    const double det = determinant(a);
    if (std::abs(det) <= singularity_threshold(a) || det == 0.0)
        throw SingularMatrixError("matrix is singular (det = " + std::to_string(det) + ")");
    DetInverse out{det, SymMatrix(n)};
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.inv.set(i, j, cofactor(a, j, i) / det);
    return out;
}

std::vector<double> leading_minors(const SymMatrix& a) {
    const int n = a.dim();
    check_dim_cap(n, "leading_minors");
    std::vector<double> minors(n);
    for (int k = 1; k <= n; ++k) {
        std::vector<double> sub(static_cast<size_t>(k) * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub[static_cast<size_t>(i) * k + j] = a(i, j);
        minors[k - 1] = det_dense(sub, k);
    }
    return minors;
}

bool is_positive_definite(const SymMatrix& a) {
    for (double m : leading_minors(a))
        if (!(m > 0.0)) return false;
    return true;
}

SampleCovariance::SampleCovariance(SymMatrix m) : m_(std::move(m)) {
    if (!is_positive_definite(m_))
        throw UsageError("SampleCovariance: matrix is not positive definite "
                         "(a leading principal minor is <= 0)");
}

void FactorParams::validate() const {
    if (p < 2) throw UsageError("FactorParams: p must be >= 2");
    if (q < 1) throw UsageError("FactorParams: q must be >= 1");
    if (q >= p) throw UsageError("FactorParams: q must be < p");
    if (tau.size() != p) throw UsageError("FactorParams: tau must have length p");
    if (beta.rows() != q || beta.cols() != p)
        throw UsageError("FactorParams: beta must be q x p");
    if (r.size() != r_size(q))
        throw UsageError("FactorParams: r must have length q(q-1)/2");
    for (int i = 0; i < r.size(); ++i)
        if (std::abs(r[i]) > 1.0)
            throw UsageError("FactorParams: |r| entries must be <= 1");
}

int FactorParams::r_index(int k, int l, int q) {
    if (k < 0 || l <= k || l >= q) throw UsageError("FactorParams: bad r index");
    return k * q - k * (k + 1) / 2 + (l - k - 1);
}

Eigen::MatrixXd FactorParams::correlation_matrix() const {
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(q, q);
    for (int k = 0; k < q; ++k)
        for (int l = k + 1; l < q; ++l) {
            const double v = r[r_index(k, l, q)];
            R(k, l) = v;
            R(l, k) = v;
        }
    return R;
}

double GradientBundle::inf_norm() const {
    double v = dtau.size() ? dtau.cwiseAbs().maxCoeff() : 0.0;
    if (dbeta.size()) v = std::max(v, dbeta.cwiseAbs().maxCoeff());
    if (dr.size()) v = std::max(v, dr.cwiseAbs().maxCoeff());
    return v;
}

Eigen::VectorXd GradientBundle::flatten() const {
    Eigen::VectorXd x(dtau.size() + dbeta.size() + dr.size());
    int at = 0;
    for (int i = 0; i < dtau.size(); ++i) x[at++] = dtau[i];
    for (int i = 0; i < dbeta.rows(); ++i)
        for (int j = 0; j < dbeta.cols(); ++j) x[at++] = dbeta(i, j);
    for (int i = 0; i < dr.size(); ++i) x[at++] = dr[i];
    return x;
}

SymMatrix model_covariance(const FactorParams& params) {
    params.validate();
    const int p = params.p;
    const int q = params.q;
    SymMatrix sigma(p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            double v = (i == j) ? params.tau[i] * params.tau[i] : 0.0;
            for (int m = 0; m < q; ++m) v += params.beta(m, i) * params.beta(m, j);
            for (int m = 0; m < q; ++m)
                for (int n = m + 1; n < q; ++n)
                    v += params.r[FactorParams::r_index(m, n, q)] *
                         (params.beta(m, i) * params.beta(n, j) +
                          params.beta(n, i) * params.beta(m, j));
            sigma.set(i, j, v);
        }
    }
    return sigma;
}

Eigen::VectorXd flatten(const FactorParams& params) {
    Eigen::VectorXd x(params.p + params.p * params.q + params.r.size());
    int at = 0;
    for (int i = 0; i < params.p; ++i) x[at++] = params.tau[i];
    for (int i = 0; i < params.q; ++i)
        for (int j = 0; j < params.p; ++j) x[at++] = params.beta(i, j);
    for (int i = 0; i < params.r.size(); ++i) x[at++] = params.r[i];
    return x;
}

FactorParams unflatten(int p, int q, const Eigen::VectorXd& x) {
    const int expected = p + p * q + FactorParams::r_size(q);
    if (x.size() != expected)
        throw UsageError("unflatten: expected " + std::to_string(expected) + " values, got " +
                         std::to_string(x.size()));
    FactorParams params;
    params.p = p;
    params.q = q;
    params.tau.resize(p);
    params.beta.resize(q, p);
    params.r.resize(FactorParams::r_size(q));
    int at = 0;
    for (int i = 0; i < p; ++i) params.tau[i] = x[at++];
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < p; ++j) params.beta(i, j) = x[at++];
    for (int i = 0; i < params.r.size(); ++i) params.r[i] = x[at++];
    return params;
}

SampleCovariance simulate_covariance(const FactorParams& params, int n,
                                     unsigned long long seed) {
    params.validate();
    const int p = params.p;
    if (n <= p)
        throw UsageError("simulate_covariance: need n > p (got n = " + std::to_string(n) +
                         ", p = " + std::to_string(p) + ")");
    const SymMatrix sigma = model_covariance(params);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma.to_eigen());
    if (llt.info() != Eigen::Success)
        throw UsageError("simulate_covariance: model covariance is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd y(n, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < p; ++k) z[k] = gauss(rng);
        y.row(i) = (L * z).transpose();
    }
    const Eigen::RowVectorXd mean = y.colwise().mean();
    SymMatrix cov(p);
    for (int a = 0; a < p; ++a) {
        for (int b = a; b < p; ++b) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += (y(i, a) - mean[a]) * (y(i, b) - mean[b]);
            cov.set(a, b, acc / n);
        }
    }
    return SampleCovariance(cov);
}

}  // namespace faridge
