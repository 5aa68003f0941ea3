#pragma once

#include "faridge/matcore.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace faridge {

/// Coefficient of a polynomial term: an exact int64 rational while the inputs
/// and the arithmetic allow it, a double otherwise. Every operation that
/// would overflow the rational representation falls back to double silently;
/// exports render exact values as integers or `num/den` and inexact values
/// with 17 significant digits.
class Coeff {
public:
    Coeff() : exact_(true), num_(0), den_(1), val_(0.0) {}
    Coeff(long long n) : exact_(true), num_(n), den_(1), val_(0.0) {}

    static Coeff rational(long long num, long long den);
    static Coeff from_double(double x);
    static Coeff inexact(double x);
    static Coeff parse(const std::string& text);

    bool exact() const { return exact_; }
    long long num() const { return num_; }
    long long den() const { return den_; }
    double value() const;
    bool is_zero() const;
    std::string str() const;

    Coeff operator+(const Coeff& o) const;
    Coeff operator-(const Coeff& o) const;
    Coeff operator*(const Coeff& o) const;
    Coeff operator-() const;
    Coeff& operator+=(const Coeff& o);
    bool operator==(const Coeff& o) const;

private:
    bool exact_;
    long long num_;
    long long den_;  // > 0 and coprime with num_ whenever exact_
    double val_;     // meaningful only when !exact_
};

/// Graded lexicographic order on exponent vectors, largest first: higher
/// total degree wins, ties fall to the lexicographically larger vector.
struct GrlexGreater {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

/// Sparse multivariate polynomial over a fixed number of variables. Terms
/// live in a map keyed by exponent vector, so iteration, arithmetic, and
/// evaluation order are all deterministic.
class Polynomial {
public:
    explicit Polynomial(int nvars);

    static Polynomial constant(int nvars, const Coeff& c);
    static Polynomial variable(int nvars, int index);

    int nvars() const { return nvars_; }
    const std::map<std::vector<int>, Coeff, GrlexGreater>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const std::vector<int>& exponents, const Coeff& c);
    double evaluate(const Eigen::VectorXd& point) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial scaled(const Coeff& c) const;
    Polynomial& operator+=(const Polynomial& o);

    /// Same polynomial viewed over `extra` additional trailing variables.
    Polynomial with_trailing_vars(int extra) const;

    bool operator==(const Polynomial& o) const;

private:
    int nvars_;
    std::map<std::vector<int>, Coeff, GrlexGreater> terms_;
};

struct PolynomialSystem {
    std::vector<std::string> variables;
    std::vector<Polynomial> polys;

    bool operator==(const PolynomialSystem& o) const = default;
};

/// tau1..taup, b_k_l row major, r_k_l for k < l, g.
std::vector<std::string> numeric_variables(int p, int q);

/// c_i_j upper triangle, then the numeric variables, then x_i_j upper
/// triangle; for (p,q) = (2,1) this is the 11-variable ambient order
/// c11, c12, c22, tau1, tau2, b11, b12, g, x11, x12, x22.
std::vector<std::string> symbolic_variables(int p, int q);

/// Stationarity system for a fixed covariance: one polynomial per tau, beta,
/// and r coordinate obtained from the analytic gradients by replacing
/// 1/det(Sigma) with the variable g, plus g*det(Sigma) - 1. Supported for
/// p <= 4.
PolynomialSystem build_system(const SampleCovariance& c, int p, int q);

/// Same system with the covariance entries c_i_j kept as variables, the
/// determinant and cofactors written over the variables x_i_j, and the
/// defining equations x_i_j - Sigma_i_j appended. Substituting each x_i_j by
/// its Sigma_i_j polynomial recovers build_system. Supported for p <= 4.
PolynomialSystem build_symbolic_system(int p, int q);

/// Assigns the first nsub variables the given values and returns the system
/// over the remaining variables.
PolynomialSystem substitute_prefix(const PolynomialSystem& sys, int nsub,
                                   const Eigen::VectorXd& values);

/// One residual per polynomial; point holds one value per system variable.
Eigen::VectorXd evaluate_system(const PolynomialSystem& sys, const Eigen::VectorXd& point);

/// Point of the 11-dimensional ambient space of the (2,1) symbolic system.
struct DecompositionPoint {
    double c11 = 0, c12 = 0, c22 = 0;
    double tau1 = 0, tau2 = 0;
    double beta11 = 0, beta12 = 0;
    double gamma = 0;
    double x11 = 0, x12 = 0, x22 = 0;

    Eigen::VectorXd to_vector() const;
    static DecompositionPoint from_vector(const Eigen::VectorXd& v);
};

/// Lifts a (p,q) = (2,1) parameter point into the ambient space, with
/// x set to the model covariance and gamma to 1/det of it.
DecompositionPoint lift_point(const SampleCovariance& c, const FactorParams& params);

/// The two component ideals of the (2,1) system, generators in source order.
PolynomialSystem j1_system();
PolynomialSystem j2_system();

Eigen::VectorXd j1_residuals(const DecompositionPoint& pt);
Eigen::VectorXd j2_residuals(const DecompositionPoint& pt);

/// Numerical rank of the generators' Jacobian at the point: central
/// differences with step h, singular values kept above rel_threshold times
/// the largest one.
int jacobian_rank(const PolynomialSystem& generators, const Eigen::VectorXd& point,
                  double h = 1e-6, double rel_threshold = 1e-7);

enum class ExportFormat { Plain, M2Like, PhcLike };

/// Accepts "plain", "m2", "phc".
ExportFormat parse_export_format(const std::string& name);

std::string export_system(const PolynomialSystem& sys, ExportFormat format);

/// Parses the plain format back into a system. The variable list is
/// reconstructed from the names that occur, ordered c, tau, b, r, g, x and
/// by index within each family.
PolynomialSystem parse_system(const std::string& text);

/// Point layout matching numeric_variables: tau, beta row major, r, gamma.
Eigen::VectorXd numeric_point(const FactorParams& params, double gamma);

}  // namespace faridge
