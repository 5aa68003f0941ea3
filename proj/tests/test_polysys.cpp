#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"
#include "faridge/polysys.hpp"
#include "faridge/variety.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace faridge;

namespace {

SampleCovariance worked_c() {
    return SampleCovariance(SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
}

DecompositionPoint worked_curve_lift() {
    DecompositionPoint pt;
    pt.c11 = 2;
    pt.c12 = 1;
    pt.c22 = 2;
    pt.tau1 = 1;
    pt.tau2 = 1;
    pt.beta11 = 1;
    pt.beta12 = 1;
    pt.gamma = 1.0 / 3.0;
    pt.x11 = 2;
    pt.x12 = 1;
    pt.x22 = 2;
    return pt;
}

double system_residual(const PolynomialSystem& sys, const Eigen::VectorXd& point) {
    return evaluate_system(sys, point).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("exact rational coefficients normalize and print") {
    CHECK(Coeff(5).str() == "5");
    CHECK(Coeff(-3).str() == "-3");
    CHECK(Coeff::rational(2, 4).str() == "1/2");
    CHECK(Coeff::rational(2, -4).str() == "-1/2");
    CHECK(Coeff::rational(0, 7).str() == "0");
    CHECK(Coeff::rational(1, 3) + Coeff::rational(1, 6) == Coeff::rational(1, 2));
    CHECK(Coeff::rational(1, 3) * Coeff(6) == Coeff(2));
    CHECK(-Coeff::rational(1, 3) == Coeff::rational(-1, 3));
    CHECK(Coeff::rational(1, 2).value() == 0.5);
    CHECK_THROWS_AS(Coeff::rational(1, 0), UsageError);
}

TEST_CASE("doubles convert to their exact rational value when it fits") {
    CHECK(Coeff::from_double(0.5) == Coeff::rational(1, 2));
    CHECK(Coeff::from_double(-2.75) == Coeff::rational(-11, 4));
    CHECK(Coeff::from_double(3.0) == Coeff(3));
    CHECK(Coeff::from_double(0.0) == Coeff(0));

    // Every finite double is dyadic; 1/3 rounds to 6004799503160661 / 2^54.
    const Coeff third = Coeff::from_double(1.0 / 3.0);
    CHECK(third.exact());
    CHECK(third.value() == 1.0 / 3.0);

    // Magnitudes outside the int64 rational range fall back to floating.
    CHECK_FALSE(Coeff::from_double(1e300).exact());
    CHECK_FALSE(Coeff::from_double(std::ldexp(1.0, -100)).exact());
    CHECK(Coeff::from_double(1e300).value() == 1e300);
}

TEST_CASE("arithmetic overflow falls back to floating point silently") {
    const Coeff small = Coeff::rational(1, 1LL << 31);
    const Coeff mid = small * small;
    CHECK(mid.exact());
    CHECK(mid.den() == (1LL << 62));
    const Coeff big = mid * small;
    CHECK_FALSE(big.exact());
    CHECK(big.value() == doctest::Approx(std::ldexp(1.0, -93)).epsilon(1e-12));
}

TEST_CASE("coefficient strings round-trip with their exactness class") {
    const Coeff exact = Coeff::rational(-7, 3);
    CHECK(Coeff::parse(exact.str()) == exact);

    const Coeff inexact = Coeff::inexact(2.5);
    const std::string text = inexact.str();
    CHECK(text.find_first_of(".e") != std::string::npos);
    CHECK(Coeff::parse(text) == inexact);

    CHECK(Coeff::parse("2/3") == Coeff::rational(2, 3));
    CHECK(Coeff::parse("-4") == Coeff(-4));
    CHECK_FALSE(Coeff::parse("2.0") == Coeff(2));  // different exactness class
    CHECK_THROWS_AS(Coeff::parse("abc"), UsageError);
    CHECK_THROWS_AS(Coeff::parse(""), UsageError);
    CHECK_THROWS_AS(Coeff::parse("1/"), UsageError);
}

TEST_CASE("grlex orders by total degree then lexicographically") {
    const GrlexGreater gt;
    CHECK(gt({2, 0}, {1, 0}));
    CHECK(gt({1, 1}, {2, 0}) == false);
    CHECK(gt({2, 0}, {1, 1}));   // same degree, lex larger first
    CHECK(gt({0, 2}, {0, 2}) == false);
}

TEST_CASE("polynomials drop cancelled terms and validate exponents") {
    Polynomial p(2);
    p.add_term({1, 0}, Coeff(2));
    p.add_term({1, 0}, Coeff(-2));
    CHECK(p.is_zero());
    CHECK_THROWS_AS(p.add_term({1}, Coeff(1)), UsageError);
    CHECK_THROWS_AS(p.add_term({-1, 0}, Coeff(1)), UsageError);

    const Polynomial x = Polynomial::variable(2, 0);
    const Polynomial y = Polynomial::variable(2, 1);
    const Polynomial prod = (x + y) * (x - y);
    Eigen::VectorXd at(2);
    at << 3.0, 2.0;
    CHECK(prod.evaluate(at) == doctest::Approx(5.0));
    CHECK(prod == x * x - y * y);
}

TEST_CASE("evaluation is linear in the polynomial") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> draw(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial a(3);
        Polynomial b(3);
        std::uniform_int_distribution<int> expo(0, 3);
        for (int t = 0; t < 5; ++t) {
            a.add_term({expo(rng), expo(rng), expo(rng)}, Coeff::from_double(draw(rng)));
            b.add_term({expo(rng), expo(rng), expo(rng)}, Coeff::from_double(draw(rng)));
        }
        Eigen::VectorXd at(3);
        at << draw(rng), draw(rng), draw(rng);
        const double lhs = (a + b).evaluate(at);
        const double rhs = a.evaluate(at) + b.evaluate(at);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("numeric variable order for the stationarity system") {
    const std::vector<std::string> v21 = numeric_variables(2, 1);
    const std::vector<std::string> expected = {"tau1", "tau2", "b_1_1", "b_1_2", "g"};
    CHECK(v21 == expected);

    const std::vector<std::string> v32 = numeric_variables(3, 2);
    REQUIRE(v32.size() == 3 + 6 + 1 + 1);
    CHECK(v32[3] == "b_1_1");
    CHECK(v32[8] == "b_2_3");
    CHECK(v32[9] == "r_1_2");
    CHECK(v32.back() == "g");
}

TEST_CASE("ambient variable order for the symbolic system") {
    const std::vector<std::string> v = symbolic_variables(2, 1);
    const std::vector<std::string> expected = {"c_1_1", "c_1_2", "c_2_2", "tau1", "tau2",
                                               "b_1_1", "b_1_2", "g",     "x_1_1", "x_1_2",
                                               "x_2_2"};
    CHECK(v == expected);
}

TEST_CASE("stationarity system has the documented shape") {
    const PolynomialSystem sys = build_system(worked_c(), 2, 1);
    CHECK(sys.polys.size() == 5);
    CHECK(sys.variables == numeric_variables(2, 1));
    for (const Polynomial& poly : sys.polys) CHECK(poly.nvars() == 5);

    std::mt19937_64 rng(42);
    const SampleCovariance c3 = random_pd_covariance(3, rng);
    const PolynomialSystem sys32 = build_system(c3, 3, 2);
    CHECK(sys32.polys.size() == 3 + 6 + 1 + 1);

    CHECK_THROWS_AS(build_system(worked_c(), 2, 2), UsageError);
    CHECK_THROWS_AS(build_symbolic_system(5, 1), UsageError);
}

TEST_CASE("curve points solve the stationarity system") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        const PolynomialSystem sys = build_system(c, 2, 1);
        const double det_c = determinant(c.matrix());
        for (const CurvePoint& cp : sample_curve(c, 10)) {
            const Eigen::VectorXd point = numeric_point(cp.params, 1.0 / det_c);
            CHECK(system_residual(sys, point) <= 1e-9);
        }
    }
}

TEST_CASE("exact-arithmetic curve points reach machine-precision residuals") {
    // Both points have rational coordinates, so the only rounding left is the
    // binary representation of gamma = 1/det(C).
    const PolynomialSystem sys = build_system(worked_c(), 2, 1);
    const Eigen::VectorXd lift = numeric_point(curve_point(worked_c(), 1.0).params, 1.0 / 3.0);
    CHECK(system_residual(sys, lift) <= 1e-12 * 9.0);

    const SampleCovariance c2(SymMatrix::from_rows({{5.0, 1.0}, {1.0, 0.5}}));
    const PolynomialSystem sys2 = build_system(c2, 2, 1);
    const Eigen::VectorXd lift2 = numeric_point(curve_point(c2, 2.0).params, 1.0 / 1.5);
    CHECK(system_residual(sys2, lift2) <= 1e-12 * 1.5 * 1.5);
}

TEST_CASE("embedded curve points kill the larger systems") {
    const std::array<std::pair<int, int>, 3> shapes{{{3, 1}, {3, 2}, {4, 2}}};
    for (const auto& [p, q] : shapes) {
        const SampleCovariance c = witness_covariance(p, q, 2.0, 1.0, 2.0);
        const PolynomialSystem sys = build_system(c, p, q);
        SymMatrix block(2);
        block.set(0, 0, c(0, 0));
        block.set(0, 1, c(0, 1));
        block.set(1, 1, c(1, 1));
        const FeasibleSet fs = feasible_interval(SampleCovariance(block));
        for (int k = 1; k <= 3; ++k) {
            const double t = fs.lo + 0.25 * k * (fs.hi - fs.lo);
            const FactorParams params = embed_curve(p, q, c, t);
            const double det = determinant(model_covariance(params));
            const Eigen::VectorXd res =
                evaluate_system(sys, numeric_point(params, 1.0 / det));
            CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-11);
        }
    }
}

TEST_CASE("random non-critical points leave a visible residual") {
    std::mt19937_64 rng(44);
    const PolynomialSystem sys = build_system(worked_c(), 2, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const FactorParams params = random_feasible_point(2, 1, rng);
        const double det = determinant(model_covariance(params));
        const Eigen::VectorXd point = numeric_point(params, 1.0 / det);
        const GradientBundle g = analytic_gradient(EvalPoint(worked_c(), params));
        if (g.inf_norm() < 1e-2) continue;  // skip draws that landed near the variety
        CHECK(system_residual(sys, point) > 1e-3);
    }
}

namespace {

// Replaces the three trailing x variables of an 8-variable polynomial by the
// given polynomials, in exact arithmetic.
Polynomial compose_x(const Polynomial& poly, const std::array<Polynomial, 3>& xsub) {
    const int n = poly.nvars();
    REQUIRE(n == 8);
    Polynomial out(n);
    for (const auto& [exps, coef] : poly.terms()) {
        std::vector<int> head = exps;
        for (int k = 0; k < 3; ++k) head[static_cast<std::size_t>(5 + k)] = 0;
        Polynomial term(n);
        term.add_term(head, coef);
        for (int k = 0; k < 3; ++k) {
            for (int e = 0; e < exps[static_cast<std::size_t>(5 + k)]; ++e) term = term * xsub[k];
        }
        out += term;
    }
    return out;
}

}  // namespace

TEST_CASE("substituting the covariance reproduces the numeric system") {
    const PolynomialSystem symbolic = build_symbolic_system(2, 1);
    REQUIRE(symbolic.variables.size() == 11);
    REQUIRE(symbolic.polys.size() == 5 + 3);

    Eigen::VectorXd cvals(3);
    cvals << 2.0, 1.0, 2.0;
    const PolynomialSystem substituted = substitute_prefix(symbolic, 3, cvals);
    const std::vector<std::string> tail(symbolic.variables.begin() + 3,
                                        symbolic.variables.end());
    CHECK(substituted.variables == tail);

    // Over the tail variables (tau1, tau2, b_1_1, b_1_2, g, x_1_1, x_1_2,
    // x_2_2), sending each x entry to its model-covariance polynomial must
    // recover the numeric system exactly and kill the defining equations.
    const auto v = [](int i) { return Polynomial::variable(8, i); };
    const std::array<Polynomial, 3> xsub{v(0) * v(0) + v(2) * v(2), v(2) * v(3),
                                         v(1) * v(1) + v(3) * v(3)};

    const PolynomialSystem numeric = build_system(worked_c(), 2, 1);
    for (std::size_t i = 0; i < numeric.polys.size(); ++i) {
        CHECK(compose_x(substituted.polys[i], xsub) == numeric.polys[i].with_trailing_vars(3));
    }
    for (std::size_t i = numeric.polys.size(); i < substituted.polys.size(); ++i) {
        CHECK(compose_x(substituted.polys[i], xsub).is_zero());
    }
}

TEST_CASE("x equations vanish exactly at the model covariance") {
    std::mt19937_64 rng(45);
    const PolynomialSystem symbolic = build_symbolic_system(2, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const FactorParams params = random_feasible_point(2, 1, rng);
        const SymMatrix sigma = model_covariance(params);
        Eigen::VectorXd point(11);
        point << 2.0, 1.0, 2.0, params.tau(0), params.tau(1), params.beta(0, 0),
            params.beta(0, 1), 0.7, sigma(0, 0), sigma(0, 1), sigma(1, 1);
        const Eigen::VectorXd residuals = evaluate_system(symbolic, point);
        for (int k = 5; k < 8; ++k) CHECK(std::abs(residuals(k)) <= 1e-14);
    }
}

TEST_CASE("system evaluation validates the point length") {
    const PolynomialSystem sys = build_system(worked_c(), 2, 1);
    CHECK_THROWS_AS(evaluate_system(sys, Eigen::VectorXd::Zero(4)), UsageError);

    PolynomialSystem zero;
    zero.variables = {"tau1"};
    zero.polys.push_back(Polynomial(1));
    const Eigen::VectorXd res = evaluate_system(zero, Eigen::VectorXd::Ones(1));
    CHECK(res.size() == 1);
    CHECK(res(0) == 0.0);
}

TEST_CASE("gamma determinant equation evaluates and exports as documented") {
    // g*(x11*x22 - x12^2) - 1 over the variables (g, x11, x12, x22).
    Polynomial gamma_eq(4);
    gamma_eq.add_term({1, 1, 0, 1}, Coeff(1));
    gamma_eq.add_term({1, 0, 2, 0}, Coeff(-1));
    gamma_eq.add_term({0, 0, 0, 0}, Coeff(-1));

    Eigen::VectorXd at(4);
    at << 1.0 / 3.0, 2.0, 1.0, 2.0;
    CHECK(std::abs(gamma_eq.evaluate(at)) <= 1e-15);

    PolynomialSystem sys;
    sys.variables = {"g", "x_1_1", "x_1_2", "x_2_2"};
    sys.polys.push_back(gamma_eq);
    CHECK(export_system(sys, ExportFormat::Plain) ==
          "1*g*x_1_1*x_2_2 + -1*g*x_1_2^2 + -1;\n");
}

TEST_CASE("the worked curve lift kills every first-component generator") {
    const Eigen::VectorXd res = j1_residuals(worked_curve_lift());
    REQUIRE(res.size() == 7);
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("the worked isolated lift kills every second-component generator") {
    DecompositionPoint pt;
    pt.c11 = 2;
    pt.c12 = 1;
    pt.c22 = 2;
    pt.tau1 = std::sqrt(2.0);
    pt.tau2 = std::sqrt(2.0);
    pt.gamma = 0.25;
    pt.x11 = 2;
    pt.x12 = 0;
    pt.x22 = 2;
    const Eigen::VectorXd res = j2_residuals(pt);
    REQUIRE(res.size() == 8);
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("the curve lift is visibly outside the second component") {
    const Eigen::VectorXd res = j2_residuals(worked_curve_lift());
    // Generator x12 evaluates to c12 = 1 on the curve.
    CHECK(res(1) == doctest::Approx(1.0));
    CHECK(res.lpNorm<Eigen::Infinity>() >= 1.0);
}

TEST_CASE("lift_point fills the ambient coordinates") {
    const DecompositionPoint pt = lift_point(worked_c(), curve_point(worked_c(), 1.0).params);
    CHECK(pt.c11 == 2.0);
    CHECK(pt.c12 == 1.0);
    CHECK(pt.x11 == 2.0);
    CHECK(pt.x12 == 1.0);
    CHECK(pt.gamma == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const Eigen::VectorXd v = pt.to_vector();
    REQUIRE(v.size() == 11);
    const DecompositionPoint back = DecompositionPoint::from_vector(v);
    CHECK(back.to_vector() == v);
    CHECK_THROWS_AS(DecompositionPoint::from_vector(Eigen::VectorXd::Zero(10)), UsageError);

    std::mt19937_64 rng(46);
    const FactorParams p31 = random_feasible_point(3, 1, rng);
    const SampleCovariance c3 = random_pd_covariance(3, rng);
    CHECK_THROWS_AS(lift_point(c3, p31), UsageError);
}

TEST_CASE("component membership splits as the decomposition predicts") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> interior(0.25, 0.75);

    // 200 first-component points: every curve lift also solves the full
    // symbolic system.
    const PolynomialSystem symbolic = build_symbolic_system(2, 1);
    int curve_checked = 0;
    for (int m = 0; m < 10; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        for (const CurvePoint& cp : sample_curve(c, 20)) {
            const DecompositionPoint lift = lift_point(c, cp.params);
            CHECK(j1_residuals(lift).lpNorm<Eigen::Infinity>() <= 1e-9);
            CHECK(system_residual(symbolic, lift.to_vector()) <= 1e-8);
            ++curve_checked;
        }
    }
    CHECK(curve_checked == 200);

    // 200 second-component points, same consistency.
    int isolated_checked = 0;
    for (int m = 0; m < 50; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        for (const FactorParams& iso : isolated_points(c)) {
            const DecompositionPoint lift = lift_point(c, iso);
            CHECK(j2_residuals(lift).lpNorm<Eigen::Infinity>() <= 1e-9);
            CHECK(system_residual(symbolic, lift.to_vector()) <= 1e-8);
            ++isolated_checked;
        }
    }
    CHECK(isolated_checked == 200);

    // Converse: 100 solutions of the stationarity system always land on one
    // of the two components.
    for (int m = 0; m < 100; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        DecompositionPoint lift;
        if (m % 2 == 0) {
            const FeasibleSet fs = feasible_interval(c);
            const double t = fs.lo + interior(rng) * (fs.hi - fs.lo);
            lift = lift_point(c, curve_point(c, t).params);
        } else {
            lift = lift_point(c, isolated_points(c)[static_cast<std::size_t>(m % 4)]);
        }
        const double j1 = j1_residuals(lift).lpNorm<Eigen::Infinity>();
        const double j2 = j2_residuals(lift).lpNorm<Eigen::Infinity>();
        CHECK(std::min(j1, j2) <= 1e-9);
    }
}

TEST_CASE("component Jacobian ranks match the published dimensions") {
    std::mt19937_64 rng(48);
    std::uniform_real_distribution<double> interior(0.25, 0.75);
    const PolynomialSystem j1 = j1_system();
    const PolynomialSystem j2 = j2_system();
    REQUIRE(j1.polys.size() == 7);
    REQUIRE(j2.polys.size() == 8);
    CHECK(j1.variables == symbolic_variables(2, 1));

    std::vector<int> curve_ranks;
    std::vector<int> isolated_ranks;
    for (int m = 0; m < 10; ++m) {
        const SampleCovariance c = random_pd_covariance(2, rng);
        const FeasibleSet fs = feasible_interval(c);
        const double t = fs.lo + interior(rng) * (fs.hi - fs.lo);
        curve_ranks.push_back(jacobian_rank(j1, lift_point(c, curve_point(c, t).params).to_vector()));
        const FactorParams iso = isolated_points(c)[static_cast<std::size_t>(m % 4)];
        isolated_ranks.push_back(jacobian_rank(j2, lift_point(c, iso).to_vector()));
    }
    for (const int rank : curve_ranks) CHECK(rank == 7);           // 11 - 7 = dim 4
    for (const int rank : isolated_ranks) CHECK(rank == 8);        // 11 - 8 = dim 3
    CHECK(std::adjacent_find(curve_ranks.begin(), curve_ranks.end(), std::not_equal_to<>()) ==
          curve_ranks.end());
    CHECK(std::adjacent_find(isolated_ranks.begin(), isolated_ranks.end(),
                             std::not_equal_to<>()) == isolated_ranks.end());
}

TEST_CASE("rank of degenerate systems") {
    PolynomialSystem constants;
    constants.variables = symbolic_variables(2, 1);
    constants.polys.push_back(Polynomial::constant(11, Coeff(3)));
    constants.polys.push_back(Polynomial::constant(11, Coeff(-1)));
    CHECK(jacobian_rank(constants, Eigen::VectorXd::Ones(11)) == 0);

    PolynomialSystem empty;
    empty.variables = symbolic_variables(2, 1);
    CHECK(jacobian_rank(empty, Eigen::VectorXd::Ones(11)) == 0);
}

TEST_CASE("plain export round-trips and is deterministic") {
    const PolynomialSystem sys = build_symbolic_system(2, 1);
    const std::string once = export_system(sys, ExportFormat::Plain);
    const std::string twice = export_system(sys, ExportFormat::Plain);
    CHECK(once == twice);

    const PolynomialSystem parsed = parse_system(once);
    CHECK(parsed == sys);
    CHECK(export_system(parsed, ExportFormat::Plain) == once);

    const PolynomialSystem numeric = build_system(worked_c(), 2, 1);
    const std::string numeric_text = export_system(numeric, ExportFormat::Plain);
    CHECK(parse_system(numeric_text) == numeric);
}

TEST_CASE("alternate export formats have their documented skeletons") {
    const PolynomialSystem sys = build_system(worked_c(), 2, 1);

    const std::string m2 = export_system(sys, ExportFormat::M2Like);
    CHECK(m2.find("QQ[tau1, tau2, b_1_1, b_1_2, g]") != std::string::npos);
    CHECK(m2.find("ideal(") != std::string::npos);

    const std::string phc = export_system(sys, ExportFormat::PhcLike);
    CHECK(phc.rfind("5\n", 0) == 0);
    CHECK(std::count(phc.begin(), phc.end(), ';') == 5);

    CHECK(parse_export_format("plain") == ExportFormat::Plain);
    CHECK(parse_export_format("m2") == ExportFormat::M2Like);
    CHECK(parse_export_format("phc") == ExportFormat::PhcLike);
    CHECK_THROWS_AS(parse_export_format("latex"), UsageError);
}

TEST_CASE("the plain parser rejects malformed input") {
    CHECK_THROWS_AS(parse_system("1*tau1 + 2"), UsageError);       // missing terminator
    CHECK_THROWS_AS(parse_system("1*zz_1;"), UsageError);          // unknown family
    CHECK_THROWS_AS(parse_system("1*tau1^x;"), UsageError);        // bad exponent
    CHECK_THROWS_AS(parse_system("1 * tau1;"), UsageError);        // stray whitespace
    CHECK_THROWS_AS(parse_system("; trailing"), UsageError);

    const PolynomialSystem single = parse_system("2/3*tau1^2*g + -1;");
    REQUIRE(single.variables.size() == 2);
    CHECK(single.variables[0] == "tau1");
    CHECK(single.variables[1] == "g");
    Eigen::VectorXd at(2);
    at << 3.0, 0.5;
    CHECK(single.polys[0].evaluate(at) == doctest::Approx(2.0));
}

TEST_CASE("parser reconstructs the canonical variable order") {
    const std::string text = "1*x_1_1*g + 1*tau2 + 1*b_1_2 + 1*c_2_2 + 1*r_1_2;\n";
    const PolynomialSystem sys = parse_system(text);
    const std::vector<std::string> expected = {"c_2_2", "tau2", "b_1_2", "r_1_2", "g", "x_1_1"};
    CHECK(sys.variables == expected);
}
