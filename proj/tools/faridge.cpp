#include "faridge/acceptance.hpp"
#include "faridge/io.hpp"
#include "faridge/likelihood.hpp"
#include "faridge/matcore.hpp"
#include "faridge/polysys.hpp"
#include "faridge/solver.hpp"
#include "faridge/variety.hpp"
#include "faridge/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using nlohmann::json;
using namespace faridge;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

json make_report(const std::string& command, unsigned long long seed, json inputs, json results,
                 const Timer& timer) {
    json report;
    report["command"] = command;
    report["version"] = kVersion;
    report["seed"] = seed;
    report["inputs"] = std::move(inputs);
    report["results"] = std::move(results);
    report["timing_ms"] = timer.ms();
    return report;
}

// Text artifacts go to --out when given, else to stdout. The JSON report is
// printed only when it does not collide with the artifact stream.
void emit_with_artifact(const json& report, const std::string& artifact, const std::string& out) {
    if (out.empty()) {
        std::cout << artifact;
    } else {
        write_text_file(out, artifact);
        std::cout << report.dump(2) << "\n";
    }
}

void emit_report_only(const json& report, const std::string& out) {
    if (out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        write_text_file(out, report.dump(2) + "\n");
    }
}

json bundle_to_json(const GradientBundle& g) {
    json j;
    j["tau"] = json::array();
    for (Eigen::Index k = 0; k < g.dtau.size(); ++k) j["tau"].push_back(g.dtau(k));
    j["beta"] = json::array();
    for (Eigen::Index k = 0; k < g.dbeta.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index l = 0; l < g.dbeta.cols(); ++l) row.push_back(g.dbeta(k, l));
        j["beta"].push_back(std::move(row));
    }
    j["r"] = json::array();
    for (Eigen::Index k = 0; k < g.dr.size(); ++k) j["r"].push_back(g.dr(k));
    return j;
}

std::vector<std::string> param_names(int p, int q) {
    std::vector<std::string> names = numeric_variables(p, q);
    names.pop_back();  // drop the auxiliary variable used only by systems
    return names;
}

struct CommonArgs {
    std::string matrix_file;
    std::string params_file;
    std::string out;
    std::string format = "json";
    std::string sys_format = "plain";
    std::vector<double> t_values;
    std::vector<double> d_values;
    int samples = 50;
    int starts = 20;
    int p = 3;
    int q = 1;
    double c11 = 2.0;
    double c12 = 1.0;
    double c22 = 2.0;
    double tol_grad = 1e-6;
    double tol_solve = 1e-9;
    double tol_verify = 1e-9;
    unsigned long long seed = 0;
    std::string report_format = "table";
};

int run_eval(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);
    const FactorParams params = load_params_json(a.params_file);
    const EvalPoint pt(c, params);
    const GradientBundle g = analytic_gradient(pt);

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["matrix"] = matrix_to_json(c.matrix());
    inputs["params_file"] = a.params_file;
    inputs["params"] = params_to_json(params);

    json results;
    results["f"] = objective(pt);
    results["grad_inf_norm"] = g.inf_norm();
    results["gradient"] = bundle_to_json(g);

    emit_report_only(make_report("eval", 0, inputs, results, timer), a.out);
    return 0;
}

int run_grad_check(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);
    const FactorParams params = load_params_json(a.params_file);
    const EvalPoint pt(c, params);
    const Eigen::VectorXd analytic = analytic_gradient(pt).flatten();
    const Eigen::VectorXd central = fd_gradient(pt).flatten();
    const std::vector<std::string> names = param_names(params.p, params.q);

    double max_error = 0.0;
    std::string worst = names.empty() ? "" : names[0];
    bool pass = true;
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double err = std::abs(analytic(i) - central(i));
        const double allowed = std::max(a.tol_grad, a.tol_grad * std::abs(analytic(i)));
        if (err > max_error) {
            max_error = err;
            worst = names[static_cast<std::size_t>(i)];
        }
        if (err > allowed) pass = false;
    }

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["params_file"] = a.params_file;
    inputs["tol"] = a.tol_grad;

    json results;
    results["pass"] = pass;
    results["max_error"] = max_error;
    results["worst_component"] = worst;
    results["analytic"] = std::vector<double>(analytic.data(), analytic.data() + analytic.size());
    results["central_difference"] =
        std::vector<double>(central.data(), central.data() + central.size());
    results["names"] = names;

    emit_report_only(make_report("grad-check", 0, inputs, results, timer), a.out);
    return pass ? 0 : 3;
}

int run_curve(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);
    std::vector<CurvePoint> points;
    if (!a.t_values.empty()) {
        points.reserve(a.t_values.size());
        for (const double t : a.t_values) points.push_back(curve_point(c, t));
    } else {
        points = sample_curve(c, a.samples);
    }

    json rows = json::array();
    std::string csv = "t,beta11,beta12,tau1,tau2,f,grad_inf_norm\n";
    for (const CurvePoint& cp : points) {
        const CriticalReport rep = verify_critical(c, cp.params, 1e-8);
        json row;
        row["t"] = cp.t;
        row["beta11"] = cp.params.beta(0, 0);
        row["beta12"] = cp.params.beta(0, 1);
        row["tau1"] = cp.params.tau(0);
        row["tau2"] = cp.params.tau(1);
        row["f"] = rep.f;
        row["grad_inf_norm"] = rep.grad_inf;
        rows.push_back(std::move(row));
        csv += fmt17(cp.t) + "," + fmt17(cp.params.beta(0, 0)) + "," +
               fmt17(cp.params.beta(0, 1)) + "," + fmt17(cp.params.tau(0)) + "," +
               fmt17(cp.params.tau(1)) + "," + fmt17(rep.f) + "," + fmt17(rep.grad_inf) + "\n";
    }

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["matrix"] = matrix_to_json(c.matrix());
    inputs["samples"] = static_cast<int>(points.size());
    if (!a.t_values.empty()) inputs["t"] = a.t_values;

    json results;
    results["points"] = std::move(rows);

    const json report = make_report("curve", 0, inputs, results, timer);
    if (a.format == "csv") {
        emit_with_artifact(report, csv, a.out);
    } else {
        emit_report_only(report, a.out);
    }
    return 0;
}

int run_isolated(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);

    json rows = json::array();
    std::string csv = "tau1,tau2,f,grad_inf_norm\n";
    for (const FactorParams& iso : isolated_points(c)) {
        const CriticalReport rep = verify_critical(c, iso, 1e-8);
        json row;
        row["tau1"] = iso.tau(0);
        row["tau2"] = iso.tau(1);
        row["f"] = rep.f;
        row["grad_inf_norm"] = rep.grad_inf;
        rows.push_back(std::move(row));
        csv += fmt17(iso.tau(0)) + "," + fmt17(iso.tau(1)) + "," + fmt17(rep.f) + "," +
               fmt17(rep.grad_inf) + "\n";
    }

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["matrix"] = matrix_to_json(c.matrix());

    json results;
    results["points"] = std::move(rows);

    const json report = make_report("isolated", 0, inputs, results, timer);
    if (a.format == "csv") {
        emit_with_artifact(report, csv, a.out);
    } else {
        emit_report_only(report, a.out);
    }
    return 0;
}

int run_witness(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = witness_covariance(a.p, a.q, a.c11, a.c12, a.c22, a.d_values);

    json inputs;
    inputs["p"] = a.p;
    inputs["q"] = a.q;
    inputs["c11"] = a.c11;
    inputs["c12"] = a.c12;
    inputs["c22"] = a.c22;
    inputs["d"] = a.d_values;

    const json matrix = matrix_to_json(c.matrix());
    json results;
    results["matrix"] = matrix;

    const json report = make_report("witness", 0, inputs, results, timer);
    emit_with_artifact(report, matrix.dump(2) + "\n", a.out);
    return 0;
}

int run_build_system(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);
    const PolynomialSystem sys = build_system(c, c.dim(), a.q);
    const std::string text = export_system(sys, parse_export_format(a.sys_format));

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["matrix"] = matrix_to_json(c.matrix());
    inputs["q"] = a.q;
    inputs["sys_format"] = a.sys_format;

    json results;
    results["equations"] = static_cast<int>(sys.polys.size());
    results["variables"] = sys.variables;

    emit_with_artifact(make_report("build-system", 0, inputs, results, timer), text, a.out);
    return 0;
}

int run_export(const CommonArgs& a) {
    const Timer timer;
    const PolynomialSystem sys = build_symbolic_system(a.p, a.q);
    const std::string text = export_system(sys, parse_export_format(a.sys_format));

    json inputs;
    inputs["p"] = a.p;
    inputs["q"] = a.q;
    inputs["sys_format"] = a.sys_format;

    json results;
    results["equations"] = static_cast<int>(sys.polys.size());
    results["variables"] = sys.variables;

    emit_with_artifact(make_report("export", 0, inputs, results, timer), text, a.out);
    return 0;
}

int run_solve(const CommonArgs& a) {
    const Timer timer;
    const SampleCovariance c = load_covariance_json(a.matrix_file);
    SolveOptions opts;
    opts.grad_tol = a.tol_solve;
    const std::vector<SolveResult> results_list = multi_start(c, a.q, a.starts, a.seed, opts);

    std::vector<SolveResult> converged;
    for (const SolveResult& r : results_list) {
        if (r.converged) converged.push_back(r);
    }
    const std::vector<SolutionCluster> clusters = cluster_solutions(converged, 0.05, 1e-8);

    json solutions = json::array();
    const std::vector<std::string> names = param_names(c.dim(), a.q);
    std::string csv = "start_index,converged,iters,f,grad_inf";
    for (const std::string& name : names) csv += "," + name;
    csv += "\n";
    for (const SolveResult& r : results_list) {
        json row;
        row["start_index"] = r.start_index;
        row["converged"] = r.converged;
        row["iters"] = r.iters;
        row["f"] = r.f;
        row["grad_inf"] = r.grad_inf;
        row["params"] = params_to_json(r.params);
        solutions.push_back(std::move(row));
        csv += std::to_string(r.start_index) + "," + (r.converged ? "1" : "0") + "," +
               std::to_string(r.iters) + "," + fmt17(r.f) + "," + fmt17(r.grad_inf);
        const Eigen::VectorXd flat = flatten(r.params);
        for (Eigen::Index i = 0; i < flat.size(); ++i) csv += "," + fmt17(flat(i));
        csv += "\n";
    }

    json cluster_rows = json::array();
    for (const SolutionCluster& cluster : clusters) {
        json row;
        row["f"] = cluster.f;
        row["is_ridge"] = cluster.is_ridge;
        row["size"] = static_cast<int>(cluster.members.size());
        row["representative"] = params_to_json(cluster.representative.params);
        cluster_rows.push_back(std::move(row));
    }

    json inputs;
    inputs["matrix_file"] = a.matrix_file;
    inputs["matrix"] = matrix_to_json(c.matrix());
    inputs["q"] = a.q;
    inputs["starts"] = a.starts;
    inputs["grad_tol"] = a.tol_solve;

    json results;
    results["converged"] = static_cast<int>(converged.size());
    results["best_f"] = results_list.empty() ? 0.0 : results_list.front().f;
    results["solutions"] = std::move(solutions);
    results["clusters"] = std::move(cluster_rows);

    const json report = make_report("solve", a.seed, inputs, results, timer);
    if (a.format == "csv") {
        emit_with_artifact(report, csv, a.out);
    } else {
        emit_report_only(report, a.out);
    }
    return 0;
}

int run_verify_decomp(const CommonArgs& a) {
    const Timer timer;
    std::mt19937_64 rng(a.seed);
    const SampleCovariance c = random_pd_covariance(2, rng);

    double j1_max = 0.0;
    for (const CurvePoint& cp : sample_curve(c, a.samples)) {
        j1_max = std::max(j1_max,
                          j1_residuals(lift_point(c, cp.params)).lpNorm<Eigen::Infinity>());
    }
    double j2_max = 0.0;
    for (const FactorParams& iso : isolated_points(c)) {
        j2_max = std::max(j2_max,
                          j2_residuals(lift_point(c, iso)).lpNorm<Eigen::Infinity>());
    }

    const PolynomialSystem j1 = j1_system();
    const PolynomialSystem j2 = j2_system();
    std::uniform_real_distribution<double> interior(0.25, 0.75);
    bool ranks_ok = true;
    for (int m = 0; m < 10; ++m) {
        const SampleCovariance cm = random_pd_covariance(2, rng);
        const FeasibleSet fs = feasible_interval(cm);
        const double t = fs.lo + interior(rng) * (fs.hi - fs.lo);
        if (jacobian_rank(j1, lift_point(cm, curve_point(cm, t).params).to_vector()) != 7) {
            ranks_ok = false;
        }
        const FactorParams iso = isolated_points(cm)[static_cast<std::size_t>(m % 4)];
        if (jacobian_rank(j2, lift_point(cm, iso).to_vector()) != 8) {
            ranks_ok = false;
        }
    }

    const bool pass = j1_max <= a.tol_verify && j2_max <= a.tol_verify && ranks_ok;

    json inputs;
    inputs["samples"] = a.samples;
    inputs["tol"] = a.tol_verify;

    json results;
    results["j1_max_residual"] = j1_max;
    results["j2_max_residual"] = j2_max;
    results["curve_rank"] = 7;
    results["isolated_rank"] = 8;
    results["ranks_ok"] = ranks_ok;
    results["pass"] = pass;

    emit_report_only(make_report("verify-decomp", a.seed, inputs, results, timer), a.out);
    return pass ? 0 : 3;
}

int run_report(const CommonArgs& a) {
    const Timer timer;
    const std::vector<CriterionResult> checks = run_acceptance();

    std::string table;
    bool all_pass = true;
    int passed = 0;
    json rows = json::array();
    for (const CriterionResult& check : checks) {
        all_pass = all_pass && check.pass;
        passed += check.pass ? 1 : 0;
        table += std::to_string(check.id) + " " + (check.pass ? "PASS" : "FAIL") + " " +
                 check.name + "\n       " + check.detail + "\n";
        json row;
        row["id"] = check.id;
        row["name"] = check.name;
        row["pass"] = check.pass;
        row["detail"] = check.detail;
        rows.push_back(std::move(row));
    }
    table += std::to_string(passed) + "/" + std::to_string(checks.size()) + " criteria passed\n";

    json results;
    results["criteria"] = std::move(rows);
    results["passed"] = passed;
    results["total"] = static_cast<int>(checks.size());

    const json report = make_report("report", 0, json::object(), results, timer);
    if (a.report_format == "json") {
        emit_report_only(report, a.out);
    } else {
        emit_with_artifact(report, table, a.out);
    }
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"factor analysis likelihood geometry toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs a;
    int rc = 0;

    const auto add_matrix = [&](CLI::App* sub) {
        sub->add_option("--matrix", a.matrix_file, "covariance matrix JSON file")->required();
    };
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", a.out, "output path (default: stdout)");
    };
    const auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", a.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    const auto add_sys_format = [&](CLI::App* sub) {
        sub->add_option("--sys-format", a.sys_format, "system text format")
            ->check(CLI::IsMember({"plain", "m2", "phc"}));
    };

    CLI::App* eval = app.add_subcommand("eval", "objective and gradient at a parameter point");
    add_matrix(eval);
    eval->add_option("--params", a.params_file, "parameter point JSON file")->required();
    add_out(eval);
    eval->callback([&] { rc = run_eval(a); });

    CLI::App* grad = app.add_subcommand("grad-check",
                                        "compare analytic and central-difference gradients");
    add_matrix(grad);
    grad->add_option("--params", a.params_file, "parameter point JSON file")->required();
    grad->add_option("--tol", a.tol_grad, "componentwise tolerance");
    add_out(grad);
    grad->callback([&] { rc = run_grad_check(a); });

    CLI::App* curve = app.add_subcommand("curve", "sample the critical curve of a 2x2 matrix");
    add_matrix(curve);
    curve->add_option("--samples", a.samples, "number of curve samples");
    curve->add_option("--t", a.t_values, "explicit loading values instead of sampling");
    add_format(curve);
    add_out(curve);
    curve->callback([&] { rc = run_curve(a); });

    CLI::App* isolated = app.add_subcommand("isolated",
                                            "the four isolated critical points of a 2x2 matrix");
    add_matrix(isolated);
    add_format(isolated);
    add_out(isolated);
    isolated->callback([&] { rc = run_isolated(a); });

    CLI::App* witness = app.add_subcommand("witness",
                                           "block covariance with a critical curve for given p, q");
    witness->add_option("--p", a.p, "observed dimension")->required();
    witness->add_option("--q", a.q, "factor count")->required();
    witness->add_option("--c11", a.c11, "block entry (1,1)");
    witness->add_option("--c12", a.c12, "block entry (1,2)");
    witness->add_option("--c22", a.c22, "block entry (2,2)");
    witness->add_option("--d", a.d_values, "tail diagonal entries (default all 1)");
    add_out(witness);
    witness->callback([&] { rc = run_witness(a); });

    CLI::App* build = app.add_subcommand("build-system",
                                         "stationarity polynomial system for a covariance");
    add_matrix(build);
    build->add_option("--q", a.q, "factor count");
    add_sys_format(build);
    add_out(build);
    build->callback([&] { rc = run_build_system(a); });

    CLI::App* exp = app.add_subcommand("export",
                                       "symbolic stationarity system with covariance unknowns");
    exp->add_option("--p", a.p, "observed dimension")->required();
    exp->add_option("--q", a.q, "factor count")->required();
    add_sys_format(exp);
    add_out(exp);
    exp->callback([&] { rc = run_export(a); });

    CLI::App* solve = app.add_subcommand("solve", "deterministic multi-start minimization");
    add_matrix(solve);
    solve->add_option("--q", a.q, "factor count");
    solve->add_option("--starts", a.starts, "number of random starts");
    solve->add_option("--seed", a.seed, "base seed; start k uses seed + k");
    solve->add_option("--tol", a.tol_solve, "gradient convergence tolerance");
    add_format(solve);
    add_out(solve);
    solve->callback([&] { rc = run_solve(a); });

    CLI::App* verify = app.add_subcommand("verify-decomp",
                                          "residuals and Jacobian ranks of the two components");
    verify->add_option("--samples", a.samples, "curve lifts to test");
    verify->add_option("--seed", a.seed, "seed for the sampled matrices");
    verify->add_option("--tol", a.tol_verify, "residual tolerance");
    add_out(verify);
    verify->callback([&] { rc = run_verify_decomp(a); });

    CLI::App* report = app.add_subcommand("report", "run the full acceptance suite");
    report->add_option("--format", a.report_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));
    add_out(report);
    report->callback([&] { rc = run_report(a); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasiblePointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SingularMatrixError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
