#include "faridge/io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace faridge {

namespace {

nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid JSON in '" + path + "': " + e.what());
    }
}

int get_dim(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw UsageError(std::string("missing or non-integer field \"") + key + "\"");
    }
    const int v = j.at(key).get<int>();
    if (v < 1) throw UsageError(std::string("field \"") + key + "\" must be at least 1");
    return v;
}

std::vector<double> get_number_row(const nlohmann::json& row, const std::string& where,
                                   std::size_t expect) {
    if (!row.is_array() || row.size() != expect) {
        throw UsageError(where + " must be an array of " + std::to_string(expect) + " numbers");
    }
    std::vector<double> out;
    out.reserve(expect);
    for (std::size_t i = 0; i < expect; ++i) {
        if (!row[i].is_number()) {
            throw UsageError(where + "[" + std::to_string(i) + "] is not a number");
        }
        out.push_back(row[i].get<double>());
    }
    return out;
}

}  // namespace

SymMatrix matrix_from_json(const nlohmann::json& j) {
    const int p = get_dim(j, "p");
    if (!j.contains("entries") || !j.at("entries").is_array() ||
        j.at("entries").size() != static_cast<std::size_t>(p)) {
        throw UsageError("\"entries\" must be an array of " + std::to_string(p) + " rows");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        rows.push_back(get_number_row(j.at("entries")[static_cast<std::size_t>(i)],
                                      "entries[" + std::to_string(i) + "]",
                                      static_cast<std::size_t>(p)));
    }
    return SymMatrix::from_rows(rows);
}

nlohmann::json matrix_to_json(const SymMatrix& m) {
    nlohmann::json j;
    j["p"] = m.dim();
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    return j;
}

FactorParams params_from_json(const nlohmann::json& j) {
    const int p = get_dim(j, "p");
    const int q = get_dim(j, "q");

    FactorParams params;
    params.p = p;
    params.q = q;

    if (!j.contains("tau")) throw UsageError("missing field \"tau\"");
    const std::vector<double> tau = get_number_row(j.at("tau"), "tau",
                                                   static_cast<std::size_t>(p));
    params.tau = Eigen::Map<const Eigen::VectorXd>(tau.data(), p);

    if (!j.contains("beta") || !j.at("beta").is_array() ||
        j.at("beta").size() != static_cast<std::size_t>(q)) {
        throw UsageError("\"beta\" must be an array of " + std::to_string(q) + " rows");
    }
    params.beta.resize(q, p);
    for (int k = 0; k < q; ++k) {
        const std::vector<double> row =
            get_number_row(j.at("beta")[static_cast<std::size_t>(k)],
                           "beta[" + std::to_string(k) + "]", static_cast<std::size_t>(p));
        for (int l = 0; l < p; ++l) params.beta(k, l) = row[static_cast<std::size_t>(l)];
    }

    const int r_len = FactorParams::r_size(q);
    if (!j.contains("r")) throw UsageError("missing field \"r\"");
    const std::vector<double> r = get_number_row(j.at("r"), "r",
                                                 static_cast<std::size_t>(r_len));
    params.r = Eigen::Map<const Eigen::VectorXd>(r.data(), r_len);

    params.validate();
    return params;
}

nlohmann::json params_to_json(const FactorParams& params) {
    nlohmann::json j;
    j["p"] = params.p;
    j["q"] = params.q;
    j["tau"] = nlohmann::json::array();
    for (int k = 0; k < params.p; ++k) j["tau"].push_back(params.tau(k));
    j["beta"] = nlohmann::json::array();
    for (int k = 0; k < params.q; ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (int l = 0; l < params.p; ++l) row.push_back(params.beta(k, l));
        j["beta"].push_back(std::move(row));
    }
    j["r"] = nlohmann::json::array();
    for (Eigen::Index k = 0; k < params.r.size(); ++k) j["r"].push_back(params.r(k));
    return j;
}

SymMatrix load_matrix_json(const std::string& path) {
    const nlohmann::json j = parse_file(path);
    try {
        return matrix_from_json(j);
    } catch (const UsageError& e) {
        throw UsageError("'" + path + "': " + e.what());
    }
}

SampleCovariance load_covariance_json(const std::string& path) {
    const SymMatrix m = load_matrix_json(path);
    if (!is_positive_definite(m)) {
        throw UsageError("'" + path + "': matrix is not positive definite");
    }
    return SampleCovariance(m);
}

FactorParams load_params_json(const std::string& path) {
    const nlohmann::json j = parse_file(path);
    try {
        return params_from_json(j);
    } catch (const UsageError& e) {
        throw UsageError("'" + path + "': " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
    if (!out) throw UsageError("failed writing '" + path + "'");
}

}  // namespace faridge
