#pragma once

#include "faridge/matcore.hpp"

#include <json.hpp>

#include <string>

namespace faridge {

/// Matrix file schema: {"p": int, "entries": [[row-major p rows of p doubles]]}.
/// Asymmetry is rejected exactly, with the offending entry named.
SymMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const SymMatrix& m);

/// Params file schema:
/// {"p": int, "q": int, "tau": [p], "beta": [q rows of p], "r": [q(q-1)/2]}.
FactorParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const FactorParams& params);

SymMatrix load_matrix_json(const std::string& path);
SampleCovariance load_covariance_json(const std::string& path);
FactorParams load_params_json(const std::string& path);

/// Reads a whole file; missing or unreadable files raise UsageError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace faridge
