#pragma once

#include <string>
#include <vector>

namespace faridge {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the eight release checks and reports one result per check. Never
/// throws; a check that raises is reported as failed with the message.
std::vector<CriterionResult> run_acceptance();

}  // namespace faridge
