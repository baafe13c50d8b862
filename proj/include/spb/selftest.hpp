#pragma once

#include <string>
#include <vector>

namespace spb {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the invariant suites at reduced grid sizes. `suite_filter` empty means
// all suites; `perturb` flips the sign of mu0 inside the identity check and
// exists only to prove the suite notices (never set outside tests).
std::vector<CheckResult> run_selftest(const std::string& suite_filter = "",
                                      bool perturb = false);

std::vector<std::string> selftest_suite_names();

}  // namespace spb
