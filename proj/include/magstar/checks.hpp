// The verification battery: every acceptance criterion implemented as a set
// of named checks with pinned tolerances, runnable through the CLI `verify`
// subcommand and the acceptance test binary. Results are plain data so the
// report writer can emit byte-stable JSON.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace magstar::checks {

struct CheckResult {
    int criterion = 0;       // acceptance criterion number (1..11), 0 = extra
    std::string name;
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool exact = false;      // exact rational/symbolic check (value is 0 or 1)
    bool pass = false;
};

struct SuiteOptions {
    std::uint64_t seed = 20260808ull;
    bool quick = false; // reduced grids for smoke runs
    std::map<std::string, double> tol_overrides;
};

// suites: "core" (exact algebra + geometry + groupoid, criteria 1-6),
// "grid" (convolution path), "oracle" (criteria 7-8), "dynamics" (9-10),
// "all" (everything)
std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opt = {});
std::vector<std::string> suite_names();

bool all_pass(const std::vector<CheckResult>& results);

// least-squares order fit of err ~ C * x^order; returns {order, r_squared}
std::pair<double, double> fit_order(const std::vector<double>& x,
                                    const std::vector<double>& err);

} // namespace magstar::checks
