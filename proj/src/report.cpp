#include "magstar/report.hpp"

#include <cstdio>
#include <ostream>
#include <json.hpp>

namespace magstar::checks {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string report_json(const std::string& suite, std::uint64_t seed,
                        const std::vector<CheckResult>& results) {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json e;
        e["test"] = r.name;
        e["criterion"] = r.criterion;
        e["metric"] = r.metric;
        // format numbers as strings so the byte layout is pinned
        e["value"] = fmt_double(r.value);
        e["threshold"] = fmt_double(r.threshold);
        e["pass"] = r.pass;
        j["results"].push_back(e);
    }
    j["overall_pass"] = all_pass(results);
    return j.dump(2) + "\n";
}

void print_human(std::ostream& os, const std::vector<CheckResult>& results) {
    for (const auto& r : results) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        if (r.exact) os << "  (exact)";
        else os << "  " << r.metric << " = " << fmt_double(r.value) << "  vs  "
                << fmt_double(r.threshold);
        os << "\n";
    }
    os << (all_pass(results) ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace magstar::checks
