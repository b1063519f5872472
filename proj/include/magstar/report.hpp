// Machine-readable verification reports: stable key order, deterministic
// number formatting, one record per check plus the overall verdict.

#pragma once

#include "magstar/checks.hpp"

#include <iosfwd>

namespace magstar::checks {

std::string report_json(const std::string& suite, std::uint64_t seed,
                        const std::vector<CheckResult>& results);
void print_human(std::ostream& os, const std::vector<CheckResult>& results);

// FNV-1a 64-bit content hash, used to pin the bundled field files
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace magstar::checks
