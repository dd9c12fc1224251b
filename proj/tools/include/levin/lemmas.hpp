#pragma once

// Property suites behind `levin lemmas`. Each suite counts the individual
// checks it ran and how many failed; a suite that would exceed the budget is
// reported as skipped instead of silently shrinking.

#include <cstdint>
#include <string>
#include <vector>

#include "levin/ffmat.hpp"

namespace levin::lemmas {

struct SuiteResult {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t failed = 0;
    bool skipped = false;
    std::string note;  // first failure, or why the suite was skipped

    bool ok() const noexcept { return failed == 0; }
};

struct SuiteOptions {
    ffmat::Prime p{2};
    unsigned m = 1;
    unsigned profiles = 50;  // random (eta, u, z) profiles on top of the Levin one
    std::uint64_t seed = 0;
    std::uint64_t budget = std::uint64_t{1} << 26;
};

/// Names accepted by run_suite, in run order.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

std::vector<SuiteResult> run_all(const SuiteOptions& opt);

/// Exact integer C(n, r) for small arguments; 0 when r < 0 or r > n.
std::int64_t small_binom(std::int64_t n, std::int64_t r);

/// sum_{i=lo}^{hi} (-1)^{t+i+1} C(t, i) C(k+j+i-eta_j, j) over the integers.
std::int64_t xi_column_sum(std::int64_t t, std::int64_t k, std::int64_t j, std::int64_t eta_j, std::int64_t hi);

} // namespace levin::lemmas
