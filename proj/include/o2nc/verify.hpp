#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace o2nc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Structural identities on short seeded runs of every strategy:
/// w = x + Delta, y = x + s Delta, the telescoping loss decrement of
/// OPTION_I, the OPTION_III cancellation x_t - w_{t-1} = -eta g_{t-1},
/// stability factors, the extrapolated-iterate recursion, the composite
/// mirror-descent recursion against the contraction form, EMA streaming
/// vs batch, and weight/mass normalizations.
SuiteReport verify_identities(std::uint64_t master_seed);

/// Exhaustive lag-coefficient grid, index-law normalization grid, and the
/// variance decomposition on seeded runs.
SuiteReport verify_appendix(std::uint64_t master_seed);

/// Statistical regret check: seed-averaged discounted regret against the
/// certificate comparators stays under the tuned bound at every
/// checkpoint (3 SEM allowance).
SuiteReport verify_regret(std::uint64_t master_seed, std::size_t seeds = 50);

/// Pathwise OPTION_III vs schedule-free equivalence plus a negative
/// control with a mismatched zeta.
SuiteReport verify_equivalence_suite(std::uint64_t master_seed);

/// Validates a serialized parameter set: every derived constant is
/// recomputed from the recorded inputs and compared.  Corrupted fixtures
/// fail here.
SuiteReport validate_params_json(const std::string& json_text);

/// Serialized report (schema_version, suite, per-check verdicts).
std::string suite_report_json(const SuiteReport& report);

}  // namespace o2nc
