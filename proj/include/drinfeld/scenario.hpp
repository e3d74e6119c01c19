#ifndef DRINFELD_SCENARIO_HPP
#define DRINFELD_SCENARIO_HPP

#include <string>
#include <vector>

#include "drinfeld/thirdkind.hpp"

namespace drinfeld {

struct ConfigParseError : DomainError {
    explicit ConfigParseError(const std::string& w) : DomainError(w) {}
};

// scenario configuration, parsed from JSON (schema documented in README)
struct ScenarioConfig {
    int p = 2, f = 1, s = 1;
    Rat theta_prec = Rat(80);
    int t_degree = 32;
    int agf_level = 0;        // 0 = dynamic truncation with certificate
    Rat guard = Rat(0);       // 0 = theta_prec / 2
    std::string mode;         // "lattice", "carlitz", or "" (symbolic only)
    std::vector<std::string> basis;
    std::vector<std::string> betas;
    std::vector<std::string> tasks;

    static ScenarioConfig parse(const std::string& json_text);
    std::string canonical_json() const;
};

struct TaskReport {
    std::string name;
    std::string status;  // "pass" | "fail" | "rejected: <reason>"
    std::vector<std::pair<std::string, std::string>> details;  // ordered key/value
};

struct ScenarioReport {
    std::vector<TaskReport> tasks;
    std::string omega_convention;
    bool all_ok = true;  // every task pass or rejected

    std::string to_json() const;  // deterministic: stable ordering, no timings
    std::string to_text() const;  // one line per task
};

// executes the requested tasks; admission failures are recorded as
// rejections, never thrown
ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::string& data_dir);

// smallest s (probed 1..8) so F_{q^s} contains the (q-1)-st root of -theta's
// leading coefficient; used to validate configs up front
int min_s_for_carlitz(int p, int f);

} // namespace drinfeld

#endif
