#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace symbridge {

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparator;  // "<", "<=", "==", ...
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20260809ULL;
    int threads = 1;
    // jident suite
    int jident_grid = 200;
    int jident_cells = 20;
    int jident_steps = 32;
    // lln suite
    long long lln_ensembles = 10000;
    int lln_particles = 10000;
};

// Suites mirror the acceptance criteria:
//   counting  - exact counting identities vs brute force
//   rounding  - 1000 randomized rounding-lemma instances
//   bridge    - bridge law statistics + Girsanov normalization
//   entropy   - Donsker-Varadhan benchmark, entropy identities, permanents
//   jident    - saddle solver vs beta pi^2, explicit construction, gradients
//   lln       - endpoint-pair law of large numbers at g == 1
//   trace     - Bose-gas recursion, brute force, LDP deviations
std::vector<Check> verify_suite(const std::string& suite, const VerifyOptions& opts = {});
std::vector<std::string> verify_suite_names();

std::string checks_to_json(const std::vector<Check>& checks);

}  // namespace symbridge
