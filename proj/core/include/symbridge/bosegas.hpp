#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symbridge/grid.hpp"

namespace symbridge {

struct Spectrum {
    std::vector<double> energies;  // ascending
    std::string source;            // "analytic" | "finite-difference"
    bool clipped = false;          // k exceeded the interior dimension
};

// Lowest k eigenvalues of the finite-difference -Delta + W with Dirichlet
// condition (the Lambda^c = infinity wall is the boundary condition itself).
Spectrum spectrum(const Grid& grid, const GridFunction& W, int k);

// Dirichlet box spectrum pi^2 sum_a (k_a / L_a)^2, lowest count values.
Spectrum analytic_box_spectrum(const std::vector<double>& lengths, int count);

struct PartitionTable {
    double beta = 0.0;
    std::vector<double> logz;  // log Z_0 .. log Z_N, Z_0 = 1
};

// Cycle recursion Z_N = (1/N) sum_{k=1}^N Z_1(k beta) Z_{N-k}; computed in
// log space with energies shifted by E_1. Requires the truncation test
// e^{-beta E_K} < 1e-16 e^{-beta E_1}.
PartitionTable partition_recursion(const Spectrum& spec, double beta, int n_max);

// log Z_1(t) = log sum_k e^{-t E_k} on the truncated spectrum.
double log_z1(const Spectrum& spec, double t);

// Occupation-number sum over multisets of n levels; guards n <= 6, K <= 40.
double brute_force_trace(const Spectrum& spec, double beta, int n);

// Z_N as the cycle-type sum  sum_types prod_k Z_1(k beta)^{f_k} / (k^{f_k} f_k!)
// over integer partitions of n (log value). Cross-checks the recursion.
double cycle_sum_log_trace(const Spectrum& spec, double beta, int n);

struct LdpReport {
    std::vector<double> a;          // a_N = (1/N) log Z_N, N = 1..
    double target = 0.0;            // -beta E_1
    std::vector<double> deviation;  // |a_N + beta E_1|
    double slope = 0.0;             // fitted slope of (a_N - target) vs (log N)/N
    std::optional<double> beta_lambda_w;  // alternate reading for comparison
};

LdpReport ldp_check(const PartitionTable& table, const Spectrum& spec, double beta,
                    std::optional<double> beta_lambda_w = std::nullopt);

}  // namespace symbridge
