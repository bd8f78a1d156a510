#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmq/distribution.hpp"

namespace gmq {

// (2p+1)^2 / total: cap on the probability of any single basis state from a
// depth-p circuit. May exceed 1 (still a valid upper bound).
double basis_prob_ub(int p, std::uint64_t total);

// (2p+1)^2 * rho: cap on the probability of sampling an optimal solution.
double lambda_ub(int p, double rho);

// mu_{1/(2p+1)^2}: cap on the approximation ratio. Maximize only.
double alpha_ub(int p, const ObjectiveDistribution& dist);

// 2 / (n-1)!: optimality density of a TSP instance with distinct distances.
double tsp_rho(int n);

// 2 (2p+1)^2 / (n-1)!, uncapped; equals lambda_ub(p, tsp_rho(n)) exactly.
double tsp_lambda_ub(int n, int p);

// H_k(r) by the recurrence H_{k+1} = -2 r H_k - H_{k-1}, H_1 = -2r,
// H_2 = 4r^2 - 2.
double h_poly(int k, double r);

enum class ZParity { Even, Odd };

// (1/total) * (cos(p pi z) + sum_k cos((p-k) pi z) H_k(r))^2 with z = 0 or 1
// by parity; signs are computed exactly from the parity, not via cos.
double script_g(int p, ZParity parity, double r, std::uint64_t total);

// Direct subset expansion of the relaxation g_p over prepend-0 combinations;
// returns |g_p|^2 / total. O(2^p * p * total), deliberately not a circuit
// simulation. Requires p <= 9 and v.size() == total <= 1000.
double relax_g(std::span<const double> gammas, std::span<const double> betas,
               std::span<const double> v, double z, std::uint64_t total);

struct WitnessRow {
    int p = 0;
    ZParity parity = ZParity::Even;
    double endpoint_value = 0.0; // value at r = -1 (even) / +1 (odd)
    double max_value = 0.0;      // max over the grid
    double argmax_r = 0.0;       // smallest r attaining the max
};

struct WitnessReport {
    int p_max = 0;
    std::uint64_t total = 0;
    double grid_step = 0.0;
    std::vector<WitnessRow> rows;
};

// Scans r over [-1, 1] for each p in 1..p_max and both parities; asserts the
// maximum sits at the parity's endpoint with value (2p+1)^2/total within
// 1e-9. Throws WitnessError carrying the offending (p, z, r) otherwise.
WitnessReport verify_theorem1_witness(int p_max, std::uint64_t total, double grid_step);

struct BoundReport {
    int p = 0;
    double basis_ub = 0.0;
    double lambda_ub = 0.0;
    std::optional<double> alpha_ub; // absent for Minimize
    std::string context;            // distribution descriptor
};

BoundReport bound_report(int p, const ObjectiveDistribution& dist);

} // namespace gmq
