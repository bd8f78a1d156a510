#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gmq/problems.hpp"

namespace gmq {

// Exact histogram of objective values over the feasible space, the complete
// input to the GM-QAOA analysis.
struct ObjectiveDistribution {
    std::vector<double> values;        // strictly descending distinct values
    std::vector<std::uint64_t> counts; // positive multiplicity per value
    std::uint64_t total = 0;           // |F| = sum of counts
    Orientation orientation = Orientation::Maximize;
    std::string provenance;            // instance id or "external"

    std::size_t size() const { return values.size(); }

    // Index of the optimal class: 0 for Maximize, last for Minimize.
    std::size_t optimal_index() const;

    // Throws ValidationError if ordering/count invariants are broken.
    void validate() const;
};

// Bucketing key for real-valued (TSP) objectives: rounded to 12 decimal
// digits so serialization round-trips are stable.
double tsp_value_key(double v);

// Index of the class holding `value` (bucketed the same way the histogram
// was built); -1 if no class matches.
std::ptrdiff_t class_index_of(const ObjectiveDistribution& dist, double value, bool bucketed);

// Enumerates the instance and histograms objective values. Graph kinds
// compare exactly as integers; TSP values are bucketed via tsp_value_key.
// `workers` > 1 partitions the enumeration into disjoint index ranges; the
// result is independent of the worker count.
ObjectiveDistribution distribution_of(const ProblemInstance& instance, int workers = 1,
                                      std::uint64_t cap = kDefaultEnumerationCap);

// Optimality density: multiplicity of the optimal class over |F|.
double rho(const ObjectiveDistribution& dist);

// Top-r-proportion mean-max ratio, computed from the histogram without
// expanding F. Requires Maximize orientation, 0 < r <= 1, and a positive
// maximum. May exceed 1 when r|F| is non-integral; callers that need a
// ratio in (0,1] clamp explicitly.
double mu_r(const ObjectiveDistribution& dist, double r);

} // namespace gmq
