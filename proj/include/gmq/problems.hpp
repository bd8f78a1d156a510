#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gmq {

enum class ProblemKind { Tsp, MaxKColorableSubgraph, MaxCut, MaxKVertexCover };
enum class Orientation { Maximize, Minimize };

std::string kind_name(ProblemKind kind);
ProblemKind kind_from_name(const std::string& name);

// How graph edges are drawn.
struct EdgeRule {
    enum class Kind { ErdosRenyi, Regular };
    Kind kind = Kind::ErdosRenyi;
    double prob = 0.5; // ErdosRenyi
    int degree = 3;    // Regular

    static EdgeRule erdos_renyi(double p) { return {Kind::ErdosRenyi, p, 0}; }
    static EdgeRule regular(int d) { return {Kind::Regular, 0.0, d}; }
};

EdgeRule default_edge_rule(ProblemKind kind);

struct ProblemInstance {
    ProblemKind kind = ProblemKind::MaxCut;
    int n = 0; // vertex / city count
    int k = 0; // colors or cover size; 0 when the kind has no k
    std::vector<std::pair<int, int>> edges;  // graph kinds, u < v, sorted
    std::vector<std::vector<double>> w;      // TSP distance matrix
    Orientation orientation = Orientation::Maximize;
    std::uint64_t seed = 0;

    std::string id() const; // e.g. "tsp-n7-s1", "mkvc-n10-k5-s3"
};

// Throws ValidationError if the instance breaks a structural invariant
// (asymmetric w, loops, duplicate edges, out-of-range k, wrong orientation).
void validate(const ProblemInstance& instance);

// Kind-specific encoding:
//   Tsp                    permutation of cities 1..n-1 (city 0 fixed)
//   MaxKColorableSubgraph  color index per vertex, length n
//   MaxCut                 bit per vertex, length n
//   MaxKVertexCover        strictly increasing chosen vertices, length k
struct Solution {
    std::vector<int> x;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 200'000'000ull;
inline constexpr int kGenerationRetryBudget = 10'000;

// n-city TSP with coordinates uniform in [0,1]^2, Euclidean distances.
ProblemInstance gen_tsp(int n, std::uint64_t seed);

// Seeded random graph instance. MaxKColorableSubgraph rejection-samples until
// the enumerated optimum equals |E| (the graph is k-colorable).
ProblemInstance gen_graph_instance(ProblemKind kind, int n, int k, const EdgeRule& rule,
                                   std::uint64_t seed);

bool is_feasible(const ProblemInstance& instance, const Solution& solution);

double objective_value(const ProblemInstance& instance, const Solution& solution);

// |F| for the instance kind: (n-1)!, k^n, 2^n, or C(n,k).
std::uint64_t feasible_count(const ProblemInstance& instance);

// Solution at `index` in the deterministic enumeration order (unranking).
Solution solution_at(const ProblemInstance& instance, std::uint64_t index);

// Visits feasible solutions with indices [begin, end) in enumeration order.
void for_each_feasible_in(const ProblemInstance& instance, std::uint64_t begin, std::uint64_t end,
                          const std::function<void(const Solution&, double)>& fn);

// Visits every feasible solution exactly once; throws CapacityError when
// |F| exceeds `cap`.
void for_each_feasible(const ProblemInstance& instance,
                       const std::function<void(const Solution&, double)>& fn,
                       std::uint64_t cap = kDefaultEnumerationCap);

} // namespace gmq
