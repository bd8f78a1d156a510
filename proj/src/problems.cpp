#include "gmq/problems.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gmq/errors.hpp"
#include "gmq/rng.hpp"

namespace gmq {
namespace {

// Counts computed in 128 bits so oversized spaces are reported, not wrapped.
unsigned __int128 feasible_count_wide(const ProblemInstance& inst) {
    switch (inst.kind) {
        case ProblemKind::Tsp: {
            unsigned __int128 f = 1;
            for (int i = 2; i <= inst.n - 1; ++i) f *= i;
            return f;
        }
        case ProblemKind::MaxKColorableSubgraph: {
            unsigned __int128 f = 1;
            for (int i = 0; i < inst.n; ++i) f *= inst.k;
            return f;
        }
        case ProblemKind::MaxCut:
            return static_cast<unsigned __int128>(1) << inst.n;
        case ProblemKind::MaxKVertexCover: {
            // C(n, k) without overflow at these sizes.
            unsigned __int128 f = 1;
            for (int i = 1; i <= inst.k; ++i) {
                f = f * static_cast<unsigned __int128>(inst.n - inst.k + i) / i;
            }
            return f;
        }
    }
    return 0;
}

double wide_to_double(unsigned __int128 x) {
    return static_cast<double>(static_cast<long double>(x));
}

std::vector<std::pair<int, int>> erdos_renyi_edges(int n, double prob, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.unit() < prob) edges.emplace_back(i, j);
        }
    }
    return edges;
}

// Pairing / configuration model with rejection of loops and multi-edges.
std::vector<std::pair<int, int>> regular_edges(int n, int degree, Rng& rng) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * degree);
    for (int attempt = 0; attempt < kGenerationRetryBudget; ++attempt) {
        stubs.clear();
        for (int v = 0; v < n; ++v) {
            for (int d = 0; d < degree; ++d) stubs.push_back(v);
        }
        rng.shuffle(stubs);
        std::set<std::pair<int, int>> edges;
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                simple = false;
                break;
            }
            if (u > v) std::swap(u, v);
            if (!edges.insert({u, v}).second) {
                simple = false;
                break;
            }
        }
        if (simple) return {edges.begin(), edges.end()};
    }
    throw GenerationError("regular graph generation failed: simple-graph retry budget exhausted",
                          kGenerationRetryBudget);
}

// Exists a proper k-coloring? Exact enumeration with early exit; vertex 0 is
// pinned to color 0 (color symmetry), which only prunes symmetric copies.
bool has_proper_coloring(int n, int k, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> color(n, 0);
    const std::uint64_t count = [&] {
        std::uint64_t c = 1;
        for (int i = 1; i < n; ++i) c *= static_cast<std::uint64_t>(k);
        return c;
    }();
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        std::uint64_t rest = idx;
        for (int v = 1; v < n; ++v) {
            color[v] = static_cast<int>(rest % k);
            rest /= k;
        }
        bool proper = true;
        for (const auto& [u, v] : edges) {
            if (color[u] == color[v]) {
                proper = false;
                break;
            }
        }
        if (proper) return true;
    }
    return false;
}

int tsp_cities(const ProblemInstance& inst) { return inst.n; }

// Canonical tour length: sum the edge weights sorted by normalized endpoint
// pair, so a tour and its reversal produce bitwise-identical doubles.
double tsp_tour_length(const ProblemInstance& inst, const std::vector<int>& perm) {
    const int n = tsp_cities(inst);
    thread_local std::vector<std::pair<int, int>> tour_edges;
    tour_edges.clear();
    tour_edges.reserve(static_cast<std::size_t>(n));
    int prev = 0;
    for (int i = 0; i < n - 1; ++i) {
        int city = perm[i];
        tour_edges.emplace_back(std::min(prev, city), std::max(prev, city));
        prev = city;
    }
    tour_edges.emplace_back(0, prev);
    std::sort(tour_edges.begin(), tour_edges.end());
    double len = 0.0;
    for (const auto& [u, v] : tour_edges) len += inst.w[u][v];
    return len;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

} // namespace

std::string kind_name(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Tsp: return "tsp";
        case ProblemKind::MaxKColorableSubgraph: return "max-k-colorable-subgraph";
        case ProblemKind::MaxCut: return "max-cut";
        case ProblemKind::MaxKVertexCover: return "max-k-vertex-cover";
    }
    throw ValidationError("unknown problem kind");
}

ProblemKind kind_from_name(const std::string& name) {
    if (name == "tsp") return ProblemKind::Tsp;
    if (name == "max-k-colorable-subgraph" || name == "mkcs") return ProblemKind::MaxKColorableSubgraph;
    if (name == "max-cut" || name == "maxcut") return ProblemKind::MaxCut;
    if (name == "max-k-vertex-cover" || name == "mkvc") return ProblemKind::MaxKVertexCover;
    throw ValidationError("unknown problem kind: " + name);
}

EdgeRule default_edge_rule(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::MaxCut: return EdgeRule::regular(3);
        case ProblemKind::MaxKVertexCover: return EdgeRule::erdos_renyi(0.5);
        case ProblemKind::MaxKColorableSubgraph: return EdgeRule::erdos_renyi(0.5);
        case ProblemKind::Tsp: break;
    }
    throw ValidationError("no edge rule for this kind");
}

std::string ProblemInstance::id() const {
    std::ostringstream os;
    switch (kind) {
        case ProblemKind::Tsp: os << "tsp"; break;
        case ProblemKind::MaxKColorableSubgraph: os << "mkcs"; break;
        case ProblemKind::MaxCut: os << "maxcut"; break;
        case ProblemKind::MaxKVertexCover: os << "mkvc"; break;
    }
    os << "-n" << n;
    if (kind == ProblemKind::MaxKColorableSubgraph || kind == ProblemKind::MaxKVertexCover) {
        os << "-k" << k;
    }
    os << "-s" << seed;
    return os.str();
}

void validate(const ProblemInstance& inst) {
    if (inst.kind == ProblemKind::Tsp) {
        require(inst.n >= 3, "tsp: invalid size, need n >= 3");
        require(inst.orientation == Orientation::Minimize, "tsp: orientation must be minimize");
        require(inst.w.size() == static_cast<std::size_t>(inst.n), "tsp: matrix size mismatch");
        for (int i = 0; i < inst.n; ++i) {
            require(inst.w[i].size() == static_cast<std::size_t>(inst.n), "tsp: matrix row size mismatch");
            require(inst.w[i][i] == 0.0, "tsp: nonzero diagonal");
            for (int j = 0; j < inst.n; ++j) {
                require(inst.w[i][j] >= 0.0, "tsp: negative distance");
                require(inst.w[i][j] == inst.w[j][i], "tsp: asymmetric matrix");
            }
        }
        return;
    }
    require(inst.n >= 1, "graph: invalid size");
    require(inst.orientation == Orientation::Maximize, "graph: orientation must be maximize");
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : inst.edges) {
        require(u >= 0 && v >= 0 && u < inst.n && v < inst.n, "graph: vertex out of range");
        require(u != v, "graph: loop edge");
        require(u < v, "graph: edge endpoints not normalized");
        require(seen.insert({u, v}).second, "graph: duplicate edge");
    }
    if (inst.kind == ProblemKind::MaxKVertexCover) {
        require(inst.k > 0 && inst.k < inst.n, "max-k-vertex-cover: invalid size, need 0 < k < n");
    } else if (inst.kind == ProblemKind::MaxKColorableSubgraph) {
        require(inst.k >= 2, "max-k-colorable-subgraph: invalid size, need k >= 2");
    }
}

ProblemInstance gen_tsp(int n, std::uint64_t seed) {
    if (n < 3) throw ValidationError("gen_tsp: invalid size, need n >= 3");
    Rng rng(mix_seed(seed, {0x7451ull, static_cast<std::uint64_t>(n)}));
    std::vector<std::pair<double, double>> pts(n);
    for (auto& [x, y] : pts) {
        x = rng.unit();
        y = rng.unit();
    }
    ProblemInstance inst;
    inst.kind = ProblemKind::Tsp;
    inst.n = n;
    inst.orientation = Orientation::Minimize;
    inst.seed = seed;
    inst.w.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = pts[i].first - pts[j].first;
            const double dy = pts[i].second - pts[j].second;
            const double d = std::sqrt(dx * dx + dy * dy);
            inst.w[i][j] = d;
            inst.w[j][i] = d;
        }
    }
    validate(inst);
    return inst;
}

ProblemInstance gen_graph_instance(ProblemKind kind, int n, int k, const EdgeRule& rule,
                                   std::uint64_t seed) {
    if (kind == ProblemKind::Tsp) throw ValidationError("gen_graph_instance: not a graph kind");
    if (n < 2) throw ValidationError("gen_graph_instance: invalid size, need n >= 2");
    if (kind == ProblemKind::MaxKVertexCover && (k <= 0 || k >= n)) {
        throw ValidationError("gen_graph_instance: invalid size, need 0 < k < n");
    }
    if (kind == ProblemKind::MaxKColorableSubgraph && k < 2) {
        throw ValidationError("gen_graph_instance: invalid size, need k >= 2");
    }
    if (rule.kind == EdgeRule::Kind::Regular) {
        if (rule.degree <= 0 || rule.degree >= n) {
            throw ValidationError("gen_graph_instance: invalid degree");
        }
        if ((static_cast<long long>(n) * rule.degree) % 2 != 0) {
            throw ValidationError("gen_graph_instance: invalid size, n * degree must be even");
        }
    } else {
        if (rule.prob < 0.0 || rule.prob > 1.0) {
            throw ValidationError("gen_graph_instance: edge probability out of [0,1]");
        }
    }

    ProblemInstance inst;
    inst.kind = kind;
    inst.n = n;
    inst.k = (kind == ProblemKind::MaxCut) ? 0 : k;
    inst.orientation = Orientation::Maximize;
    inst.seed = seed;

    Rng rng(mix_seed(seed, {0x6772ull, static_cast<std::uint64_t>(kind),
                            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)}));

    if (kind == ProblemKind::MaxKColorableSubgraph) {
        // Keep only graphs whose optimum is the graph itself, i.e. properly
        // k-colorable; checked by exact enumeration over colorings.
        for (int attempt = 1; attempt <= kGenerationRetryBudget; ++attempt) {
            auto edges = rule.kind == EdgeRule::Kind::ErdosRenyi
                             ? erdos_renyi_edges(n, rule.prob, rng)
                             : regular_edges(n, rule.degree, rng);
            std::sort(edges.begin(), edges.end());
            if (has_proper_coloring(n, k, edges)) {
                inst.edges = std::move(edges);
                validate(inst);
                return inst;
            }
        }
        throw GenerationError("max-k-colorable-subgraph generation failed: no k-colorable graph found",
                              kGenerationRetryBudget);
    }

    auto edges = rule.kind == EdgeRule::Kind::ErdosRenyi ? erdos_renyi_edges(n, rule.prob, rng)
                                                         : regular_edges(n, rule.degree, rng);
    std::sort(edges.begin(), edges.end());
    inst.edges = std::move(edges);
    validate(inst);
    return inst;
}

bool is_feasible(const ProblemInstance& inst, const Solution& sol) {
    switch (inst.kind) {
        case ProblemKind::Tsp: {
            if (sol.x.size() != static_cast<std::size_t>(inst.n - 1)) return false;
            std::vector<bool> seen(inst.n, false);
            for (int c : sol.x) {
                if (c < 1 || c >= inst.n || seen[c]) return false;
                seen[c] = true;
            }
            return true;
        }
        case ProblemKind::MaxKColorableSubgraph: {
            if (sol.x.size() != static_cast<std::size_t>(inst.n)) return false;
            for (int c : sol.x) {
                if (c < 0 || c >= inst.k) return false;
            }
            return true;
        }
        case ProblemKind::MaxCut: {
            if (sol.x.size() != static_cast<std::size_t>(inst.n)) return false;
            for (int b : sol.x) {
                if (b != 0 && b != 1) return false;
            }
            return true;
        }
        case ProblemKind::MaxKVertexCover: {
            if (sol.x.size() != static_cast<std::size_t>(inst.k)) return false;
            for (std::size_t i = 0; i < sol.x.size(); ++i) {
                if (sol.x[i] < 0 || sol.x[i] >= inst.n) return false;
                if (i > 0 && sol.x[i] <= sol.x[i - 1]) return false;
            }
            return true;
        }
    }
    return false;
}

double objective_value(const ProblemInstance& inst, const Solution& sol) {
    if (!is_feasible(inst, sol)) {
        throw ValidationError("objective_value: encoding does not match the instance kind");
    }
    switch (inst.kind) {
        case ProblemKind::Tsp:
            return tsp_tour_length(inst, sol.x);
        case ProblemKind::MaxKColorableSubgraph: {
            int conflicts = 0;
            for (const auto& [u, v] : inst.edges) {
                conflicts += (sol.x[u] == sol.x[v]);
            }
            return static_cast<double>(static_cast<int>(inst.edges.size()) - conflicts);
        }
        case ProblemKind::MaxCut: {
            int cut = 0;
            for (const auto& [u, v] : inst.edges) {
                cut += (sol.x[u] != sol.x[v]);
            }
            return static_cast<double>(cut);
        }
        case ProblemKind::MaxKVertexCover: {
            std::uint64_t mask = 0;
            for (int v : sol.x) mask |= (1ull << v);
            int covered = 0;
            for (const auto& [u, v] : inst.edges) {
                covered += ((mask >> u) & 1ull) | ((mask >> v) & 1ull);
            }
            return static_cast<double>(covered);
        }
    }
    throw ValidationError("objective_value: unknown kind");
}

std::uint64_t feasible_count(const ProblemInstance& inst) {
    validate(inst);
    const unsigned __int128 wide = feasible_count_wide(inst);
    if (wide > ~std::uint64_t{0}) {
        throw CapacityError("feasible space exceeds 64-bit count", wide_to_double(wide));
    }
    return static_cast<std::uint64_t>(wide);
}

Solution solution_at(const ProblemInstance& inst, std::uint64_t index) {
    Solution sol;
    switch (inst.kind) {
        case ProblemKind::Tsp: {
            // Lexicographic permutation unranking (factorial number system).
            const int m = inst.n - 1;
            std::vector<int> pool(m);
            for (int i = 0; i < m; ++i) pool[i] = i + 1;
            std::vector<std::uint64_t> fact(m, 1);
            for (int i = 1; i < m; ++i) fact[i] = fact[i - 1] * static_cast<std::uint64_t>(i);
            sol.x.reserve(m);
            for (int i = m - 1; i >= 0; --i) {
                const std::uint64_t f = fact[i];
                const std::size_t pos = static_cast<std::size_t>(index / f);
                index %= f;
                sol.x.push_back(pool[pos]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pos));
            }
            return sol;
        }
        case ProblemKind::MaxKColorableSubgraph: {
            sol.x.resize(inst.n);
            for (int v = 0; v < inst.n; ++v) {
                sol.x[v] = static_cast<int>(index % static_cast<std::uint64_t>(inst.k));
                index /= static_cast<std::uint64_t>(inst.k);
            }
            return sol;
        }
        case ProblemKind::MaxCut: {
            sol.x.resize(inst.n);
            for (int v = 0; v < inst.n; ++v) sol.x[v] = static_cast<int>((index >> v) & 1ull);
            return sol;
        }
        case ProblemKind::MaxKVertexCover: {
            // Lexicographic combination unranking.
            sol.x.reserve(inst.k);
            std::uint64_t rank = index;
            int next = 0;
            for (int slot = 0; slot < inst.k; ++slot) {
                for (int v = next; v < inst.n; ++v) {
                    // combinations starting with v at this slot
                    const int rem_slots = inst.k - slot - 1;
                    unsigned __int128 block = 1;
                    for (int i = 1; i <= rem_slots; ++i) {
                        block = block * static_cast<unsigned __int128>(inst.n - 1 - v - rem_slots + i) / i;
                    }
                    if (rank < static_cast<std::uint64_t>(block)) {
                        sol.x.push_back(v);
                        next = v + 1;
                        break;
                    }
                    rank -= static_cast<std::uint64_t>(block);
                }
            }
            return sol;
        }
    }
    throw ValidationError("solution_at: unknown kind");
}

void for_each_feasible_in(const ProblemInstance& inst, std::uint64_t begin, std::uint64_t end,
                          const std::function<void(const Solution&, double)>& fn) {
    if (begin >= end) return;
    Solution sol = solution_at(inst, begin);
    switch (inst.kind) {
        case ProblemKind::Tsp: {
            for (std::uint64_t i = begin; i < end; ++i) {
                fn(sol, objective_value(inst, sol));
                std::next_permutation(sol.x.begin(), sol.x.end());
            }
            return;
        }
        case ProblemKind::MaxKColorableSubgraph: {
            for (std::uint64_t i = begin; i < end; ++i) {
                fn(sol, objective_value(inst, sol));
                for (int v = 0; v < inst.n; ++v) { // mixed-radix increment
                    if (++sol.x[v] < inst.k) break;
                    sol.x[v] = 0;
                }
            }
            return;
        }
        case ProblemKind::MaxCut: {
            for (std::uint64_t i = begin; i < end; ++i) {
                fn(sol, objective_value(inst, sol));
                for (int v = 0; v < inst.n; ++v) {
                    if (++sol.x[v] < 2) break;
                    sol.x[v] = 0;
                }
            }
            return;
        }
        case ProblemKind::MaxKVertexCover: {
            for (std::uint64_t i = begin; i < end; ++i) {
                fn(sol, objective_value(inst, sol));
                // next lexicographic combination
                int slot = inst.k - 1;
                while (slot >= 0 && sol.x[slot] == inst.n - inst.k + slot) --slot;
                if (slot < 0) break;
                ++sol.x[slot];
                for (int j = slot + 1; j < inst.k; ++j) sol.x[j] = sol.x[j - 1] + 1;
            }
            return;
        }
    }
}

void for_each_feasible(const ProblemInstance& inst,
                       const std::function<void(const Solution&, double)>& fn, std::uint64_t cap) {
    validate(inst);
    const unsigned __int128 wide = feasible_count_wide(inst);
    if (wide > cap) {
        throw CapacityError("enumeration cap exceeded: |F| = " + std::to_string(wide_to_double(wide)),
                            wide_to_double(wide));
    }
    for_each_feasible_in(inst, 0, static_cast<std::uint64_t>(wide), fn);
}

} // namespace gmq
