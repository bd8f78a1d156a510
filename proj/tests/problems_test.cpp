#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gmq/errors.hpp"
#include "gmq/problems.hpp"

using namespace gmq;

namespace {

ProblemInstance triangle_maxcut() {
    ProblemInstance inst;
    inst.kind = ProblemKind::MaxCut;
    inst.n = 3;
    inst.edges = {{0, 1}, {0, 2}, {1, 2}};
    inst.orientation = Orientation::Maximize;
    return inst;
}

} // namespace

TEST_CASE("gen_tsp produces a symmetric zero-diagonal matrix") {
    const auto inst = gen_tsp(7, 1);
    CHECK(inst.n == 7);
    CHECK(inst.w.size() == 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(inst.w[i][i] == 0.0);
        for (int j = 0; j < 7; ++j) {
            CHECK(inst.w[i][j] == inst.w[j][i]);
            if (i != j) CHECK(inst.w[i][j] > 0.0);
        }
    }
    CHECK(inst.orientation == Orientation::Minimize);
}

TEST_CASE("gen_tsp smallest case has two tours") {
    const auto inst = gen_tsp(3, 0);
    CHECK(feasible_count(inst) == 2);
}

TEST_CASE("gen_tsp distances are pairwise distinct") {
    const auto inst = gen_tsp(5, 42);
    std::vector<double> ds;
    for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) ds.push_back(inst.w[i][j]);
    }
    std::sort(ds.begin(), ds.end());
    CHECK(std::adjacent_find(ds.begin(), ds.end()) == ds.end());
}

TEST_CASE("gen_tsp rejects tiny sizes") {
    CHECK_THROWS_AS(gen_tsp(2, 0), ValidationError);
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = gen_tsp(6, 9);
    const auto b = gen_tsp(6, 9);
    CHECK(a.w == b.w);
    const auto g1 = gen_graph_instance(ProblemKind::MaxKVertexCover, 10, 5,
                                       EdgeRule::erdos_renyi(0.5), 3);
    const auto g2 = gen_graph_instance(ProblemKind::MaxKVertexCover, 10, 5,
                                       EdgeRule::erdos_renyi(0.5), 3);
    CHECK(g1.edges == g2.edges);
    const auto g3 = gen_graph_instance(ProblemKind::MaxKVertexCover, 10, 5,
                                       EdgeRule::erdos_renyi(0.5), 4);
    CHECK(g1.edges != g3.edges);
}

TEST_CASE("3-regular generation yields a simple regular graph") {
    const auto inst = gen_graph_instance(ProblemKind::MaxCut, 16, 0, EdgeRule::regular(3), 7);
    CHECK(inst.edges.size() == 24); // 16 * 3 / 2
    std::vector<int> degree(16, 0);
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : inst.edges) {
        CHECK(u < v);
        CHECK(seen.insert({u, v}).second);
        ++degree[u];
        ++degree[v];
    }
    for (int d : degree) CHECK(d == 3);
}

TEST_CASE("vertex cover feasible space is the binomial coefficient") {
    const auto inst = gen_graph_instance(ProblemKind::MaxKVertexCover, 10, 5,
                                         EdgeRule::erdos_renyi(0.5), 3);
    CHECK(feasible_count(inst) == 252);
    std::uint64_t visited = 0;
    for_each_feasible(inst, [&](const Solution& s, double) {
        CHECK(is_feasible(inst, s));
        ++visited;
    });
    CHECK(visited == 252);
}

TEST_CASE("colorable-subgraph acceptance is confirmed by brute force") {
    const auto inst = gen_graph_instance(ProblemKind::MaxKColorableSubgraph, 8, 3,
                                         EdgeRule::erdos_renyi(0.4), 11);
    double best = -1.0;
    for_each_feasible(inst, [&](const Solution&, double value) { best = std::max(best, value); });
    CHECK(best == static_cast<double>(inst.edges.size()));
}

TEST_CASE("generation parameter validation") {
    CHECK_THROWS_AS(gen_graph_instance(ProblemKind::MaxCut, 5, 0, EdgeRule::regular(3), 1),
                    ValidationError); // odd n * degree
    CHECK_THROWS_AS(gen_graph_instance(ProblemKind::MaxKVertexCover, 6, 6,
                                       EdgeRule::erdos_renyi(0.5), 1),
                    ValidationError); // k >= n
    CHECK_THROWS_AS(gen_graph_instance(ProblemKind::MaxKColorableSubgraph, 6, 1,
                                       EdgeRule::erdos_renyi(0.5), 1),
                    ValidationError); // k < 2
    CHECK_THROWS_AS(gen_graph_instance(ProblemKind::Tsp, 6, 0, EdgeRule::erdos_renyi(0.5), 1),
                    ValidationError);
}

TEST_CASE("max-cut objective on the triangle") {
    const auto inst = triangle_maxcut();
    CHECK(objective_value(inst, Solution{{0, 1, 0}}) == 2.0);
    // brute force over all 8 assignments: cut sizes are 0 or 2 on K3
    for_each_feasible(inst, [&](const Solution& s, double value) {
        const int ones = std::count(s.x.begin(), s.x.end(), 1);
        CHECK(value == ((ones == 0 || ones == 3) ? 0.0 : 2.0));
    });
}

TEST_CASE("vertex cover objective on the triangle") {
    ProblemInstance inst = triangle_maxcut();
    inst.kind = ProblemKind::MaxKVertexCover;
    inst.k = 2;
    CHECK(objective_value(inst, Solution{{0, 1}}) == 3.0);
}

TEST_CASE("tsp objective with unit distances") {
    ProblemInstance inst;
    inst.kind = ProblemKind::Tsp;
    inst.n = 4;
    inst.orientation = Orientation::Minimize;
    inst.w.assign(4, std::vector<double>(4, 1.0));
    for (int i = 0; i < 4; ++i) inst.w[i][i] = 0.0;
    for_each_feasible(inst, [&](const Solution&, double value) { CHECK(value == 4.0); });
}

TEST_CASE("objective rejects mismatched encodings") {
    const auto inst = triangle_maxcut();
    CHECK_THROWS_AS(objective_value(inst, Solution{{0, 1}}), ValidationError);
    CHECK_THROWS_AS(objective_value(inst, Solution{{0, 2, 0}}), ValidationError);
}

TEST_CASE("enumeration counts match closed forms") {
    CHECK(feasible_count(triangle_maxcut()) == 8);
    CHECK(feasible_count(gen_tsp(5, 1)) == 24);
    const auto cover = gen_graph_instance(ProblemKind::MaxKVertexCover, 6, 3,
                                          EdgeRule::erdos_renyi(0.5), 2);
    CHECK(feasible_count(cover) == 20);
    std::uint64_t visited = 0;
    for_each_feasible(gen_tsp(5, 1), [&](const Solution&, double) { ++visited; });
    CHECK(visited == 24);
}

TEST_CASE("enumeration respects the cap") {
    const auto inst = gen_tsp(8, 1); // 7! = 5040
    CHECK_THROWS_AS(for_each_feasible(inst, [](const Solution&, double) {}, 5000), CapacityError);
}

TEST_CASE("unranking agrees with enumeration order") {
    for (const ProblemInstance& inst :
         {gen_tsp(5, 3), triangle_maxcut(),
          gen_graph_instance(ProblemKind::MaxKVertexCover, 7, 3, EdgeRule::erdos_renyi(0.5), 5),
          gen_graph_instance(ProblemKind::MaxKColorableSubgraph, 4, 3, EdgeRule::erdos_renyi(0.4),
                             5)}) {
        std::uint64_t index = 0;
        for_each_feasible(inst, [&](const Solution& s, double) {
            CHECK(solution_at(inst, index).x == s.x);
            ++index;
        });
        CHECK(index == feasible_count(inst));
    }
}

TEST_CASE("ranged enumeration partitions cover the space once") {
    const auto inst = gen_graph_instance(ProblemKind::MaxKVertexCover, 8, 4,
                                         EdgeRule::erdos_renyi(0.5), 6);
    const std::uint64_t count = feasible_count(inst);
    std::map<std::vector<int>, int> visits;
    for (std::uint64_t split = 0; split <= count; split += 17) {
        visits.clear();
        for_each_feasible_in(inst, 0, split, [&](const Solution& s, double) { ++visits[s.x]; });
        for_each_feasible_in(inst, split, count, [&](const Solution& s, double) { ++visits[s.x]; });
        CHECK(visits.size() == count);
        for (const auto& [_, c] : visits) CHECK(c == 1);
    }
}

TEST_CASE("max-cut objective is invariant under global flip") {
    const auto inst = gen_graph_instance(ProblemKind::MaxCut, 10, 0, EdgeRule::regular(3), 5);
    for_each_feasible(inst, [&](const Solution& s, double value) {
        Solution flipped = s;
        for (int& b : flipped.x) b ^= 1;
        CHECK(objective_value(inst, flipped) == value);
    });
}
