#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "gmq/bounds.hpp"
#include "gmq/distribution.hpp"
#include "gmq/errors.hpp"
#include "gmq/rng.hpp"
#include "gmq/simulator.hpp"

using namespace gmq;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemInstance triangle_maxcut() {
    ProblemInstance inst;
    inst.kind = ProblemKind::MaxCut;
    inst.n = 3;
    inst.edges = {{0, 1}, {0, 2}, {1, 2}};
    inst.orientation = Orientation::Maximize;
    return inst;
}

ObjectiveDistribution make_dist(std::vector<double> values, std::vector<std::uint64_t> counts,
                                Orientation orientation = Orientation::Maximize) {
    ObjectiveDistribution d;
    d.values = std::move(values);
    d.counts = std::move(counts);
    for (auto c : d.counts) d.total += c;
    d.orientation = orientation;
    d.provenance = "external";
    return d;
}

// Single-optimum |F| = 4 distribution where a threshold at 0 marks exactly
// the optimal (minimal) class.
ObjectiveDistribution grover4() {
    return make_dist({1.0, 0.0}, {3, 1}, Orientation::Minimize);
}

CircuitParams random_params(int p, Rng& rng, const ObjectiveDistribution& dist) {
    CircuitParams params;
    bool integral = true;
    double vmax = 0.0;
    for (double v : dist.values) {
        vmax = std::max(vmax, std::abs(v));
        if (v != std::floor(v)) integral = false;
    }
    for (int i = 0; i < p; ++i) {
        if (integral || vmax == 0.0) {
            params.gammas.push_back(2.0 * kPi * rng.unit());
        } else {
            params.gammas.push_back((2.0 * rng.unit() - 1.0) * kPi / vmax);
        }
        params.betas.push_back(2.0 * kPi * rng.unit());
    }
    return params;
}

// Class-summed reference probabilities, matched to the compressed classes.
std::vector<double> class_probabilities(const ProblemInstance& inst,
                                        const ObjectiveDistribution& dist,
                                        const std::vector<double>& reference_probs) {
    std::vector<double> sums(dist.size(), 0.0);
    std::size_t f = 0;
    const bool bucketed = inst.kind == ProblemKind::Tsp;
    for_each_feasible(inst, [&](const Solution&, double value) {
        const auto idx = class_index_of(dist, value, bucketed);
        REQUIRE(idx >= 0);
        sums[static_cast<std::size_t>(idx)] += reference_probs[f++];
    });
    return sums;
}

} // namespace

TEST_CASE("init_state is the uniform superposition") {
    const auto dist = distribution_of(triangle_maxcut());
    const auto state = init_state(dist);
    for (const auto& a : state.amps) {
        CHECK(std::abs(a - std::complex<double>(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);
    }
    const auto m = metrics_of(state);
    CHECK(m.lambda == doctest::Approx(rho(dist)).epsilon(1e-14));
    CHECK(*m.alpha == doctest::Approx(mu_r(dist, 1.0)).epsilon(1e-14));

    const auto single = init_state(make_dist({2.0}, {4}));
    CHECK(single.amps[0].real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("phase separator identities") {
    const auto dist = distribution_of(triangle_maxcut());
    const auto state = init_state(dist);

    auto same = apply_phase(state, 0.0, PhaseFunction::objective());
    CHECK(same.amps == state.amps);

    // integer objective values: gamma = 2*pi is the identity
    auto wrapped = apply_phase(state, 2.0 * kPi, PhaseFunction::objective());
    for (std::size_t j = 0; j < wrapped.amps.size(); ++j) {
        CHECK(std::abs(wrapped.amps[j] - state.amps[j]) < 1e-14);
    }

    // threshold below every value: C == 0 everywhere
    auto untouched = apply_phase(state, 1.3, PhaseFunction::threshold(-1.0));
    CHECK(untouched.amps == state.amps);
}

TEST_CASE("mixer identities and the beta = pi reflection") {
    const auto dist = distribution_of(triangle_maxcut());
    const auto state = init_state(dist);

    auto zero = apply_mixer(state, 0.0);
    CHECK(zero.amps == state.amps);

    auto full = apply_mixer(state, 2.0 * kPi);
    for (std::size_t j = 0; j < full.amps.size(); ++j) {
        CHECK(std::abs(full.amps[j] - state.amps[j]) < 1e-14);
    }

    // |F> is the mixer's fixed direction: on the uniform state beta = pi flips the sign
    auto flipped = apply_mixer(state, kPi);
    for (std::size_t j = 0; j < flipped.amps.size(); ++j) {
        CHECK(std::abs(flipped.amps[j] + state.amps[j]) < 1e-14);
    }
}

TEST_CASE("depth zero reproduces the uniform metrics") {
    const auto dist = distribution_of(triangle_maxcut());
    CircuitParams params;
    const auto [state, metrics] = run_circuit(dist, params);
    CHECK(metrics.lambda == doctest::Approx(rho(dist)).epsilon(1e-14));
    CHECK(metrics.tts == doctest::Approx(1.0 / rho(dist)).epsilon(1e-14));
}

TEST_CASE("single Grover iteration is exact at |F| = 4") {
    const auto dist = grover4();
    CircuitParams params;
    params.gammas = {kPi};
    params.betas = {kPi};
    params.phase_fn = PhaseFunction::threshold(0.0);
    const auto [state, metrics] = run_circuit(dist, params);
    CHECK(std::abs(metrics.lambda - 1.0) < 1e-12);
}

TEST_CASE("compressed evolver matches run_circuit") {
    const auto dist = distribution_of(triangle_maxcut());
    CircuitParams params;
    params.gammas = {0.3, 1.7};
    params.betas = {1.1, 2.9};
    const auto [state, metrics] = run_circuit(dist, params);
    CompressedEvolver evolver(dist, params.phase_fn);
    const auto fast = evolver.run(params.gammas, params.betas);
    CHECK(fast.lambda == doctest::Approx(metrics.lambda).epsilon(1e-14));
    CHECK(fast.expectation == doctest::Approx(metrics.expectation).epsilon(1e-14));
}

TEST_CASE("reference simulation at depth zero is uniform") {
    const auto inst = triangle_maxcut();
    CircuitParams params;
    const auto probs = run_reference(inst, params);
    CHECK(probs.size() == 8);
    for (double pr : probs) CHECK(pr == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("reference respects its capacity cap") {
    CircuitParams params;
    CHECK_THROWS_AS(run_reference(gen_tsp(7, 1), params, 500), CapacityError);
}

TEST_CASE("compressed and reference paths agree") {
    Rng rng(501);
    const std::vector<ProblemInstance> fleet = {
        triangle_maxcut(),
        gen_graph_instance(ProblemKind::MaxCut, 8, 0, EdgeRule::regular(3), 2),
        gen_graph_instance(ProblemKind::MaxKVertexCover, 9, 4, EdgeRule::erdos_renyi(0.5), 3),
        gen_graph_instance(ProblemKind::MaxKColorableSubgraph, 5, 3, EdgeRule::erdos_renyi(0.4), 4),
        gen_tsp(6, 7),
    };
    for (const auto& inst : fleet) {
        const auto dist = distribution_of(inst);
        for (int trial = 0; trial < 4; ++trial) {
            const int p = 1 + static_cast<int>(rng.below(9));
            const auto params = random_params(p, rng, dist);
            const auto reference = run_reference(inst, params);
            const auto [state, metrics] = run_circuit(dist, params);

            const auto class_sums = class_probabilities(inst, dist, reference);
            for (std::size_t j = 0; j < dist.size(); ++j) {
                const double compressed =
                    static_cast<double>(dist.counts[j]) * std::norm(state.amps[j]);
                CHECK(std::abs(compressed - class_sums[j]) < 1e-10);
            }

            // equal objective value -> identical probability, to 1e-12
            std::map<double, double> first_seen;
            std::size_t f = 0;
            for_each_feasible(inst, [&](const Solution&, double value) {
                const auto [it, inserted] = first_seen.try_emplace(value, reference[f]);
                if (!inserted) CHECK(std::abs(reference[f] - it->second) < 1e-12);
                ++f;
            });
        }
    }
}

TEST_CASE("norm is conserved across deep random circuits") {
    Rng rng(77);
    const auto dist = distribution_of(gen_tsp(6, 3));
    for (int trial = 0; trial < 10; ++trial) {
        const auto params = random_params(9, rng, dist);
        const auto [state, metrics] = run_circuit(dist, params);
        CHECK(std::abs(state.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("objective shifts are pure global phase") {
    Rng rng(88);
    const auto base = distribution_of(triangle_maxcut());
    auto shifted = base;
    for (double& v : shifted.values) v += 7.25;
    for (int trial = 0; trial < 5; ++trial) {
        const auto params = random_params(3, rng, base);
        const auto [s1, m1] = run_circuit(base, params);
        const auto [s2, m2] = run_circuit(shifted, params);
        for (std::size_t j = 0; j < base.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
}

TEST_CASE("two-pi periodicity in beta, and in gamma for integer values") {
    Rng rng(99);
    const auto dist = distribution_of(triangle_maxcut());
    for (int trial = 0; trial < 5; ++trial) {
        auto params = random_params(3, rng, dist);
        const auto [s1, m1] = run_circuit(dist, params);
        auto shifted = params;
        shifted.betas[1] += 2.0 * kPi;
        shifted.gammas[2] += 2.0 * kPi; // integer objective values
        const auto [s2, m2] = run_circuit(dist, shifted);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
}

TEST_CASE("per-solution probabilities respect the basis bound") {
    Rng rng(404);
    const auto inst = gen_graph_instance(ProblemKind::MaxKVertexCover, 10, 5,
                                         EdgeRule::erdos_renyi(0.5), 6);
    const auto dist = distribution_of(inst);
    for (int p = 1; p <= 5; ++p) {
        const auto params = random_params(p, rng, dist);
        const auto probs = run_reference(inst, params);
        const double cap = basis_prob_ub(p, dist.total) + 1e-9;
        for (double pr : probs) CHECK(pr < cap);
    }
}

TEST_CASE("mixer-trivial reduction merges gamma forward") {
    const auto dist = distribution_of(triangle_maxcut());
    CircuitParams params;
    params.gammas = {0.4, 0.9};
    params.betas = {1.3, 2.0 * kPi};
    SUBCASE("last layer drops entirely") {
        const auto reduced = reduced_equivalent(params, 1, ReductionMode::MixerTrivial);
        CHECK(reduced.depth() == 1);
        CHECK(reduced.gammas == std::vector<double>{0.4});
        CHECK(reduced.betas == std::vector<double>{1.3});
        const auto [s1, m1] = run_circuit(dist, params);
        const auto [s2, m2] = run_circuit(dist, reduced);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
    SUBCASE("inner layer merges into the next phase") {
        CircuitParams inner;
        inner.gammas = {0.4, 0.9};
        inner.betas = {2.0 * kPi, 1.3};
        const auto reduced = reduced_equivalent(inner, 0, ReductionMode::MixerTrivial);
        CHECK(reduced.depth() == 1);
        CHECK(reduced.gammas == std::vector<double>{0.9 + 0.4});
        CHECK(reduced.betas == std::vector<double>{1.3});
        const auto [s1, m1] = run_circuit(dist, inner);
        const auto [s2, m2] = run_circuit(dist, reduced);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
}

TEST_CASE("phase-trivial reduction merges beta backward") {
    const auto dist = distribution_of(triangle_maxcut());
    SUBCASE("first layer becomes a global phase") {
        CircuitParams params;
        params.gammas = {0.0, 0.9};
        params.betas = {1.1, 1.3};
        const auto reduced = reduced_equivalent(params, 0, ReductionMode::PhaseTrivial);
        CHECK(reduced.depth() == 1);
        CHECK(reduced.gammas == std::vector<double>{0.9});
        CHECK(reduced.betas == std::vector<double>{1.3});
        const auto [s1, m1] = run_circuit(dist, params);
        const auto [s2, m2] = run_circuit(dist, reduced);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
    SUBCASE("inner layer folds beta into the previous mixer") {
        CircuitParams params;
        params.gammas = {0.7, 0.0, 0.9};
        params.betas = {1.1, 0.6, 1.3};
        const auto reduced = reduced_equivalent(params, 1, ReductionMode::PhaseTrivial);
        CHECK(reduced.depth() == 2);
        CHECK(reduced.gammas == std::vector<double>{0.7, 0.9});
        CHECK(reduced.betas == std::vector<double>{1.1 + 0.6, 1.3});
        const auto [s1, m1] = run_circuit(dist, params);
        const auto [s2, m2] = run_circuit(dist, reduced);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
    SUBCASE("gamma * value multiples of two pi count as trivial") {
        // integer values: gamma = 2*pi zeroes every phase
        const std::vector<double> phase_values = {2.0, 0.0};
        CircuitParams params;
        params.gammas = {2.0 * kPi, 0.9};
        params.betas = {1.1, 1.3};
        const auto reduced =
            reduced_equivalent(params, 0, ReductionMode::PhaseTrivial, &phase_values);
        const auto [s1, m1] = run_circuit(dist, params);
        const auto [s2, m2] = run_circuit(dist, reduced);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            CHECK(std::abs(std::norm(s1.amps[j]) - std::norm(s2.amps[j])) < 1e-12);
        }
    }
}

TEST_CASE("depth-one trivial mixer reduces to the uniform state") {
    const auto dist = distribution_of(triangle_maxcut());
    CircuitParams params;
    params.gammas = {0.8};
    params.betas = {2.0 * kPi};
    const auto reduced = reduced_equivalent(params, 0, ReductionMode::MixerTrivial);
    CHECK(reduced.depth() == 0);
    const auto [state, metrics] = run_circuit(dist, reduced);
    CHECK(metrics.lambda == doctest::Approx(rho(dist)).epsilon(1e-14));
}

TEST_CASE("reduction preconditions are enforced") {
    CircuitParams params;
    params.gammas = {0.4, 0.9};
    params.betas = {1.3, 1.9};
    CHECK_THROWS_AS(reduced_equivalent(params, 1, ReductionMode::MixerTrivial), ValidationError);
    CHECK_THROWS_AS(reduced_equivalent(params, 0, ReductionMode::PhaseTrivial), ValidationError);
    CHECK_THROWS_AS(reduced_equivalent(params, 5, ReductionMode::MixerTrivial), ValidationError);
    const std::vector<double> phase_values = {1.0, 0.5};
    CHECK_THROWS_AS(reduced_equivalent(params, 0, ReductionMode::PhaseTrivial, &phase_values),
                    ValidationError);
}
