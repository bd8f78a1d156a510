#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gmq/calibrate.hpp"
#include "gmq/problems.hpp"

namespace gmq {

enum class ExperimentId {
    Fig1LambdaVsBound,
    Fig2RhoScaling,
    Fig3LambdaPrediction,
    Fig4AlphaVsBound,
    Fig5MuSurface,
    Fig6MuFit,
    Fig7AlphaPrediction,
    Thm1Witness,
};

std::string experiment_name(ExperimentId id);
ExperimentId experiment_from_name(const std::string& name);

// One problem kind at several sizes; k follows the kind convention
// (colorable subgraph: k = 3; vertex cover: k = n/2).
struct FleetSpec {
    ProblemKind kind = ProblemKind::MaxCut;
    std::vector<int> sizes;
    int instances_per_size = 10;
};

struct ExperimentSpec {
    ExperimentId id = ExperimentId::Fig1LambdaVsBound;
    std::vector<FleetSpec> fleets;
    std::vector<int> depths;
    std::uint64_t seed = 1;
    ObjectiveKind objective = ObjectiveKind::MaxLambda;
    OptimizerConfig optimizer;
    std::filesystem::path out_dir;
    int workers = 1;
    bool force = false;       // overwrite an existing manifest
    bool allow_large = false; // accept sizes beyond the desk-scale limits
    // Thm1Witness knobs.
    int p_max = 9;
    std::uint64_t witness_total = 1000;
    double grid_step = 1e-3;
};

// Desk-scale defaults for each experiment (fleets, depths, objective).
ExperimentSpec default_spec(ExperimentId id, std::filesystem::path out_dir);

// Generates the fleet for one spec entry; instance seeds derive from
// (master_seed, kind, n, index) so fleets are reproducible and independent
// of generation order.
std::vector<ProblemInstance> make_fleet(const FleetSpec& fleet, std::uint64_t master_seed);

// k convention used by fleets.
int fleet_k(ProblemKind kind, int n);

// Runs generate -> enumerate -> optimize -> bound/fit for the spec and
// writes CSV data, model JSON, and a manifest under spec.out_dir. Rerunning
// with the same spec reproduces byte-identical data files.
void run_experiment(const ExperimentSpec& spec);

// Bounded worker pool over [0, count); jobs must be independent. The first
// exception, if any, is rethrown after all workers join.
void parallel_for(int workers, std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace gmq
